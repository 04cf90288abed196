#include "qreg/algebra.hpp"

#include <stdexcept>

namespace qreg {
namespace {

// One product-table cell: an exact Gaussian-unit scalar (re, im both in
// {-1,0,1}) attached to a basis operator, or the zero operator (kind < 0).
struct Cell {
  int re;
  int im;
  int kind;  // index into kTableOps, -1 for zero
};

// Operators keyed by table position; S0 is handled separately as a strict
// two-sided identity and has no row or column here.
constexpr std::array<QubitOp, 7> kTableOps = {QubitOp::P0, QubitOp::P1, QubitOp::A,
                                              QubitOp::Adag, QubitOp::S1, QubitOp::S2,
                                              QubitOp::S3};

constexpr int kP0 = 0, kP1 = 1, kA = 2, kAdag = 3, kS1 = 4, kS2 = 5, kS3 = 6;
constexpr Cell kZero{0, 0, -1};

// row * column products of the seven non-identity basis operators.
constexpr Cell kTable[7][7] = {
    // P0 row
    {{1, 0, kP0}, kZero, {1, 0, kA}, kZero, {1, 0, kA}, {0, 1, kA}, {-1, 0, kP0}},
    // P1 row
    {kZero, {1, 0, kP1}, kZero, {1, 0, kAdag}, {1, 0, kAdag}, {0, -1, kAdag}, {1, 0, kP1}},
    // A row
    {kZero, {1, 0, kA}, kZero, {1, 0, kP0}, {1, 0, kP0}, {0, -1, kP0}, {1, 0, kA}},
    // A+ row
    {{1, 0, kAdag}, kZero, {1, 0, kP1}, kZero, {1, 0, kP1}, {0, 1, kP1}, {-1, 0, kAdag}},
    // s1 row
    {{1, 0, kAdag}, {1, 0, kA}, {1, 0, kP1}, {1, 0, kP0}, {1, 0, -2}, {0, 1, kS3}, {0, -1, kS2}},
    // s2 row
    {{0, -1, kAdag}, {0, 1, kA}, {0, -1, kP1}, {0, 1, kP0}, {0, -1, kS3}, {1, 0, -2}, {0, 1, kS1}},
    // s3 row
    {{-1, 0, kP0}, {1, 0, kP1}, {-1, 0, kA}, {1, 0, kAdag}, {0, 1, kS2}, {0, -1, kS1}, {1, 0, -2}},
};
// kind -2 marks the identity s0, which is not itself a table operator.

int table_index(QubitOp op) {
  switch (op) {
    case QubitOp::P0: return kP0;
    case QubitOp::P1: return kP1;
    case QubitOp::A: return kA;
    case QubitOp::Adag: return kAdag;
    case QubitOp::S1: return kS1;
    case QubitOp::S2: return kS2;
    case QubitOp::S3: return kS3;
    case QubitOp::S0: break;
  }
  throw std::logic_error("s0 has no table row");
}

}  // namespace

const char* qop_name(QubitOp op) {
  switch (op) {
    case QubitOp::P0: return "P0";
    case QubitOp::P1: return "P1";
    case QubitOp::A: return "A";
    case QubitOp::Adag: return "A+";
    case QubitOp::S0: return "s0";
    case QubitOp::S1: return "s1";
    case QubitOp::S2: return "s2";
    case QubitOp::S3: return "s3";
  }
  return "?";
}

bool operator==(const ScaledQubitOp& x, const ScaledQubitOp& y) {
  if (x.op != y.op) return false;
  if (x.is_zero()) return true;
  return x.coeff.real() == y.coeff.real() && x.coeff.imag() == y.coeff.imag();
}

ScaledQubitOp qop_mul(const ScaledQubitOp& x, const ScaledQubitOp& y) {
  if (x.is_zero() || y.is_zero()) return ScaledQubitOp::zero();
  const c64 coeff = x.coeff * y.coeff;
  if (*x.op == QubitOp::S0) return {coeff, *y.op};
  if (*y.op == QubitOp::S0) return {coeff, *x.op};
  const Cell& cell = kTable[table_index(*x.op)][table_index(*y.op)];
  if (cell.kind == -1) return ScaledQubitOp::zero();
  const QubitOp kind = cell.kind == -2 ? QubitOp::S0 : kTableOps[static_cast<std::size_t>(cell.kind)];
  return {coeff * c64(cell.re, cell.im), kind};
}

bool operator==(const Mat2& x, const Mat2& y) {
  for (std::size_t k = 0; k < 4; ++k) {
    if (x.m[k].real() != y.m[k].real() || x.m[k].imag() != y.m[k].imag()) return false;
  }
  return true;
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      out.at(r, c) = x.at(r, 0) * y.at(0, c) + x.at(r, 1) * y.at(1, c);
    }
  }
  return out;
}

Mat2 operator+(const Mat2& x, const Mat2& y) {
  Mat2 out;
  for (std::size_t k = 0; k < 4; ++k) out.m[k] = x.m[k] + y.m[k];
  return out;
}

Mat2 operator*(c64 s, const Mat2& x) {
  Mat2 out;
  for (std::size_t k = 0; k < 4; ++k) out.m[k] = s * x.m[k];
  return out;
}

Mat2 qop_matrix(const ScaledQubitOp& x) {
  Mat2 out;  // zero-filled
  if (x.is_zero()) return out;
  const c64 one(1.0, 0.0);
  const c64 im(0.0, 1.0);
  switch (*x.op) {
    case QubitOp::P0: out.at(1, 1) = one; break;
    case QubitOp::P1: out.at(0, 0) = one; break;
    case QubitOp::A: out.at(1, 0) = one; break;
    case QubitOp::Adag: out.at(0, 1) = one; break;
    case QubitOp::S0: out.at(0, 0) = one; out.at(1, 1) = one; break;
    case QubitOp::S1: out.at(0, 1) = one; out.at(1, 0) = one; break;
    case QubitOp::S2: out.at(0, 1) = -im; out.at(1, 0) = im; break;
    case QubitOp::S3: out.at(0, 0) = one; out.at(1, 1) = -one; break;
  }
  return x.coeff * out;
}

}  // namespace qreg
