#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>

namespace qreg {

using c64 = std::complex<double>;

/// The eight single-qubit computational-basis operators. P0/P1 project onto
/// the unoccupied/occupied states, A/Adag lower and raise the occupation,
/// S0 is the identity and S1..S3 are the Pauli flips and parity.
enum class QubitOp : std::uint8_t { P0, P1, A, Adag, S0, S1, S2, S3 };

inline constexpr std::array<QubitOp, 8> all_qubit_ops = {
    QubitOp::P0, QubitOp::P1, QubitOp::A,  QubitOp::Adag,
    QubitOp::S0, QubitOp::S1, QubitOp::S2, QubitOp::S3};

/// Short printable name: "P0", "P1", "A", "A+", "s0".."s3".
const char* qop_name(QubitOp op);

/// A basis operator scaled by a complex factor. The zero operator is the
/// value with no op and coefficient exactly 0; products absorb into it.
struct ScaledQubitOp {
  c64 coeff{0.0, 0.0};
  std::optional<QubitOp> op{};

  ScaledQubitOp() = default;
  ScaledQubitOp(QubitOp k) : coeff(1.0, 0.0), op(k) {}  // NOLINT(google-explicit-constructor)
  ScaledQubitOp(c64 c, QubitOp k) : coeff(c), op(k) {}

  static ScaledQubitOp zero() { return {}; }
  bool is_zero() const { return !op.has_value(); }
};

/// Exact value equality (coefficients compared bitwise-exactly).
bool operator==(const ScaledQubitOp& x, const ScaledQubitOp& y);
inline bool operator!=(const ScaledQubitOp& x, const ScaledQubitOp& y) { return !(x == y); }

/// Product of two same-qubit operators. The basis-operator part of the
/// result is again a basis operator up to a scalar in {0, +-1, +-i}; those
/// closure scalars are applied exactly, so products of unit-coefficient
/// inputs are exact. Total function: zero operands give zero.
///
/// Operators acting on different qubits are not handled here; register-level
/// code composes those as tensor factors.
ScaledQubitOp qop_mul(const ScaledQubitOp& x, const ScaledQubitOp& y);

/// 2x2 complex matrix, row-major. Basis convention: |1) = (1,0)^T and
/// |0) = (0,1)^T, so e.g. the raising operator A+ is [[0,1],[0,0]].
struct Mat2 {
  std::array<c64, 4> m{};

  c64& at(int r, int c) { return m[static_cast<std::size_t>(r * 2 + c)]; }
  const c64& at(int r, int c) const { return m[static_cast<std::size_t>(r * 2 + c)]; }
};

bool operator==(const Mat2& x, const Mat2& y);
inline bool operator!=(const Mat2& x, const Mat2& y) { return !(x == y); }
Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator+(const Mat2& x, const Mat2& y);
Mat2 operator*(c64 s, const Mat2& x);

/// Outer-product matrix of the operator times its coefficient.
Mat2 qop_matrix(const ScaledQubitOp& x);

}  // namespace qreg
