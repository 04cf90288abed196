#include "qreg/oracle.hpp"

#include <cmath>

#include "doctest.h"
#include "qreg/catalog.hpp"
#include "qreg/dsl.hpp"
#include "test_support.hpp"

using namespace qreg;
using namespace qreg::oracle;

TEST_CASE("dense monomial for one qubit is the occupation-basis raiser") {
  const DenseOperator op = dense_monomial(CreationMonomial({0}), RegisterShape(1));
  // column |0) maps to row |1); component index equals basis index
  CHECK(op.at(0, 0) == c64(0.0, 0.0));
  CHECK(op.at(0, 1) == c64(0.0, 0.0));
  CHECK(op.at(1, 0) == c64(1.0, 0.0));
  CHECK(op.at(1, 1) == c64(0.0, 0.0));
}

TEST_CASE("empty monomial densifies to the identity") {
  const DenseOperator op = dense_monomial(CreationMonomial{}, RegisterShape(3));
  const DenseOperator id = identity(RegisterShape(3));
  CHECK(op.entries == id.entries);
}

TEST_CASE("two-qubit monomial raises the void to the full pair") {
  const DenseOperator op = dense_monomial(CreationMonomial({0, 1}), RegisterShape(2));
  CHECK(op.at(3, 0) == c64(1.0, 0.0));  // column |00) -> row |11)
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (!(r == 3 && c == 0)) CHECK(op.at(r, c) == c64(0.0, 0.0));
    }
  }
}

TEST_CASE("monomials factor into single-qubit products in either order") {
  const RegisterShape r3(3);
  const DenseOperator pair = dense_monomial(CreationMonomial({0, 2}), r3);
  const DenseOperator first = dense_monomial(CreationMonomial({0}), r3);
  const DenseOperator second = dense_monomial(CreationMonomial({2}), r3);
  CHECK(multiply(first, second).entries == pair.entries);
  CHECK(multiply(second, first).entries == pair.entries);
}

TEST_CASE("dense creation operators square to zero") {
  const RegisterShape r3(3);
  for (int q = 0; q < 3; ++q) {
    const DenseOperator op = dense_monomial(CreationMonomial({q}), r3);
    const DenseOperator squared = multiply(op, op);
    for (const c64& entry : squared.entries) CHECK(entry == c64(0.0, 0.0));
  }
}

TEST_CASE("dense monomial matches the sparse engine on basis states") {
  const RegisterShape r4(4);
  const CreationMonomial m({1, 3});
  const DenseOperator op = dense_monomial(m, r4);
  for (BasisIndex a = 0; a < 16; ++a) {
    const SparseState sparse = apply_monomial(SparseState::basis_state(r4, a), m);
    const std::vector<c64> dense = apply_operator(op, densify(SparseState::basis_state(r4, a)));
    CHECK(compare_states(sparse, dense) == 0.0);
  }
}

TEST_CASE("dense stage columns") {
  const RegisterShape r3(3);
  const c64 alpha(0.6, 0.0), beta(0.0, 0.8);
  const DenseOperator sg = dense_stage(pvm_test(0, {1, 2}, {alpha, beta}), r3);
  // column |1) = alpha e_2 + beta e_4
  CHECK(sg.at(2, 1) == alpha);
  CHECK(sg.at(4, 1) == beta);
  CHECK(sg.at(1, 1) == c64(0.0, 0.0));
  // the void column is fixed
  CHECK(sg.at(0, 0) == c64(1.0, 0.0));
  for (std::size_t r = 1; r < 8; ++r) CHECK(sg.at(r, 0) == c64(0.0, 0.0));
}

TEST_CASE("beam splitter columns preserve pairwise inner products") {
  const RegisterShape r4(4);
  const DenseOperator bs = dense_stage(
      beam_splitter(0, 1, 2, 3, c64(0.6, 0.0), c64(0.0, 0.8), 0.4), r4);
  const std::vector<std::size_t> domain = {0, 1, 2};  // void and the two in-ports
  for (std::size_t a : domain) {
    for (std::size_t b : domain) {
      c64 gram(0.0, 0.0);
      for (std::size_t r = 0; r < bs.dim(); ++r) gram += std::conj(bs.at(r, a)) * bs.at(r, b);
      const c64 expected = a == b ? c64(1.0, 0.0) : c64(0.0, 0.0);
      CHECK(std::abs(gram - expected) < 1e-12);
    }
  }
}

TEST_CASE("compare_states") {
  const RegisterShape r3(3);
  const SparseState s = SparseState::basis_state(r3, 5);
  CHECK(compare_states(s, densify(s)) == 0.0);
  std::vector<c64> shifted = densify(s);
  shifted[2] += c64(0.0, 1e-3);
  CHECK(compare_states(s, shifted) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK_THROWS_AS(compare_states(s, std::vector<c64>(4)), std::invalid_argument);
}

TEST_CASE("rank cap") {
  CHECK_THROWS_AS(dense_monomial(CreationMonomial({0}), RegisterShape(13)),
                  std::invalid_argument);
  CHECK_THROWS_AS(identity(RegisterShape(13)), std::invalid_argument);
}

TEST_CASE("dense pipeline agrees with the sparse engine on a full experiment") {
  auto result = dsl::parse_experiment(qreg::testing::read_experiment("mach_zender"),
                                      {{"phi", c64(0.77, 0.0)}, {"mu", c64(0.21, 0.0)}});
  REQUIRE(result.ok());
  const RunReport report = run_program(*result.program);
  const std::vector<c64> dense = run_dense_pipeline(*result.program);
  CHECK(compare_states(report.final_state, dense) < 1e-10);
}
