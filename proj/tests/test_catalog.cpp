#include "qreg/catalog.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace qreg;

namespace {
const double rt2 = std::sqrt(2.0);
}

TEST_CASE("pvm constructor produces the splitting rule") {
  const c64 alpha(0.6, 0.0), beta(0.0, 0.8);
  const Stage sg = pvm_test(0, {1, 2}, {alpha, beta});
  REQUIRE(sg.rules().size() == 1);
  const TransitionRule& rule = sg.rules()[0];
  CHECK(rule.source() == 0);
  REQUIRE(rule.targets().size() == 2);
  CHECK(rule.targets()[0].coeff == alpha);
  CHECK(rule.targets()[0].monomial == CreationMonomial({1}));
  CHECK(rule.targets()[1].coeff == beta);
  CHECK(rule.targets()[1].monomial == CreationMonomial({2}));

  // single outcome: a pure relabeling
  const Stage relabel = pvm_test(0, {4}, {c64(1.0, 0.0)});
  CHECK(relabel.rules()[0].targets().size() == 1);

  CHECK_THROWS_AS(pvm_test(0, {1, 2}, {alpha}), std::invalid_argument);
  CHECK_THROWS_AS(pvm_test(0, {1, 1}, {alpha, beta}), std::invalid_argument);
  CHECK_THROWS_AS(pvm_test(0, {0, 1}, {alpha, beta}), std::invalid_argument);
}

TEST_CASE("beam splitter encodes the unitary coefficient matrix") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [a, b] = qreg::testing::random_unit_pair(rng);
    std::uniform_real_distribution<double> angle(0.0, 2 * 3.141592653589793);
    const double eta = angle(rng);
    const Stage bs = beam_splitter(1, 2, 3, 4, a, b, eta);
    const c64 phase = std::exp(c64(0.0, eta));
    REQUIRE(bs.rules().size() == 2);
    const auto& r1 = bs.rules()[0];
    const auto& r2 = bs.rules()[1];
    CHECK(std::abs(r1.targets()[0].coeff - phase * a) < 1e-15);
    CHECK(std::abs(r1.targets()[1].coeff + phase * std::conj(b)) < 1e-15);
    CHECK(std::abs(r2.targets()[0].coeff - phase * b) < 1e-15);
    CHECK(std::abs(r2.targets()[1].coeff - phase * std::conj(a)) < 1e-15);
  }

  CHECK_THROWS_AS(beam_splitter(1, 2, 3, 4, c64(0.9, 0.0), c64(0.3, 0.0), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(beam_splitter(1, 2, 3, 1, c64(1.0, 0.0), c64(0.0, 0.0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("the interference splitter is one beam splitter parameterization") {
  // a = 1/sqrt(2), b = -i/sqrt(2), eta = pi/2 gives
  //   A+4 -> (i A+6 + A+7)/sqrt(2),  A+5 -> (A+6 + i A+7)/sqrt(2)
  const Stage bs2 =
      beam_splitter(4, 5, 6, 7, c64(1 / rt2, 0.0), c64(0.0, -1 / rt2), 3.141592653589793 / 2);
  const auto& r4 = bs2.rules()[0];
  const auto& r5 = bs2.rules()[1];
  CHECK(std::abs(r4.targets()[0].coeff - c64(0.0, 1 / rt2)) < 1e-15);
  CHECK(std::abs(r4.targets()[1].coeff - c64(1 / rt2, 0.0)) < 1e-15);
  CHECK(std::abs(r5.targets()[0].coeff - c64(1 / rt2, 0.0)) < 1e-15);
  CHECK(std::abs(r5.targets()[1].coeff - c64(0.0, 1 / rt2)) < 1e-15);
}

TEST_CASE("a void second port keeps rank-1 states rank-1") {
  const RegisterShape r5(5);
  const Stage bs = beam_splitter(1, 2, 3, 4, c64(0.6, 0.0), c64(0.0, 0.8), 0.25);
  const SparseState out = apply_stage(SparseState::basis_state(r5, 1 << 1), bs);
  CHECK(state_rank(out).ranks == std::set<int>{1});
  CHECK(norm(out) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single channel map") {
  const c64 factor = std::exp(c64(0.0, 0.9));
  const Stage map = single_channel_map(2, 3, factor);
  CHECK(map.rules()[0].source() == 2);
  CHECK(map.rules()[0].targets()[0].coeff == factor);
  CHECK(map.rules()[0].targets()[0].monomial == CreationMonomial({3}));

  CHECK_NOTHROW(single_channel_map(2, 5, c64(-1.0, 0.0)));
  CHECK_THROWS_AS(single_channel_map(2, 2, factor), std::invalid_argument);
  CHECK_THROWS_AS(single_channel_map(2, 3, c64(0.5, 0.0)), std::invalid_argument);
}

TEST_CASE("pair source raises rank by one") {
  const double theta = 0.8;
  const Stage source = pair_source(
      0, {{c64(1 / rt2, 0.0), 1, 3}, {std::exp(c64(0.0, theta)) / rt2, 2, 4}});
  const RegisterShape r5(5);
  const SparseState out = apply_stage(SparseState::basis_state(r5, 1), source);
  CHECK(state_rank(out).ranks == std::set<int>{2});
  CHECK(std::abs(out.amplitude(0b01010) - c64(1 / rt2, 0.0)) < 1e-15);
  CHECK(std::abs(out.amplitude(0b10100) - std::exp(c64(0.0, theta)) / rt2) < 1e-15);

  // deterministic single pair
  const Stage certain = pair_source(0, {{c64(1.0, 0.0), 1, 2}});
  const SparseState pair = apply_stage(SparseState::basis_state(r5, 1), certain);
  CHECK(pair.amplitude(0b110) == c64(1.0, 0.0));

  CHECK_THROWS_AS(pair_source(0, {{c64(1.0, 0.0), 0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(pair_source(0, {{c64(0.9, 0.0), 1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(pair_source(0, {{c64(1.0, 0.0), 2, 2}}), std::invalid_argument);
}

TEST_CASE("every constructor passes the isometry check on its domain") {
  std::mt19937_64 rng(19);
  const RegisterShape r6(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [a, b] = qreg::testing::random_unit_pair(rng);
    std::uniform_real_distribution<double> angle(0.0, 2 * 3.141592653589793);

    const Stage pvm = pvm_test(0, {1, 2}, {a, b});
    CHECK(check_isometry(pvm, r6, default_isometry_domain(pvm)).passed);

    const Stage bs = beam_splitter(0, 1, 2, 3, a, b, angle(rng));
    CHECK(check_isometry(bs, r6, default_isometry_domain(bs)).passed);

    const Stage map = single_channel_map(0, 1, std::exp(c64(0.0, angle(rng))));
    CHECK(check_isometry(map, r6, default_isometry_domain(map)).passed);

    const Stage pair = pair_source(0, {{a, 1, 3}, {b, 2, 4}});
    CHECK(check_isometry(pair, r6, default_isometry_domain(pair)).passed);
  }
}

TEST_CASE("pvm with two outcomes equals a beam splitter with a void port") {
  std::mt19937_64 rng(29);
  const RegisterShape r6(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [alpha, beta] = qreg::testing::random_unit_pair(rng);
    const SparseState in = SparseState::basis_state(r6, 1);

    const SparseState via_pvm = apply_stage(in, pvm_test(0, {1, 2}, {alpha, beta}));
    // choose a = alpha, b = -conj(beta) so the first column matches
    const SparseState via_bs =
        apply_stage(in, beam_splitter(0, 5, 1, 2, alpha, -std::conj(beta), 0.0));

    CHECK(outcome_probability(via_pvm, 1 << 1) ==
          doctest::Approx(outcome_probability(via_bs, 1 << 1)).epsilon(1e-12));
    CHECK(outcome_probability(via_pvm, 1 << 2) ==
          doctest::Approx(outcome_probability(via_bs, 1 << 2)).epsilon(1e-12));
  }
}

TEST_CASE("independent tests on disjoint qubits produce separable states") {
  std::mt19937_64 rng(59);
  const RegisterShape r6(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [alpha, beta] = qreg::testing::random_unit_pair(rng);
    const auto [gamma, delta] = qreg::testing::random_unit_pair(rng);
    SparseState in = apply_monomial(SparseState::void_state(r6), CreationMonomial({0, 3}));
    SparseState out = apply_stage(in, pvm_test(0, {1, 2}, {alpha, beta}));
    out = apply_stage(out, pvm_test(3, {4, 5}, {gamma, delta}));

    const c64 left[2] = {alpha, beta};
    const c64 right[2] = {gamma, delta};
    for (int u = 1; u <= 2; ++u) {
      for (int v = 4; v <= 5; ++v) {
        const BasisIndex outcome = (BasisIndex{1} << u) | (BasisIndex{1} << v);
        CHECK(std::abs(out.amplitude(outcome) - left[u - 1] * right[v - 4]) < 1e-14);
      }
    }
  }
}
