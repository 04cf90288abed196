#include "qreg/register.hpp"

#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace qreg;

TEST_CASE("occupation codec") {
  CHECK(encode_occupations({1, 0, 1}, 3) == 5);
  CHECK(encode_occupations({1, 1, 0, 1}, 4) == 11);
  CHECK(encode_occupations({0, 0, 0}, 3) == 0);
  CHECK(decode_occupations(5, 3) == std::vector<int>{1, 0, 1});

  CHECK_THROWS_AS(encode_occupations({1, 0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(encode_occupations({1, 2, 0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(decode_occupations(8, 3), std::invalid_argument);
}

TEST_CASE("occupation codec round-trips on random lists") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> rank_dist(1, 63);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const int rank = rank_dist(rng);
    std::vector<int> occupations(static_cast<std::size_t>(rank));
    BasisIndex expected = 0;
    for (int j = 0; j < rank; ++j) {
      occupations[static_cast<std::size_t>(j)] = bit(rng);
      expected += static_cast<BasisIndex>(occupations[static_cast<std::size_t>(j)]) << j;
    }
    const BasisIndex value = encode_occupations(occupations, rank);
    CHECK(value == expected);
    CHECK(decode_occupations(value, rank) == occupations);
  }
}

TEST_CASE("ket rendering and parsing") {
  CHECK(ket_bits(5, 3) == "|101)");
  CHECK(ket_decimal(5) == "|5)");
  CHECK(parse_ket("|101)", 3) == 5);
  CHECK(parse_ket("|5)", 3) == 5);
  CHECK(parse_ket("|11_10)", 4) == 11);
  CHECK(parse_ket("|1101)", 4) == 11);   // four binary digits at rank 4
  CHECK(parse_ket("|11)", 4) == 11);     // two digits cannot be a bit string here
  CHECK(parse_ket("44", 6) == 44);       // bars optional
  CHECK_THROWS_AS(parse_ket("|१)", 3), std::invalid_argument);
  CHECK_THROWS_AS(parse_ket("|)", 3), std::invalid_argument);
  CHECK_THROWS_AS(parse_ket("|8)", 3), std::invalid_argument);

  // the base-ten marker resolves digit strings that look like bit strings
  CHECK(ket_decimal(1, 1) == "|1_10)");
  CHECK(parse_ket("|1_10)", 1) == 1);
  CHECK(ket_decimal(2, 2) == "|2)");
  CHECK(ket_decimal(5, 3) == "|5)");
  CHECK(parse_ket("|10_10)", 4) == 10);
  CHECK(parse_ket("|10)", 2) == 1);  // two binary digits at rank 2 read as bits

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> rank_dist(1, 20);
    const int rank = rank_dist(rng);
    std::uniform_int_distribution<BasisIndex> index(0, (BasisIndex{1} << rank) - 1);
    const BasisIndex value = index(rng);
    CHECK(parse_ket(ket_bits(value, rank), rank) == value);
    CHECK(parse_ket(ket_decimal(value, rank), rank) == value);
  }
}

TEST_CASE("monomial construction canonicalises") {
  const CreationMonomial m({5, 2, 3});
  CHECK(m.indices() == std::vector<int>{2, 3, 5});
  CHECK(m.mask() == ((1u << 2) | (1u << 3) | (1u << 5)));
  CHECK(m.contains(3));
  CHECK_FALSE(m.contains(4));
  CHECK(CreationMonomial{}.max_index() == -1);
  CHECK_THROWS_AS(CreationMonomial({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(CreationMonomial({-1}), std::invalid_argument);
  CHECK_THROWS_AS(CreationMonomial({63}), std::invalid_argument);
}

TEST_CASE("creation operator moves, annihilates and is linear") {
  const RegisterShape r3(3);
  const SparseState one = apply_creation(SparseState::void_state(r3), 0);
  CHECK(one.terms().size() == 1);
  CHECK(one.amplitude(1) == c64(1.0, 0.0));

  // occupied qubit annihilates the whole term
  CHECK(apply_creation(SparseState::basis_state(r3, 2), 1).is_zero());

  SparseState mixed(r3);
  mixed.accumulate(2, c64(0.6, 0.0));  // |010)
  mixed.accumulate(4, c64(0.0, 0.8));  // |001)
  const SparseState raised = apply_creation(mixed, 0);
  CHECK(raised.amplitude(3) == c64(0.6, 0.0));  // |110)
  CHECK(raised.amplitude(5) == c64(0.0, 0.8));  // |101)

  CHECK_THROWS_AS(apply_creation(mixed, 3), std::out_of_range);
}

TEST_CASE("monomials apply as folded creations") {
  const RegisterShape r6(6);
  const SparseState v = SparseState::void_state(r6);
  CHECK(apply_monomial(v, CreationMonomial({2, 3, 5})).amplitude(44) == c64(1.0, 0.0));
  CHECK(apply_monomial(v, CreationMonomial({0, 3})).amplitude(9) == c64(1.0, 0.0));

  std::mt19937_64 rng(3);
  const SparseState state = qreg::testing::random_state(rng, r6);
  const SparseState same = apply_monomial(state, CreationMonomial{});
  CHECK(same.terms() == state.terms());

  CHECK_THROWS_AS(apply_monomial(v, CreationMonomial({7})), std::out_of_range);
}

TEST_CASE("creation operators on distinct qubits commute exactly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const RegisterShape shape(8);
    const SparseState state = qreg::testing::random_state(rng, shape);
    std::uniform_int_distribution<int> qubit(0, 7);
    const int i = qubit(rng);
    int j = qubit(rng);
    while (j == i) j = qubit(rng);
    const SparseState ij = apply_creation(apply_creation(state, i), j);
    const SparseState ji = apply_creation(apply_creation(state, j), i);
    CHECK(ij.terms() == ji.terms());
  }
}

TEST_CASE("double creation annihilates every state") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const RegisterShape shape(6);
    const SparseState state = qreg::testing::random_state(rng, shape);
    std::uniform_int_distribution<int> qubit(0, 5);
    const int k = qubit(rng);
    CHECK(apply_creation(apply_creation(state, k), k).is_zero());
  }
}

TEST_CASE("inner products") {
  const RegisterShape r3(3);
  for (BasisIndex a = 0; a < 8; ++a) {
    for (BasisIndex b = 0; b < 8; ++b) {
      const c64 expected = a == b ? c64(1.0, 0.0) : c64(0.0, 0.0);
      CHECK(inner_product(SparseState::basis_state(r3, a), SparseState::basis_state(r3, b)) ==
            expected);
    }
  }

  SparseState x(r3);
  x.accumulate(2, c64(0.6, 0.0));
  x.accumulate(4, c64(0.0, 0.8));
  CHECK(inner_product(x, x).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm(x) == doctest::Approx(1.0).epsilon(1e-14));

  const SparseState two = SparseState::basis_state(r3, 2);
  CHECK(inner_product(two, x) == c64(0.6, 0.0));
  // conjugate-linearity in the first slot
  CHECK(inner_product(scaled(two, c64(0.0, 1.0)), x) == c64(0.0, -0.6));

  CHECK_THROWS_AS(inner_product(x, SparseState::void_state(RegisterShape(4))),
                  std::invalid_argument);
}

TEST_CASE("born probabilities on the split state") {
  const RegisterShape r3(3);
  SparseState out(r3);
  out.accumulate(2, c64(0.6, 0.0));
  out.accumulate(4, c64(0.0, -0.8));
  CHECK(born_exclusive(out, 2) == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(born_exclusive(out, 4) == doctest::Approx(0.64).epsilon(1e-14));
  for (BasisIndex a : {0, 1, 3, 5, 6, 7}) CHECK(born_exclusive(out, a) == 0.0);
  CHECK(born_marginal(out, 1) == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(born_marginal(out, 0) == 0.0);
  for (int q = 0; q < 3; ++q) CHECK(born_marginal(SparseState::void_state(r3), q) == 0.0);

  SparseState unnormalized(r3);
  unnormalized.accumulate(1, c64(2.0, 0.0));
  CHECK_THROWS_AS(born_exclusive(unnormalized, 1), std::domain_error);
  CHECK_THROWS_AS(born_marginal(unnormalized, 0), std::domain_error);
  CHECK_THROWS_AS(born_exclusive(out, 9), std::invalid_argument);
}

TEST_CASE("exclusive probabilities sum to the squared norm") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const SparseState state = qreg::testing::random_state(rng, RegisterShape(7));
    double total = 0.0;
    for (const auto& [index, amp] : state.terms()) total += outcome_probability(state, index);
    const c64 self = inner_product(state, state);
    CHECK(total == doctest::Approx(self.real()).epsilon(1e-12));
    CHECK(std::abs(self.imag()) < 1e-12);
  }
}

TEST_CASE("marginals are sums of exclusive probabilities") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const SparseState state = qreg::testing::random_state(rng, RegisterShape(7));
    for (int q = 0; q < 7; ++q) {
      double expected = 0.0;
      for (const auto& [index, amp] : state.terms()) {
        if (index & (BasisIndex{1} << q)) expected += outcome_probability(state, index);
      }
      CHECK(marginal_probability(state, q) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("rank report") {
  const RegisterShape r6(6);
  const SparseState rank3 = SparseState::basis_state(r6, 44);
  const RankReport r = state_rank(rank3);
  CHECK(r.ranks == std::set<int>{3});
  CHECK(r.homogeneous);

  const RankReport v = state_rank(SparseState::void_state(r6));
  CHECK(v.ranks == std::set<int>{0});
  CHECK(v.homogeneous);

  SparseState mixed(r6);
  mixed.accumulate(1, c64(1.0, 0.0));
  mixed.accumulate(3, c64(1.0, 0.0));
  CHECK_FALSE(state_rank(mixed).homogeneous);

  CHECK_THROWS_AS(state_rank(SparseState(r6)), std::domain_error);
}

TEST_CASE("cancellation residue is pruned") {
  const RegisterShape r3(3);
  SparseState state(r3);
  state.accumulate(3, c64(0.25, 0.0));
  state.accumulate(3, c64(-0.25, 1e-15));
  state.prune();
  CHECK(state.is_zero());
}

TEST_CASE("linear combination helpers") {
  const RegisterShape r3(3);
  const SparseState x = SparseState::basis_state(r3, 1);
  const SparseState y = SparseState::basis_state(r3, 2);
  const SparseState sum = add(scaled(x, c64(0.5, 0.0)), scaled(y, c64(0.0, 0.5)));
  CHECK(sum.amplitude(1) == c64(0.5, 0.0));
  CHECK(sum.amplitude(2) == c64(0.0, 0.5));
  CHECK(add(x, scaled(x, c64(-1.0, 0.0))).is_zero());
}
