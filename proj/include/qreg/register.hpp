#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qreg/algebra.hpp"

namespace qreg {

/// Computational-basis label of a register state: bit j holds the
/// occupation of qubit j, so the label value is sum_j i_j * 2^j.
using BasisIndex = std::uint64_t;

/// Amplitudes with magnitude below this are dropped after every state
/// operation; symbolic cancellations leave numerical residue otherwise.
inline constexpr double amplitude_floor = 1e-12;

/// How far a state norm may drift from 1 before Born-rule preconditions
/// refuse it.
inline constexpr double norm_tolerance = 1e-9;

/// Number of qubits in a register. Capped at 63 so every basis index fits
/// in a single 64-bit word; the sparse representation never materialises
/// the 2^rank-dimensional space.
struct RegisterShape {
  int rank;

  explicit RegisterShape(int r);
  BasisIndex basis_count() const { return BasisIndex{1} << rank; }
  friend bool operator==(RegisterShape a, RegisterShape b) { return a.rank == b.rank; }
  friend bool operator!=(RegisterShape a, RegisterShape b) { return a.rank != b.rank; }
};

/// Occupation list (i_0 ... i_{r-1}) -> basis index, each i_j in {0,1}.
/// Throws std::invalid_argument on a length mismatch or an occupation
/// outside {0,1}.
BasisIndex encode_occupations(const std::vector<int>& occupations, int rank);

/// Inverse of encode_occupations; exact round-trip.
std::vector<int> decode_occupations(BasisIndex value, int rank);

/// Ket text forms. ket_bits renders the bit string with qubit 0 leftmost,
/// e.g. |101) for index 5 at rank 3; ket_decimal renders |5). When the
/// rank is supplied and the decimal digits could be mistaken for a bit
/// string of that rank, ket_decimal appends the base-ten marker, e.g.
/// |10_10) for index ten at rank 2.
std::string ket_bits(BasisIndex value, int rank);
std::string ket_decimal(BasisIndex value, int rank = 0);

/// Parses "|101)" (bit string, qubit 0 leftmost), "|5)" (decimal) or
/// "|11_10)" (decimal with explicit base-ten marker). A bare digit string
/// of length == rank is read as bits, otherwise as decimal. Throws
/// std::invalid_argument on malformed text or an out-of-range value.
BasisIndex parse_ket(const std::string& text, int rank);

/// Product of creation operators on strictly distinct qubits. Indices are
/// kept sorted ascending; creation operators on distinct qubits commute
/// with no sign, so sorting is a pure normal form. Duplicate indices are
/// rejected at construction (a repeated factor is almost certainly a typo
/// in an experiment file, not an intentional zero).
class CreationMonomial {
 public:
  CreationMonomial() = default;
  explicit CreationMonomial(std::vector<int> indices);

  const std::vector<int>& indices() const { return indices_; }
  bool empty() const { return indices_.empty(); }
  std::size_t size() const { return indices_.size(); }
  bool contains(int qubit) const;
  int max_index() const;  // -1 when empty
  BasisIndex mask() const;

  friend bool operator==(const CreationMonomial& a, const CreationMonomial& b) {
    return a.indices_ == b.indices_;
  }

 private:
  std::vector<int> indices_;
};

/// Sparse register state: map from basis index to complex amplitude.
/// The zero state stores no terms; the void state stores exactly
/// {0 -> 1}. States are immutable values in practice (operations return
/// new states), safe to share across threads.
class SparseState {
 public:
  explicit SparseState(RegisterShape shape) : shape_(shape) {}

  static SparseState void_state(RegisterShape shape);
  static SparseState basis_state(RegisterShape shape, BasisIndex index);

  RegisterShape shape() const { return shape_; }
  const std::map<BasisIndex, c64>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Amplitude of |index), 0 when absent. Throws on out-of-range index.
  c64 amplitude(BasisIndex index) const;

  /// Adds amp into the term for |index). Throws on out-of-range index.
  void accumulate(BasisIndex index, c64 amp);

  /// Drops terms with |amplitude| < amplitude_floor.
  void prune();

 private:
  RegisterShape shape_;
  std::map<BasisIndex, c64> terms_;
};

/// Applies the register creation operator for `qubit`: terms with the bit
/// clear move to the raised index, terms with it set are annihilated
/// (the creation operator is nilpotent). Throws on qubit >= rank.
SparseState apply_creation(const SparseState& state, int qubit);

/// Folds apply_creation over the monomial's indices; the empty monomial is
/// the identity.
SparseState apply_monomial(const SparseState& state, const CreationMonomial& monomial);

/// (x|y) = sum_a conj(x_a) y_a; conjugate-linear in the first argument.
/// Throws on shape mismatch.
c64 inner_product(const SparseState& x, const SparseState& y);

/// sqrt((x|x)); always a non-negative real.
double norm(const SparseState& x);

/// |(outcome|state)|^2 without any normalization precondition.
double outcome_probability(const SparseState& state, BasisIndex outcome);

/// Sum of |amplitude|^2 over terms with bit `qubit` set, unchecked.
double marginal_probability(const SparseState& state, int qubit);

/// Born probability of the exclusive outcome |outcome). Requires
/// |norm(state) - 1| <= norm_tolerance (throws std::domain_error rather
/// than silently rescaling) and outcome within range.
double born_exclusive(const SparseState& state, BasisIndex outcome);

/// Born probability that the detector on `qubit` fires, summed over all
/// stored outcomes with that bit set. Same preconditions as born_exclusive.
double born_marginal(const SparseState& state, int qubit);

/// The set of popcounts over stored basis indices. States built from a
/// fixed number of excitations are rank-homogeneous; superpositions of
/// different popcounts are flagged instead of rejected.
struct RankReport {
  std::set<int> ranks;
  bool homogeneous = true;
};

/// Throws std::domain_error on the zero state.
RankReport state_rank(const SparseState& state);

/// Linear-combination helpers. Results are pruned like every operation.
SparseState add(const SparseState& x, const SparseState& y);
SparseState scaled(const SparseState& x, c64 factor);

}  // namespace qreg
