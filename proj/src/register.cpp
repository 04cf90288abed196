#include "qreg/register.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qreg {
namespace {

std::string index_error(BasisIndex index, int rank) {
  return "basis index " + std::to_string(index) + " out of range for rank " +
         std::to_string(rank);
}

}  // namespace

RegisterShape::RegisterShape(int r) : rank(r) {
  if (r < 1 || r > 63) {
    throw std::invalid_argument("register rank must be in [1, 63], got " + std::to_string(r));
  }
}

BasisIndex encode_occupations(const std::vector<int>& occupations, int rank) {
  if (static_cast<int>(occupations.size()) != rank) {
    throw std::invalid_argument("occupation list has length " +
                                std::to_string(occupations.size()) + ", expected " +
                                std::to_string(rank));
  }
  BasisIndex value = 0;
  for (int j = 0; j < rank; ++j) {
    const int occ = occupations[static_cast<std::size_t>(j)];
    if (occ != 0 && occ != 1) {
      throw std::invalid_argument("occupation of qubit " + std::to_string(j) +
                                  " must be 0 or 1, got " + std::to_string(occ));
    }
    value |= static_cast<BasisIndex>(occ) << j;
  }
  return value;
}

std::vector<int> decode_occupations(BasisIndex value, int rank) {
  RegisterShape shape(rank);
  if (value >= shape.basis_count()) throw std::invalid_argument(index_error(value, rank));
  std::vector<int> occupations(static_cast<std::size_t>(rank));
  for (int j = 0; j < rank; ++j) {
    occupations[static_cast<std::size_t>(j)] = static_cast<int>((value >> j) & 1u);
  }
  return occupations;
}

std::string ket_bits(BasisIndex value, int rank) {
  std::string out = "|";
  for (int j = 0; j < rank; ++j) out.push_back(((value >> j) & 1u) ? '1' : '0');
  out.push_back(')');
  return out;
}

std::string ket_decimal(BasisIndex value, int rank) {
  std::string digits = std::to_string(value);
  const bool looks_binary = std::all_of(digits.begin(), digits.end(),
                                        [](char c) { return c == '0' || c == '1'; });
  if (rank > 0 && looks_binary && static_cast<int>(digits.size()) == rank) digits += "_10";
  return "|" + digits + ")";
}

BasisIndex parse_ket(const std::string& text, int rank) {
  RegisterShape shape(rank);
  std::string body = text;
  if (body.size() >= 2 && body.front() == '|' && body.back() == ')') {
    body = body.substr(1, body.size() - 2);
  }
  if (body.empty()) throw std::invalid_argument("empty ket: '" + text + "'");

  bool base_ten = false;
  if (body.size() > 3 && body.compare(body.size() - 3, 3, "_10") == 0) {
    base_ten = true;
    body.resize(body.size() - 3);
  }
  for (char c : body) {
    if (c < '0' || c > '9') throw std::invalid_argument("malformed ket: '" + text + "'");
  }

  // A pure 0/1 string of exactly rank digits reads as a bit string unless
  // the base-ten marker forces decimal.
  const bool all_binary = std::all_of(body.begin(), body.end(),
                                      [](char c) { return c == '0' || c == '1'; });
  if (!base_ten && all_binary && static_cast<int>(body.size()) == rank) {
    std::vector<int> occupations;
    occupations.reserve(body.size());
    for (char c : body) occupations.push_back(c - '0');
    return encode_occupations(occupations, rank);
  }

  BasisIndex value = 0;
  for (char c : body) {
    if (value > (shape.basis_count() - 1) / 10) {
      throw std::invalid_argument(index_error(value, rank));
    }
    value = value * 10 + static_cast<BasisIndex>(c - '0');
  }
  if (value >= shape.basis_count()) throw std::invalid_argument(index_error(value, rank));
  return value;
}

CreationMonomial::CreationMonomial(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] < 0 || indices_[k] > 62) {
      throw std::invalid_argument("creation index " + std::to_string(indices_[k]) +
                                  " outside [0, 62]");
    }
    if (k > 0 && indices_[k] == indices_[k - 1]) {
      throw std::invalid_argument("duplicate creation index " + std::to_string(indices_[k]));
    }
  }
}

bool CreationMonomial::contains(int qubit) const {
  return std::binary_search(indices_.begin(), indices_.end(), qubit);
}

int CreationMonomial::max_index() const { return indices_.empty() ? -1 : indices_.back(); }

BasisIndex CreationMonomial::mask() const {
  BasisIndex m = 0;
  for (int idx : indices_) m |= BasisIndex{1} << idx;
  return m;
}

SparseState SparseState::void_state(RegisterShape shape) {
  SparseState s(shape);
  s.terms_[0] = c64(1.0, 0.0);
  return s;
}

SparseState SparseState::basis_state(RegisterShape shape, BasisIndex index) {
  SparseState s(shape);
  if (index >= shape.basis_count()) throw std::invalid_argument(index_error(index, shape.rank));
  s.terms_[index] = c64(1.0, 0.0);
  return s;
}

c64 SparseState::amplitude(BasisIndex index) const {
  if (index >= shape_.basis_count()) throw std::invalid_argument(index_error(index, shape_.rank));
  auto it = terms_.find(index);
  return it == terms_.end() ? c64(0.0, 0.0) : it->second;
}

void SparseState::accumulate(BasisIndex index, c64 amp) {
  if (index >= shape_.basis_count()) throw std::invalid_argument(index_error(index, shape_.rank));
  terms_[index] += amp;
}

void SparseState::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < amplitude_floor) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

SparseState apply_creation(const SparseState& state, int qubit) {
  if (qubit < 0 || qubit >= state.shape().rank) {
    throw std::out_of_range("creation qubit " + std::to_string(qubit) +
                            " out of range for rank " + std::to_string(state.shape().rank));
  }
  const BasisIndex bit = BasisIndex{1} << qubit;
  SparseState out(state.shape());
  for (const auto& [index, amp] : state.terms()) {
    if (index & bit) continue;  // nilpotent: already occupied
    out.accumulate(index | bit, amp);
  }
  out.prune();
  return out;
}

SparseState apply_monomial(const SparseState& state, const CreationMonomial& monomial) {
  SparseState out = state;
  for (int idx : monomial.indices()) out = apply_creation(out, idx);
  return out;
}

c64 inner_product(const SparseState& x, const SparseState& y) {
  if (x.shape() != y.shape()) {
    throw std::invalid_argument("inner product of states with different ranks");
  }
  c64 sum(0.0, 0.0);
  const auto& a = x.terms();
  const auto& b = y.terms();
  if (a.size() <= b.size()) {
    for (const auto& [index, amp] : a) {
      auto it = b.find(index);
      if (it != b.end()) sum += std::conj(amp) * it->second;
    }
  } else {
    for (const auto& [index, amp] : b) {
      auto it = a.find(index);
      if (it != a.end()) sum += std::conj(it->second) * amp;
    }
  }
  return sum;
}

double norm(const SparseState& x) {
  double sum = 0.0;
  for (const auto& [index, amp] : x.terms()) sum += std::norm(amp);
  return std::sqrt(sum);
}

double outcome_probability(const SparseState& state, BasisIndex outcome) {
  return std::norm(state.amplitude(outcome));
}

double marginal_probability(const SparseState& state, int qubit) {
  if (qubit < 0 || qubit >= state.shape().rank) {
    throw std::out_of_range("marginal qubit " + std::to_string(qubit) +
                            " out of range for rank " + std::to_string(state.shape().rank));
  }
  const BasisIndex bit = BasisIndex{1} << qubit;
  double sum = 0.0;
  for (const auto& [index, amp] : state.terms()) {
    if (index & bit) sum += std::norm(amp);
  }
  return sum;
}

namespace {

void require_normalized(const SparseState& state) {
  const double n = norm(state);
  if (std::abs(n - 1.0) > norm_tolerance) {
    throw std::domain_error("state norm " + std::to_string(n) +
                            " violates the Born-rule normalization precondition");
  }
}

}  // namespace

double born_exclusive(const SparseState& state, BasisIndex outcome) {
  require_normalized(state);
  return outcome_probability(state, outcome);
}

double born_marginal(const SparseState& state, int qubit) {
  require_normalized(state);
  return marginal_probability(state, qubit);
}

RankReport state_rank(const SparseState& state) {
  if (state.is_zero()) throw std::domain_error("rank of the zero state is undefined");
  RankReport report;
  for (const auto& [index, amp] : state.terms()) report.ranks.insert(std::popcount(index));
  report.homogeneous = report.ranks.size() == 1;
  return report;
}

SparseState add(const SparseState& x, const SparseState& y) {
  if (x.shape() != y.shape()) throw std::invalid_argument("adding states with different ranks");
  SparseState out = x;
  for (const auto& [index, amp] : y.terms()) out.accumulate(index, amp);
  out.prune();
  return out;
}

SparseState scaled(const SparseState& x, c64 factor) {
  SparseState out(x.shape());
  for (const auto& [index, amp] : x.terms()) out.accumulate(index, amp * factor);
  out.prune();
  return out;
}

}  // namespace qreg
