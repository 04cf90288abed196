#include "qreg/catalog.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qreg {
namespace {

void require_distinct(const std::vector<int>& qubits, const char* what) {
  std::set<int> seen;
  for (int q : qubits) {
    if (!seen.insert(q).second) {
      throw std::invalid_argument(std::string(what) + ": qubit " + std::to_string(q) +
                                  " used more than once");
    }
  }
}

}  // namespace

Stage pvm_test(int src, const std::vector<int>& outs, const std::vector<c64>& amps) {
  if (outs.size() != amps.size()) {
    throw std::invalid_argument("pvm: " + std::to_string(outs.size()) + " outcome qubits but " +
                                std::to_string(amps.size()) + " amplitudes");
  }
  if (outs.empty()) throw std::invalid_argument("pvm: no outcome qubits");
  std::vector<int> all = outs;
  all.push_back(src);
  require_distinct(all, "pvm");

  std::vector<WeightedMonomial> targets;
  targets.reserve(outs.size());
  for (std::size_t k = 0; k < outs.size(); ++k) {
    targets.push_back({amps[k], CreationMonomial({outs[k]})});
  }
  return Stage("pvm", {TransitionRule(src, std::move(targets))});
}

Stage beam_splitter(int in1, int in2, int out1, int out2, c64 a, c64 b, double eta) {
  require_distinct({in1, in2, out1, out2}, "bs");
  const double mod2 = std::norm(a) + std::norm(b);
  if (std::abs(mod2 - 1.0) > norm_tolerance) {
    throw std::invalid_argument("bs: |a|^2 + |b|^2 = " + std::to_string(mod2) +
                                ", expected 1");
  }
  const c64 phase = std::exp(c64(0.0, eta));
  TransitionRule rule1(in1, {{phase * a, CreationMonomial({out1})},
                             {-phase * std::conj(b), CreationMonomial({out2})}});
  TransitionRule rule2(in2, {{phase * b, CreationMonomial({out1})},
                             {phase * std::conj(a), CreationMonomial({out2})}});
  return Stage("bs", {std::move(rule1), std::move(rule2)});
}

Stage single_channel_map(int src, int dst, c64 factor) {
  if (src == dst) throw std::invalid_argument("map: source and destination coincide");
  if (std::abs(std::abs(factor) - 1.0) > norm_tolerance) {
    throw std::invalid_argument("map: |factor| = " + std::to_string(std::abs(factor)) +
                                ", expected 1 (lossless channel)");
  }
  return Stage("map", {TransitionRule(src, {{factor, CreationMonomial({dst})}})});
}

Stage pair_source(int src, const std::vector<PairTerm>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("pair: no target pairs");
  double total = 0.0;
  std::vector<WeightedMonomial> targets;
  targets.reserve(pairs.size());
  for (const auto& term : pairs) {
    if (term.q_a == src || term.q_b == src) {
      throw std::invalid_argument("pair: target pair involves the source qubit " +
                                  std::to_string(src));
    }
    targets.push_back({term.coeff, CreationMonomial({term.q_a, term.q_b})});
    total += std::norm(term.coeff);
  }
  if (std::abs(total - 1.0) > norm_tolerance) {
    throw std::invalid_argument("pair: sum of |coeff|^2 = " + std::to_string(total) +
                                ", expected 1");
  }
  return Stage("pair", {TransitionRule(src, std::move(targets))});
}

}  // namespace qreg
