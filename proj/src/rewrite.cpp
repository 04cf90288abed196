#include "qreg/rewrite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace qreg {
namespace {

// Normalises -0.0 components so printed coefficients re-parse bit-equal.
c64 canonical(c64 z) {
  return {z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag()};
}

std::string format_norm(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

CreationMonomial monomial_from_mask(BasisIndex mask) {
  std::vector<int> indices;
  for (int j = 0; j < 63; ++j) {
    if (mask & (BasisIndex{1} << j)) indices.push_back(j);
  }
  return CreationMonomial(indices);
}

}  // namespace

TransitionRule::TransitionRule(int source, std::vector<WeightedMonomial> targets)
    : source_(source) {
  if (source < 0 || source > 62) {
    throw std::invalid_argument("rule source " + std::to_string(source) + " outside [0, 62]");
  }
  if (targets.empty()) {
    throw std::invalid_argument("rule for source " + std::to_string(source) + " has no targets");
  }
  // Merge targets with identical monomials, keeping first-seen order.
  for (auto& target : targets) {
    if (target.monomial.contains(source)) {
      throw std::invalid_argument("rule target contains its own source qubit " +
                                  std::to_string(source));
    }
    auto match = std::find_if(targets_.begin(), targets_.end(), [&](const WeightedMonomial& t) {
      return t.monomial == target.monomial;
    });
    if (match == targets_.end()) {
      target.coeff = canonical(target.coeff);
      targets_.push_back(std::move(target));
    } else {
      match->coeff = canonical(match->coeff + target.coeff);
    }
  }
  std::erase_if(targets_, [](const WeightedMonomial& t) {
    return std::abs(t.coeff) < amplitude_floor;
  });
  if (targets_.empty()) {
    throw std::invalid_argument("rule for source " + std::to_string(source) +
                                " cancels to zero");
  }
}

std::optional<std::string> stage_violation(const std::vector<TransitionRule>& rules) {
  std::set<int> sources;
  for (const auto& rule : rules) {
    if (!sources.insert(rule.source()).second) {
      return "duplicate rule source qubit " + std::to_string(rule.source());
    }
  }
  for (const auto& rule : rules) {
    for (const auto& target : rule.targets()) {
      for (int idx : target.monomial.indices()) {
        if (idx != rule.source() && sources.count(idx)) {
          return "target of the rule for qubit " + std::to_string(rule.source()) +
                 " feeds qubit " + std::to_string(idx) + ", which is another rule's source";
        }
      }
    }
  }
  return std::nullopt;
}

Stage::Stage(std::string name, std::vector<TransitionRule> rules)
    : name_(std::move(name)), rules_(std::move(rules)) {
  if (auto violation = stage_violation(rules_)) {
    throw std::invalid_argument("stage '" + name_ + "': " + *violation);
  }
}

std::vector<int> Stage::sources() const {
  std::vector<int> out;
  out.reserve(rules_.size());
  for (const auto& rule : rules_) out.push_back(rule.source());
  return out;
}

BasisIndex Detector::mask() const {
  BasisIndex m = 0;
  for (int q : qubits) m |= BasisIndex{1} << q;
  return m;
}

void validate_program(const ExperimentProgram& program) {
  const int rank = program.shape.rank;
  if (program.initial.shape() != program.shape) {
    throw std::invalid_argument("initial state rank differs from the program register rank");
  }
  std::set<std::string> stage_names;
  for (const auto& stage : program.stages) {
    if (!stage_names.insert(stage.name()).second) {
      throw std::invalid_argument("duplicate stage name '" + stage.name() + "'");
    }
    for (const auto& rule : stage.rules()) {
      if (rule.source() >= rank) {
        throw std::invalid_argument("stage '" + stage.name() + "': source qubit " +
                                    std::to_string(rule.source()) + " >= rank " +
                                    std::to_string(rank));
      }
      for (const auto& target : rule.targets()) {
        if (target.monomial.max_index() >= rank) {
          throw std::invalid_argument("stage '" + stage.name() + "': target qubit " +
                                      std::to_string(target.monomial.max_index()) +
                                      " >= rank " + std::to_string(rank));
        }
      }
    }
  }
  std::set<std::string> detector_names;
  for (const auto& detector : program.detectors) {
    if (!detector_names.insert(detector.name).second) {
      throw std::invalid_argument("duplicate detector name '" + detector.name + "'");
    }
    if (detector.qubits.empty()) {
      throw std::invalid_argument("detector '" + detector.name + "' lists no qubits");
    }
    std::set<int> seen;
    for (int q : detector.qubits) {
      if (q < 0 || q >= rank) {
        throw std::invalid_argument("detector '" + detector.name + "': qubit " +
                                    std::to_string(q) + " >= rank " + std::to_string(rank));
      }
      if (!seen.insert(q).second) {
        throw std::invalid_argument("detector '" + detector.name + "' repeats qubit " +
                                    std::to_string(q));
      }
    }
  }
}

SparseState apply_rule(const SparseState& state, const TransitionRule& rule) {
  const int rank = state.shape().rank;
  if (rule.source() >= rank) {
    throw std::out_of_range("rule source qubit " + std::to_string(rule.source()) +
                            " out of range for rank " + std::to_string(rank));
  }
  for (const auto& target : rule.targets()) {
    if (target.monomial.max_index() >= rank) {
      throw std::out_of_range("rule target qubit " + std::to_string(target.monomial.max_index()) +
                              " out of range for rank " + std::to_string(rank));
    }
  }
  const BasisIndex source_bit = BasisIndex{1} << rule.source();
  SparseState out(state.shape());
  for (const auto& [index, amp] : state.terms()) {
    if (!(index & source_bit)) {
      out.accumulate(index, amp);
      continue;
    }
    const BasisIndex cleared = index & ~source_bit;
    for (const auto& [coeff, monomial] : rule.targets()) {
      const BasisIndex mask = monomial.mask();
      if (cleared & mask) continue;  // some target qubit already occupied
      out.accumulate(cleared | mask, amp * coeff);
    }
  }
  out.prune();
  return out;
}

SparseState apply_stage(const SparseState& state, const Stage& stage) {
  // Sources are distinct and never appear in targets, so folding the rules
  // sequentially equals simultaneous substitution.
  SparseState current = state;
  for (const auto& rule : stage.rules()) current = apply_rule(current, rule);
  return current;
}

std::vector<SparseState> run_trace(const ExperimentProgram& program) {
  validate_program(program);
  std::vector<SparseState> trace;
  trace.reserve(program.stages.size() + 1);
  trace.push_back(program.initial);
  for (const auto& stage : program.stages) trace.push_back(apply_stage(trace.back(), stage));
  return trace;
}

RunReport run_program(const ExperimentProgram& program) {
  auto trace = run_trace(program);
  RunReport report{trace.back(), 0.0, true, {}, {}, {}, {}};
  const SparseState& final_state = report.final_state;

  report.norm = norm(final_state);
  report.norm_ok = std::abs(report.norm - 1.0) <= norm_tolerance;
  if (!report.norm_ok) {
    report.warnings.push_back("final norm " + format_norm(report.norm) +
                              " violates the Born-rule normalization precondition; "
                              "probabilities are raw squared magnitudes");
  }
  if (final_state.is_zero()) {
    report.warnings.push_back("final state is the zero state");
  } else {
    report.rank = state_rank(final_state);
  }
  for (const auto& detector : program.detectors) {
    report.detectors.emplace_back(detector.name,
                                  outcome_probability(final_state, detector.mask()));
  }
  report.marginals.resize(static_cast<std::size_t>(program.shape.rank));
  for (int q = 0; q < program.shape.rank; ++q) {
    report.marginals[static_cast<std::size_t>(q)] = marginal_probability(final_state, q);
  }
  return report;
}

std::vector<BasisIndex> default_isometry_domain(const Stage& stage) {
  std::vector<BasisIndex> domain{0};
  for (int source : stage.sources()) domain.push_back(BasisIndex{1} << source);
  return domain;
}

IsometryReport check_isometry(const Stage& stage, RegisterShape shape,
                              const std::vector<BasisIndex>& domain) {
  std::vector<BasisIndex> states = domain;
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());

  std::vector<SparseState> images;
  images.reserve(states.size());
  for (BasisIndex index : states) {
    images.push_back(apply_stage(SparseState::basis_state(shape, index), stage));
  }

  IsometryReport report;
  auto record = [&report](double deviation) {
    report.max_deviation = std::max(report.max_deviation, deviation);
  };

  for (const auto& image : images) {
    record(std::abs(inner_product(image, image) - c64(1.0, 0.0)));
  }
  // Distinct domain states are orthonormal, so their images must have
  // vanishing inner products. Only pairs with overlapping support can
  // produce a nonzero value.
  std::map<BasisIndex, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& [key, amp] : images[i].terms()) by_key[key].push_back(i);
  }
  std::set<std::pair<std::size_t, std::size_t>> candidate_pairs;
  for (const auto& [key, holders] : by_key) {
    for (std::size_t a = 0; a < holders.size(); ++a) {
      for (std::size_t b = a + 1; b < holders.size(); ++b) {
        candidate_pairs.emplace(holders[a], holders[b]);
      }
    }
  }
  for (const auto& [i, j] : candidate_pairs) {
    record(std::abs(inner_product(images[i], images[j])));
  }

  report.passed = report.max_deviation <= isometry_tolerance;
  return report;
}

Stage compose_stages(const Stage& first, const Stage& second) {
  std::map<int, const TransitionRule*> second_by_source;
  for (const auto& rule : second.rules()) second_by_source[rule.source()] = &rule;
  std::set<int> first_sources;
  for (const auto& rule : first.rules()) first_sources.insert(rule.source());

  std::vector<TransitionRule> rules;
  for (const auto& rule : first.rules()) {
    std::vector<WeightedMonomial> expanded;
    for (const auto& target : rule.targets()) {
      // Distribute second's substitutions over the target's factors;
      // repeated creation indices annihilate the branch.
      std::vector<std::pair<c64, BasisIndex>> partial{{target.coeff, 0}};
      for (int idx : target.monomial.indices()) {
        std::vector<std::pair<c64, BasisIndex>> next;
        auto it = second_by_source.find(idx);
        if (it == second_by_source.end()) {
          const BasisIndex bit = BasisIndex{1} << idx;
          for (const auto& [coeff, mask] : partial) {
            if (mask & bit) continue;
            next.emplace_back(coeff, mask | bit);
          }
        } else {
          for (const auto& [coeff, mask] : partial) {
            for (const auto& sub : it->second->targets()) {
              const BasisIndex sub_mask = sub.monomial.mask();
              if (mask & sub_mask) continue;
              next.emplace_back(coeff * sub.coeff, mask | sub_mask);
            }
          }
        }
        partial = std::move(next);
      }
      for (const auto& [coeff, mask] : partial) {
        expanded.push_back({coeff, monomial_from_mask(mask)});
      }
    }
    if (expanded.empty()) {
      throw std::invalid_argument("composition annihilates the rule for qubit " +
                                  std::to_string(rule.source()));
    }
    rules.emplace_back(rule.source(), std::move(expanded));
  }
  // A bit that second rewrites can also reach the composite directly,
  // unless first already consumes it (first's outputs never contain
  // first's sources, so that rule could no longer fire).
  for (const auto& rule : second.rules()) {
    if (!first_sources.count(rule.source())) rules.push_back(rule);
  }
  return Stage(first.name() + "+" + second.name(), std::move(rules));
}

}  // namespace qreg
