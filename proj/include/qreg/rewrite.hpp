#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qreg/register.hpp"

namespace qreg {

/// One weighted creation monomial on the right-hand side of a rule.
struct WeightedMonomial {
  c64 coeff;
  CreationMonomial monomial;
};

/// Substitution for one source qubit's creation operator:
///   A+_source -> sum_k coeff_k * (product of A+ over monomial_k).
/// Targets never contain the source, and duplicate monomials are merged at
/// construction. Coefficients have negative zeros normalised away so that
/// printed programs re-parse to bit-identical values.
class TransitionRule {
 public:
  TransitionRule(int source, std::vector<WeightedMonomial> targets);

  int source() const { return source_; }
  const std::vector<WeightedMonomial>& targets() const { return targets_; }

 private:
  int source_;
  std::vector<WeightedMonomial> targets_;
};

/// Reason a rule set cannot form a stage, or nullopt when it can. Sources
/// must be pairwise distinct and no target monomial may contain another
/// rule's source; under those constraints simultaneous substitution equals
/// sequential application in any order.
std::optional<std::string> stage_violation(const std::vector<TransitionRule>& rules);

/// A set of simultaneous transition rules modelling one apparatus module.
class Stage {
 public:
  Stage(std::string name, std::vector<TransitionRule> rules);

  const std::string& name() const { return name_; }
  const std::vector<TransitionRule>& rules() const { return rules_; }
  std::vector<int> sources() const;

 private:
  std::string name_;
  std::vector<TransitionRule> rules_;
};

/// Named exclusive outcome: the coincidence basis state with exactly the
/// listed qubits firing.
struct Detector {
  std::string name;
  std::vector<int> qubits;

  BasisIndex mask() const;
};

/// A full experiment: register shape, prepared initial state, ordered
/// stages, and the declared detector outcomes. Programs are forward-only;
/// there is no inverse-stage operation.
struct ExperimentProgram {
  RegisterShape shape;
  SparseState initial;
  std::vector<Stage> stages;
  std::vector<Detector> detectors;
};

/// Throws std::invalid_argument on out-of-range qubit indices or duplicate
/// stage/detector names.
void validate_program(const ExperimentProgram& program);

/// Applies one rule linearly: terms without the source bit pass unchanged;
/// terms with it have the bit cleared and each target monomial applied
/// (nilpotency may annihilate), with coinciding outputs summed and pruned.
SparseState apply_rule(const SparseState& state, const TransitionRule& rule);

/// Simultaneous substitution of all of the stage's rules.
SparseState apply_stage(const SparseState& state, const Stage& stage);

/// States entering each stage plus the final state; front() is the initial
/// state, back() the final one (size = stages + 1).
std::vector<SparseState> run_trace(const ExperimentProgram& program);

struct RunReport {
  SparseState final_state;
  double norm = 0.0;
  bool norm_ok = true;                                   // |norm - 1| <= norm_tolerance
  RankReport rank;                                       // empty ranks for the zero state
  std::vector<std::pair<std::string, double>> detectors; // declaration order
  std::vector<double> marginals;                         // one entry per qubit
  std::vector<std::string> warnings;
};

/// Folds the stages over the initial state and reports detector and
/// marginal probabilities, the final norm and the rank structure. Norm
/// drift beyond norm_tolerance is reported as a warning (probabilities are
/// then raw squared magnitudes, never rescaled).
RunReport run_program(const ExperimentProgram& program);

inline constexpr double isometry_tolerance = 1e-10;

struct IsometryReport {
  bool passed = true;
  double max_deviation = 0.0;
};

/// Void state plus one singleton state per rule source: the domain on
/// which every catalog stage is expected to preserve inner products.
std::vector<BasisIndex> default_isometry_domain(const Stage& stage);

/// Verifies that pairwise inner products among the images of the domain
/// basis states match those of the originals (isometry on the spanned
/// subspace). Diagnostic only; running a non-isometric stage is allowed.
IsometryReport check_isometry(const Stage& stage, RegisterShape shape,
                              const std::vector<BasisIndex>& domain);

/// The single stage equivalent to applying `first` then `second`, obtained
/// by substituting second's rules into first's target monomials. Defined
/// only when the result is itself a valid stage with nonempty rules;
/// throws std::invalid_argument otherwise.
Stage compose_stages(const Stage& first, const Stage& second);

}  // namespace qreg
