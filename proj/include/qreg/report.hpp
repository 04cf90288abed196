#pragma once

#include <map>
#include <string>
#include <vector>

#include "qreg/dsl.hpp"
#include "qreg/rewrite.hpp"

namespace qreg {

/// Human-readable run report: aligned tables, 12 significant digits.
std::string report_to_text(const RunReport& report);

/// Deterministic JSON: keys sorted, amplitudes as [re, im] pairs,
/// probabilities as plain doubles. Identical inputs produce byte-identical
/// output. Schema:
///   {"detectors": {name: prob}, "marginals": {"q<k>": prob}, "norm": num,
///    "rank": {"homogeneous": bool, "ranks": [int]},
///    "state": [{"amp": [re, im], "bits": "...", "index": int}],
///    "warnings": [str]}
std::string report_to_json(const RunReport& report);

/// One parameter-sweep row: the swept value and the probability of each
/// requested detector, in request order.
struct SweepRow {
  double value = 0.0;
  std::vector<double> probabilities;
};

/// CSV with header "param,<detector names...>" and one row per grid point.
/// Values use shortest round-trip formatting.
std::string sweep_to_csv(const std::vector<std::string>& detector_names,
                         const std::vector<SweepRow>& rows);

struct SweepRequest {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;                        // >= 2; endpoints inclusive
  std::vector<std::string> detectors;   // empty = every declared detector
};

struct SweepResult {
  std::vector<std::string> detector_names;
  std::vector<SweepRow> rows;           // one per grid point, grid order
};

/// Runs the experiment once per grid point with the swept parameter bound
/// to from + k*(to-from)/(steps-1). Throws std::invalid_argument on an
/// unknown parameter or detector, steps < 2, or a document that does not
/// elaborate.
SweepResult run_sweep(const dsl::Document& document,
                      const std::map<std::string, c64>& overrides,
                      const SweepRequest& request);

/// The single-qubit operator product table as aligned text (rows multiply
/// columns from the left).
std::string operator_table_text();

}  // namespace qreg
