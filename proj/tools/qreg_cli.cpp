#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qreg/dsl.hpp"
#include "qreg/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;    // parse / validation problems
constexpr int kExitRuntime = 2;  // norm precondition or failed checks

struct Options {
  std::string file;
  std::vector<std::string> params;
  std::string format = "text";
  std::string out_path;
  // sweep-only
  std::string sweep_param;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  std::vector<std::string> detectors;
};

int fail_usage(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitUsage;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

bool parse_overrides(const std::vector<std::string>& params,
                     std::map<std::string, qreg::c64>& overrides, std::string& error) {
  for (const std::string& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      error = "--param expects name=value, got '" + kv + "'";
      return false;
    }
    const std::string name = kv.substr(0, eq);
    try {
      overrides[name] = qreg::dsl::parse_value_expression(kv.substr(eq + 1));
    } catch (const std::invalid_argument& err) {
      error = err.what();
      return false;
    }
  }
  return true;
}

void print_diagnostics(const std::string& file, const std::vector<qreg::dsl::Diagnostic>& diags) {
  for (const auto& diag : diags) {
    const char* severity =
        diag.severity == qreg::dsl::Diagnostic::Severity::Error ? "error" : "warning";
    if (diag.pos.line > 0) {
      std::cerr << file << ":" << diag.pos.line << ":" << diag.pos.column << ": " << severity
                << ": " << diag.message << "\n";
    } else {
      std::cerr << file << ": " << severity << ": " << diag.message << "\n";
    }
  }
}

int emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) return fail_usage("cannot write '" + opt.out_path + "'");
  out << text;
  return kExitOk;
}

// Parses the file and elaborates it with the given overrides; nullopt plus
// printed diagnostics on failure.
std::optional<qreg::ExperimentProgram> load_program(
    const Options& opt, const std::map<std::string, qreg::c64>& overrides) {
  std::string text;
  if (!read_file(opt.file, text)) {
    std::cerr << "error: cannot read '" << opt.file << "'\n";
    return std::nullopt;
  }
  auto result = qreg::dsl::parse_experiment(text, overrides);
  print_diagnostics(opt.file, result.diagnostics);
  if (!result.ok()) return std::nullopt;
  return std::move(result.program);
}

int cmd_run(const Options& opt) {
  std::map<std::string, qreg::c64> overrides;
  std::string error;
  if (!parse_overrides(opt.params, overrides, error)) return fail_usage(error);
  auto program = load_program(opt, overrides);
  if (!program) return kExitUsage;

  const qreg::RunReport report = qreg::run_program(*program);
  const std::string text =
      opt.format == "json" ? qreg::report_to_json(report) : qreg::report_to_text(report);
  const int emit_status = emit(opt, text);
  if (emit_status != kExitOk) return emit_status;
  return report.norm_ok ? kExitOk : kExitRuntime;
}

int cmd_sweep(const Options& opt) {
  std::map<std::string, qreg::c64> overrides;
  std::string error;
  if (!parse_overrides(opt.params, overrides, error)) return fail_usage(error);

  std::string text;
  if (!read_file(opt.file, text)) return fail_usage("cannot read '" + opt.file + "'");
  auto parsed = qreg::dsl::parse_document(text);
  if (!parsed.ok()) {
    print_diagnostics(opt.file, parsed.diagnostics);
    return kExitUsage;
  }

  const qreg::SweepRequest request{opt.sweep_param, opt.from, opt.to, opt.steps, opt.detectors};
  try {
    const qreg::SweepResult result = qreg::run_sweep(*parsed.document, overrides, request);
    return emit(opt, qreg::sweep_to_csv(result.detector_names, result.rows));
  } catch (const std::invalid_argument& e) {
    return fail_usage(e.what());
  }
}

int cmd_check(const Options& opt) {
  std::map<std::string, qreg::c64> overrides;
  std::string error;
  if (!parse_overrides(opt.params, overrides, error)) return fail_usage(error);
  auto program = load_program(opt, overrides);
  if (!program) return kExitUsage;

  const std::vector<qreg::SparseState> trace = qreg::run_trace(*program);
  bool all_passed = true;
  std::string text;
  for (std::size_t k = 0; k < program->stages.size(); ++k) {
    const qreg::Stage& stage = program->stages[k];
    // Check on the void state, each source alone, and everything the stage
    // actually receives from the preceding pipeline.
    std::vector<qreg::BasisIndex> domain = qreg::default_isometry_domain(stage);
    for (const auto& [index, amp] : trace[k].terms()) domain.push_back(index);
    const qreg::IsometryReport result = qreg::check_isometry(stage, program->shape, domain);
    all_passed = all_passed && result.passed;
    char line[160];
    std::snprintf(line, sizeof line, "stage %-16s max deviation %.3e  %s\n",
                  stage.name().c_str(), result.max_deviation,
                  result.passed ? "pass" : "FAIL");
    text += line;
  }
  if (program->stages.empty()) text = "no stages: vacuous pass\n";
  const int emit_status = emit(opt, text);
  if (emit_status != kExitOk) return emit_status;
  return all_passed ? kExitOk : kExitRuntime;
}

int cmd_table(const Options& opt) { return emit(opt, qreg::operator_table_text()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum register experiment engine"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* cmd, bool with_file = true) {
    if (with_file) cmd->add_option("file", opt.file, "experiment file (.qreg)")->required();
    cmd->add_option("--param", opt.params, "override a parameter, name=value (repeatable)");
    cmd->add_option("--out", opt.out_path, "write output to a file instead of stdout");
  };

  CLI::App* run = app.add_subcommand("run", "run an experiment and report probabilities");
  add_common(run);
  run->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* sweep = app.add_subcommand("sweep", "sweep a parameter and emit CSV");
  sweep->add_option("file", opt.file, "experiment file (.qreg)")->required();
  sweep->add_option("name", opt.sweep_param, "parameter to sweep")->required();
  sweep->add_option("from", opt.from, "first grid value")->required();
  sweep->add_option("to", opt.to, "last grid value (inclusive)")->required();
  sweep->add_option("steps", opt.steps, "number of grid points (>= 2)")->required();
  sweep->add_option("--detect", opt.detectors, "detector column (repeatable; default all)");
  sweep->add_option("--param", opt.params, "override a parameter, name=value (repeatable)");
  sweep->add_option("--out", opt.out_path, "write output to a file instead of stdout");

  CLI::App* check = app.add_subcommand("check", "verify per-stage probability conservation");
  add_common(check);

  CLI::App* table = app.add_subcommand("table", "print the single-qubit operator product table");
  table->add_option("--out", opt.out_path, "write output to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (check->parsed()) return cmd_check(opt);
    if (table->parsed()) return cmd_table(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
