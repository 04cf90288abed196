#include "qreg/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace qreg {
namespace {

std::string g12(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string rank_text(const RunReport& report) {
  if (report.rank.ranks.empty()) return "(zero state)";
  std::string out = "{";
  bool first = true;
  for (int r : report.rank.ranks) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(r);
  }
  out += report.rank.homogeneous ? "} homogeneous" : "} mixed";
  return out;
}

}  // namespace

std::string report_to_text(const RunReport& report) {
  const int rank = report.final_state.shape().rank;
  std::string out;
  out += "norm: " + g12(report.norm) + "\n";
  out += "rank: " + rank_text(report) + "\n";
  out += "state:\n";
  if (report.final_state.is_zero()) {
    out += "  (no terms)\n";
  }
  for (const auto& [index, amp] : report.final_state.terms()) {
    char line[160];
    std::snprintf(line, sizeof line, "  %6llu  %-*s  %14.12g  %14.12g\n",
                  static_cast<unsigned long long>(index), rank + 4,
                  ket_bits(index, rank).c_str(), amp.real(), amp.imag());
    out += line;
  }
  if (!report.detectors.empty()) {
    out += "detectors:\n";
    std::size_t width = 0;
    for (const auto& [name, prob] : report.detectors) width = std::max(width, name.size());
    for (const auto& [name, prob] : report.detectors) {
      out += "  " + name + std::string(width - name.size() + 2, ' ') + g12(prob) + "\n";
    }
  }
  out += "marginals:\n";
  for (int q = 0; q < rank; ++q) {
    out += "  q" + std::to_string(q) + (q < 10 ? " " : "") + "  " +
           g12(report.marginals[static_cast<std::size_t>(q)]) + "\n";
  }
  if (!report.warnings.empty()) {
    out += "warnings:\n";
    for (const std::string& warning : report.warnings) out += "  - " + warning + "\n";
  }
  return out;
}

std::string report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["norm"] = report.norm;
  j["rank"]["ranks"] = std::vector<int>(report.rank.ranks.begin(), report.rank.ranks.end());
  j["rank"]["homogeneous"] = report.rank.homogeneous;
  auto state = nlohmann::json::array();
  const int rank = report.final_state.shape().rank;
  for (const auto& [index, amp] : report.final_state.terms()) {
    nlohmann::json term;
    std::string bits;
    for (int q = 0; q < rank; ++q) bits.push_back((index >> q) & 1u ? '1' : '0');
    term["bits"] = bits;
    term["index"] = index;
    term["amp"] = {amp.real(), amp.imag()};
    state.push_back(std::move(term));
  }
  j["state"] = std::move(state);
  j["detectors"] = nlohmann::json::object();
  for (const auto& [name, prob] : report.detectors) j["detectors"][name] = prob;
  j["marginals"] = nlohmann::json::object();
  for (int q = 0; q < rank; ++q) {
    j["marginals"]["q" + std::to_string(q)] = report.marginals[static_cast<std::size_t>(q)];
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<std::string>& detector_names,
                         const std::vector<SweepRow>& rows) {
  std::string out = "param";
  for (const std::string& name : detector_names) out += "," + name;
  out += "\n";
  for (const SweepRow& row : rows) {
    out += shortest(row.value);
    for (double p : row.probabilities) out += "," + shortest(p);
    out += "\n";
  }
  return out;
}

SweepResult run_sweep(const dsl::Document& document,
                      const std::map<std::string, c64>& overrides,
                      const SweepRequest& request) {
  if (request.steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");

  auto elaborate_at = [&](double value) {
    std::map<std::string, c64> bound = overrides;
    bound[request.parameter] = c64(value, 0.0);
    auto result = dsl::elaborate(document, bound);
    if (!result.ok()) {
      std::string message = "sweep point " + shortest(value) + " does not elaborate";
      for (const auto& diag : result.diagnostics) message += "; " + diag.message;
      throw std::invalid_argument(message);
    }
    return std::move(*result.program);
  };

  const ExperimentProgram probe = elaborate_at(request.from);
  SweepResult result;
  if (request.detectors.empty()) {
    for (const auto& detector : probe.detectors) result.detector_names.push_back(detector.name);
  } else {
    for (const std::string& name : request.detectors) {
      const bool known = std::any_of(probe.detectors.begin(), probe.detectors.end(),
                                     [&](const Detector& d) { return d.name == name; });
      if (!known) throw std::invalid_argument("unknown detector '" + name + "'");
      result.detector_names.push_back(name);
    }
  }

  result.rows.reserve(static_cast<std::size_t>(request.steps));
  for (int k = 0; k < request.steps; ++k) {
    const double value =
        request.from + (request.to - request.from) * static_cast<double>(k) / (request.steps - 1);
    const RunReport report = run_program(elaborate_at(value));
    SweepRow row{value, {}};
    for (const std::string& name : result.detector_names) {
      for (const auto& [detector, prob] : report.detectors) {
        if (detector == name) row.probabilities.push_back(prob);
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string operator_table_text() {
  constexpr std::array<QubitOp, 7> ops = {QubitOp::P0, QubitOp::P1, QubitOp::A,
                                          QubitOp::Adag, QubitOp::S1, QubitOp::S2,
                                          QubitOp::S3};
  auto cell = [](const ScaledQubitOp& value) -> std::string {
    if (value.is_zero()) return "0";
    std::string prefix;
    const c64 c = value.coeff;
    if (c == c64(1.0, 0.0)) {
      prefix = "";
    } else if (c == c64(-1.0, 0.0)) {
      prefix = "-";
    } else if (c == c64(0.0, 1.0)) {
      prefix = "i";
    } else if (c == c64(0.0, -1.0)) {
      prefix = "-i";
    } else {
      prefix = "(" + g12(c.real()) + "," + g12(c.imag()) + ")";
    }
    return prefix + qop_name(*value.op);
  };

  std::string out = "      ";
  for (QubitOp op : ops) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%-6s", qop_name(op));
    out += buf;
  }
  out += "\n";
  for (QubitOp row : ops) {
    char head[16];
    std::snprintf(head, sizeof head, "%-6s", qop_name(row));
    out += head;
    for (QubitOp col : ops) {
      char buf[24];
      std::snprintf(buf, sizeof buf, "%-6s", cell(qop_mul(row, col)).c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace qreg
