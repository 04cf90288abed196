#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qreg/rewrite.hpp"

namespace qreg::dsl {

struct SourcePos {
  int line = 0;    // 1-based
  int column = 0;  // 1-based
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  SourcePos pos;
  Severity severity = Severity::Error;
  std::string message;
};

/// At most this many diagnostics are collected before the parser gives up
/// on reporting further problems.
inline constexpr std::size_t max_diagnostics = 20;

/// Complex-valued expression tree. Nodes carry their source position so
/// evaluation failures (unbound parameter, division by zero, non-finite
/// results) can be reported against the experiment file.
struct Expr {
  enum class Kind {
    Number,    // number
    ImagUnit,  // i
    Pi,        // pi
    Param,     // ident
    Neg,       // children[0]
    Add, Sub, Mul, Div, Pow,  // children[0] op children[1]
    Call,      // ident(children[0]); ident in {exp, cos, sin, tan, sqrt, conj}
  };

  Kind kind = Kind::Number;
  double number = 0.0;
  std::string ident;
  std::vector<Expr> children;
  SourcePos pos;
};

struct EvalError {
  SourcePos pos;
  std::string message;
};

/// Evaluates with standard complex arithmetic. `^` requires a real
/// exponent; near-integer exponents are applied by repeated multiplication.
/// Throws EvalError on unbound parameters, division by zero or non-finite
/// results.
c64 eval_expr(const Expr& expr, const std::map<std::string, c64>& env);

// --- document model (syntax only; coefficients still unevaluated) ---

struct TermAst {
  std::optional<Expr> coeff;  // absent = 1
  std::vector<int> indices;
  SourcePos pos;
};

struct RuleAst {
  int source = 0;
  std::vector<TermAst> targets;
  SourcePos pos;
};

/// Catalog constructor call. Argument shapes per callee:
///   pvm(src, term + term + ...)            one qubit per term
///   bs(in1, in2, out1, out2, a, b, eta)
///   map(src, dst, factor)
///   pair(src, term + term + ...)           two qubits per term
struct CallAst {
  std::string callee;
  std::vector<int> qubit_args;
  std::vector<Expr> expr_args;
  std::vector<TermAst> term_args;
  SourcePos pos;
};

struct StageAst {
  std::string name;
  std::vector<std::variant<RuleAst, CallAst>> entries;
  SourcePos pos;
};

struct ParamAst {
  std::string name;
  Expr value;
  SourcePos pos;
};

struct DetectAst {
  std::string name;
  std::vector<int> qubits;
  SourcePos pos;
};

struct Document {
  int rank = 0;
  SourcePos rank_pos;
  std::vector<ParamAst> params;
  std::vector<TermAst> init_terms;  // empty with has_init=false means void
  bool has_init = false;
  SourcePos init_pos;
  std::vector<StageAst> stages;
  std::vector<DetectAst> detects;
};

struct ParseResult {
  std::optional<Document> document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return document.has_value() && !has_errors(); }
  bool has_errors() const;
};

/// Parses experiment text. Recovers after errors inside stage bodies and
/// between items, collecting up to max_diagnostics diagnostics.
ParseResult parse_document(std::string_view text);

struct ElaborateResult {
  std::optional<ExperimentProgram> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

/// Evaluates parameters (command-line overrides shadow `param` lines),
/// builds the initial state, instantiates stages through the catalog
/// constructors and validates the resulting program. Override names must
/// be declared or referenced somewhere in the document.
ElaborateResult elaborate(const Document& document, const std::map<std::string, c64>& overrides);

/// parse_document + elaborate in one call.
ElaborateResult parse_experiment(std::string_view text,
                                 const std::map<std::string, c64>& overrides = {});

/// Renders a program back to experiment text. Coefficients are printed in
/// shortest round-trip form, so re-parsing yields a program with
/// bit-identical coefficients. Parameters are already substituted.
std::string pretty_print(const ExperimentProgram& program);

/// Parses and evaluates a standalone value expression such as "0.5*pi" or
/// "1/sqrt(2)+0.1*i" (used for --param command-line overrides). Throws
/// std::invalid_argument on any error.
c64 parse_value_expression(std::string_view text);

}  // namespace qreg::dsl
