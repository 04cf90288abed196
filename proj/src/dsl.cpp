#include "qreg/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <stdexcept>

#include "qreg/catalog.hpp"

namespace qreg::dsl {
namespace {

// ------------------------------------------------------------------ lexer

enum class Tok {
  Ident, Number, Create,  // "A+" (the letter A immediately followed by '+')
  LParen, RParen, LBrace, RBrace,
  Plus, Minus, Star, Slash, Caret, Arrow, Equals, Comma,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  bool is_integer = false;
  SourcePos pos;
};

const char* token_label(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Create: return "'A+'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::Arrow: return "'->'";
    case Tok::Equals: return "'='";
    case Tok::Comma: return "','";
    case Tok::End: return "end of file";
  }
  return "?";
}

struct SyntaxError {
  SourcePos pos;
  std::string message;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    i += n;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      std::size_t n = 0;
      while (i + n < text.size() && text[i + n] != '\n') ++n;
      advance(n);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    Token tok;
    tok.pos = {line, column};
    if (is_ident_start(c)) {
      std::size_t n = 1;
      while (i + n < text.size() && is_ident_char(text[i + n])) ++n;
      tok.text = std::string(text.substr(i, n));
      if (tok.text == "A" && i + n < text.size() && text[i + n] == '+') {
        tok.kind = Tok::Create;
        tok.text = "A+";
        ++n;
      } else {
        tok.kind = Tok::Ident;
      }
      advance(n);
      tokens.push_back(std::move(tok));
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      std::size_t n = 0;
      bool integral = true;
      while (i + n < text.size() && is_digit(text[i + n])) ++n;
      if (i + n < text.size() && text[i + n] == '.') {
        integral = false;
        ++n;
        while (i + n < text.size() && is_digit(text[i + n])) ++n;
      }
      if (i + n < text.size() && (text[i + n] == 'e' || text[i + n] == 'E')) {
        std::size_t m = n + 1;  // offset just past the exponent marker
        if (i + m < text.size() && (text[i + m] == '+' || text[i + m] == '-')) ++m;
        if (i + m < text.size() && is_digit(text[i + m])) {
          integral = false;
          n = m;
          while (i + n < text.size() && is_digit(text[i + n])) ++n;
        }
      }
      tok.kind = Tok::Number;
      tok.text = std::string(text.substr(i, n));
      tok.number = std::strtod(tok.text.c_str(), nullptr);
      tok.is_integer = integral;
      advance(n);
      tokens.push_back(std::move(tok));
      continue;
    }
    auto single = [&](Tok kind) {
      tok.kind = kind;
      tok.text = std::string(1, c);
      advance(1);
      tokens.push_back(tok);
    };
    switch (c) {
      case '(': single(Tok::LParen); break;
      case ')': single(Tok::RParen); break;
      case '{': single(Tok::LBrace); break;
      case '}': single(Tok::RBrace); break;
      case '+': single(Tok::Plus); break;
      case '*': single(Tok::Star); break;
      case '/': single(Tok::Slash); break;
      case '^': single(Tok::Caret); break;
      case '=': single(Tok::Equals); break;
      case ',': single(Tok::Comma); break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          tok.kind = Tok::Arrow;
          tok.text = "->";
          advance(2);
          tokens.push_back(tok);
        } else {
          single(Tok::Minus);
        }
        break;
      default:
        throw SyntaxError{tok.pos, std::string("unexpected character '") + c + "'"};
    }
  }
  Token end;
  end.kind = Tok::End;
  end.pos = {line, column};
  tokens.push_back(end);
  return tokens;
}

// ----------------------------------------------------------------- parser

const std::set<std::string>& item_keywords() {
  static const std::set<std::string> kw = {"param", "init", "stage", "detect"};
  return kw;
}

const std::set<std::string>& call_keywords() {
  static const std::set<std::string> kw = {"pvm", "bs", "map", "pair"};
  return kw;
}

const std::set<std::string>& function_names() {
  static const std::set<std::string> kw = {"exp", "cos", "sin", "tan", "sqrt", "conj"};
  return kw;
}

bool is_reserved(const std::string& name) {
  return name == "register" || name == "A" || name == "i" || name == "pi" ||
         item_keywords().count(name) || call_keywords().count(name) ||
         function_names().count(name);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  ParseResult run() {
    ParseResult result;
    Document doc;
    parse_register_header(doc);
    while (!at(Tok::End)) {
      try {
        parse_item(doc);
      } catch (const SyntaxError& err) {
        report(err);
        skip_to_item();
      }
    }
    result.document = std::move(doc);
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

  std::vector<Diagnostic> take_diagnostics() { return std::move(diagnostics_); }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[k];
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(const std::string& word) const {
    return peek().kind == Tok::Ident && peek().text == word;
  }
  const Token& take() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  const Token& expect(Tok kind, const std::string& context) {
    if (!at(kind)) {
      throw SyntaxError{peek().pos, std::string("expected ") + token_label(kind) + " " + context +
                                        ", found " + describe(peek())};
    }
    return take();
  }

  static std::string describe(const Token& tok) {
    if (tok.kind == Tok::End) return "end of file";
    return "'" + tok.text + "'";
  }

  void report(const SyntaxError& err) {
    if (diagnostics_.size() < max_diagnostics) {
      diagnostics_.push_back({err.pos, Diagnostic::Severity::Error, err.message});
    }
  }

  void skip_to_item() {
    while (!at(Tok::End)) {
      if (peek().kind == Tok::Ident && item_keywords().count(peek().text)) return;
      take();
    }
  }

  // Skips the remainder of a broken stage entry: everything on the error
  // line, then anything that cannot start a new entry.
  void skip_to_entry(int error_line) {
    while (!at(Tok::End) && !at(Tok::RBrace)) {
      const Token& tok = peek();
      const bool entry_start =
          tok.kind == Tok::Create || (tok.kind == Tok::Ident && call_keywords().count(tok.text));
      if (tok.pos.line > error_line && entry_start) return;
      take();
    }
  }

  int parse_int(const std::string& context) {
    const Token& tok = expect(Tok::Number, context);
    if (!tok.is_integer || tok.number < 0 || tok.number > 1e9) {
      throw SyntaxError{tok.pos, "expected a non-negative integer " + context};
    }
    return static_cast<int>(tok.number);
  }

  std::string parse_name(const std::string& context) {
    const Token& tok = expect(Tok::Ident, context);
    if (is_reserved(tok.text)) {
      throw SyntaxError{tok.pos, "'" + tok.text + "' is a reserved word and cannot be used " +
                                     context};
    }
    return tok.text;
  }

  void parse_register_header(Document& doc) {
    try {
      const Token& kw = expect(Tok::Ident, "at the start of the file");
      if (kw.text != "register") {
        throw SyntaxError{kw.pos, "experiment files must start with 'register <rank>'"};
      }
      doc.rank_pos = peek().pos;
      doc.rank = parse_int("after 'register'");
    } catch (const SyntaxError& err) {
      report(err);
      skip_to_item();
    }
  }

  void parse_item(Document& doc) {
    const Token& kw = peek();
    if (at_keyword("param")) {
      take();
      ParamAst param;
      param.pos = kw.pos;
      param.name = parse_name("as a parameter name");
      expect(Tok::Equals, "after the parameter name");
      param.value = parse_expr();
      doc.params.push_back(std::move(param));
    } else if (at_keyword("init")) {
      take();
      if (doc.has_init) {
        throw SyntaxError{kw.pos, "duplicate 'init' declaration"};
      }
      doc.has_init = true;
      doc.init_pos = kw.pos;
      doc.init_terms = parse_term_sum();
    } else if (at_keyword("stage")) {
      take();
      StageAst stage;
      stage.pos = kw.pos;
      stage.name = parse_name("as a stage name");
      expect(Tok::LBrace, "to open the stage body");
      while (!at(Tok::RBrace) && !at(Tok::End)) {
        const int entry_line = peek().pos.line;
        try {
          parse_entry(stage);
        } catch (const SyntaxError& err) {
          report(err);
          skip_to_entry(entry_line);
        }
      }
      expect(Tok::RBrace, "to close the stage body");
      doc.stages.push_back(std::move(stage));
    } else if (at_keyword("detect")) {
      take();
      DetectAst detect;
      detect.pos = kw.pos;
      detect.name = parse_name("as a detector name");
      expect(Tok::Equals, "after the detector name");
      detect.qubits.push_back(parse_int("as a detector qubit"));
      while (at(Tok::Number)) detect.qubits.push_back(parse_int("as a detector qubit"));
      doc.detects.push_back(std::move(detect));
    } else {
      throw SyntaxError{kw.pos,
                        "expected 'param', 'init', 'stage' or 'detect', found " + describe(kw)};
    }
  }

  void parse_entry(StageAst& stage) {
    const Token& tok = peek();
    if (tok.kind == Tok::Create) {
      RuleAst rule;
      rule.pos = tok.pos;
      take();
      rule.source = parse_int("as the rule source qubit");
      expect(Tok::Arrow, "after the rule source");
      rule.targets = parse_term_sum();
      stage.entries.emplace_back(std::move(rule));
      return;
    }
    if (tok.kind == Tok::Ident && call_keywords().count(tok.text)) {
      stage.entries.emplace_back(parse_call());
      return;
    }
    throw SyntaxError{tok.pos, "expected a rule ('A+ <qubit> -> ...') or a constructor call, "
                               "found " + describe(tok)};
  }

  CallAst parse_call() {
    CallAst call;
    const Token& name = take();
    call.callee = name.text;
    call.pos = name.pos;
    expect(Tok::LParen, "after '" + call.callee + "'");
    if (call.callee == "pvm" || call.callee == "pair") {
      call.qubit_args.push_back(parse_int("as the source qubit"));
      expect(Tok::Comma, "after the source qubit");
      call.term_args = parse_term_sum();
      const std::size_t arity = call.callee == "pvm" ? 1 : 2;
      for (const TermAst& term : call.term_args) {
        if (term.indices.size() != arity) {
          throw SyntaxError{term.pos, call.callee + ": each term must name exactly " +
                                          std::to_string(arity) +
                                          (arity == 1 ? " qubit" : " qubits")};
        }
      }
    } else if (call.callee == "bs") {
      for (int k = 0; k < 4; ++k) {
        call.qubit_args.push_back(parse_int("as a beam-splitter qubit"));
        expect(Tok::Comma, "between bs arguments");
      }
      call.expr_args.push_back(parse_expr());
      expect(Tok::Comma, "between bs arguments");
      call.expr_args.push_back(parse_expr());
      expect(Tok::Comma, "between bs arguments");
      call.expr_args.push_back(parse_expr());
    } else {  // map
      call.qubit_args.push_back(parse_int("as the map source qubit"));
      expect(Tok::Comma, "between map arguments");
      call.qubit_args.push_back(parse_int("as the map destination qubit"));
      expect(Tok::Comma, "between map arguments");
      call.expr_args.push_back(parse_expr());
    }
    expect(Tok::RParen, "to close the '" + call.callee + "' call");
    return call;
  }

  std::vector<TermAst> parse_term_sum() {
    std::vector<TermAst> terms;
    terms.push_back(parse_term());
    while (at(Tok::Plus)) {
      take();
      terms.push_back(parse_term());
    }
    return terms;
  }

  TermAst parse_term() {
    TermAst term;
    term.pos = peek().pos;
    if (at(Tok::LParen)) {
      take();
      term.coeff = parse_expr();
      expect(Tok::RParen, "to close the coefficient");
    }
    if (!at(Tok::Create)) {
      throw SyntaxError{peek().pos,
                        "expected a creation monomial ('A+ <qubit>'), found " + describe(peek())};
    }
    while (at(Tok::Create)) {
      // "A+ <int> ->" begins the next rule, not another monomial factor
      if (peek(1).kind == Tok::Number && peek(2).kind == Tok::Arrow) break;
      take();
      term.indices.push_back(parse_int("as a creation qubit"));
    }
    if (term.indices.empty()) {
      throw SyntaxError{peek().pos, "a term needs at least one creation factor"};
    }
    return term;
  }

  // --- expressions ---

  Expr parse_expr() { return parse_additive(); }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const Token& op = take();
      Expr node;
      node.kind = op.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      node.pos = op.pos;
      node.children.push_back(std::move(lhs));
      node.children.push_back(parse_multiplicative());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      const Token& op = take();
      Expr node;
      node.kind = op.kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div;
      node.pos = op.pos;
      node.children.push_back(std::move(lhs));
      node.children.push_back(parse_unary());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (at(Tok::Minus)) {
      const Token& op = take();
      Expr node;
      node.kind = Expr::Kind::Neg;
      node.pos = op.pos;
      node.children.push_back(parse_unary());
      return node;
    }
    if (at(Tok::Plus)) {
      take();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (at(Tok::Caret)) {
      const Token& op = take();
      Expr node;
      node.kind = Expr::Kind::Pow;
      node.pos = op.pos;
      node.children.push_back(std::move(base));
      node.children.push_back(parse_unary());  // right-associative
      return node;
    }
    return base;
  }

  Expr parse_atom() {
    const Token& tok = peek();
    Expr node;
    node.pos = tok.pos;
    switch (tok.kind) {
      case Tok::Number:
        take();
        node.kind = Expr::Kind::Number;
        node.number = tok.number;
        return node;
      case Tok::LParen: {
        take();
        Expr inner = parse_expr();
        expect(Tok::RParen, "to close the parenthesised expression");
        return inner;
      }
      case Tok::Create:
        throw SyntaxError{tok.pos, "'A' is reserved for creation operators and cannot appear "
                                   "in expressions"};
      case Tok::Ident: {
        take();
        if (tok.text == "i") {
          node.kind = Expr::Kind::ImagUnit;
          return node;
        }
        if (tok.text == "pi") {
          node.kind = Expr::Kind::Pi;
          return node;
        }
        if (function_names().count(tok.text)) {
          expect(Tok::LParen, "after the function name '" + tok.text + "'");
          node.kind = Expr::Kind::Call;
          node.ident = tok.text;
          node.children.push_back(parse_expr());
          expect(Tok::RParen, "to close the call to '" + tok.text + "'");
          return node;
        }
        if (is_reserved(tok.text)) {
          throw SyntaxError{tok.pos, "'" + tok.text + "' is a reserved word and cannot be used "
                                     "as a parameter"};
        }
        node.kind = Expr::Kind::Param;
        node.ident = tok.text;
        return node;
      }
      default:
        throw SyntaxError{tok.pos, "expected an expression, found " + describe(tok)};
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diagnostics_;
};

// --------------------------------------------------------------- evaluator

bool finite(c64 z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

c64 integer_power(c64 base, long exponent) {
  if (exponent < 0) return c64(1.0, 0.0) / integer_power(base, -exponent);
  c64 acc(1.0, 0.0);
  for (long k = 0; k < exponent; ++k) acc *= base;
  return acc;
}

}  // namespace

bool ParseResult::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::Error;
  });
}

c64 eval_expr(const Expr& expr, const std::map<std::string, c64>& env) {
  auto check = [&expr](c64 value) {
    if (!finite(value)) throw EvalError{expr.pos, "expression evaluates to a non-finite value"};
    return value;
  };
  switch (expr.kind) {
    case Expr::Kind::Number:
      return {expr.number, 0.0};
    case Expr::Kind::ImagUnit:
      return {0.0, 1.0};
    case Expr::Kind::Pi:
      return {std::numbers::pi, 0.0};
    case Expr::Kind::Param: {
      auto it = env.find(expr.ident);
      if (it == env.end()) throw EvalError{expr.pos, "unbound parameter '" + expr.ident + "'"};
      return it->second;
    }
    case Expr::Kind::Neg:
      return -eval_expr(expr.children[0], env);
    case Expr::Kind::Add:
      return check(eval_expr(expr.children[0], env) + eval_expr(expr.children[1], env));
    case Expr::Kind::Sub:
      return check(eval_expr(expr.children[0], env) - eval_expr(expr.children[1], env));
    case Expr::Kind::Mul:
      return check(eval_expr(expr.children[0], env) * eval_expr(expr.children[1], env));
    case Expr::Kind::Div: {
      const c64 numerator = eval_expr(expr.children[0], env);
      const c64 denominator = eval_expr(expr.children[1], env);
      if (denominator == c64(0.0, 0.0)) throw EvalError{expr.pos, "division by zero"};
      return check(numerator / denominator);
    }
    case Expr::Kind::Pow: {
      const c64 base = eval_expr(expr.children[0], env);
      const c64 exponent = eval_expr(expr.children[1], env);
      if (std::abs(exponent.imag()) > 1e-12) {
        throw EvalError{expr.pos, "'^' requires a real exponent"};
      }
      const double e = exponent.real();
      const double rounded = std::round(e);
      if (std::abs(e - rounded) < 1e-9 && std::abs(rounded) <= 64) {
        return check(integer_power(base, static_cast<long>(rounded)));
      }
      return check(std::pow(base, e));
    }
    case Expr::Kind::Call: {
      const c64 arg = eval_expr(expr.children[0], env);
      if (expr.ident == "exp") return check(std::exp(arg));
      if (expr.ident == "cos") return check(std::cos(arg));
      if (expr.ident == "sin") return check(std::sin(arg));
      if (expr.ident == "tan") return check(std::tan(arg));
      if (expr.ident == "sqrt") return check(std::sqrt(arg));
      if (expr.ident == "conj") return std::conj(arg);
      throw EvalError{expr.pos, "unknown function '" + expr.ident + "'"};
    }
  }
  throw EvalError{expr.pos, "malformed expression node"};
}

ParseResult parse_document(std::string_view text) {
  try {
    Parser parser(text);
    return parser.run();
  } catch (const SyntaxError& err) {
    // Lexer errors abort the whole parse; there is no token stream to
    // recover on.
    ParseResult result;
    result.diagnostics.push_back({err.pos, Diagnostic::Severity::Error, err.message});
    return result;
  }
}

namespace {

// ------------------------------------------------------------- elaboration

class Elaborator {
 public:
  Elaborator(const Document& doc, const std::map<std::string, c64>& overrides)
      : doc_(doc), overrides_(overrides) {}

  ElaborateResult run() {
    ElaborateResult result;
    shape_ = make_shape();
    if (shape_) {
      bind_parameters();
      SparseState initial = build_initial(*shape_);
      std::vector<Stage> stages = build_stages();
      std::vector<Detector> detectors = build_detectors();
      if (!has_errors()) {
        ExperimentProgram program{*shape_, std::move(initial), std::move(stages),
                                  std::move(detectors)};
        try {
          validate_program(program);
          result.program = std::move(program);
        } catch (const std::invalid_argument& err) {
          error({0, 0}, err.what());
        }
      }
    }
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

 private:
  void error(SourcePos pos, std::string message) {
    if (diagnostics_.size() < max_diagnostics) {
      diagnostics_.push_back({pos, Diagnostic::Severity::Error, std::move(message)});
    }
  }
  bool has_errors() const {
    return std::any_of(diagnostics_.begin(), diagnostics_.end(), [](const Diagnostic& d) {
      return d.severity == Diagnostic::Severity::Error;
    });
  }

  std::optional<RegisterShape> make_shape() {
    try {
      return RegisterShape(doc_.rank);
    } catch (const std::invalid_argument& err) {
      error(doc_.rank_pos, err.what());
      return std::nullopt;
    }
  }

  static void collect_params(const Expr& expr, std::set<std::string>& out) {
    if (expr.kind == Expr::Kind::Param) out.insert(expr.ident);
    for (const Expr& child : expr.children) collect_params(child, out);
  }

  std::set<std::string> referenced_parameters() const {
    std::set<std::string> refs;
    auto scan_terms = [&refs](const std::vector<TermAst>& terms) {
      for (const TermAst& term : terms) {
        if (term.coeff) collect_params(*term.coeff, refs);
      }
    };
    for (const ParamAst& param : doc_.params) collect_params(param.value, refs);
    scan_terms(doc_.init_terms);
    for (const StageAst& stage : doc_.stages) {
      for (const auto& entry : stage.entries) {
        if (const auto* rule = std::get_if<RuleAst>(&entry)) {
          scan_terms(rule->targets);
        } else if (const auto* call = std::get_if<CallAst>(&entry)) {
          for (const Expr& e : call->expr_args) collect_params(e, refs);
          scan_terms(call->term_args);
        }
      }
    }
    return refs;
  }

  void bind_parameters() {
    std::set<std::string> declared;
    for (const ParamAst& param : doc_.params) declared.insert(param.name);
    const std::set<std::string> referenced = referenced_parameters();
    for (const auto& [name, value] : overrides_) {
      if (!declared.count(name) && !referenced.count(name)) {
        error({0, 0}, "unknown parameter '" + name + "' in override");
        continue;
      }
      env_[name] = value;
    }
    std::set<std::string> bound_here;
    for (const ParamAst& param : doc_.params) {
      if (!bound_here.insert(param.name).second) {
        error(param.pos, "duplicate parameter '" + param.name + "'");
        continue;
      }
      if (overrides_.count(param.name)) continue;  // override shadows the file value
      try {
        env_[param.name] = eval_expr(param.value, env_);
      } catch (const EvalError& err) {
        error(err.pos, err.message);
      }
    }
  }

  c64 eval_coeff(const std::optional<Expr>& coeff, bool& ok) {
    if (!coeff) return {1.0, 0.0};
    try {
      const c64 value = eval_expr(*coeff, env_);
      return {value.real() == 0.0 ? 0.0 : value.real(), value.imag() == 0.0 ? 0.0 : value.imag()};
    } catch (const EvalError& err) {
      error(err.pos, err.message);
      ok = false;
      return {0.0, 0.0};
    }
  }

  bool check_qubit(int qubit, SourcePos pos) {
    if (qubit >= shape_->rank) {
      error(pos, "qubit " + std::to_string(qubit) + " out of range for rank " +
                     std::to_string(shape_->rank));
      return false;
    }
    return true;
  }

  std::optional<WeightedMonomial> build_target(const TermAst& term) {
    bool ok = true;
    const c64 coeff = eval_coeff(term.coeff, ok);
    for (int idx : term.indices) ok = check_qubit(idx, term.pos) && ok;
    if (!ok) return std::nullopt;
    try {
      return WeightedMonomial{coeff, CreationMonomial(term.indices)};
    } catch (const std::invalid_argument& err) {
      error(term.pos, err.what());
      return std::nullopt;
    }
  }

  SparseState build_initial(RegisterShape shape) {
    if (!doc_.has_init) return SparseState::void_state(shape);
    SparseState state(shape);
    for (const TermAst& term : doc_.init_terms) {
      if (auto target = build_target(term)) {
        // A creation monomial applied to the void is exactly the basis
        // state with those qubits occupied.
        state.accumulate(target->monomial.mask(), target->coeff);
      }
    }
    state.prune();
    if (state.is_zero() && !has_errors()) {
      error(doc_.init_pos, "initial state is the zero state");
    }
    return state;
  }

  void append_rule(std::vector<TransitionRule>& rules, const RuleAst& ast) {
    if (!check_qubit(ast.source, ast.pos)) return;
    std::vector<WeightedMonomial> targets;
    bool ok = true;
    for (const TermAst& term : ast.targets) {
      if (auto target = build_target(term)) {
        targets.push_back(std::move(*target));
      } else {
        ok = false;
      }
    }
    if (!ok) return;
    try {
      rules.emplace_back(ast.source, std::move(targets));
    } catch (const std::invalid_argument& err) {
      error(ast.pos, err.what());
    }
  }

  void append_call(std::vector<TransitionRule>& rules, const CallAst& ast) {
    bool ok = true;
    for (int q : ast.qubit_args) ok = check_qubit(q, ast.pos) && ok;
    std::vector<c64> expr_values;
    for (const Expr& e : ast.expr_args) {
      bool value_ok = true;
      std::optional<Expr> wrapped = e;
      expr_values.push_back(eval_coeff(wrapped, value_ok));
      ok = ok && value_ok;
    }
    std::vector<WeightedMonomial> terms;
    for (const TermAst& term : ast.term_args) {
      if (auto target = build_target(term)) {
        terms.push_back(std::move(*target));
      } else {
        ok = false;
      }
    }
    if (!ok) return;
    try {
      Stage built = instantiate(ast, expr_values, terms);
      for (const TransitionRule& rule : built.rules()) rules.push_back(rule);
    } catch (const std::invalid_argument& err) {
      error(ast.pos, err.what());
    } catch (const EvalError& err) {
      error(err.pos, err.message);
    }
  }

  Stage instantiate(const CallAst& ast, const std::vector<c64>& exprs,
                    const std::vector<WeightedMonomial>& terms) {
    if (ast.callee == "pvm") {
      std::vector<int> outs;
      std::vector<c64> amps;
      for (const WeightedMonomial& t : terms) {
        outs.push_back(t.monomial.indices()[0]);
        amps.push_back(t.coeff);
      }
      return pvm_test(ast.qubit_args[0], outs, amps);
    }
    if (ast.callee == "bs") {
      const c64 eta = exprs[2];
      if (std::abs(eta.imag()) > 1e-12) {
        throw EvalError{ast.pos, "bs: the phase eta must be real"};
      }
      return beam_splitter(ast.qubit_args[0], ast.qubit_args[1], ast.qubit_args[2],
                           ast.qubit_args[3], exprs[0], exprs[1], eta.real());
    }
    if (ast.callee == "map") {
      return single_channel_map(ast.qubit_args[0], ast.qubit_args[1], exprs[0]);
    }
    // pair
    std::vector<PairTerm> pairs;
    for (const WeightedMonomial& t : terms) {
      pairs.push_back({t.coeff, t.monomial.indices()[0], t.monomial.indices()[1]});
    }
    return pair_source(ast.qubit_args[0], pairs);
  }

  std::vector<Stage> build_stages() {
    std::vector<Stage> stages;
    std::set<std::string> names;
    for (const StageAst& ast : doc_.stages) {
      if (!names.insert(ast.name).second) {
        error(ast.pos, "duplicate stage name '" + ast.name + "'");
        continue;
      }
      std::vector<TransitionRule> rules;
      for (const auto& entry : ast.entries) {
        if (const auto* rule = std::get_if<RuleAst>(&entry)) {
          append_rule(rules, *rule);
        } else {
          append_call(rules, std::get<CallAst>(entry));
        }
      }
      if (has_errors()) continue;
      if (auto violation = stage_violation(rules)) {
        error(ast.pos, "stage '" + ast.name + "': " + *violation);
        continue;
      }
      stages.emplace_back(ast.name, std::move(rules));
    }
    return stages;
  }

  std::vector<Detector> build_detectors() {
    std::vector<Detector> detectors;
    std::set<std::string> names;
    for (const DetectAst& ast : doc_.detects) {
      if (!names.insert(ast.name).second) {
        error(ast.pos, "duplicate detector name '" + ast.name + "'");
        continue;
      }
      std::set<int> seen;
      bool ok = true;
      for (int q : ast.qubits) {
        ok = check_qubit(q, ast.pos) && ok;
        if (!seen.insert(q).second) {
          error(ast.pos, "detector '" + ast.name + "' repeats qubit " + std::to_string(q));
          ok = false;
        }
      }
      if (ok) detectors.push_back({ast.name, ast.qubits});
    }
    return detectors;
  }

  const Document& doc_;
  const std::map<std::string, c64>& overrides_;
  std::optional<RegisterShape> shape_;
  std::map<std::string, c64> env_;
  std::vector<Diagnostic> diagnostics_;
};

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string format_coeff(c64 value) {
  std::string out = "(" + format_double(value.real());
  if (value.imag() != 0.0) {
    if (value.imag() < 0.0) {
      out += "-" + format_double(-value.imag());
    } else {
      out += "+" + format_double(value.imag());
    }
    out += "*i";
  }
  out += ")";
  return out;
}

std::string format_monomial(const CreationMonomial& monomial) {
  std::string out;
  for (int idx : monomial.indices()) {
    out += " A+";
    out += std::to_string(idx);
  }
  return out;
}

}  // namespace

ElaborateResult elaborate(const Document& document, const std::map<std::string, c64>& overrides) {
  Elaborator elaborator(document, overrides);
  return elaborator.run();
}

ElaborateResult parse_experiment(std::string_view text,
                                 const std::map<std::string, c64>& overrides) {
  ParseResult parsed = parse_document(text);
  if (!parsed.ok()) {
    ElaborateResult result;
    result.diagnostics = std::move(parsed.diagnostics);
    return result;
  }
  ElaborateResult result = elaborate(*parsed.document, overrides);
  // Keep any parser warnings ahead of elaboration diagnostics.
  result.diagnostics.insert(result.diagnostics.begin(), parsed.diagnostics.begin(),
                            parsed.diagnostics.end());
  return result;
}

std::string pretty_print(const ExperimentProgram& program) {
  std::string out = "register " + std::to_string(program.shape.rank) + "\n";
  const SparseState& initial = program.initial;
  const bool is_void = initial.terms().size() == 1 && initial.terms().begin()->first == 0 &&
                       initial.terms().begin()->second == c64(1.0, 0.0);
  if (!is_void) {
    out += "init ";
    bool first = true;
    for (const auto& [index, amp] : initial.terms()) {
      if (!first) out += " + ";
      first = false;
      std::vector<int> indices;
      for (int j = 0; j < program.shape.rank; ++j) {
        if (index & (BasisIndex{1} << j)) indices.push_back(j);
      }
      out += format_coeff(amp) + format_monomial(CreationMonomial(indices));
    }
    out += "\n";
  }
  for (const Stage& stage : program.stages) {
    out += "stage " + stage.name() + " {\n";
    for (const TransitionRule& rule : stage.rules()) {
      out += "  A+" + std::to_string(rule.source()) + " ->";
      bool first = true;
      for (const auto& [coeff, monomial] : rule.targets()) {
        out += first ? " " : " + ";
        first = false;
        out += format_coeff(coeff) + format_monomial(monomial);
      }
      out += "\n";
    }
    out += "}\n";
  }
  for (const Detector& detector : program.detectors) {
    out += "detect " + detector.name + " =";
    for (int q : detector.qubits) out += " " + std::to_string(q);
    out += "\n";
  }
  return out;
}

c64 parse_value_expression(std::string_view text) {
  const std::string wrapped = "register 1\nparam value_under_parse = " + std::string(text) + "\n";
  ParseResult parsed = parse_document(wrapped);
  const bool clean = parsed.ok() && parsed.document->params.size() == 1 &&
                     parsed.document->stages.empty() && parsed.document->detects.empty() &&
                     !parsed.document->has_init;
  if (!clean) {
    std::string message = "malformed value expression '" + std::string(text) + "'";
    if (!parsed.diagnostics.empty()) message += ": " + parsed.diagnostics.front().message;
    throw std::invalid_argument(message);
  }
  try {
    return eval_expr(parsed.document->params[0].value, {});
  } catch (const EvalError& err) {
    throw std::invalid_argument("cannot evaluate '" + std::string(text) + "': " + err.message);
  }
}

}  // namespace qreg::dsl
