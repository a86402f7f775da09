#include "synthmt/spec_ast.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "synthmt/errors.hpp"

namespace synthmt {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  Amp,
  Bar,
  Bang,
  Arrow,
  DArrow,
  RelLt,
  RelLe,
  RelEq,
  RelNe,
  RelGe,
  RelGt,
  Plus,
  Minus,
  Star,
  Slash,
  Comma,
  EndOfLine,
  EndOfInput,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

const std::set<std::string> kReserved = {"theory", "env", "sys", "spec", "Int", "Real",
                                         "G",      "X",   "U",   "F",    "R"};

class Lexer {
 public:
  Lexer(std::string_view text, std::string filename)
      : text_(text), file_(std::move(filename)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n' || c == ';') {
        push(out, Tok::EndOfLine, std::string(1, c));
        advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '#') {  // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        int line = line_, col = col_;
        std::string id;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          id += text_[pos_];
          advance();
        }
        out.push_back({Tok::Ident, id, line, col});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        int line = line_, col = col_;
        std::string num;
        bool dot = false;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                (text_[pos_] == '.' && !dot))) {
          dot |= text_[pos_] == '.';
          num += text_[pos_];
          advance();
        }
        out.push_back({Tok::Number, num, line, col});
        continue;
      }
      int line = line_, col = col_;
      auto two = text_.substr(pos_, 2);
      auto three = text_.substr(pos_, 3);
      if (three == "<->") {
        out.push_back({Tok::DArrow, "<->", line, col});
        advance(3);
      } else if (two == "->") {
        out.push_back({Tok::Arrow, "->", line, col});
        advance(2);
      } else if (two == "<=") {
        out.push_back({Tok::RelLe, "<=", line, col});
        advance(2);
      } else if (two == ">=") {
        out.push_back({Tok::RelGe, ">=", line, col});
        advance(2);
      } else if (two == "!=") {
        out.push_back({Tok::RelNe, "!=", line, col});
        advance(2);
      } else {
        switch (c) {
          case '(': out.push_back({Tok::LParen, "(", line, col}); break;
          case ')': out.push_back({Tok::RParen, ")", line, col}); break;
          case '&': out.push_back({Tok::Amp, "&", line, col}); break;
          case '|': out.push_back({Tok::Bar, "|", line, col}); break;
          case '!': out.push_back({Tok::Bang, "!", line, col}); break;
          case '<': out.push_back({Tok::RelLt, "<", line, col}); break;
          case '>': out.push_back({Tok::RelGt, ">", line, col}); break;
          case '=': out.push_back({Tok::RelEq, "=", line, col}); break;
          case '+': out.push_back({Tok::Plus, "+", line, col}); break;
          case '-': out.push_back({Tok::Minus, "-", line, col}); break;
          case '*': out.push_back({Tok::Star, "*", line, col}); break;
          case '/': out.push_back({Tok::Slash, "/", line, col}); break;
          case ',': out.push_back({Tok::Comma, ",", line, col}); break;
          default:
            throw ParseError(file_, line, col, std::string("unexpected character '") + c + "'");
        }
        advance();
      }
    }
    out.push_back({Tok::EndOfInput, "", line_, col_});
    return out;
  }

 private:
  void push(std::vector<Token>& out, Tok k, std::string s) { out.push_back({k, std::move(s), line_, col_}); }

  void advance(int n = 1) {
    for (int i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  std::string_view text_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct LinExpr {
  std::map<std::string, Rational> coeffs;
  Rational constant;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string filename)
      : toks_(std::move(toks)), file_(std::move(filename)) {}

  SpecAst run() {
    SpecAst ast;
    bool have_theory = false, have_spec = false;
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind == Tok::EndOfInput) break;
      if (t.kind != Tok::Ident) fail(t, "expected a directive (theory/env/sys/spec)");
      if (t.text == "theory") {
        next();
        const Token& s = expect(Tok::Ident, "expected sort Int or Real");
        if (s.text == "Int") ast.sort = Sort::Int;
        else if (s.text == "Real") ast.sort = Sort::Real;
        else fail(s, "unknown sort '" + s.text + "' (expected Int or Real)");
        have_theory = true;
        end_of_directive();
      } else if (t.text == "env" || t.text == "sys") {
        bool is_env = t.text == "env";
        next();
        parse_var_list(is_env ? ast.env_vars : ast.sys_vars);
        end_of_directive();
      } else if (t.text == "spec") {
        if (!have_theory) fail(t, "theory declaration must precede the spec formula");
        next();
        declared_.clear();
        for (auto& v : ast.env_vars) declared_.insert(v);
        for (auto& v : ast.sys_vars) declared_.insert(v);
        sort_ = ast.sort;
        skip_newlines();
        ast.formula = parse_formula();
        skip_newlines();
        if (peek().kind != Tok::EndOfInput) fail(peek(), "trailing tokens after spec formula");
        have_spec = true;
        break;
      } else {
        fail(t, "unknown directive '" + t.text + "'");
      }
    }
    if (!have_theory) fail(peek(), "missing theory declaration");
    if (!have_spec) fail(peek(), "missing spec formula");
    if (ast.env_vars.empty()) fail(peek(), "no environment variables declared");
    if (ast.sys_vars.empty()) fail(peek(), "no system variables declared");
    for (auto& v : ast.env_vars)
      if (std::count(ast.sys_vars.begin(), ast.sys_vars.end(), v))
        fail(peek(), "variable '" + v + "' declared as both env and sys");
    return ast;
  }

  Literal run_single_atom(const std::vector<std::string>& vars, Sort sort) {
    declared_.insert(vars.begin(), vars.end());
    sort_ = sort;
    skip_newlines();
    SpecNode atom = parse_atom();
    skip_newlines();
    if (peek().kind != Tok::EndOfInput) fail(peek(), "trailing tokens after literal");
    return *atom.atom;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }

  void skip_newlines() {
    while (peek().kind == Tok::EndOfLine) next();
  }

  void end_of_directive() {
    const Token& t = peek();
    if (t.kind == Tok::EndOfLine) {
      next();
    } else if (t.kind != Tok::EndOfInput) {
      fail(t, "expected end of line after declaration");
    }
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(file_, t.line, t.col, msg);
  }

  const Token& expect(Tok kind, const std::string& msg) {
    if (peek().kind != kind) fail(peek(), msg);
    return next();
  }

  void check_name(const Token& t) {
    if (kReserved.count(t.text)) fail(t, "'" + t.text + "' is a reserved word");
  }

  void parse_var_list(std::vector<std::string>& out) {
    while (true) {
      const Token& t = expect(Tok::Ident, "expected a variable name");
      check_name(t);
      if (std::count(out.begin(), out.end(), t.text)) fail(t, "duplicate variable '" + t.text + "'");
      out.push_back(t.text);
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
  }

  // formula := iff; iff := impl ('<->' impl)*; impl := or ('->' impl)?
  SpecNode parse_formula() { return parse_iff(); }

  SpecNode parse_iff() {
    SpecNode lhs = parse_impl();
    while (peek().kind == Tok::DArrow) {
      next();
      SpecNode rhs = parse_impl();
      lhs = SpecNode{SpecNode::Kind::Iff, {}, {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  SpecNode parse_impl() {
    SpecNode lhs = parse_or();
    if (peek().kind == Tok::Arrow) {
      next();
      SpecNode rhs = parse_impl();
      return SpecNode{SpecNode::Kind::Implies, {}, {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  SpecNode parse_or() {
    SpecNode first = parse_and();
    if (peek().kind != Tok::Bar) return first;
    std::vector<SpecNode> kids{std::move(first)};
    while (peek().kind == Tok::Bar) {
      next();
      kids.push_back(parse_and());
    }
    return SpecNode{SpecNode::Kind::Or, {}, std::move(kids)};
  }

  SpecNode parse_and() {
    SpecNode first = parse_unary();
    if (peek().kind != Tok::Amp) return first;
    std::vector<SpecNode> kids{std::move(first)};
    while (peek().kind == Tok::Amp) {
      next();
      kids.push_back(parse_unary());
    }
    return SpecNode{SpecNode::Kind::And, {}, std::move(kids)};
  }

  SpecNode parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Bang) {
      next();
      return SpecNode{SpecNode::Kind::Not, {}, {parse_unary()}};
    }
    if (t.kind == Tok::Ident && (t.text == "G" || t.text == "X")) {
      next();
      auto kind = t.text == "G" ? SpecNode::Kind::Globally : SpecNode::Kind::Next;
      return SpecNode{kind, {}, {parse_unary()}};
    }
    if (t.kind == Tok::Ident && (t.text == "U" || t.text == "F" || t.text == "R")) {
      fail(t, "temporal operator '" + t.text + "' is outside the supported safety fragment");
    }
    return parse_primary();
  }

  SpecNode parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      next();
      skip_newlines();
      SpecNode inner = parse_formula();
      skip_newlines();
      expect(Tok::RParen, "expected ')'");
      return inner;
    }
    return parse_atom();
  }

  // Infix temporal operators are caught here: "(x<2) U (y>1)" reaches this
  // point with 'U' pending after the left operand of a (never-parsed) binary.
  SpecNode parse_atom() {
    const Token& start = peek();
    LinExpr lhs = parse_linexpr();
    const Token& op = peek();
    RelOp rel;
    switch (op.kind) {
      case Tok::RelLt: rel = RelOp::Lt; break;
      case Tok::RelLe: rel = RelOp::Le; break;
      case Tok::RelEq: rel = RelOp::Eq; break;
      case Tok::RelNe: rel = RelOp::Ne; break;
      case Tok::RelGe: rel = RelOp::Ge; break;
      case Tok::RelGt: rel = RelOp::Gt; break;
      default: fail(op, "expected a relational operator in atom"); return {};
    }
    next();
    LinExpr rhs = parse_linexpr();
    std::map<std::string, Rational> terms = lhs.coeffs;
    for (const auto& [name, c] : rhs.coeffs) {
      auto [it, fresh] = terms.emplace(name, -c);
      if (!fresh) it->second -= c;
    }
    Rational constant = rhs.constant - lhs.constant;
    try {
      return SpecNode{SpecNode::Kind::Atom, Literal::make(terms, rel, constant), {}};
    } catch (const ContractViolation& e) {
      fail(start, e.what());
    }
  }

  LinExpr parse_linexpr() {
    LinExpr e;
    parse_term(e, false);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = next().kind == Tok::Minus;
      parse_term(e, minus);
    }
    return e;
  }

  void parse_term(LinExpr& e, bool negated) {
    if (peek().kind == Tok::Minus) {
      next();
      negated = !negated;
    }
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      Rational value = parse_number(t);
      if (peek().kind == Tok::Slash) {  // fraction constant p/q
        next();
        const Token& d = expect(Tok::Number, "expected denominator after '/'");
        Rational den = parse_number(d);
        if (!den.is_integer() || !value.is_integer()) fail(d, "fraction parts must be integers");
        if (den.is_zero()) fail(d, "zero denominator");
        value = value / den;
        check_sorted_constant(value, d);
      }
      if (peek().kind == Tok::Star) {
        next();
        const Token& v = expect(Tok::Ident, "expected a variable after '*'");
        add_var(e, v, negated ? -value : value);
        return;
      }
      e.constant += negated ? -value : value;
      return;
    }
    if (t.kind == Tok::Ident) {
      next();
      if (peek().kind == Tok::Star)
        fail(peek(), "nonlinear term: variables may only be multiplied by integer constants");
      add_var(e, t, Rational(negated ? -1 : 1));
      return;
    }
    fail(t, "expected a term");
  }

  Rational parse_number(const Token& t) {
    Rational r = Rational::parse(t.text);
    check_sorted_constant(r, t);
    return r;
  }

  void check_sorted_constant(const Rational& r, const Token& at) {
    if (sort_ == Sort::Int && !r.is_integer())
      fail(at, "non-integer constant under Int sort (mixed sorts)");
  }

  void add_var(LinExpr& e, const Token& tok, const Rational& coeff) {
    check_name(tok);
    if (!declared_.count(tok.text)) fail(tok, "undeclared variable '" + tok.text + "'");
    auto [it, fresh] = e.coeffs.emplace(tok.text, coeff);
    if (!fresh) it->second += coeff;
  }

  std::vector<Token> toks_;
  std::string file_;
  size_t i_ = 0;
  std::set<std::string> declared_;
  Sort sort_ = Sort::Int;
};

std::string render_formula(const SpecNode& n) {
  switch (n.kind) {
    case SpecNode::Kind::Atom: return "(" + n.atom->text() + ")";
    case SpecNode::Kind::Not: return "!" + render_formula(n.kids[0]);
    case SpecNode::Kind::Globally: return "G" + render_formula(n.kids[0]);
    case SpecNode::Kind::Next: return "X" + render_formula(n.kids[0]);
    case SpecNode::Kind::Implies:
      return "(" + render_formula(n.kids[0]) + " -> " + render_formula(n.kids[1]) + ")";
    case SpecNode::Kind::Iff:
      return "(" + render_formula(n.kids[0]) + " <-> " + render_formula(n.kids[1]) + ")";
    case SpecNode::Kind::And:
    case SpecNode::Kind::Or: {
      std::string sep = n.kind == SpecNode::Kind::And ? " & " : " | ";
      std::string out = "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += sep;
        out += render_formula(n.kids[i]);
      }
      return out + ")";
    }
  }
  return "";
}

// "G!" and "G(" both need the child self-delimiting; render_formula always
// parenthesizes composites, but a bare Not child of G must still parse as a
// unary chain, which the grammar accepts.

// An atom and its complement share one literal index: (x>=2) is the negation
// of (x<2), not a fourth atom.
void collect_atoms(const SpecNode& n, std::vector<Literal>& out) {
  if (n.kind == SpecNode::Kind::Atom) {
    if (std::count(out.begin(), out.end(), *n.atom)) return;
    if (std::count(out.begin(), out.end(), negate_literal(*n.atom))) return;
    out.push_back(*n.atom);
    return;
  }
  for (const auto& k : n.kids) collect_atoms(k, out);
}

void collect_conjuncts(const SpecNode& n, std::vector<const SpecNode*>& out) {
  if (n.kind == SpecNode::Kind::And) {
    for (const auto& k : n.kids) collect_conjuncts(k, out);
    return;
  }
  out.push_back(&n);
}

/// Atom node for the literal, negated when the atom is the complement of the
/// indexed literal ((x>=2) becomes !s0 when s0 is (x<2)).
MatrixNode atom_node(const Literal& atom, bool next, const std::map<Literal, int>& index) {
  if (auto it = index.find(atom); it != index.end())
    return MatrixNode{MatrixNode::Kind::Atom, it->second, next, {}};
  auto it = index.find(negate_literal(atom));
  if (it == index.end()) throw UnsupportedFragment("atom missing from the literal index");
  return MatrixNode{MatrixNode::Kind::Not, -1, false,
                    {MatrixNode{MatrixNode::Kind::Atom, it->second, next, {}}}};
}

MatrixNode translate_body(const SpecNode& n, const std::map<Literal, int>& index) {
  switch (n.kind) {
    case SpecNode::Kind::Atom: return atom_node(*n.atom, false, index);
    case SpecNode::Kind::Next: {
      const SpecNode& kid = n.kids[0];
      if (kid.kind == SpecNode::Kind::Next)
        throw UnsupportedFragment("nested X: the fragment allows X-depth at most 1");
      if (kid.kind != SpecNode::Kind::Atom)
        throw UnsupportedFragment("X may wrap only an atom");
      return atom_node(*kid.atom, true, index);
    }
    case SpecNode::Kind::Globally:
      throw UnsupportedFragment("nested temporal operator G inside an invariant");
    case SpecNode::Kind::Not:
      return MatrixNode{MatrixNode::Kind::Not, -1, false, {translate_body(n.kids[0], index)}};
    case SpecNode::Kind::And:
    case SpecNode::Kind::Or:
    case SpecNode::Kind::Implies:
    case SpecNode::Kind::Iff: {
      MatrixNode out;
      out.kind = n.kind == SpecNode::Kind::And      ? MatrixNode::Kind::And
                 : n.kind == SpecNode::Kind::Or     ? MatrixNode::Kind::Or
                 : n.kind == SpecNode::Kind::Implies ? MatrixNode::Kind::Implies
                                                     : MatrixNode::Kind::Iff;
      for (const auto& k : n.kids) out.kids.push_back(translate_body(k, index));
      return out;
    }
  }
  throw UnsupportedFragment("unreachable spec node");
}

bool has_current_atom(const MatrixNode& n) {
  if (n.kind == MatrixNode::Kind::Atom) return !n.next;
  return std::any_of(n.kids.begin(), n.kids.end(), has_current_atom);
}

std::string matrix_text(const MatrixNode& n) {
  switch (n.kind) {
    case MatrixNode::Kind::Atom: {
      std::string a = "s" + std::to_string(n.lit_index);
      return n.next ? "X(" + a + ")" : a;
    }
    case MatrixNode::Kind::Not: return "!" + matrix_text(n.kids[0]);
    case MatrixNode::Kind::Implies:
      return "(" + matrix_text(n.kids[0]) + " -> " + matrix_text(n.kids[1]) + ")";
    case MatrixNode::Kind::Iff:
      return "(" + matrix_text(n.kids[0]) + " <-> " + matrix_text(n.kids[1]) + ")";
    case MatrixNode::Kind::And:
    case MatrixNode::Kind::Or: {
      std::string sep = n.kind == MatrixNode::Kind::And ? " & " : " | ";
      std::string out = "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += sep;
        out += matrix_text(n.kids[i]);
      }
      return out + ")";
    }
  }
  return "";
}

}  // namespace

SpecAst parse_spec(std::string_view text, const std::string& filename) {
  Lexer lex(text, filename);
  Parser parser(lex.run(), filename);
  return parser.run();
}

Literal parse_literal_text(const std::string& text, const std::vector<std::string>& variables,
                           Sort sort) {
  Lexer lex(text, "<literal>");
  Parser parser(lex.run(), "<literal>");
  return parser.run_single_atom(variables, sort);
}

std::string render(const SpecAst& ast) {
  std::string out = "theory " + to_string(ast.sort) + "\n";
  out += "env";
  for (size_t i = 0; i < ast.env_vars.size(); ++i) out += (i ? ", " : " ") + ast.env_vars[i];
  out += "\nsys";
  for (size_t i = 0; i < ast.sys_vars.size(); ++i) out += (i ? ", " : " ") + ast.sys_vars[i];
  out += "\nspec " + render_formula(ast.formula) + "\n";
  return out;
}

std::vector<Literal> extract_literals(const SpecAst& ast) {
  std::vector<Literal> out;
  collect_atoms(ast.formula, out);
  return out;
}

bool MatrixNode::eval(std::uint32_t cur_bits, std::uint32_t next_bits) const {
  switch (kind) {
    case Kind::Atom: return ((next ? next_bits : cur_bits) >> lit_index) & 1u;
    case Kind::Not: return !kids[0].eval(cur_bits, next_bits);
    case Kind::And:
      return std::all_of(kids.begin(), kids.end(),
                         [&](const MatrixNode& k) { return k.eval(cur_bits, next_bits); });
    case Kind::Or:
      return std::any_of(kids.begin(), kids.end(),
                         [&](const MatrixNode& k) { return k.eval(cur_bits, next_bits); });
    case Kind::Implies: return !kids[0].eval(cur_bits, next_bits) || kids[1].eval(cur_bits, next_bits);
    case Kind::Iff: return kids[0].eval(cur_bits, next_bits) == kids[1].eval(cur_bits, next_bits);
  }
  return false;
}

bool SafetyMatrix::eval(std::uint32_t cur_bits, std::uint32_t next_bits) const {
  return first_violation(cur_bits, next_bits) < 0;
}

int SafetyMatrix::first_violation(std::uint32_t cur_bits, std::uint32_t next_bits) const {
  for (size_t i = 0; i < conjuncts.size(); ++i)
    if (!conjuncts[i].eval(cur_bits, next_bits)) return static_cast<int>(i);
  return -1;
}

std::string SafetyMatrix::conjunct_text(int i) const { return matrix_text(conjuncts.at(i)); }

SafetyMatrix normalize_safety(const SpecAst& ast) {
  std::vector<const SpecNode*> top;
  collect_conjuncts(ast.formula, top);
  std::vector<Literal> lits = extract_literals(ast);
  std::map<Literal, int> index;
  for (size_t i = 0; i < lits.size(); ++i) index.emplace(lits[i], static_cast<int>(i));

  SafetyMatrix matrix;
  matrix.num_literals = static_cast<int>(lits.size());
  for (const SpecNode* block : top) {
    if (block->kind != SpecNode::Kind::Globally)
      throw UnsupportedFragment("specification must be a conjunction of G(...) blocks");
    std::vector<const SpecNode*> body;
    collect_conjuncts(block->kids[0], body);  // G distributes over conjunction
    for (const SpecNode* conjunct : body)
      matrix.conjuncts.push_back(translate_body(*conjunct, index));
  }
  if (!std::any_of(matrix.conjuncts.begin(), matrix.conjuncts.end(),
                   [](const MatrixNode& n) { return has_current_atom(n); }))
    throw UnsupportedFragment("invariant references no current-step atom");
  return matrix;
}

}  // namespace synthmt
