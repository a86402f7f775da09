#include "minismt/smtlib.hpp"

#include <cctype>
#include <istream>
#include <map>
#include <ostream>

#include "minismt/solver.hpp"

namespace minismt {

std::string SExpr::to_string() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (size_t i = 0; i < kids.size(); ++i) {
    if (i) out += " ";
    out += kids[i].to_string();
  }
  return out + ")";
}

namespace {

int skip_blank(std::istream& in) {
  int c;
  while ((c = in.peek()) != EOF) {
    if (c == ';') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
    in.get();
  }
  return c;
}

bool read_one(std::istream& in, SExpr& out) {
  int c = skip_blank(in);
  if (c == EOF) return false;
  if (c == '(') {
    in.get();
    out.is_atom = false;
    out.atom.clear();
    out.kids.clear();
    while (true) {
      c = skip_blank(in);
      if (c == EOF) throw std::runtime_error("unbalanced '('");
      if (c == ')') {
        in.get();
        return true;
      }
      SExpr kid;
      if (!read_one(in, kid)) throw std::runtime_error("unbalanced '('");
      out.kids.push_back(std::move(kid));
    }
  }
  if (c == ')') throw std::runtime_error("unbalanced ')'");
  out.is_atom = true;
  out.kids.clear();
  out.atom.clear();
  if (c == '|') {
    in.get();
    while ((c = in.get()) != EOF && c != '|') out.atom += static_cast<char>(c);
    return true;
  }
  if (c == '"') {
    in.get();
    out.atom = "\"";
    while ((c = in.get()) != EOF && c != '"') out.atom += static_cast<char>(c);
    out.atom += "\"";
    return true;
  }
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '(' && c != ')' && c != ';')
    out.atom += static_cast<char>(in.get());
  return true;
}

struct TranslateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_number_token(const std::string& s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i >= s.size()) return false;
  bool digit = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) digit = true;
    else if (s[i] != '.') return false;
  }
  return digit;
}

class Translator {
 public:
  explicit Translator(const Context& ctx) : ctx_(ctx) {}

  NodePtr formula(const SExpr& s) {
    if (s.is_atom) {
      if (s.atom == "true") return mk_bool(true);
      if (s.atom == "false") return mk_bool(false);
      throw TranslateError("expected a formula, got '" + s.atom + "'");
    }
    if (s.kids.empty() || !s.kids[0].is_atom) throw TranslateError("malformed application");
    const std::string& head = s.kids[0].atom;
    if (head == "and" || head == "or") {
      std::vector<NodePtr> kids;
      for (size_t i = 1; i < s.kids.size(); ++i) kids.push_back(formula(s.kids[i]));
      return head == "and" ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    if (head == "not") {
      need_arity(s, 1);
      return mk_not(formula(s.kids[1]));
    }
    if (head == "=>") {
      if (s.kids.size() < 3) throw TranslateError("=> needs at least two arguments");
      NodePtr acc = formula(s.kids.back());
      for (size_t i = s.kids.size() - 2; i >= 1; --i)
        acc = mk_or({mk_not(formula(s.kids[i])), acc});
      return acc;
    }
    if (head == "exists" || head == "forall") {
      need_arity(s, 2);
      std::vector<std::pair<std::string, VarSort>> vars;
      if (s.kids[1].is_atom) throw TranslateError("malformed quantifier binding");
      for (const SExpr& b : s.kids[1].kids) {
        if (b.is_atom || b.kids.size() != 2 || !b.kids[0].is_atom || !b.kids[1].is_atom)
          throw TranslateError("malformed sorted variable");
        vars.emplace_back(b.kids[0].atom, parse_sort(b.kids[1].atom));
      }
      for (const auto& v : vars) scopes_.push_back(v);
      NodePtr body = formula(s.kids[2]);
      scopes_.resize(scopes_.size() - vars.size());
      return head == "exists" ? mk_exists(std::move(vars), std::move(body))
                              : mk_forall(std::move(vars), std::move(body));
    }
    if (head == "<" || head == "<=" || head == ">" || head == ">=" || head == "=" ||
        head == "distinct") {
      if (s.kids.size() < 3) throw TranslateError(head + " needs at least two arguments");
      std::vector<LinTerm> args;
      for (size_t i = 1; i < s.kids.size(); ++i) args.push_back(arith(s.kids[i]));
      std::vector<NodePtr> conj;
      for (size_t i = 0; i + 1 < args.size(); ++i) {
        if (head == "distinct") {
          // pairwise over the whole argument list
          continue;
        }
        conj.push_back(relation(head, args[i], args[i + 1]));
      }
      if (head == "distinct") {
        for (size_t i = 0; i < args.size(); ++i)
          for (size_t j = i + 1; j < args.size(); ++j) {
            LinTerm d = args[i];
            d -= args[j];
            conj.push_back(mk_atom(Atom{AtomKind::Ne, std::move(d), 0}));
          }
      }
      return mk_and(std::move(conj));
    }
    throw TranslateError("unsupported operator '" + head + "'");
  }

  static VarSort parse_sort(const std::string& s) {
    if (s == "Int") return VarSort::Int;
    if (s == "Real") return VarSort::Real;
    throw TranslateError("unsupported sort '" + s + "'");
  }

 private:
  void need_arity(const SExpr& s, size_t n) const {
    if (s.kids.size() != n + 1)
      throw TranslateError("'" + s.kids[0].atom + "' expects " + std::to_string(n) + " arguments");
  }

  NodePtr relation(const std::string& op, const LinTerm& a, const LinTerm& b) {
    LinTerm d = a;
    d -= b;
    if (op == "<") return mk_atom(Atom{AtomKind::Lt, std::move(d), 0});
    if (op == "<=") return mk_atom(Atom{AtomKind::Le, std::move(d), 0});
    if (op == "=") return mk_atom(Atom{AtomKind::Eq, std::move(d), 0});
    // swap for > and >=
    d = b;
    d -= a;
    if (op == ">") return mk_atom(Atom{AtomKind::Lt, std::move(d), 0});
    return mk_atom(Atom{AtomKind::Le, std::move(d), 0});
  }

  bool is_bound_or_declared(const std::string& name) const {
    for (const auto& [n, sort] : scopes_)
      if (n == name) return true;
    return ctx_.is_declared(name);
  }

  LinTerm arith(const SExpr& s) {
    if (s.is_atom) {
      if (is_number_token(s.atom)) return LinTerm::of_const(Rat::parse(s.atom));
      if (!is_bound_or_declared(s.atom)) throw TranslateError("undeclared symbol '" + s.atom + "'");
      return LinTerm::of_var(s.atom);
    }
    if (s.kids.empty() || !s.kids[0].is_atom) throw TranslateError("malformed term");
    const std::string& head = s.kids[0].atom;
    if (head == "+") {
      LinTerm out;
      for (size_t i = 1; i < s.kids.size(); ++i) out += arith(s.kids[i]);
      return out;
    }
    if (head == "-") {
      if (s.kids.size() == 2) return arith(s.kids[1]).negated();
      if (s.kids.size() < 3) throw TranslateError("'-' needs arguments");
      LinTerm out = arith(s.kids[1]);
      for (size_t i = 2; i < s.kids.size(); ++i) out -= arith(s.kids[i]);
      return out;
    }
    if (head == "*") {
      if (s.kids.size() < 3) throw TranslateError("'*' needs two arguments");
      LinTerm acc = arith(s.kids[1]);
      for (size_t i = 2; i < s.kids.size(); ++i) {
        LinTerm rhs = arith(s.kids[i]);
        if (acc.is_constant()) {
          Rat c = acc.constant;
          acc = rhs;
          acc.scale(c);
        } else if (rhs.is_constant()) {
          acc.scale(rhs.constant);
        } else {
          throw TranslateError("nonlinear multiplication");
        }
      }
      return acc;
    }
    if (head == "/") {
      need_div_arity(s);
      LinTerm num = arith(s.kids[1]);
      LinTerm den = arith(s.kids[2]);
      if (!den.is_constant() || den.constant.is_zero())
        throw TranslateError("'/' needs a nonzero constant divisor");
      num.scale(Rat(1) / den.constant);
      return num;
    }
    throw TranslateError("unsupported arithmetic operator '" + head + "'");
  }

  void need_div_arity(const SExpr& s) const {
    if (s.kids.size() != 3) throw TranslateError("'/' expects two arguments");
  }

  const Context& ctx_;
  std::vector<std::pair<std::string, VarSort>> scopes_;
};

std::string render_value(const Rat& v) {
  std::string body = v.den() == 1 ? std::to_string(std::llabs(v.num()))
                                  : "(/ " + std::to_string(std::llabs(v.num())) + " " +
                                        std::to_string(v.den()) + ")";
  return v.num() < 0 ? "(- " + body + ")" : body;
}

}  // namespace

bool read_sexpr(std::istream& in, SExpr& out) { return read_one(in, out); }

int run_smtlib(std::istream& in, std::ostream& out) {
  Context ctx;
  SExpr cmd;
  while (true) {
    try {
      if (!read_sexpr(in, cmd)) return 0;
    } catch (const std::exception& e) {
      out << "(error \"" << e.what() << "\")" << std::endl;
      return 1;
    }
    try {
      if (cmd.is_atom || cmd.kids.empty() || !cmd.kids[0].is_atom) {
        out << "(error \"malformed command\")" << std::endl;
        continue;
      }
      const std::string& head = cmd.kids[0].atom;
      if (head == "exit") return 0;
      if (head == "set-logic" || head == "set-option" || head == "set-info") continue;
      if (head == "reset") {
        ctx.reset();
        continue;
      }
      if (head == "echo") {
        std::string s = cmd.kids.size() > 1 ? cmd.kids[1].atom : "";
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
        out << s << std::endl;
        continue;
      }
      if (head == "declare-const" && cmd.kids.size() == 3) {
        ctx.declare(cmd.kids[1].atom, Translator::parse_sort(cmd.kids[2].atom));
        continue;
      }
      if (head == "declare-fun" && cmd.kids.size() == 4 && !cmd.kids[2].is_atom &&
          cmd.kids[2].kids.empty()) {
        ctx.declare(cmd.kids[1].atom, Translator::parse_sort(cmd.kids[3].atom));
        continue;
      }
      if (head == "assert" && cmd.kids.size() == 2) {
        Translator tr(ctx);
        ctx.assert_node(tr.formula(cmd.kids[1]));
        continue;
      }
      if (head == "push" || head == "pop") {
        unsigned n = 1;
        if (cmd.kids.size() > 1) n = static_cast<unsigned>(std::stoul(cmd.kids[1].atom));
        if (head == "push") ctx.push(n);
        else ctx.pop(n);
        continue;
      }
      if (head == "check-sat") {
        switch (ctx.check_sat()) {
          case CheckResult::Sat: out << "sat" << std::endl; break;
          case CheckResult::Unsat: out << "unsat" << std::endl; break;
          case CheckResult::Unknown: out << "unknown" << std::endl; break;
        }
        continue;
      }
      if (head == "get-value" && cmd.kids.size() == 2 && !cmd.kids[1].is_atom) {
        if (!ctx.model().has_value()) {
          out << "(error \"no model available\")" << std::endl;
          continue;
        }
        std::string reply = "(";
        bool first = true;
        for (const SExpr& term : cmd.kids[1].kids) {
          if (!term.is_atom) throw TranslateError("get-value supports plain symbols only");
          const std::string name = term.atom;
          if (!ctx.is_declared(name)) throw TranslateError("undeclared symbol '" + name + "'");
          auto it = ctx.model()->find(name);
          Rat v = it == ctx.model()->end() ? Rat(0) : it->second;
          if (!first) reply += " ";
          first = false;
          reply += "(" + term.atom + " " + render_value(v) + ")";
        }
        reply += ")";
        out << reply << std::endl;
        continue;
      }
      out << "(error \"unsupported command '" << head << "'\")" << std::endl;
    } catch (const std::exception& e) {
      out << "(error \"" << e.what() << "\")" << std::endl;
    }
  }
}

}  // namespace minismt
