#include "synthmt/smt_session.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "synthmt/errors.hpp"

namespace synthmt {

namespace {

std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::istringstream ss(cmd);
  std::string word;
  while (ss >> word) out.push_back(word);
  return out;
}

std::string exe_directory() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return {};
  buf[n] = '\0';
  return std::filesystem::path(buf).parent_path().string();
}

bool on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::istringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::error_code ec;
    if (std::filesystem::exists(dir + "/" + name, ec)) return true;
  }
  return false;
}

void render_int(std::int64_t v, std::string& out) {
  if (v < 0)
    out += "(- " + std::to_string(-v) + ")";
  else
    out += std::to_string(v);
}

void render_value(const Rational& v, std::string& out) {
  if (v.is_integer()) {
    render_int(v.num(), out);
    return;
  }
  if (v.num() < 0) {
    out += "(- (/ " + std::to_string(-v.num()) + " " + std::to_string(v.den()) + "))";
  } else {
    out += "(/ " + std::to_string(v.num()) + " " + std::to_string(v.den()) + ")";
  }
}

void render_literal(const Literal& l, std::string& out) {
  std::string lhs;
  if (l.coeffs().size() == 1) {
    const auto& [name, c] = *l.coeffs().begin();
    lhs = "(* ";
    render_int(c, lhs);
    lhs += " |" + name + "|)";
  } else {
    lhs = "(+";
    for (const auto& [name, c] : l.coeffs()) {
      lhs += " (* ";
      render_int(c, lhs);
      lhs += " |" + name + "|)";
    }
    lhs += ")";
  }
  std::string rhs;
  render_int(l.constant(), rhs);
  switch (l.relop()) {
    case RelOp::Lt: out += "(< " + lhs + " " + rhs + ")"; break;
    case RelOp::Le: out += "(<= " + lhs + " " + rhs + ")"; break;
    case RelOp::Eq: out += "(= " + lhs + " " + rhs + ")"; break;
    case RelOp::Ne: out += "(not (= " + lhs + " " + rhs + "))"; break;
    case RelOp::Ge: out += "(>= " + lhs + " " + rhs + ")"; break;
    case RelOp::Gt: out += "(> " + lhs + " " + rhs + ")"; break;
  }
}

void render_formula(const Formula& f, Sort sort, std::string& out) {
  switch (f.kind) {
    case Formula::Kind::True: out += "true"; return;
    case Formula::Kind::False: out += "false"; return;
    case Formula::Kind::Atom: render_literal(*f.atom, out); return;
    case Formula::Kind::Not:
      out += "(not ";
      render_formula(f.kids[0], sort, out);
      out += ")";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      if (f.kids.empty()) {
        out += f.kind == Formula::Kind::And ? "true" : "false";
        return;
      }
      out += f.kind == Formula::Kind::And ? "(and" : "(or";
      for (const auto& k : f.kids) {
        out += " ";
        render_formula(k, sort, out);
      }
      out += ")";
      return;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      out += f.kind == Formula::Kind::Exists ? "(exists (" : "(forall (";
      for (size_t i = 0; i < f.bound.size(); ++i) {
        if (i) out += " ";
        out += "(|" + f.bound[i] + "| " + to_string(sort) + ")";
      }
      out += ") ";
      render_formula(f.kids[0], sort, out);
      out += ")";
      return;
    }
  }
}

// Minimal s-expression shape for get-value replies.
struct Reply {
  bool is_atom = true;
  std::string atom;
  std::vector<Reply> kids;
};

Reply parse_reply(const std::string& text, size_t& i) {
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i >= text.size()) throw SolverProtocolError("truncated solver reply: " + text);
  Reply r;
  if (text[i] == '(') {
    ++i;
    r.is_atom = false;
    while (true) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      if (i >= text.size()) throw SolverProtocolError("unbalanced solver reply: " + text);
      if (text[i] == ')') {
        ++i;
        return r;
      }
      r.kids.push_back(parse_reply(text, i));
    }
  }
  if (text[i] == '|') {
    ++i;
    while (i < text.size() && text[i] != '|') r.atom += text[i++];
    if (i < text.size()) ++i;
    return r;
  }
  if (text[i] == '"') {
    r.atom += text[i++];
    while (i < text.size() && text[i] != '"') r.atom += text[i++];
    if (i < text.size()) r.atom += text[i++];
    return r;
  }
  while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
         text[i] != ')')
    r.atom += text[i++];
  return r;
}

Rational reply_to_value(const Reply& r) {
  if (r.is_atom) return Rational::parse(r.atom);
  if (r.kids.empty() || !r.kids[0].is_atom)
    throw SolverProtocolError("malformed value in solver reply");
  const std::string& op = r.kids[0].atom;
  if (op == "-" && r.kids.size() == 2) return -reply_to_value(r.kids[1]);
  if (op == "/" && r.kids.size() == 3)
    return reply_to_value(r.kids[1]) / reply_to_value(r.kids[2]);
  throw SolverProtocolError("unsupported value form in solver reply");
}

}  // namespace

std::string to_smt2(const Formula& f, Sort sort) {
  std::string out;
  render_formula(f, sort, out);
  return out;
}

std::vector<std::string> resolve_solver_command(const std::string& explicit_cmd) {
  if (!explicit_cmd.empty()) return split_command(explicit_cmd);
  if (const char* env = std::getenv("SYNTHMT_SOLVER"); env && *env) return split_command(env);
  std::string dir = exe_directory();
  if (!dir.empty()) {
    std::error_code ec;
    std::string local = dir + "/synthmt-smt";
    if (std::filesystem::exists(local, ec)) return {local};
  }
  if (on_path("synthmt-smt")) return {"synthmt-smt"};
  return {"z3", "-in"};
}

Session Session::start(const SolverConfig& config) {
  if (config.command.empty()) throw SolverSpawnError("empty solver command");
  if (config.timeout_ms <= 0) throw ContractViolation("solver timeout must be positive");

  int to_child[2], from_child[2], exec_err[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0 || pipe2(exec_err, O_CLOEXEC) != 0)
    throw SolverSpawnError("failed to create solver pipes");

  pid_t pid = fork();
  if (pid < 0) throw SolverSpawnError("failed to fork solver process");

  if (pid == 0) {
    close(to_child[1]);
    close(from_child[0]);
    close(exec_err[0]);
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(from_child[1]);
    std::vector<char*> argv;
    for (const auto& a : config.command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = write(exec_err[1], &err, sizeof(err));
    (void)ignored;
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);
  close(exec_err[1]);

  int err = 0;
  ssize_t n = read(exec_err[0], &err, sizeof(err));
  close(exec_err[0]);
  if (n > 0) {
    close(to_child[1]);
    close(from_child[0]);
    waitpid(pid, nullptr, 0);
    throw SolverSpawnError("cannot execute solver '" + config.command[0] +
                           "': " + std::strerror(err));
  }

  Session s;
  s.config_ = config;
  s.pid_ = pid;
  s.in_fd_ = to_child[1];
  s.out_fd_ = from_child[0];
  s.dead_ = false;
  s.send("(set-logic " + config.logic() + ")\n(set-option :produce-models true)\n");
  return s;
}

Session::Session(Session&& o) noexcept { *this = std::move(o); }

Session& Session::operator=(Session&& o) noexcept {
  if (this != &o) {
    terminate();
    config_ = std::move(o.config_);
    pid_ = o.pid_;
    in_fd_ = o.in_fd_;
    out_fd_ = o.out_fd_;
    buffer_ = std::move(o.buffer_);
    depth_ = o.depth_;
    dead_ = o.dead_;
    o.pid_ = -1;
    o.in_fd_ = o.out_fd_ = -1;
    o.dead_ = true;
  }
  return *this;
}

Session::~Session() { terminate(); }

void Session::terminate() noexcept {
  if (pid_ > 0) {
    if (in_fd_ >= 0) {
      // EOF lets a cooperative solver exit; kill covers the rest.
      ssize_t ignored = write(in_fd_, "(exit)\n", 7);
      (void)ignored;
      close(in_fd_);
    }
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, nullptr, WNOHANG) != 0) {
        pid_ = -1;
        break;
      }
      usleep(2000);
    }
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  } else if (in_fd_ >= 0) {
    close(in_fd_);
  }
  if (out_fd_ >= 0) close(out_fd_);
  pid_ = -1;
  in_fd_ = out_fd_ = -1;
  dead_ = true;
}

void Session::ensure_alive() const {
  if (dead_) throw SolverProtocolError("solver session is no longer usable");
}

void Session::fail_timeout() {
  terminate();
  throw SolverTimeout("solver exceeded the " + std::to_string(config_.timeout_ms) +
                      " ms query timeout");
}

void Session::send(const std::string& text) {
  ensure_alive();
  size_t off = 0;
  while (off < text.size()) {
    ssize_t n = write(in_fd_, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      terminate();
      throw SolverProtocolError("failed to write to solver: " + std::string(std::strerror(errno)));
    }
    off += static_cast<size_t>(n);
  }
}

namespace {

// Both return the number of buffer bytes consumed, 0 when incomplete.

size_t complete_line(const std::string& buf, std::string& line) {
  auto nl = buf.find('\n');
  if (nl == std::string::npos) return 0;
  line = buf.substr(0, nl);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return nl + 1;
}

size_t complete_sexpr(const std::string& buf, std::string& expr) {
  int bar = 0, quote = 0, nest = 0;
  bool seen = false;
  for (size_t i = 0; i < buf.size(); ++i) {
    char c = buf[i];
    if (bar) {
      if (c == '|') bar = 0;
      continue;
    }
    if (quote) {
      if (c == '"') quote = 0;
      continue;
    }
    if (c == '|') bar = 1;
    else if (c == '"') quote = 1;
    else if (c == '(') {
      ++nest;
      seen = true;
    } else if (c == ')') {
      --nest;
      if (seen && nest == 0) {
        expr = buf.substr(0, i + 1);
        return i + 1;
      }
    } else if (!seen && !std::isspace(static_cast<unsigned char>(c))) {
      // A reply that is not a list (e.g. "sat" where an s-expr was expected)
      // terminates at end of line.
      return complete_line(buf, expr);
    }
  }
  return 0;
}

}  // namespace

std::string Session::read_reply_line() {
  ensure_alive();
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.timeout_ms);
  std::string line;
  size_t consumed;
  while ((consumed = complete_line(buffer_, line)) == 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) fail_timeout();
    pollfd pfd{out_fd_, POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(left));
    if (pr == 0) fail_timeout();
    if (pr < 0) {
      if (errno == EINTR) continue;
      terminate();
      throw SolverProtocolError("poll on solver pipe failed");
    }
    char chunk[4096];
    ssize_t n = read(out_fd_, chunk, sizeof(chunk));
    if (n <= 0) {
      terminate();
      throw SolverProtocolError("solver closed its output unexpectedly");
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
  buffer_.erase(0, consumed);
  return line;
}

std::string Session::read_reply_sexpr() {
  ensure_alive();
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.timeout_ms);
  std::string expr;
  size_t consumed;
  while ((consumed = complete_sexpr(buffer_, expr)) == 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) fail_timeout();
    pollfd pfd{out_fd_, POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(left));
    if (pr == 0) fail_timeout();
    if (pr < 0) {
      if (errno == EINTR) continue;
      terminate();
      throw SolverProtocolError("poll on solver pipe failed");
    }
    char chunk[4096];
    ssize_t n = read(out_fd_, chunk, sizeof(chunk));
    if (n <= 0) {
      terminate();
      throw SolverProtocolError("solver closed its output unexpectedly");
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
  buffer_.erase(0, consumed);
  return expr;
}

void Session::push() {
  send("(push 1)\n");
  ++depth_;
}

void Session::pop() {
  if (depth_ <= 0) throw ContractViolation("pop without matching push");
  send("(pop 1)\n");
  --depth_;
}

void Session::declare(const std::string& name) {
  send("(declare-const |" + name + "| " + to_string(config_.sort) + ")\n");
}

void Session::declare(std::span<const std::string> names) {
  std::string cmd;
  for (const auto& n : names) cmd += "(declare-const |" + n + "| " + to_string(config_.sort) + ")\n";
  send(cmd);
}

void Session::assert_formula(const Formula& f) {
  send("(assert " + to_smt2(f, config_.sort) + ")\n");
}

SatStatus Session::check() {
  send("(check-sat)\n");
  std::string line = read_reply_line();
  while (line.empty()) line = read_reply_line();
  if (line == "sat") return SatStatus::Sat;
  if (line == "unsat") return SatStatus::Unsat;
  if (line == "unknown") return SatStatus::Unknown;
  terminate();
  throw SolverProtocolError("unexpected check-sat reply: " + line);
}

Valuation Session::get_values(std::span<const std::string> names) {
  if (names.empty()) return {};
  std::string cmd = "(get-value (";
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) cmd += " ";
    cmd += "|" + names[i] + "|";
  }
  cmd += "))\n";
  send(cmd);
  std::string reply = read_reply_sexpr();
  size_t i = 0;
  Reply parsed = parse_reply(reply, i);
  if (parsed.is_atom || (parsed.kids.size() == 2 && parsed.kids[0].is_atom &&
                         parsed.kids[0].atom == "error")) {
    terminate();
    throw SolverProtocolError("get-value failed: " + reply);
  }
  Valuation out;
  for (const Reply& pair : parsed.kids) {
    if (pair.is_atom || pair.kids.size() != 2 || !pair.kids[0].is_atom)
      throw SolverProtocolError("malformed get-value pair: " + reply);
    out[pair.kids[0].atom] = reply_to_value(pair.kids[1]);
  }
  for (const auto& n : names)
    if (!out.count(n)) throw SolverProtocolError("get-value reply missing variable " + n);
  return out;
}

SatResult Session::solve_exists(std::span<const std::string> vars, const Formula& f) {
  if (!f.quantifier_free())
    throw ContractViolation("solve_exists expects a quantifier-free formula");
  push();
  SatResult result;
  try {
    declare(vars);
    assert_formula(f);
    result.status = check();
    if (result.status == SatStatus::Sat) result.model = get_values(vars);
  } catch (...) {
    if (!dead_) pop();
    throw;
  }
  pop();
  if (result.status == SatStatus::Sat && !f.eval(result.model))
    throw InvariantViolation("solver model does not satisfy the queried formula");
  return result;
}

SatResult Session::check_quantified(std::span<const std::string> outer_vars, const Formula& f) {
  push();
  SatResult result;
  try {
    declare(outer_vars);
    assert_formula(f);
    result.status = check();
    if (result.status == SatStatus::Sat) result.model = get_values(outer_vars);
  } catch (...) {
    if (!dead_) pop();
    throw;
  }
  pop();
  return result;
}

}  // namespace synthmt
