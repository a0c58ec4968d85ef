#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cse/sexpr.hpp"
#include "cse/solver.hpp"
#include "smt_internal.hpp"

namespace cse {

namespace {

bool on_path(const std::string& exe) {
  const char* path = getenv("PATH");
  if (!path) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::error_code ec;
    if (std::filesystem::exists(dir + "/" + exe, ec)) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> split_command(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

std::vector<std::string> resolve_solver_command(const std::string& explicit_cmd) {
  if (!explicit_cmd.empty()) return split_command(explicit_cmd);
  if (const char* env = getenv("CSE_SOLVER"); env && *env) return split_command(env);
  if (on_path("z3")) return {"z3", "-in"};
  return {};
}

namespace {

long long parse_int_value(const SExpr& v) {
  if (v.is_atom) return std::stoll(v.atom);
  if (v.size() == 2 && v[0].is_atom && v[0].atom == "-") return -std::stoll(v[1].atom);
  throw SolverProcessError("unparsable model value: " + sexpr_to_string(v));
}

// Replace reads of `sym` at constant index `idx` by the concrete value.
ExprPtr substitute_read(const ExprPtr& e, int sym, long long idx, long long value) {
  if (e->kind == ExprKind::Read && e->args[0]->sym == sym &&
      e->args[1]->kind == ExprKind::IntConst && e->args[1]->ival == idx)
    return mk_int(value);
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  bool changed = false;
  for (auto& a : e->args) {
    ExprPtr t = substitute_read(a, sym, idx, value);
    changed = changed || t.get() != a.get();
    args.push_back(std::move(t));
  }
  if (!changed) return e;
  // Reads never appear as direct children of Forall bounds of interest here;
  // rebuild via the generic constructors.
  switch (e->kind) {
    case ExprKind::Neg: return neg(args[0]);
    case ExprKind::Not: return not_(args[0]);
    case ExprKind::Read: return read(args[0], args[1]);
    case ExprKind::And: return and_all(std::move(args));
    case ExprKind::Or: {
      ExprPtr acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) acc = or_(acc, args[i]);
      return acc;
    }
    case ExprKind::Forall:
      return forall_in_range(e->param, e->param_tag, args[0], args[1], args[2]);
    default: return mk_binary(e->kind, args[0], args[1]);
  }
}

void collect_const_reads(const ExprPtr& e,
                         std::vector<std::pair<int, long long>>& out) {
  if (e->kind == ExprKind::Read && e->args[1]->kind == ExprKind::IntConst) {
    std::pair<int, long long> slot{e->args[0]->sym, e->args[1]->ival};
    bool seen = false;
    for (auto& s : out) seen = seen || s == slot;
    if (!seen) out.push_back(slot);
  }
  for (auto& a : e->args) collect_const_reads(a, out);
}

}  // namespace

struct SmtProcessSolver::Impl {
  ExternalSolverConfig cfg;
  pid_t pid = -1;
  int to_child = -1;    // write end
  int from_child = -1;  // read end
  std::string read_buf;
  int session = 0;
  int query_seq = 0;
  std::set<std::string> declared;

  explicit Impl(ExternalSolverConfig c) : cfg(std::move(c)) {
    if (cfg.command.empty())
      throw SolverProcessError("no external solver configured (set --solver or CSE_SOLVER)");
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    if (to_child >= 0) {
      close(to_child);
      to_child = -1;
    }
    if (from_child >= 0) {
      close(from_child);
      from_child = -1;
    }
    if (pid > 0) {
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        if (waitpid(pid, &status, WNOHANG) == pid) {
          pid = -1;
          return;
        }
        usleep(10000);
      }
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      pid = -1;
    }
  }

  void spawn() {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw SolverProcessError("pipe() failed");
    pid_t child = fork();
    if (child < 0) throw SolverProcessError("fork() failed");
    if (child == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      std::vector<char*> argv;
      for (auto& a : cfg.command) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      const char* msg = "(error \"exec failed\")\n";
      ssize_t ignored = write(STDOUT_FILENO, msg, strlen(msg));
      (void)ignored;
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    pid = child;
    to_child = in_pipe[1];
    from_child = out_pipe[0];
    read_buf.clear();
    declared.clear();
  }

  void ensure_running() {
    if (pid <= 0) spawn();
  }

  void send(const std::string& text) {
    size_t off = 0;
    while (off < text.size()) {
      ssize_t n = write(to_child, text.data() + off, text.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        shutdown();
        throw SolverProcessError("write to solver failed");
      }
      off += static_cast<size_t>(n);
    }
  }

  // Reads one line, honoring the per-query deadline. Empty optional on
  // timeout.
  std::optional<std::string> read_line(int deadline_ms) {
    for (;;) {
      size_t nl = read_buf.find('\n');
      if (nl != std::string::npos) {
        std::string line = read_buf.substr(0, nl);
        read_buf.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      struct pollfd pfd{from_child, POLLIN, 0};
      int pr = poll(&pfd, 1, deadline_ms);
      if (pr == 0) return std::nullopt;
      if (pr < 0) {
        if (errno == EINTR) continue;
        shutdown();
        throw SolverProcessError("poll on solver failed");
      }
      char chunk[4096];
      ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n <= 0) {
        shutdown();
        throw SolverProcessError("solver process closed its output");
      }
      read_buf.append(chunk, static_cast<size_t>(n));
    }
  }

  std::string prefix() const { return "r" + std::to_string(session) + "_"; }

  void declare_new(const SatQuery& q) {
    std::ostringstream decls;
    for (int v : q.free_symbols) {
      std::string n = smt::symbol_name(*q.symtab, v, prefix());
      if (!declared.insert(n).second) continue;
      switch ((*q.symtab)[v].sort) {
        case Sort::Int: decls << "(declare-const " << n << " Int)\n"; break;
        case Sort::Bool: decls << "(declare-const " << n << " Bool)\n"; break;
        case Sort::Array: decls << "(declare-fun " << n << " (Int) Int)\n"; break;
      }
    }
    for (int p : q.free_parameters) {
      std::string n = smt::param_name(p, prefix());
      if (!declared.insert(n).second) continue;
      decls << "(declare-const " << n << " Int)\n(assert (>= " << n << " 0))\n";
    }
    std::string text = decls.str();
    if (!text.empty()) send(text);
  }

  void dump(const SatQuery& q) {
    if (cfg.dump_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(cfg.dump_dir, ec);
    char name[64];
    snprintf(name, sizeof name, "query_%05d.smt2", query_seq);
    std::ofstream out(cfg.dump_dir + "/" + name);
    out << to_smtlib(q);
  }

  // Runs one command block and returns the response text up to the sentinel.
  std::string round_trip(const std::string& commands) {
    std::string sentinel = "::m" + std::to_string(++query_seq) + "::";
    send(commands + "(echo \"" + sentinel + "\")\n");
    std::string out;
    for (;;) {
      auto line = read_line(cfg.timeout_ms);
      if (!line) {
        shutdown();
        throw SolverProcessError("solver timed out mid-protocol");
      }
      if (line->find(sentinel) != std::string::npos) break;
      out += *line;
      out += "\n";
    }
    return out;
  }

  std::optional<Model> extract_model(const SatQuery& q) {
    Model m;
    std::vector<std::pair<std::string, int>> scalar_names;  // name -> var index
    std::vector<std::pair<std::string, int>> param_names;
    for (int v : q.free_symbols) {
      if ((*q.symtab)[v].sort == Sort::Array) continue;
      scalar_names.emplace_back(smt::symbol_name(*q.symtab, v, prefix()), v);
    }
    for (int p : q.free_parameters)
      param_names.emplace_back(smt::param_name(p, prefix()), p);
  
    if (!scalar_names.empty() || !param_names.empty()) {
      std::ostringstream cmd;
      cmd << "(get-value (";
      for (auto& [n, _] : scalar_names) cmd << n << " ";
      for (auto& [n, _] : param_names) cmd << n << " ";
      cmd << "))\n";
      std::string resp = round_trip(cmd.str());
      auto parsed = parse_sexprs(resp);
      if (parsed.size() != 1 || parsed[0].is_atom) return std::nullopt;
      for (auto& entry : parsed[0].list) {
        if (entry.is_atom || entry.size() != 2 || !entry[0].is_atom) return std::nullopt;
        const std::string& name = entry[0].atom;
        auto find = [&](const std::vector<std::pair<std::string, int>>& xs) {
          for (auto& [n, id] : xs)
            if (n == name) return id;
          return -1;
        };
        int var = find(scalar_names);
        if (var >= 0) {
          if ((*q.symtab)[var].sort == Sort::Bool)
            m.bools[var] = entry[1].is_atom && entry[1].atom == "true";
          else
            m.ints[var] = parse_int_value(entry[1]);
          continue;
        }
        int par = find(param_names);
        if (par >= 0) m.params[par] = parse_int_value(entry[1]);
      }
    }
  
    // Array entries: pin down the reads the (parameter-substituted, expanded)
    // formula actually performs, innermost first.
    std::vector<std::pair<int, ExprPtr>> psubst;
    for (auto& [p, v] : m.params) psubst.emplace_back(p, mk_int(v));
    ExprPtr f = psubst.empty() ? q.formula : substitute_params(q.formula, psubst);
    try {
      f = expand_constant_foralls(f);
    } catch (const SortError&) {
      return std::nullopt;  // non-constant bound: give up on the model
    }
    std::vector<ExprPtr> scalar_values;
    {
      // Ground the scalar symbols so read indices become constants.
      int n = q.symtab->size();
      scalar_values.resize(static_cast<size_t>(n));
      for (int v = 0; v < n; ++v) {
        if (m.ints.count(v))
          scalar_values[static_cast<size_t>(v)] = mk_int(m.ints[v]);
        else if (m.bools.count(v))
          scalar_values[static_cast<size_t>(v)] = mk_bool(m.bools[v]);
        else
          scalar_values[static_cast<size_t>(v)] = mk_symbol(v, (*q.symtab)[v].sort);
      }
      f = substitute_symbols(f, scalar_values);
    }
    for (int round = 0; round < 4; ++round) {
      std::vector<std::pair<int, long long>> slots;
      collect_const_reads(f, slots);
      std::vector<std::pair<int, long long>> unresolved;
      for (auto& s : slots) {
        auto it = m.arrays.find(s.first);
        if (it == m.arrays.end() || !it->second.count(s.second)) unresolved.push_back(s);
      }
      if (unresolved.empty()) break;
      std::ostringstream cmd;
      cmd << "(get-value (";
      for (auto& [sym, idx] : unresolved) {
        cmd << "(" << smt::symbol_name(*q.symtab, sym, prefix()) << " ";
        if (idx < 0)
          cmd << "(- " << -idx << ")";
        else
          cmd << idx;
        cmd << ") ";
      }
      cmd << "))\n";
      std::string resp = round_trip(cmd.str());
      auto parsed = parse_sexprs(resp);
      if (parsed.size() != 1 || parsed[0].is_atom ||
          parsed[0].size() != unresolved.size())
        return std::nullopt;
      for (size_t i = 0; i < unresolved.size(); ++i) {
        const SExpr& entry = parsed[0][i];
        if (entry.is_atom || entry.size() != 2) return std::nullopt;
        long long value = 0;
        try {
          value = parse_int_value(entry[1]);
        } catch (const SolverProcessError&) {
          return std::nullopt;
        }
        m.arrays[unresolved[i].first][unresolved[i].second] = value;
        f = substitute_read(f, unresolved[i].first, unresolved[i].second, value);
      }
    }
    return m;
  }
};

SmtProcessSolver::SmtProcessSolver(ExternalSolverConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(cfg))) {
  // Writes into a dying solver must surface as errors, not kill the host.
  signal(SIGPIPE, SIG_IGN);
}

SmtProcessSolver::~SmtProcessSolver() = default;

void SmtProcessSolver::new_session() {
  ++impl_->session;
  impl_->declared.clear();
}

SatResult SmtProcessSolver::check(const SatQuery& q, bool want_model) {
  Impl& im = *impl_;
  ++queries_;
  ++im.query_seq;
  im.dump(q);
  try {
    return check_once(q, want_model);
  } catch (const SolverProcessError&) {
    // One respawn: the previous process may have died mid-query.
    im.shutdown();
  }
  return check_once(q, want_model);
}

SatResult SmtProcessSolver::check_once(const SatQuery& q, bool want_model) {
  Impl& im = *impl_;
  im.ensure_running();

  const std::string sentinel = "::q" + std::to_string(im.query_seq) + "::";
  SatResult result;
  result.backend = "external";

  try {
    im.declare_new(q);
    std::ostringstream os;
    os << "(push 1)\n(assert " << smt::render_formula(q.formula, *q.symtab, im.prefix())
       << ")\n(check-sat)\n(echo \"" << sentinel << "\")\n";
    im.send(os.str());

    std::string verdict_line;
    for (;;) {
      auto line = im.read_line(im.cfg.timeout_ms);
      if (!line) {
        // Hung solver: kill it; the next query respawns.
        im.shutdown();
        ++unknowns_;
        result.verdict = Verdict::Unknown;
        if (on_query) on_query(q, result.verdict);
        return result;
      }
      if (line->find(sentinel) != std::string::npos) break;
      if (!line->empty()) verdict_line = *line;
    }
    if (verdict_line == "sat")
      result.verdict = Verdict::Sat;
    else if (verdict_line == "unsat")
      result.verdict = Verdict::Unsat;
    else if (verdict_line == "unknown")
      result.verdict = Verdict::Unknown;
    else {
      im.send("(pop 1)\n");
      throw SolverProcessError("unexpected solver response: '" + verdict_line + "'");
    }

    if (result.verdict == Verdict::Sat && want_model) result.model = im.extract_model(q);
    im.send("(pop 1)\n");
  } catch (const SolverProcessError&) {
    im.shutdown();
    throw;
  }

  if (result.verdict == Verdict::Unknown) ++unknowns_;
  if (on_query) on_query(q, result.verdict);
  return result;
}

SatResult AutoSolver::check(const SatQuery& q, bool want_model) {
  if (external_) {
    try {
      SatResult r = external_->check(q, want_model);
      if (r.verdict != Verdict::Unknown) return r;
    } catch (const SolverProcessError&) {
      // fall through to the bounded oracle
    }
  }
  try {
    SatResult r = bounded_.check(q, want_model);
    if (r.verdict == Verdict::Sat) return r;
  } catch (const DomainTooLarge&) {
  }
  SatResult r;
  r.verdict = Verdict::Unknown;
  r.backend = "auto";
  return r;
}

bool formulas_equivalent(const ExprPtr& a, const ExprPtr& b, SatSolver& backend,
                         const std::shared_ptr<const SymbolTable>& symtab) {
  if (a->sort != b->sort) return false;
  if (a->sort == Sort::Array)
    return a->kind == ExprKind::Symbol && b->kind == ExprKind::Symbol && a->sym == b->sym;
  if (structurally_equal(a, b)) return true;
  ExprPtr mismatch;
  if (a->sort == Sort::Bool)
    mismatch = or_(and_(a, not_(b)), and_(not_(a), b));
  else
    mismatch = ne(a, b);
  SatResult r = backend.check(SatQuery::make(mismatch, symtab), false);
  switch (r.verdict) {
    case Verdict::Unsat: return true;
    case Verdict::Sat: return false;
    case Verdict::Unknown:
      // The bounded backend exhausted its domain without a counterexample,
      // which is its notion of Unsat.
      return backend.kind() == BackendKind::Bounded;
  }
  return false;
}

}  // namespace cse
