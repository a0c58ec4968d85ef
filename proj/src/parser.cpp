#include "cse/parser.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace cse {
namespace {

enum class Tok : uint8_t {
  Ident,
  Int,
  Arrow,    // ->
  Assign,   // :=
  Colon,
  Semi,
  Comma,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  NeEq,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  AndAnd,
  OrOr,
  Bang,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  int line = 1;
  int col = 1;
};

[[noreturn]] void fail(ParseErrorKind k, const Token& t, const std::string& msg) {
  throw ParseError(k, t.line, t.col, msg);
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (i_ >= s_.size()) {
      tok_.kind = Tok::End;
      tok_.text = "<end>";
      return;
    }
    char c = s_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      tok_.kind = Tok::Ident;
      tok_.text = s_.substr(i_, j - i_);
      bump(j - i_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      tok_.kind = Tok::Int;
      tok_.text = s_.substr(i_, j - i_);
      tok_.value = std::stoll(tok_.text);
      bump(j - i_);
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && i_ + 1 < s_.size() && s_[i_ + 1] == b;
    };
    if (two('-', '>')) return set(Tok::Arrow, "->", 2);
    if (two(':', '=')) return set(Tok::Assign, ":=", 2);
    if (two('<', '=')) return set(Tok::Le, "<=", 2);
    if (two('>', '=')) return set(Tok::Ge, ">=", 2);
    if (two('=', '=')) return set(Tok::EqEq, "==", 2);
    if (two('!', '=')) return set(Tok::NeEq, "!=", 2);
    if (two('&', '&')) return set(Tok::AndAnd, "&&", 2);
    if (two('|', '|')) return set(Tok::OrOr, "||", 2);
    switch (c) {
      case ':': return set(Tok::Colon, ":", 1);
      case ';': return set(Tok::Semi, ";", 1);
      case ',': return set(Tok::Comma, ",", 1);
      case '(': return set(Tok::LParen, "(", 1);
      case ')': return set(Tok::RParen, ")", 1);
      case '{': return set(Tok::LBrace, "{", 1);
      case '}': return set(Tok::RBrace, "}", 1);
      case '[': return set(Tok::LBracket, "[", 1);
      case ']': return set(Tok::RBracket, "]", 1);
      case '<': return set(Tok::Lt, "<", 1);
      case '>': return set(Tok::Gt, ">", 1);
      case '+': return set(Tok::Plus, "+", 1);
      case '-': return set(Tok::Minus, "-", 1);
      case '*': return set(Tok::Star, "*", 1);
      case '/': return set(Tok::Slash, "/", 1);
      case '%': return set(Tok::Percent, "%", 1);
      case '!': return set(Tok::Bang, "!", 1);
      default:
        throw ParseError(ParseErrorKind::Syntax, line_, col_,
                         std::string("unexpected character '") + c + "'");
    }
  }

  void set(Tok k, const char* text, size_t n) {
    tok_.kind = k;
    tok_.text = text;
    bump(n);
  }

  void bump(size_t n) {
    for (size_t j = 0; j < n; ++j) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  void skip_ws() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') bump(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(1);
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

// Untyped surface forms; resolved against the symbol table afterwards.
struct RawExpr {
  enum class K { Int, Bool, Var, Index, Unary, Binary } k;
  long long ival = 0;
  bool bval = false;
  std::string name;
  ExprKind op = ExprKind::Add;
  bool is_not = false;  // Unary: true = !, false = -
  std::vector<RawExpr> kids;
  Token at;
};

struct RawAction {
  enum class K { Assign, Call, CallAssign, Ret, Skip, Guard } k;
  std::string var;
  std::string callee;
  std::vector<RawExpr> args;
  std::optional<RawExpr> expr;
  Token at;
};

struct RawEdge {
  std::string src, dst;
  RawAction action;
  Token at;
};

struct RawDecl {
  std::string name;
  Sort sort;
  Token at;
};

struct RawFunction {
  std::string name;
  std::vector<RawDecl> params;
  Sort return_type;
  bool start = false;
  std::string entry, exit;
  Token entry_at, exit_at;
  std::vector<RawDecl> locals;
  std::vector<RawEdge> edges;
  Token at;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Program run() {
    std::vector<RawDecl> globals;
    std::vector<RawFunction> fns;
    while (lex_.peek().kind != Tok::End) {
      if (is_kw("global")) {
        lex_.next();
        Token name = expect(Tok::Ident, "global variable name");
        expect(Tok::Colon, "':'");
        Sort s = parse_type();
        expect(Tok::Semi, "';'");
        globals.push_back({name.text, s, name});
      } else if (is_kw("fn")) {
        fns.push_back(parse_function());
      } else {
        fail(ParseErrorKind::Syntax, lex_.peek(), "expected 'global' or 'fn'");
      }
    }
    return assemble(globals, fns);
  }

 private:
  bool is_kw(const char* kw) const {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == kw;
  }

  Token expect(Tok k, const char* what) {
    if (lex_.peek().kind != k)
      fail(ParseErrorKind::Syntax, lex_.peek(),
           std::string("expected ") + what + ", got '" + lex_.peek().text + "'");
    return lex_.next();
  }

  Token expect_kw(const char* kw) {
    if (!is_kw(kw))
      fail(ParseErrorKind::Syntax, lex_.peek(),
           std::string("expected '") + kw + "', got '" + lex_.peek().text + "'");
    return lex_.next();
  }

  Sort parse_type() {
    Token t = expect(Tok::Ident, "type");
    if (t.text == "int") {
      if (lex_.peek().kind == Tok::LBracket) {
        lex_.next();
        expect(Tok::RBracket, "']'");
        return Sort::Array;
      }
      return Sort::Int;
    }
    if (t.text == "bool") return Sort::Bool;
    fail(ParseErrorKind::Syntax, t, "unknown type '" + t.text + "'");
  }

  RawFunction parse_function() {
    RawFunction f;
    f.at = expect_kw("fn");
    f.name = expect(Tok::Ident, "function name").text;
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      for (;;) {
        Token n = expect(Tok::Ident, "parameter name");
        expect(Tok::Colon, "':'");
        f.params.push_back({n.text, parse_type(), n});
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    f.return_type = parse_type();
    if (f.return_type == Sort::Array)
      fail(ParseErrorKind::Type, f.at, "functions cannot return arrays");
    if (is_kw("start")) {
      lex_.next();
      f.start = true;
    }
    expect(Tok::LBrace, "'{'");
    f.entry_at = expect_kw("entry");
    f.entry = expect(Tok::Ident, "entry location").text;
    expect(Tok::Semi, "';'");
    f.exit_at = expect_kw("exit");
    f.exit = expect(Tok::Ident, "exit location").text;
    expect(Tok::Semi, "';'");
    while (is_kw("locals")) {
      lex_.next();
      for (;;) {
        Token n = expect(Tok::Ident, "local name");
        expect(Tok::Colon, "':'");
        f.locals.push_back({n.text, parse_type(), n});
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
      expect(Tok::Semi, "';'");
    }
    while (lex_.peek().kind != Tok::RBrace) {
      RawEdge e;
      e.at = lex_.peek();
      e.src = expect(Tok::Ident, "source location").text;
      expect(Tok::Arrow, "'->'");
      e.dst = expect(Tok::Ident, "target location").text;
      expect(Tok::Colon, "':'");
      e.action = parse_action();
      expect(Tok::Semi, "';'");
      f.edges.push_back(std::move(e));
    }
    lex_.next();  // }
    return f;
  }

  RawAction parse_action() {
    RawAction a;
    a.at = lex_.peek();
    if (is_kw("skip")) {
      lex_.next();
      a.k = RawAction::K::Skip;
      return a;
    }
    if (is_kw("ret")) {
      lex_.next();
      a.k = RawAction::K::Ret;
      a.expr = parse_expr();
      return a;
    }
    // var := expr | var := callee(args) | callee(args) | guard-expr.
    // Disambiguate by lookahead after a leading identifier.
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text != "true" &&
        lex_.peek().text != "false") {
      Token name = lex_.next();
      if (lex_.peek().kind == Tok::LParen) {
        RawExpr call = parse_call_tail(name);
        a.k = RawAction::K::Call;
        a.callee = call.kids[0].name;
        a.args.assign(call.kids.begin() + 1, call.kids.end());
        return a;
      }
      if (lex_.peek().kind == Tok::Assign) {
        lex_.next();
        a.var = name.text;
        RawExpr rhs = parse_expr_or_call();
        if (rhs.k == RawExpr::K::Index && rhs.name == "\1call") {
          a.k = RawAction::K::CallAssign;
          a.callee = rhs.kids[0].name;
          a.args.assign(rhs.kids.begin() + 1, rhs.kids.end());
        } else {
          a.k = RawAction::K::Assign;
          a.expr = std::move(rhs);
        }
        return a;
      }
      a.k = RawAction::K::Guard;
      a.expr = continue_expr_from_ident(name);
      return a;
    }
    a.k = RawAction::K::Guard;
    a.expr = parse_expr();
    return a;
  }

  // Either an expression or NAME(args); call forms are smuggled through
  // RawExpr with the sentinel name so parse_expr stays uniform.
  RawExpr parse_expr_or_call() {
    if (lex_.peek().kind == Tok::Ident && !is_kw("true") && !is_kw("false")) {
      Token name = lex_.peek();
      // Look ahead for '(' by copying the lexer is overkill; parse the name
      // and branch.
      lex_.next();
      if (lex_.peek().kind == Tok::LParen) return parse_call_tail(name);
      return continue_expr_from_ident(name);
    }
    return parse_expr();
  }

  RawExpr parse_call_tail(const Token& name) {
    RawExpr call;
    call.k = RawExpr::K::Index;
    call.name = "\1call";
    call.at = name;
    RawExpr fn;
    fn.k = RawExpr::K::Var;
    fn.name = name.text;
    fn.at = name;
    call.kids.push_back(std::move(fn));
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      for (;;) {
        call.kids.push_back(parse_expr());
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
    }
    expect(Tok::RParen, "')'");
    return call;
  }

  // The identifier was already consumed (call-form lookahead); parse the rest
  // of the expression with it as the leftmost primary.
  RawExpr continue_expr_from_ident(const Token& name) {
    RawExpr prim = finish_primary_ident(name);
    return parse_binary_rest(std::move(prim), 0);
  }

  RawExpr finish_primary_ident(const Token& name) {
    RawExpr e;
    e.at = name;
    if (name.text == "true" || name.text == "false") {
      e.k = RawExpr::K::Bool;
      e.bval = name.text == "true";
      return e;
    }
    e.k = RawExpr::K::Var;
    e.name = name.text;
    if (lex_.peek().kind == Tok::LBracket) {
      lex_.next();
      RawExpr idx = parse_expr();
      expect(Tok::RBracket, "']'");
      RawExpr r;
      r.k = RawExpr::K::Index;
      r.name = name.text;
      r.at = name;
      r.kids.push_back(std::move(e));
      r.kids.push_back(std::move(idx));
      return r;
    }
    return e;
  }

  RawExpr parse_primary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Int: {
        lex_.next();
        RawExpr e;
        e.k = RawExpr::K::Int;
        e.ival = t.value;
        e.at = t;
        return e;
      }
      case Tok::Ident:
        lex_.next();
        return finish_primary_ident(t);
      case Tok::LParen: {
        lex_.next();
        RawExpr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Minus: {
        lex_.next();
        RawExpr e;
        e.k = RawExpr::K::Unary;
        e.is_not = false;
        e.at = t;
        e.kids.push_back(parse_primary());
        return e;
      }
      case Tok::Bang: {
        lex_.next();
        RawExpr e;
        e.k = RawExpr::K::Unary;
        e.is_not = true;
        e.at = t;
        e.kids.push_back(parse_primary());
        return e;
      }
      default:
        fail(ParseErrorKind::Syntax, t, "expected expression, got '" + t.text + "'");
    }
  }

  struct OpInfo {
    ExprKind op;
    int prec;
  };

  std::optional<OpInfo> peek_op() {
    switch (lex_.peek().kind) {
      case Tok::OrOr: return OpInfo{ExprKind::Or, 1};
      case Tok::AndAnd: return OpInfo{ExprKind::And, 2};
      case Tok::Lt: return OpInfo{ExprKind::Lt, 3};
      case Tok::Le: return OpInfo{ExprKind::Le, 3};
      case Tok::Gt: return OpInfo{ExprKind::Gt, 3};
      case Tok::Ge: return OpInfo{ExprKind::Ge, 3};
      case Tok::EqEq: return OpInfo{ExprKind::Eq, 3};
      case Tok::NeEq: return OpInfo{ExprKind::Ne, 3};
      case Tok::Plus: return OpInfo{ExprKind::Add, 4};
      case Tok::Minus: return OpInfo{ExprKind::Sub, 4};
      case Tok::Star: return OpInfo{ExprKind::Mul, 5};
      case Tok::Slash: return OpInfo{ExprKind::Div, 5};
      case Tok::Percent: return OpInfo{ExprKind::Mod, 5};
      default: return std::nullopt;
    }
  }

  RawExpr parse_binary_rest(RawExpr lhs, int min_prec) {
    for (;;) {
      auto op = peek_op();
      if (!op || op->prec < min_prec) return lhs;
      Token t = lex_.next();
      RawExpr rhs = parse_primary();
      for (;;) {
        auto nxt = peek_op();
        if (!nxt || nxt->prec <= op->prec) break;
        rhs = parse_binary_rest(std::move(rhs), nxt->prec);
      }
      RawExpr e;
      e.k = RawExpr::K::Binary;
      e.op = op->op;
      e.at = t;
      e.kids.push_back(std::move(lhs));
      e.kids.push_back(std::move(rhs));
      lhs = std::move(e);
    }
  }

  RawExpr parse_expr() { return parse_binary_rest(parse_primary(), 0); }

  // ---- assembly ----

  Program assemble(const std::vector<RawDecl>& globals, std::vector<RawFunction>& fns) {
    Program p;
    auto symtab = std::make_shared<SymbolTable>();
    std::map<std::string, VarId> var_by_name;
    std::map<std::string, FnId> fn_by_name;

    auto declare = [&](const RawDecl& d, FnId owner, VarKind kind) -> VarId {
      if (var_by_name.count(d.name) || fn_by_name.count(d.name))
        fail(ParseErrorKind::Name, d.at, "duplicate name '" + d.name + "'");
      VarId id = symtab->size();
      symtab->vars.push_back({d.name, d.sort, owner, kind});
      var_by_name[d.name] = id;
      return id;
    };

    for (size_t i = 0; i < fns.size(); ++i) {
      if (fn_by_name.count(fns[i].name))
        fail(ParseErrorKind::Name, fns[i].at, "duplicate function '" + fns[i].name + "'");
      fn_by_name[fns[i].name] = static_cast<FnId>(i);
    }

    for (auto& g : globals) p.globals.push_back(declare(g, -1, VarKind::Global));

    for (size_t i = 0; i < fns.size(); ++i) {
      RawFunction& rf = fns[i];
      Function f;
      f.name = rf.name;
      f.id = static_cast<FnId>(i);
      f.return_type = rf.return_type;
      for (auto& d : rf.params) {
        if (d.name == rf.name)
          fail(ParseErrorKind::Name, d.at, "duplicate name '" + d.name + "'");
        f.params.push_back(declare(d, f.id, VarKind::Param));
      }
      for (auto& d : rf.locals) f.locals.push_back(declare(d, f.id, VarKind::Local));
      RawDecl retd{"ret_" + rf.name, rf.return_type, rf.at};
      f.ret_var = declare(retd, -1, VarKind::Ret);
      if (rf.start) {
        if (p.start_function >= 0)
          fail(ParseErrorKind::Name, rf.at, "multiple start functions");
        p.start_function = f.id;
      }
      p.functions.push_back(std::move(f));
    }
    if (p.start_function < 0 && !fns.empty())
      fail(ParseErrorKind::Name, fns[0].at, "no start function declared");

    // Locations, then actions (which may reference any function).
    for (size_t i = 0; i < fns.size(); ++i) {
      RawFunction& rf = fns[i];
      Function& f = p.functions[i];
      std::map<std::string, LocId> loc_by_name;
      auto loc = [&](const std::string& name) -> LocId {
        auto it = loc_by_name.find(name);
        if (it != loc_by_name.end()) return it->second;
        LocId id = static_cast<LocId>(p.locations.size());
        p.locations.push_back({name, f.id});
        loc_by_name[name] = id;
        f.locations.push_back(id);
        return id;
      };
      f.entry = loc(rf.entry);
      f.exit = loc(rf.exit);
      for (auto& re : rf.edges) {
        Edge e;
        e.src = loc(re.src);
        e.dst = loc(re.dst);
        e.action = lower_action(p, *symtab, var_by_name, fn_by_name, f, re.action);
        f.edges.push_back(std::move(e));
      }
    }

    p.symtab = symtab;
    return p;
  }

  ExprPtr lower_expr(const SymbolTable& st, const std::map<std::string, VarId>& vars,
                     const Function& scope, const RawExpr& r) {
    switch (r.k) {
      case RawExpr::K::Int: return mk_int(r.ival);
      case RawExpr::K::Bool: return mk_bool(r.bval);
      case RawExpr::K::Var: {
        auto it = vars.find(r.name);
        if (it == vars.end())
          fail(ParseErrorKind::Name, r.at, "unknown variable '" + r.name + "'");
        const VarInfo& v = st[it->second];
        if (v.owner >= 0 && v.owner != scope.id)
          fail(ParseErrorKind::Name, r.at,
               "variable '" + r.name + "' is not visible in function '" + scope.name + "'");
        return mk_symbol(it->second, v.sort);
      }
      case RawExpr::K::Index: {
        ExprPtr a = lower_expr(st, vars, scope, r.kids[0]);
        if (a->sort != Sort::Array)
          fail(ParseErrorKind::Type, r.at, "'" + r.kids[0].name + "' is not an array");
        ExprPtr i = lower_expr(st, vars, scope, r.kids[1]);
        if (i->sort != Sort::Int)
          fail(ParseErrorKind::Type, r.at, "array index must be int");
        return read(a, i);
      }
      case RawExpr::K::Unary: {
        ExprPtr k = lower_expr(st, vars, scope, r.kids[0]);
        try {
          return r.is_not ? not_(k) : neg(k);
        } catch (const SortError& e) {
          fail(ParseErrorKind::Type, r.at, e.what());
        }
      }
      case RawExpr::K::Binary: {
        ExprPtr a = lower_expr(st, vars, scope, r.kids[0]);
        ExprPtr b = lower_expr(st, vars, scope, r.kids[1]);
        if (r.op == ExprKind::And || r.op == ExprKind::Or) {
          if (a->sort != Sort::Bool || b->sort != Sort::Bool)
            fail(ParseErrorKind::Type, r.at, "logical operator needs bool operands");
        } else if (a->sort != Sort::Int || b->sort != Sort::Int) {
          fail(ParseErrorKind::Type, r.at, "arithmetic/comparison needs int operands");
        }
        return mk_binary(r.op, a, b);
      }
    }
    fail(ParseErrorKind::Syntax, r.at, "unreachable expression form");
  }

  Action lower_action(const Program& p, const SymbolTable& st,
                      const std::map<std::string, VarId>& vars,
                      const std::map<std::string, FnId>& fn_by_name, const Function& scope,
                      const RawAction& ra) {
    Action a;
    auto resolve_var = [&](const std::string& name, const Token& at) -> VarId {
      auto it = vars.find(name);
      if (it == vars.end()) fail(ParseErrorKind::Name, at, "unknown variable '" + name + "'");
      const VarInfo& v = st[it->second];
      if (v.owner >= 0 && v.owner != scope.id)
        fail(ParseErrorKind::Name, at,
             "variable '" + name + "' is not visible in function '" + scope.name + "'");
      return it->second;
    };
    auto resolve_call = [&](const std::string& callee, const std::vector<RawExpr>& raw_args,
                            const Token& at) {
      auto it = fn_by_name.find(callee);
      if (it == fn_by_name.end())
        fail(ParseErrorKind::Name, at, "unknown function '" + callee + "'");
      const Function& cf = p.functions[static_cast<size_t>(it->second)];
      if (raw_args.size() != cf.params.size())
        fail(ParseErrorKind::Type, at,
             "call to '" + callee + "' expects " + std::to_string(cf.params.size()) +
                 " arguments, got " + std::to_string(raw_args.size()));
      a.callee = it->second;
      for (size_t i = 0; i < raw_args.size(); ++i) {
        ExprPtr arg = lower_expr(st, vars, scope, raw_args[i]);
        if (arg->sort != st[cf.params[i]].sort)
          fail(ParseErrorKind::Type, at,
               "argument " + std::to_string(i + 1) + " of '" + callee + "' has wrong type");
        a.args.push_back(std::move(arg));
      }
    };

    switch (ra.k) {
      case RawAction::K::Skip:
        a.kind = ActionKind::Skip;
        break;
      case RawAction::K::Guard: {
        a.kind = ActionKind::Guard;
        a.expr = lower_expr(st, vars, scope, *ra.expr);
        if (a.expr->sort != Sort::Bool)
          fail(ParseErrorKind::Type, ra.at, "guard must be a boolean expression");
        break;
      }
      case RawAction::K::Ret: {
        a.kind = ActionKind::Ret;
        a.expr = lower_expr(st, vars, scope, *ra.expr);
        if (a.expr->sort != scope.return_type)
          fail(ParseErrorKind::Type, ra.at, "ret value does not match return type");
        break;
      }
      case RawAction::K::Assign: {
        a.kind = ActionKind::Assign;
        a.var = resolve_var(ra.var, ra.at);
        a.expr = lower_expr(st, vars, scope, *ra.expr);
        if (a.expr->sort != st[a.var].sort)
          fail(ParseErrorKind::Type, ra.at, "assignment type mismatch for '" + ra.var + "'");
        break;
      }
      case RawAction::K::CallAssign: {
        a.kind = ActionKind::CallAssign;
        a.var = resolve_var(ra.var, ra.at);
        resolve_call(ra.callee, ra.args, ra.at);
        if (st[a.var].sort != p.functions[static_cast<size_t>(a.callee)].return_type)
          fail(ParseErrorKind::Type, ra.at, "call result type mismatch for '" + ra.var + "'");
        break;
      }
      case RawAction::K::Call: {
        a.kind = ActionKind::CallVoid;
        resolve_call(ra.callee, ra.args, ra.at);
        break;
      }
    }
    return a;
  }

  Lexer lex_;
};

}  // namespace

Program parse_program(const std::string& text) { return Parser(text).run(); }

}  // namespace cse
