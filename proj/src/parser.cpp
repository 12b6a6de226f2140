#include "parser.hpp"

#include <cctype>
#include <sstream>

namespace qc {

namespace {

struct Tok {
  enum class K { Ident, Int, Punct, End };
  K k = K::End;
  std::string s;
  long long num = 0;
  int line = 1, col = 1;
};

const char* kPuncts[] = {"::", ":=", "~>", "->", "=>", "\\/", "(", ")", "{", "}",
                         "[", "]", ",", ";", ".", ":", "@", "+", "*", "=", "<", "|"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '%';
}

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {
      "let", "in", "if", "then", "else", "sync", "fun", "tyfun", "case", "of",
      "inl", "inr", "fold", "unfold", "fst", "snd", "left", "right", "forall",
      "mu", "loc", "locset", "set", "local", "ty", "int", "bool", "list",
      "tyrep", "nil", "cons", "listcase", "true", "false", "repr", "reprset",
      "reprty", "reprint", "reprbool", "reprarrow", "def", "main", "locations",
      "codes", "default"};
  return kw.count(s) != 0;
}

std::vector<Tok> lex(const std::string& text, std::vector<Diagnostic>* diags, bool& ok) {
  std::vector<Tok> out;
  ok = true;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t j = 0; j < n; ++j) {
      if (text[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Tok t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.k = Tok::K::Ident;
      t.s = text.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool neg = c == '-' && i + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
               !(i + 1 < text.size() && text[i + 1] == '>');
    if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
      size_t j = i + (neg ? 1 : 0);
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.k = Tok::K::Int;
      t.s = text.substr(i, j - i);
      t.num = std::stoll(t.s);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* p : kPuncts) {
      size_t n = std::string(p).size();
      if (text.compare(i, n, p) == 0) {
        t.k = Tok::K::Punct;
        t.s = p;
        advance(n);
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) {
      if (diags)
        diags->push_back({Diagnostic::Severity::Error,
                          {line, col, line, col + 1},
                          "lex",
                          std::string("unexpected character '") + c + "'"});
      ok = false;
      advance(1);
    }
  }
  Tok end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

struct Parser {
  std::vector<Tok> toks;
  size_t pos = 0;
  std::vector<Location> known;
  LocationTable table;
  std::vector<Diagnostic>* diags = nullptr;
  int spec = 0;  // >0 while speculating: suppress diagnostics

  const Tok& cur() const { return toks[pos]; }
  bool is_punct(const char* p) const {
    return cur().k == Tok::K::Punct && cur().s == p;
  }
  bool is_kw(const char* k) const { return cur().k == Tok::K::Ident && cur().s == k; }
  bool eat_punct(const char* p) {
    if (!is_punct(p)) return false;
    ++pos;
    return true;
  }
  bool eat_kw(const char* k) {
    if (!is_kw(k)) return false;
    ++pos;
    return true;
  }
  void error(const std::string& rule, const std::string& msg) {
    if (spec > 0 || !diags) return;
    const Tok& t = cur();
    int w = static_cast<int>(t.s.size());
    diags->push_back({Diagnostic::Severity::Error,
                      {t.line, t.col, t.line, t.col + (w > 0 ? w : 1)},
                      rule,
                      msg});
  }
  bool expect_punct(const char* p, const std::string& rule) {
    if (eat_punct(p)) return true;
    error(rule, std::string("expected '") + p + "'");
    return false;
  }
  bool expect_kw(const char* k, const std::string& rule) {
    if (eat_kw(k)) return true;
    error(rule, std::string("expected '") + k + "'");
    return false;
  }
  std::optional<std::string> expect_ident(const std::string& rule) {
    if (cur().k == Tok::K::Ident && !is_keyword(cur().s)) {
      auto s = cur().s;
      ++pos;
      return s;
    }
    error(rule, "expected an identifier");
    return std::nullopt;
  }

  bool is_known(const std::string& n) const {
    for (const auto& l : known)
      if (l == n) return true;
    return false;
  }
  LocExpr mk_loc(const std::string& n) const {
    return is_known(n) ? LocExpr::concrete(n) : LocExpr::var(n);
  }

  // ---- location sets ----

  LocSetPtr rho() {
    if (eat_punct("{")) {
      std::vector<LocExpr> items;
      do {
        auto id = expect_ident("rho");
        if (!id) return nullptr;
        items.push_back(mk_loc(*id));
      } while (eat_punct(","));
      if (!expect_punct("}", "rho")) return nullptr;
      LocSetPtr out = ls_sng(items.back());
      for (size_t i = items.size() - 1; i-- > 0;)
        out = ls_union(ls_sng(items[i]), out);
      return out;
    }
    if (eat_punct("(")) {
      auto a = rho();
      if (!a) return nullptr;
      if (!expect_punct("\\/", "rho")) return nullptr;
      auto b = rho();
      if (!b) return nullptr;
      if (!expect_punct(")", "rho")) return nullptr;
      return ls_union(a, b);
    }
    auto id = expect_ident("rho");
    if (!id) return nullptr;
    return is_known(*id) ? ls_sng(LocExpr::concrete(*id)) : ls_var(*id);
  }

  std::optional<Kind> kind() {
    if (eat_punct("*")) return Kind::Star;
    if (eat_kw("loc")) return Kind::StarLoc;
    if (eat_kw("locset")) return Kind::StarSet;
    if (eat_kw("ty")) return Kind::StarLocal;
    error("kind", "expected a kind: *, loc, locset, or ty");
    return std::nullopt;
  }

  // ---- local types ----

  LTypePtr lty() {
    auto a = lty_atom();
    if (!a) return nullptr;
    if (eat_punct("->")) {
      auto b = lty();
      if (!b) return nullptr;
      return lt_arrow(a, b);
    }
    return a;
  }

  LTypePtr lty_atom() {
    if (eat_kw("int")) return lt_int();
    if (eat_kw("bool")) return lt_bool();
    if (eat_kw("tyrep")) return lt_tyrep();
    if (eat_kw("list")) {
      auto t = lty_atom();
      return t ? lt_list(t) : nullptr;
    }
    if (eat_kw("loc")) {
      auto r = rho();
      return r ? lt_loc(r) : nullptr;
    }
    if (eat_kw("locset")) {
      auto r = rho();
      return r ? lt_set(r) : nullptr;
    }
    if (eat_kw("forall")) {
      auto a = expect_ident("local-type");
      if (!a || !expect_punct(".", "local-type")) return nullptr;
      auto b = lty();
      return b ? lt_forall(*a, b) : nullptr;
    }
    if (eat_punct("(")) {
      auto t = lty();
      if (!t || !expect_punct(")", "local-type")) return nullptr;
      return t;
    }
    auto id = expect_ident("local-type");
    return id ? lt_var(*id) : nullptr;
  }

  // ---- local terms ----

  LTermPtr local() {
    auto a = ladd();
    if (!a) return nullptr;
    if (eat_punct("=")) {
      auto b = ladd();
      return b ? le_eq(a, b) : nullptr;
    }
    if (eat_punct("<")) {
      auto b = ladd();
      return b ? le_lt(a, b) : nullptr;
    }
    return a;
  }

  LTermPtr ladd() {
    auto a = lapp();
    if (!a) return nullptr;
    while (eat_punct("+")) {
      auto b = lapp();
      if (!b) return nullptr;
      a = le_add(a, b);
    }
    return a;
  }

  bool starts_latom() const {
    if (cur().k == Tok::K::Int) return true;
    if (is_punct("(")) return true;
    if (cur().k != Tok::K::Ident) return false;
    const auto& s = cur().s;
    if (!is_keyword(s)) return true;
    return s == "true" || s == "false" || s == "nil" || s == "cons" ||
           s == "repr" || s == "reprset" || s == "reprty" || s == "reprint" ||
           s == "reprbool" || s == "reprarrow";
  }

  LTermPtr lapp() {
    auto a = latom();
    if (!a) return nullptr;
    for (;;) {
      if (eat_punct("[")) {
        auto t = lty();
        if (!t || !expect_punct("]", "local-term")) return nullptr;
        a = le_tyapp(a, t);
      } else if (starts_latom()) {
        auto b = latom();
        if (!b) return nullptr;
        a = le_app(a, b);
      } else {
        return a;
      }
    }
  }

  LTermPtr repr_of_type(const LTypePtr& t) {
    switch (t->k) {
      case LocalType::K::Int: return le_repr_int();
      case LocalType::K::Bool: return le_repr_bool();
      case LocalType::K::Arrow: {
        auto a = repr_of_type(t->a), b = repr_of_type(t->b);
        return a && b ? le_repr_arrow(a, b) : nullptr;
      }
      default:
        error("reprty", "only int, bool, and arrows have representations");
        return nullptr;
    }
  }

  LTermPtr latom() {
    if (cur().k == Tok::K::Int) {
      auto n = cur().num;
      ++pos;
      return le_lit(n);
    }
    if (eat_kw("true")) return le_true();
    if (eat_kw("false")) return le_false();
    if (eat_kw("nil")) return le_nil();
    if (eat_kw("cons")) {
      if (!expect_punct("(", "cons")) return nullptr;
      auto a = local();
      if (!a || !expect_punct(",", "cons")) return nullptr;
      auto b = local();
      if (!b || !expect_punct(")", "cons")) return nullptr;
      return le_cons(a, b);
    }
    if (eat_kw("fun")) {
      auto f = expect_ident("local-fun");
      if (!f || !expect_punct("(", "local-fun")) return nullptr;
      auto x = expect_ident("local-fun");
      if (!x || !expect_punct(":", "local-fun")) return nullptr;
      auto t = lty();
      if (!t || !expect_punct(")", "local-fun") || !expect_punct("=", "local-fun"))
        return nullptr;
      auto b = local();
      return b ? le_fun(*f, *x, t, b) : nullptr;
    }
    if (eat_kw("tyfun")) {
      auto a = expect_ident("local-tyfun");
      if (!a || !expect_punct("=>", "local-tyfun")) return nullptr;
      auto b = local();
      return b ? le_tyabs(*a, b) : nullptr;
    }
    if (eat_kw("if")) {
      auto c = local();
      if (!c || !expect_kw("then", "local-if")) return nullptr;
      auto t = local();
      if (!t || !expect_kw("else", "local-if")) return nullptr;
      auto e = local();
      return e ? le_if(c, t, e) : nullptr;
    }
    if (eat_kw("listcase")) {
      auto s = local();
      if (!s || !expect_kw("of", "listcase") || !expect_kw("nil", "listcase") ||
          !expect_punct("=>", "listcase"))
        return nullptr;
      auto n = local();
      if (!n || !expect_punct("|", "listcase") || !expect_kw("cons", "listcase") ||
          !expect_punct("(", "listcase"))
        return nullptr;
      auto x = expect_ident("listcase");
      if (!x || !expect_punct(",", "listcase")) return nullptr;
      auto y = expect_ident("listcase");
      if (!y || !expect_punct(")", "listcase") || !expect_punct("=>", "listcase"))
        return nullptr;
      auto c = local();
      return c ? le_listcase(s, n, *x, *y, c) : nullptr;
    }
    if (eat_kw("reprint")) return le_repr_int();
    if (eat_kw("reprbool")) return le_repr_bool();
    if (eat_kw("reprarrow")) {
      if (!expect_punct("(", "reprarrow")) return nullptr;
      auto a = local();
      if (!a || !expect_punct(",", "reprarrow")) return nullptr;
      auto b = local();
      if (!b || !expect_punct(")", "reprarrow")) return nullptr;
      return le_repr_arrow(a, b);
    }
    if (eat_kw("repr")) {
      if (!expect_punct("(", "repr")) return nullptr;
      auto id = expect_ident("repr");
      if (!id || !expect_punct(")", "repr")) return nullptr;
      auto code = table.code_of(*id);
      if (!code) {
        error("repr", "location " + *id + " has no integer code");
        return nullptr;
      }
      return le_ascribe(le_lit(*code), lt_loc(ls_sng(Location(*id))));
    }
    if (eat_kw("reprset")) {
      if (!expect_punct("{", "reprset")) return nullptr;
      std::vector<std::string> names;
      do {
        auto id = expect_ident("reprset");
        if (!id) return nullptr;
        names.push_back(*id);
      } while (eat_punct(","));
      if (!expect_punct("}", "reprset")) return nullptr;
      LTermPtr lst = le_nil();
      LocSetPtr set = ls_sng(Location(names.back()));
      for (size_t i = names.size(); i-- > 0;) {
        auto code = table.code_of(names[i]);
        if (!code) {
          error("reprset", "location " + names[i] + " has no integer code");
          return nullptr;
        }
        lst = le_cons(le_lit(*code), lst);
        if (i + 1 < names.size())
          set = ls_union(ls_sng(Location(names[i])), set);
      }
      return le_ascribe(lst, lt_set(set));
    }
    if (eat_kw("reprty")) {
      if (!expect_punct("(", "reprty")) return nullptr;
      auto t = lty();
      if (!t || !expect_punct(")", "reprty")) return nullptr;
      return repr_of_type(t);
    }
    if (eat_punct("(")) {
      auto e = local();
      if (!e) return nullptr;
      if (eat_punct(":")) {
        auto t = lty();
        if (!t || !expect_punct(")", "ascription")) return nullptr;
        return le_ascribe(e, t);
      }
      if (!expect_punct(")", "local-term")) return nullptr;
      return e;
    }
    auto id = expect_ident("local-term");
    return id ? le_var(*id) : nullptr;
  }

  // ---- choreography types ----

  CTypePtr ctype() {
    auto a = ct_sum_level();
    if (!a) return nullptr;
    if (eat_punct("->")) {
      auto b = ctype();
      return b ? ct_arrow(a, b) : nullptr;
    }
    return a;
  }

  CTypePtr ct_sum_level() {
    auto a = ct_prod_level();
    if (!a) return nullptr;
    while (eat_punct("+")) {
      auto b = ct_prod_level();
      if (!b) return nullptr;
      a = ct_sum(a, b);
    }
    return a;
  }

  CTypePtr ct_prod_level() {
    auto a = ct_atom();
    if (!a) return nullptr;
    while (eat_punct("*")) {
      auto b = ct_atom();
      if (!b) return nullptr;
      a = ct_prod(a, b);
    }
    return a;
  }

  CTypePtr at_of(LTypePtr t) {
    if (!expect_punct("@", "at-type")) return nullptr;
    auto r = rho();
    return r ? ct_at(t, r) : nullptr;
  }

  CTypePtr ct_atom() {
    if (eat_kw("forall")) {
      auto a = expect_ident("forall-type");
      if (!a || !expect_punct("::", "forall-type")) return nullptr;
      auto k = kind();
      if (!k || !expect_punct(".", "forall-type")) return nullptr;
      auto b = ctype();
      return b ? ct_forall(*a, *k, b) : nullptr;
    }
    if (eat_kw("mu")) {
      auto a = expect_ident("mu-type");
      if (!a || !expect_punct(".", "mu-type")) return nullptr;
      auto b = ctype();
      return b ? ct_mu(*a, b) : nullptr;
    }
    if (is_kw("loc")) {
      ++pos;
      if (eat_punct("[")) {
        auto id = expect_ident("loc-type");
        if (!id || !expect_punct("]", "loc-type")) return nullptr;
        return ct_loc(mk_loc(*id));
      }
      auto r = rho();
      if (!r) return nullptr;
      return at_of(lt_loc(r));
    }
    if (eat_kw("set")) {
      auto r = rho();
      return r ? ct_set(r) : nullptr;
    }
    if (eat_kw("local")) {
      if (!expect_punct("(", "local-rep-type")) return nullptr;
      auto t = lty();
      if (!t || !expect_punct(")", "local-rep-type")) return nullptr;
      return ct_local(t);
    }
    if (is_kw("int") || is_kw("bool") || is_kw("tyrep") || is_kw("list") ||
        is_kw("locset")) {
      auto t = lty_atom();
      if (!t) return nullptr;
      return at_of(t);
    }
    if (is_punct("(")) {
      // a parenthesized local type followed by @, or a parenthesized type
      size_t mark = pos;
      ++spec;
      ++pos;
      auto t = lty();
      bool at = t && eat_punct(")") && is_punct("@");
      --spec;
      if (at) return at_of(t);
      pos = mark;
      expect_punct("(", "type");
      auto c = ctype();
      if (!c || !expect_punct(")", "type")) return nullptr;
      return c;
    }
    auto id = expect_ident("type");
    if (!id) return nullptr;
    if (is_punct("@")) return at_of(lt_var(*id));
    return ct_var(*id);
  }

  // ---- choreographies ----

  ChorPtr chor() {
    auto a = c_app_level();
    if (!a) return nullptr;
    while (is_punct("~>")) {
      ++pos;
      LocExpr sender = LocExpr::concrete("?");
      if (eat_punct("[")) {
        auto id = expect_ident("send");
        if (!id || !expect_punct("]", "send")) return nullptr;
        sender = mk_loc(*id);
      } else if (a->k == Chor::K::Done && a->rho->k == LocSet::K::Sng) {
        sender = a->rho->elem;
      } else {
        error("send", "sender is ambiguous here; write ~>[L]");
        return nullptr;
      }
      LocSetPtr target;
      if (is_punct("{") || is_punct("(")) {
        target = rho();
      } else {
        auto id = expect_ident("send");
        if (!id) return nullptr;
        target = is_known(*id) ? ls_sng(LocExpr::concrete(*id)) : ls_var(*id);
      }
      if (!target) return nullptr;
      a = c_send(a, sender, target);
    }
    return a;
  }

  bool starts_c_atom() const {
    if (is_punct("{") || is_punct("(")) return true;
    if (cur().k != Tok::K::Ident) return false;
    const auto& s = cur().s;
    if (!is_keyword(s)) return true;
    return s == "fold" || s == "unfold" || s == "fst" || s == "snd" ||
           s == "inl" || s == "inr";
  }

  ChorPtr c_app_level() {
    auto a = c_atom();
    if (!a) return nullptr;
    for (;;) {
      if (eat_punct("[")) {
        auto t = ctype();
        if (!t || !expect_punct("]", "type-application")) return nullptr;
        a = c_tyapp(a, t);
      } else if (starts_c_atom()) {
        auto b = c_atom();
        if (!b) return nullptr;
        a = c_app(a, b);
      } else {
        return a;
      }
    }
  }

  ChorPtr done_after(LocSetPtr r) {
    if (!expect_punct(".", "done") || !expect_punct("(", "done")) return nullptr;
    auto e = local();
    if (!e || !expect_punct(")", "done")) return nullptr;
    return c_done(r, e);
  }

  ChorPtr c_atom() {
    if (is_punct("{")) {
      auto r = rho();
      return r ? done_after(r) : nullptr;
    }
    if (is_punct("(")) {
      // a union namespace, a pair, or grouping
      size_t mark = pos;
      ++spec;
      auto r = rho();
      bool is_done = r && is_punct(".");
      --spec;
      if (is_done) return done_after(r);
      pos = mark;
      expect_punct("(", "chor");
      auto a = chor();
      if (!a) return nullptr;
      if (eat_punct(",")) {
        auto b = chor();
        if (!b || !expect_punct(")", "pair")) return nullptr;
        return c_pair(a, b);
      }
      if (!expect_punct(")", "chor")) return nullptr;
      return a;
    }
    if (eat_kw("fun")) {
      auto f = expect_ident("fun");
      if (!f || !expect_punct("(", "fun")) return nullptr;
      auto x = expect_ident("fun");
      if (!x || !expect_punct(":", "fun")) return nullptr;
      auto t = ctype();
      if (!t || !expect_punct(")", "fun") || !expect_punct("=", "fun"))
        return nullptr;
      auto b = chor();
      return b ? c_fun(*f, *x, t, b) : nullptr;
    }
    if (eat_kw("tyfun")) {
      auto a = expect_ident("tyfun");
      if (!a || !expect_punct("::", "tyfun")) return nullptr;
      auto k = kind();
      if (!k || !expect_punct("=>", "tyfun")) return nullptr;
      auto b = chor();
      return b ? c_tyabs(*a, *k, b) : nullptr;
    }
    if (eat_kw("let")) {
      auto r = rho();
      if (!r || !expect_punct(".", "let")) return nullptr;
      auto x = expect_ident("let");
      if (!x) return nullptr;
      if (eat_punct("::")) {
        auto k = kind();
        if (!k || !expect_punct(":=", "let-type")) return nullptr;
        auto c1 = chor();
        if (!c1 || !expect_kw("in", "let-type")) return nullptr;
        auto c2 = chor();
        return c2 ? c_let_type(r, *x, *k, c1, c2) : nullptr;
      }
      if (!expect_punct(":", "let")) return nullptr;
      auto t = lty();
      if (!t || !expect_punct(":=", "let")) return nullptr;
      auto c1 = chor();
      if (!c1 || !expect_kw("in", "let")) return nullptr;
      auto c2 = chor();
      return c2 ? c_let_local(r, *x, t, c1, c2) : nullptr;
    }
    if (eat_kw("sync")) {
      auto id = expect_ident("sync");
      if (!id || !expect_punct("[", "sync")) return nullptr;
      bool left = true;
      if (eat_kw("left")) {
        left = true;
      } else if (eat_kw("right")) {
        left = false;
      } else {
        error("sync", "expected 'left' or 'right'");
        return nullptr;
      }
      if (!expect_punct("]", "sync") || !expect_punct("~>", "sync")) return nullptr;
      auto r = rho();
      if (!r || !expect_punct(";", "sync")) return nullptr;
      auto b = chor();
      return b ? c_sync(mk_loc(*id), left, r, b) : nullptr;
    }
    if (eat_kw("if")) {
      auto c = chor();
      if (!c || !expect_punct("@", "if")) return nullptr;
      auto r = rho();
      if (!r || !expect_kw("then", "if")) return nullptr;
      auto t = chor();
      if (!t || !expect_kw("else", "if")) return nullptr;
      auto e = chor();
      return e ? c_if(r, c, t, e) : nullptr;
    }
    if (eat_kw("case")) {
      auto s = chor();
      if (!s || !expect_kw("of", "case") || !expect_kw("inl", "case")) return nullptr;
      auto x = expect_ident("case");
      if (!x || !expect_punct("=>", "case")) return nullptr;
      auto l = chor();
      if (!l || !expect_punct("|", "case") || !expect_kw("inr", "case"))
        return nullptr;
      auto y = expect_ident("case");
      if (!y || !expect_punct("=>", "case")) return nullptr;
      auto r = chor();
      return r ? c_case(s, *x, l, *y, r) : nullptr;
    }
    if (eat_kw("fold")) {
      if (!expect_punct("[", "fold")) return nullptr;
      auto t = ctype();
      if (!t || !expect_punct("]", "fold") || !expect_punct("(", "fold"))
        return nullptr;
      auto b = chor();
      if (!b || !expect_punct(")", "fold")) return nullptr;
      return c_fold(t, b);
    }
    if (is_kw("unfold") || is_kw("fst") || is_kw("snd")) {
      std::string op = cur().s;
      ++pos;
      if (!expect_punct("(", op)) return nullptr;
      auto b = chor();
      if (!b || !expect_punct(")", op)) return nullptr;
      if (op == "unfold") return c_unfold(b);
      return op == "fst" ? c_fst(b) : c_snd(b);
    }
    if (is_kw("inl") || is_kw("inr")) {
      bool l = cur().s == "inl";
      ++pos;
      if (!expect_punct("[", "injection")) return nullptr;
      auto t = ctype();
      if (!t || !expect_punct("]", "injection") || !expect_punct("(", "injection"))
        return nullptr;
      auto b = chor();
      if (!b || !expect_punct(")", "injection")) return nullptr;
      return l ? c_inl(t, b) : c_inr(t, b);
    }
    auto id = expect_ident("chor");
    if (!id) return nullptr;
    if (is_punct(".")) {
      auto r = is_known(*id) ? ls_sng(LocExpr::concrete(*id)) : ls_var(*id);
      return done_after(r);
    }
    return c_var(*id);
  }
};

}  // namespace

// ---- printers ----

namespace {

std::string loc_name(const LocExpr& l) { return l.name; }

std::string rho_str(const LocSetPtr& s) {
  switch (s->k) {
    case LocSet::K::Var: return s->var;
    case LocSet::K::Sng: return "{" + loc_name(s->elem) + "}";
    case LocSet::K::Union:
      return "(" + rho_str(s->lhs) + " \\/ " + rho_str(s->rhs) + ")";
  }
  return "?";
}

std::string lty_str(const LTypePtr& t);

std::string lty_atom_str(const LTypePtr& t) {
  switch (t->k) {
    case LocalType::K::Arrow:
    case LocalType::K::Forall:
      return "(" + lty_str(t) + ")";
    default:
      return lty_str(t);
  }
}

std::string lty_str(const LTypePtr& t) {
  switch (t->k) {
    case LocalType::K::Var: return t->var;
    case LocalType::K::Loc: return "loc" + rho_str(t->rho);
    case LocalType::K::Set: return "locset" + rho_str(t->rho);
    case LocalType::K::Int: return "int";
    case LocalType::K::Bool: return "bool";
    case LocalType::K::List: return "list " + lty_atom_str(t->a);
    case LocalType::K::TyRep: return "tyrep";
    case LocalType::K::Arrow: return lty_atom_str(t->a) + " -> " + lty_str(t->b);
    case LocalType::K::Forall: return "forall " + t->var + " . " + lty_str(t->a);
  }
  return "?";
}

std::string le_str(const LTermPtr& e) {
  using EK = LocalTerm::K;
  switch (e->k) {
    case EK::Var: return e->var;
    case EK::Fun:
      return "(fun " + e->var + "(" + e->var2 + " : " + lty_str(e->type) +
             ") = " + le_str(e->a) + ")";
    case EK::App: return "(" + le_str(e->a) + " " + le_str(e->b) + ")";
    case EK::TyAbs: return "(tyfun " + e->var + " => " + le_str(e->a) + ")";
    case EK::TyApp: return "(" + le_str(e->a) + "[" + lty_str(e->type) + "])";
    case EK::Lit: return std::to_string(e->lit);
    case EK::Add: return "(" + le_str(e->a) + " + " + le_str(e->b) + ")";
    case EK::Eq: return "(" + le_str(e->a) + " = " + le_str(e->b) + ")";
    case EK::Lt: return "(" + le_str(e->a) + " < " + le_str(e->b) + ")";
    case EK::True: return "true";
    case EK::False: return "false";
    case EK::If:
      return "(if " + le_str(e->a) + " then " + le_str(e->b) + " else " +
             le_str(e->c) + ")";
    case EK::Nil: return "nil";
    case EK::Cons: return "cons(" + le_str(e->a) + ", " + le_str(e->b) + ")";
    case EK::ListCase:
      return "(listcase " + le_str(e->a) + " of nil => " + le_str(e->b) +
             " | cons(" + e->var + ", " + e->var2 + ") => " + le_str(e->c) + ")";
    case EK::ReprInt: return "reprint";
    case EK::ReprBool: return "reprbool";
    case EK::ReprArrow:
      return "reprarrow(" + le_str(e->a) + ", " + le_str(e->b) + ")";
    case EK::Ascribe:
      return "(" + le_str(e->a) + " : " + lty_str(e->type) + ")";
  }
  return "?";
}

std::string ct_str(const CTypePtr& t) {
  using TK = ChorType::K;
  switch (t->k) {
    case TK::Var: return t->var;
    case TK::At: return lty_atom_str(t->local) + " @ " + rho_str(t->rho);
    case TK::Arrow: return "(" + ct_str(t->a) + " -> " + ct_str(t->b) + ")";
    case TK::Forall:
      return "(forall " + t->var + " :: " + kind_to_string(t->kind) + " . " +
             ct_str(t->a) + ")";
    case TK::Prod: return "(" + ct_str(t->a) + " * " + ct_str(t->b) + ")";
    case TK::Sum: return "(" + ct_str(t->a) + " + " + ct_str(t->b) + ")";
    case TK::Mu: return "(mu " + t->var + " . " + ct_str(t->a) + ")";
    case TK::Loc: return "loc[" + loc_name(t->loc) + "]";
    case TK::Set: return "set" + rho_str(t->rho);
    case TK::Local: return "local(" + lty_str(t->local) + ")";
  }
  return "?";
}

std::string c_str(const ChorPtr& c) {
  using CK = Chor::K;
  switch (c->k) {
    case CK::Var: return c->var;
    case CK::Done: return rho_str(c->rho) + ".(" + le_str(c->e) + ")";
    case CK::Fun:
      return "(fun " + c->var + "(" + c->var2 + " : " + ct_str(c->type) +
             ") = " + c_str(c->a) + ")";
    case CK::App: return "(" + c_str(c->a) + " " + c_str(c->b) + ")";
    case CK::TyAbs:
      return "(tyfun " + c->var + " :: " + kind_to_string(c->kind) + " => " +
             c_str(c->a) + ")";
    case CK::TyApp: return "(" + c_str(c->a) + "[" + ct_str(c->type) + "])";
    case CK::Fold: return "fold[" + ct_str(c->type) + "](" + c_str(c->a) + ")";
    case CK::Unfold: return "unfold(" + c_str(c->a) + ")";
    case CK::Pair: return "(" + c_str(c->a) + ", " + c_str(c->b) + ")";
    case CK::Fst: return "fst(" + c_str(c->a) + ")";
    case CK::Snd: return "snd(" + c_str(c->a) + ")";
    case CK::Inl: return "inl[" + ct_str(c->type) + "](" + c_str(c->a) + ")";
    case CK::Inr: return "inr[" + ct_str(c->type) + "](" + c_str(c->a) + ")";
    case CK::Case:
      return "(case " + c_str(c->a) + " of inl " + c->var + " => " + c_str(c->b) +
             " | inr " + c->var2 + " => " + c_str(c->c) + ")";
    case CK::Send:
      return "(" + c_str(c->a) + " ~>[" + loc_name(c->loc) + "] " +
             rho_str(c->rho) + ")";
    case CK::Sync:
      return "(sync " + loc_name(c->loc) + "[" + (c->dir_left ? "left" : "right") +
             "] ~> " + rho_str(c->rho) + " ; " + c_str(c->a) + ")";
    case CK::If:
      return "(if " + c_str(c->a) + " @ " + rho_str(c->rho) + " then " +
             c_str(c->b) + " else " + c_str(c->c) + ")";
    case CK::LetLocal:
      return "(let " + rho_str(c->rho) + "." + c->var + " : " + lty_str(c->lty) +
             " := " + c_str(c->a) + " in " + c_str(c->b) + ")";
    case CK::LetType:
      return "(let " + rho_str(c->rho) + "." + c->var +
             " :: " + kind_to_string(c->kind) + " := " + c_str(c->a) + " in " +
             c_str(c->b) + ")";
  }
  return "?";
}

}  // namespace

std::string diagnostic_to_string(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << " at "
     << d.span.line << ":" << d.span.col << " [" << d.rule << "]: " << d.message;
  return os.str();
}

std::string print_rho(const LocSetPtr& s) { return rho_str(s); }
std::string print_ltype(const LTypePtr& t) { return lty_str(t); }
std::string print_local(const LTermPtr& e) { return le_str(e); }
std::string print_ctype(const CTypePtr& t) { return ct_str(t); }
std::string print_chor(const ChorPtr& c) { return c_str(c); }

std::optional<ChorPtr> parse_chor(const std::string& text,
                                  const std::vector<Location>& known,
                                  const LocationTable& table,
                                  std::vector<Diagnostic>* diags) {
  bool ok = false;
  Parser p;
  p.toks = lex(text, diags, ok);
  if (!ok) return std::nullopt;
  p.known = known;
  p.table = table;
  p.diags = diags;
  auto c = p.chor();
  if (!c) return std::nullopt;
  if (p.cur().k != Tok::K::End) {
    p.error("chor", "trailing input after the choreography");
    return std::nullopt;
  }
  return c;
}

std::optional<CTypePtr> parse_ctype(const std::string& text,
                                    const std::vector<Location>& known,
                                    std::vector<Diagnostic>* diags) {
  bool ok = false;
  Parser p;
  p.toks = lex(text, diags, ok);
  if (!ok) return std::nullopt;
  p.known = known;
  p.diags = diags;
  auto t = p.ctype();
  if (!t) return std::nullopt;
  if (p.cur().k != Tok::K::End) {
    p.error("type", "trailing input after the type");
    return std::nullopt;
  }
  return t;
}

std::optional<SourceFile> parse_source(const std::string& text,
                                       std::vector<Diagnostic>* diags) {
  bool ok = false;
  Parser p;
  p.toks = lex(text, diags, ok);
  if (!ok) return std::nullopt;
  p.diags = diags;
  SourceFile f;

  if (!p.expect_kw("locations", "header") || !p.expect_punct("{", "header"))
    return std::nullopt;
  do {
    auto id = p.expect_ident("header");
    if (!id) return std::nullopt;
    f.locations.push_back(*id);
  } while (p.eat_punct(";") || p.eat_punct(","));
  if (!p.expect_punct("}", "header")) return std::nullopt;
  p.known = f.locations;

  if (!p.expect_kw("codes", "codes") || !p.expect_punct("{", "codes"))
    return std::nullopt;
  while (p.cur().k == Tok::K::Int) {
    long long n = p.cur().num;
    ++p.pos;
    if (!p.expect_punct("->", "codes")) return std::nullopt;
    auto id = p.expect_ident("codes");
    if (!id) return std::nullopt;
    if (f.table.codes.count(n)) {
      p.error("codes", "duplicate code " + std::to_string(n));
      return std::nullopt;
    }
    if (!p.is_known(*id)) {
      p.error("codes", "undeclared location " + *id);
      return std::nullopt;
    }
    f.table.codes[n] = *id;
    p.eat_punct(";");
  }
  if (!p.expect_kw("default", "codes")) return std::nullopt;
  {
    auto id = p.expect_ident("codes");
    if (!id) return std::nullopt;
    if (!p.is_known(*id)) {
      p.error("codes", "undeclared location " + *id);
      return std::nullopt;
    }
    f.table.fallback = *id;
  }
  p.eat_punct(";");
  if (!p.expect_punct("}", "codes")) return std::nullopt;
  p.table = f.table;

  while (p.eat_kw("def")) {
    auto name = p.expect_ident("def");
    if (!name || !p.expect_punct(":=", "def")) return std::nullopt;
    auto c = p.chor();
    if (!c) return std::nullopt;
    f.defs.emplace_back(*name, c);
  }

  if (!p.expect_kw("main", "main") || !p.expect_punct(":", "main"))
    return std::nullopt;
  f.main_type = p.ctype();
  if (!f.main_type || !p.expect_punct(":=", "main")) return std::nullopt;
  f.main = p.chor();
  if (!f.main) return std::nullopt;
  if (p.cur().k != Tok::K::End) {
    p.error("main", "trailing input after the main choreography");
    return std::nullopt;
  }

  auto declared = std::set<Location>(f.locations.begin(), f.locations.end());
  auto check_locs = [&](const ChorPtr& c) {
    for (const auto& l : c_named_locs(c))
      if (!declared.count(l)) {
        p.error("header", "location " + l + " is used but not declared");
        return false;
      }
    return true;
  };
  for (const auto& [_, d] : f.defs)
    if (!check_locs(d)) return std::nullopt;
  if (!check_locs(f.main)) return std::nullopt;
  // the linked main must be closed: an undeclared name in location position
  // shows up here as a free type variable
  auto linked = link_main(f);
  for (const auto& x : c_fcv(linked)) {
    p.error("main", "unbound choreography variable " + x);
    return std::nullopt;
  }
  for (const auto& a : c_ftv(linked)) {
    p.error("main", a + " is not declared as a location and is not bound");
    return std::nullopt;
  }
  return f;
}

ChorPtr link_main(const SourceFile& f) {
  // later defs may use earlier ones; main may use them all
  std::vector<std::pair<std::string, ChorPtr>> resolved;
  for (const auto& [name, body] : f.defs) {
    auto b = body;
    for (auto it = resolved.rbegin(); it != resolved.rend(); ++it)
      b = subst_chor(b, it->first, it->second);
    resolved.emplace_back(name, b);
  }
  auto m = f.main;
  for (auto it = resolved.rbegin(); it != resolved.rend(); ++it)
    m = subst_chor(m, it->first, it->second);
  return m;
}

std::string print_source(const SourceFile& f) {
  std::ostringstream os;
  os << "locations { ";
  for (size_t i = 0; i < f.locations.size(); ++i)
    os << (i ? "; " : "") << f.locations[i];
  os << " }\n";
  os << "codes {";
  for (const auto& [n, l] : f.table.codes) os << " " << n << " -> " << l << ";";
  os << " default " << f.table.fallback << " }\n";
  for (const auto& [name, body] : f.defs)
    os << "def " << name << " := " << c_str(body) << "\n";
  os << "main : " << ct_str(f.main_type) << " := " << c_str(f.main) << "\n";
  return os.str();
}

}  // namespace qc
