#include "crel/tptp.hpp"

#include <cctype>

#include "crel/error.hpp"

namespace crel::fol {

using K = Formula::Kind;

namespace {

std::string up(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}
std::string down(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

void emit(const F& f, std::string& out) {
  switch (f->kind) {
    case K::atom:
      out += f->pred + "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ",";
        out += f->args[i].is_const ? f->args[i].name : up(f->args[i].name);
      }
      out += ")";
      return;
    case K::negation:
      out += "~";
      emit(f->kids[0], out);
      return;
    case K::conj:
    case K::disj:
    case K::imp: {
      if (f->kids.empty()) {
        out += f->kind == K::conj ? "$true" : "$false";
        return;
      }
      const char* op = f->kind == K::conj ? " & " : f->kind == K::disj ? " | " : " => ";
      out += "(";
      for (std::size_t i = 0; i < f->kids.size(); ++i) {
        if (i) out += op;
        emit(f->kids[i], out);
      }
      out += ")";
      return;
    }
    case K::forall:
    case K::exists:
      out += f->kind == K::forall ? "![" : "?[";
      for (std::size_t i = 0; i < f->vars.size(); ++i) {
        if (i) out += ",";
        out += up(f->vars[i]);
      }
      out += "]: ";
      emit(f->kids[0], out);
      return;
  }
}

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  F formula() {
    F first = unitary();
    skip();
    std::string op = peek_op();
    if (op.empty()) return first;
    std::vector<F> kids{first};
    while (peek_op() == op) {
      pos_ += op.size();
      kids.push_back(unitary());
      skip();
      if (op == "=>") break;
    }
    if (!peek_op().empty()) fail("mixed connectives need parentheses");
    if (op == "=>") return imp(kids[0], kids[1]);
    Formula f;
    f.kind = op == "&" ? K::conj : K::disj;
    f.kids = std::move(kids);
    return std::make_shared<const Formula>(std::move(f));
  }

  F unitary() {
    skip();
    if (eat("(")) {
      F f = formula();
      expect(")");
      return f;
    }
    if (eat("~")) return neg(unitary());
    if (eat("$true")) return empty(K::conj);
    if (eat("$false")) return empty(K::disj);
    if (peek() == '!' || peek() == '?') {
      bool all = peek() == '!';
      ++pos_;
      expect("[");
      std::vector<std::string> vars;
      do {
        auto v = word();
        if (v.empty() || !std::isupper(static_cast<unsigned char>(v[0]))) fail("variable expected");
        vars.push_back(down(v));
      } while (eat(","));
      expect("]");
      expect(":");
      F body = unitary();
      return all ? forall(vars, body) : exists(vars, body);
    }
    auto p = word();
    if (p.empty() || !std::islower(static_cast<unsigned char>(p[0]))) fail("predicate expected");
    expect("(");
    std::vector<Term> args;
    do {
      auto a = word();
      if (a.empty()) fail("term expected");
      if (std::isupper(static_cast<unsigned char>(a[0]))) args.push_back(var(down(a)));
      else if (a == "zero") args.push_back(zero());
      else fail("unknown constant " + a);
    } while (eat(","));
    expect(")");
    try {
      return atom(p, std::move(args));
    } catch (const Error&) {
      fail("wrong arity for " + p);
    }
  }

  std::vector<Named> file() {
    std::vector<Named> out;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) return out;
      if (word() != "fof") fail("fof expected");
      expect("(");
      auto name = word();
      if (name.empty()) fail("name expected");
      expect(",");
      auto role = word();
      if (role.empty()) fail("role expected");
      expect(",");
      F f = formula();
      expect(")");
      expect(".");
      out.push_back({name, f});
    }
  }

  void finish() {
    skip();
    if (pos_ != s_.size()) fail("trailing input");
  }

private:
  [[noreturn]] void fail(const std::string& what) {
    throw Error(Errc::parse_error, what + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '%') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  std::string peek_op() {
    skip();
    for (const char* op : {"=>", "&", "|"})
      if (s_.compare(pos_, std::char_traits<char>::length(op), op) == 0) return op;
    return "";
  }
  bool eat(const std::string& t) {
    skip();
    if (s_.compare(pos_, t.size(), t) != 0) return false;
    pos_ += t.size();
    return true;
  }
  void expect(const std::string& t) {
    if (!eat(t)) fail("'" + t + "' expected");
  }
  std::string word() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(b, pos_ - b);
  }
  static F empty(K k) {
    Formula f;
    f.kind = k;
    return std::make_shared<const Formula>(std::move(f));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_tptp(const F& f) {
  std::string out;
  emit(f, out);
  return out;
}

std::string to_tptp_line(const Named& n) { return "fof(" + n.name + ", axiom, " + to_tptp(n.formula) + ")."; }

std::string to_tptp_file(const std::vector<Named>& ns) {
  std::string out;
  for (const auto& n : ns) out += to_tptp_line(n) + "\n";
  return out;
}

F parse_tptp_formula(const std::string& text) {
  Parser p(text);
  F f = p.formula();
  p.finish();
  return f;
}

std::vector<Named> parse_tptp_file(const std::string& text) {
  Parser p(text);
  return p.file();
}

}  // namespace crel::fol
