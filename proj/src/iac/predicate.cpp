// Copyright 2026 The slsa-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <regex>

#include "iac/detail.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::iac {

struct Predicate::Expr {
  enum class Op { kAnd, kOr, kNot, kPresent, kMissing, kMatches, kEq, kNe };
  Op op = Op::kPresent;
  std::vector<std::shared_ptr<const Expr>> kids;
  std::vector<std::string> path;
  std::string literal;
  std::regex re;
};

namespace {

using Expr = Predicate::Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Tok {
  enum class Kind { kWord, kString, kLParen, kRParen, kComma, kEq, kNe, kEnd };
  Kind kind;
  std::string text;
  int column;
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == '*' || c == ':' || c == '@' || c == '/';
}

std::vector<Tok> lex(std::string_view s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i + 1);
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::Kind::kLParen, "(", col});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::Kind::kRParen, ")", col});
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::Kind::kComma, ",", col});
      ++i;
    } else if ((c == '=' || c == '!') && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({c == '=' ? Tok::Kind::kEq : Tok::Kind::kNe, std::string(s.substr(i, 2)), col});
      i += 2;
    } else if (c == '\'' || c == '"') {
      std::string text;
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != c) {
        // Only the quote and the backslash itself are escapes; other
        // backslashes stay for regular expressions.
        if (s[j] == '\\' && j + 1 < s.size() && (s[j + 1] == c || s[j + 1] == '\\')) ++j;
        text.push_back(s[j]);
        ++j;
      }
      if (j >= s.size()) throw ParseError("unterminated string in matcher", 1, col);
      out.push_back({Tok::Kind::kString, text, col});
      i = j + 1;
    } else if (word_char(c)) {
      std::size_t j = i;
      while (j < s.size() && word_char(s[j])) ++j;
      out.push_back({Tok::Kind::kWord, std::string(s.substr(i, j - i)), col});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "' in matcher", 1, col);
    }
  }
  out.push_back({Tok::Kind::kEnd, "", static_cast<int>(s.size() + 1)});
  return out;
}

class Compiler {
 public:
  explicit Compiler(std::vector<Tok> toks) : t_(std::move(toks)) {}

  ExprPtr run() {
    auto e = parse_or();
    if (cur().kind != Tok::Kind::kEnd) fail("unexpected '" + cur().text + "'");
    return e;
  }

 private:
  const Tok& cur() const { return t_[k_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, 1, cur().column); }

  void expect(Tok::Kind kind, const char* what) {
    if (cur().kind != kind) fail(std::string("expected ") + what);
    ++k_;
  }

  bool keyword(std::string_view w) const {
    return cur().kind == Tok::Kind::kWord && cur().text == w;
  }

  ExprPtr binary(Expr::Op op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->kids = {std::move(a), std::move(b)};
    return e;
  }

  ExprPtr parse_or() {
    auto e = parse_and();
    while (keyword("or")) {
      ++k_;
      e = binary(Expr::Op::kOr, e, parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    auto e = parse_unary();
    while (keyword("and")) {
      ++k_;
      e = binary(Expr::Op::kAnd, e, parse_unary());
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (keyword("not")) {
      ++k_;
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::kNot;
      e->kids = {parse_unary()};
      return e;
    }
    if (cur().kind == Tok::Kind::kLParen) {
      ++k_;
      auto e = parse_or();
      expect(Tok::Kind::kRParen, "')'");
      return e;
    }
    return parse_atom();
  }

  std::vector<std::string> path_of(const Tok& tok) {
    std::vector<std::string> path;
    std::size_t start = 0;
    const std::string& s = tok.text;
    while (true) {
      const auto dot = s.find('.', start);
      std::string seg = s.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (seg.empty()) throw ParseError("empty path segment in '" + s + "'", 1, tok.column);
      path.push_back(std::move(seg));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return path;
  }

  ExprPtr parse_atom() {
    if (cur().kind != Tok::Kind::kWord) fail("expected a property path or function");
    const Tok word = cur();
    ++k_;
    auto e = std::make_shared<Expr>();
    if (cur().kind == Tok::Kind::kLParen &&
        (word.text == "present" || word.text == "missing" || word.text == "matches")) {
      ++k_;
      if (cur().kind != Tok::Kind::kWord) fail("expected a property path");
      e->path = path_of(cur());
      ++k_;
      if (word.text == "matches") {
        e->op = Expr::Op::kMatches;
        expect(Tok::Kind::kComma, "','");
        if (cur().kind != Tok::Kind::kString) fail("expected a quoted pattern");
        try {
          e->re = std::regex(cur().text, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& err) {
          fail(std::string("bad pattern: ") + err.what());
        }
        e->literal = cur().text;
        ++k_;
      } else {
        e->op = word.text == "present" ? Expr::Op::kPresent : Expr::Op::kMissing;
      }
      expect(Tok::Kind::kRParen, "')'");
      return e;
    }
    e->path = path_of(word);
    if (cur().kind == Tok::Kind::kEq || cur().kind == Tok::Kind::kNe) {
      e->op = cur().kind == Tok::Kind::kEq ? Expr::Op::kEq : Expr::Op::kNe;
      ++k_;
      if (cur().kind != Tok::Kind::kString) fail("expected a quoted value");
      e->literal = cur().text;
      ++k_;
      return e;
    }
    fail("expected '==' or '!=' after '" + word.text + "'");
  }

  std::vector<Tok> t_;
  std::size_t k_ = 0;
};

// Values reached by `path`, crossing lists. `undetermined` is set when an
// unresolved reference blocks the walk.
void walk(const Node& n, const std::vector<std::string>& path, std::size_t k,
          std::vector<const Node*>& out, bool& undetermined) {
  if (n.is_list()) {
    for (const auto& item : n.items) walk(item, path, k, out, undetermined);
    return;
  }
  if (k == path.size()) {
    if (!n.is_null()) out.push_back(&n);
    return;
  }
  if (n.is_ref()) {
    undetermined = true;
    return;
  }
  if (!n.is_map()) return;
  if (path[k] == "*") {
    for (const auto& [key, v] : n.fields) walk(v, path, k + 1, out, undetermined);
  } else if (const Node* child = n.get(path[k])) {
    walk(*child, path, k + 1, out, undetermined);
  }
}

Truth negate(Truth t) {
  if (t == Truth::kTrue) return Truth::kFalse;
  if (t == Truth::kFalse) return Truth::kTrue;
  return t;
}

Truth eval(const Expr& e, const Node& props, const TemplateModel* model) {
  switch (e.op) {
    case Expr::Op::kAnd: {
      const Truth a = eval(*e.kids[0], props, model);
      if (a == Truth::kFalse) return a;
      const Truth b = eval(*e.kids[1], props, model);
      if (b == Truth::kFalse) return b;
      return a == Truth::kTrue && b == Truth::kTrue ? Truth::kTrue : Truth::kUndetermined;
    }
    case Expr::Op::kOr: {
      const Truth a = eval(*e.kids[0], props, model);
      if (a == Truth::kTrue) return a;
      const Truth b = eval(*e.kids[1], props, model);
      if (b == Truth::kTrue) return b;
      return a == Truth::kFalse && b == Truth::kFalse ? Truth::kFalse : Truth::kUndetermined;
    }
    case Expr::Op::kNot:
      return negate(eval(*e.kids[0], props, model));
    default:
      break;
  }
  std::vector<const Node*> values;
  bool undetermined = false;
  walk(props, e.path, 0, values, undetermined);
  switch (e.op) {
    case Expr::Op::kPresent:
    case Expr::Op::kMissing: {
      Truth t = !values.empty() ? Truth::kTrue
                                : (undetermined ? Truth::kUndetermined : Truth::kFalse);
      return e.op == Expr::Op::kPresent ? t : negate(t);
    }
    case Expr::Op::kEq:
    case Expr::Op::kNe:
    case Expr::Op::kMatches: {
      bool hit = false;
      for (const Node* v : values) {
        if (!v->is_scalar() && !v->is_ref()) continue;
        const auto s = detail::resolve_scalar(*v, model);
        if (!s) {
          undetermined = true;
          continue;
        }
        if (e.op == Expr::Op::kMatches ? std::regex_search(*s, e.re) : iequals(*s, e.literal)) {
          hit = true;
          break;
        }
      }
      const Truth t = hit ? Truth::kTrue : (undetermined ? Truth::kUndetermined : Truth::kFalse);
      return e.op == Expr::Op::kNe ? negate(t) : t;
    }
    default:
      return Truth::kUndetermined;
  }
}

}  // namespace

Predicate Predicate::compile(std::string_view text) {
  Predicate p;
  p.text_ = std::string(text);
  p.expr_ = Compiler(lex(text)).run();
  return p;
}

Truth Predicate::evaluate(const Node& properties, const TemplateModel* model) const {
  if (!expr_) return Truth::kTrue;
  return eval(*expr_, properties, model);
}

}  // namespace slsa::iac
