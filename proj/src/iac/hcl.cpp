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

// Block-level HCL reader: blocks, attributes, literals, lists and objects.
// Anything that needs evaluation is kept as an opaque "expr" or "template"
// reference.

#include <cctype>

#include "iac/detail.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::iac::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

Node make_ref(std::string kind, std::string text, int line) {
  Node n;
  n.kind = Node::Kind::kRef;
  n.scalar = std::move(kind);
  n.items.push_back(Node::scalar_at(std::move(text), line));
  n.line = line;
  return n;
}

class HclParser {
 public:
  HclParser(std::string_view s, TemplateModel& model) : s_(s), model_(model) {}

  void parse() {
    Node ignored = Node::map_at(1);
    parse_body(ignored, true);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, static_cast<int>(i_ - line_start_ + 1));
  }

  bool at_end() const { return i_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < s_.size() ? s_[i_ + ahead] : '\0';
  }

  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      line_start_ = i_ + 1;
    }
    ++i_;
  }

  bool at_comment() const {
    return peek() == '#' || (peek() == '/' && (peek(1) == '/' || peek(1) == '*'));
  }

  void skip_comment() {
    if (peek() == '/' && peek(1) == '*') {
      advance();
      advance();
      while (!at_end() && !(peek() == '*' && peek(1) == '/')) advance();
      if (at_end()) fail("unterminated block comment");
      advance();
      advance();
      return;
    }
    while (!at_end() && peek() != '\n') advance();
  }

  void skip_ws(bool newlines) {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else if (at_comment()) {
        skip_comment();
      } else {
        break;
      }
    }
  }

  std::string ident() {
    if (!ident_start(peek())) fail("expected identifier");
    const std::size_t start = i_;
    while (!at_end() && ident_char(peek())) advance();
    return std::string(s_.substr(start, i_ - start));
  }

  // Body of a block or the file. Nested blocks are appended to a list under
  // their type name so repeated blocks keep their order.
  void parse_body(Node& map, bool top) {
    while (true) {
      skip_ws(true);
      if (at_end()) {
        if (!top) fail("unterminated block");
        return;
      }
      if (peek() == '}') {
        if (top) fail("unexpected '}'");
        advance();
        return;
      }
      const int item_line = line_;
      std::string key;
      if (peek() == '"') {
        key = string_literal().first;
      } else {
        key = ident();
      }
      skip_ws(false);
      if (peek() == '=' && peek(1) != '=') {
        advance();
        skip_ws(false);
        Node value = parse_expr();
        set_field(map, key, std::move(value));
        skip_ws(false);
        if (!at_end() && peek() != '\n' && peek() != '}') fail("expected newline after attribute");
        continue;
      }
      std::vector<std::string> labels;
      while (peek() == '"' || ident_start(peek())) {
        labels.push_back(peek() == '"' ? string_literal().first : ident());
        skip_ws(false);
      }
      if (peek() != '{') fail("expected '=' or '{' after '" + key + "'");
      advance();
      Node child = Node::map_at(item_line);
      parse_body(child, false);
      const int end_line = line_;
      if (top) {
        top_level_block(key, labels, std::move(child), item_line, end_line);
      } else {
        Node* list = nullptr;
        for (auto& [k, v] : map.fields) {
          if (k == key && v.is_list()) list = &v;
        }
        if (!list) {
          map.fields.emplace_back(key, Node::list_at(item_line));
          list = &map.fields.back().second;
        }
        list->items.push_back(std::move(child));
      }
    }
  }

  void set_field(Node& map, const std::string& key, Node value) {
    for (auto& [k, v] : map.fields) {
      if (k == key) fail("duplicate attribute '" + key + "'");
    }
    map.fields.emplace_back(key, std::move(value));
  }

  void top_level_block(const std::string& type, const std::vector<std::string>& labels,
                       Node body, int first, int last) {
    if (type == "resource") {
      if (labels.size() != 2) {
        throw ParseError("resource block needs a type and a name label", first);
      }
      ResourceNode r;
      r.resource_type = labels[0];
      r.logical_id = labels[0] + "." + labels[1];
      if (model_.find(r.logical_id)) {
        throw ParseError("duplicate resource " + r.logical_id, first);
      }
      r.properties = std::move(body);
      r.span = {model_.file, first, std::max(first, last)};
      model_.resources.push_back(std::move(r));
    } else if (type == "variable") {
      if (labels.size() != 1) throw ParseError("variable block needs one name label", first);
      Parameter p;
      p.line = first;
      if (const Node* t = body.get("type")) p.type = t->text();
      if (const Node* d = body.get("default"); d && d->is_scalar()) p.default_value = d->scalar;
      if (!model_.parameters.emplace(labels[0], std::move(p)).second) {
        throw ParseError("duplicate variable " + labels[0], first);
      }
    }
  }

  // Returns the string content and whether it holds an interpolation.
  std::pair<std::string, bool> string_literal() {
    advance();  // opening quote
    std::string out;
    bool interp = false;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = peek();
      if (c == '"') {
        advance();
        return {out, interp};
      }
      if (c == '\\') {
        advance();
        if (at_end()) fail("unterminated string");
        const char e = peek();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default:
            out.push_back('\\');
            out.push_back(e);
        }
        advance();
        continue;
      }
      if ((c == '$' || c == '%') && peek(1) == c && peek(2) == '{') {
        out.push_back(c);
        out.push_back('{');
        advance();
        advance();
        advance();
        continue;
      }
      if ((c == '$' || c == '%') && peek(1) == '{') {
        interp = true;
        copy_interpolation(out);
        continue;
      }
      out.push_back(c);
      advance();
    }
  }

  void copy_interpolation(std::string& out) {
    int depth = 0;
    while (!at_end()) {
      const char c = peek();
      if (c == '\n') fail("unterminated interpolation");
      out.push_back(c);
      advance();
      if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return;
      } else if (c == '"') {
        while (!at_end() && peek() != '"') {
          if (peek() == '\n') fail("unterminated string");
          if (peek() == '\\') {
            out.push_back(peek());
            advance();
          }
          out.push_back(peek());
          advance();
        }
        if (at_end()) fail("unterminated string");
        out.push_back('"');
        advance();
      }
    }
    fail("unterminated interpolation");
  }

  Node heredoc(int line) {
    advance();
    advance();
    const bool indented = peek() == '-';
    if (indented) advance();
    const std::string marker = ident();
    while (!at_end() && peek() != '\n') advance();
    if (at_end()) fail("unterminated heredoc");
    advance();
    std::string body;
    while (true) {
      if (at_end()) fail("unterminated heredoc " + marker);
      const std::size_t start = i_;
      while (!at_end() && peek() != '\n') advance();
      const std::string_view text = s_.substr(start, i_ - start);
      if (trim(text) == marker) break;
      body.append(indented ? std::string(trim(text)) : std::string(text));
      body.push_back('\n');
      if (!at_end()) advance();
    }
    if (body.find("${") != std::string::npos || body.find("%{") != std::string::npos) {
      return make_ref("template", body, line);
    }
    return Node::scalar_at(body, line);
  }

  bool at_terminator() {
    skip_ws(false);
    const char c = peek();
    return at_end() || c == '\n' || c == ',' || c == ']' || c == '}' || c == ')';
  }

  bool next_word_is_for() {
    std::size_t j = i_ + 1;
    while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
    return s_.substr(j, 4) == "for " || s_.substr(j, 4) == "for\t";
  }

  Node parse_expr() {
    skip_ws(false);
    const std::size_t start = i_;
    const int start_line = line_;
    const std::size_t start_line_offset = line_start_;
    std::optional<Node> value;
    const char c = peek();
    if (c == '"') {
      auto [text, interp] = string_literal();
      value = interp ? make_ref("template", text, start_line) : Node::scalar_at(text, start_line);
    } else if (c == '<' && peek(1) == '<') {
      value = heredoc(start_line);
      return *value;
    } else if (c == '[' && !next_word_is_for()) {
      advance();
      Node list = Node::list_at(start_line);
      while (true) {
        skip_ws(true);
        if (peek() == ']') {
          advance();
          break;
        }
        if (at_end()) fail("unterminated list");
        list.items.push_back(parse_expr());
        skip_ws(true);
        if (peek() == ',') {
          advance();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in list");
        }
      }
      value = std::move(list);
    } else if (c == '{' && !next_word_is_for()) {
      advance();
      Node obj = Node::map_at(start_line);
      while (true) {
        skip_ws(true);
        if (peek() == '}') {
          advance();
          break;
        }
        if (at_end()) fail("unterminated object");
        std::string key = peek() == '"' ? string_literal().first : ident();
        skip_ws(false);
        if (peek() != '=' && peek() != ':') fail("expected '=' or ':' after object key");
        advance();
        skip_ws(false);
        Node v = parse_expr();
        set_field(obj, key, std::move(v));
        skip_ws(false);
        if (peek() == ',') advance();
      }
      value = std::move(obj);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.')) {
        advance();
      }
      value = Node::scalar_at(std::string(s_.substr(start, i_ - start)), start_line);
    } else if (ident_start(c)) {
      const std::string word = ident();
      if (word == "true" || word == "false") {
        value = Node::scalar_at(word, start_line);
      } else if (word == "null") {
        value = Node::null_at(start_line);
      }
    }
    if (value && at_terminator()) return *value;
    // Compound expression: rewind and keep the raw text.
    i_ = start;
    line_ = start_line;
    line_start_ = start_line_offset;
    return raw_expr(start_line);
  }

  Node raw_expr(int line) {
    const std::size_t start = i_;
    int depth = 0;
    while (!at_end()) {
      const char c = peek();
      if (depth == 0 && (c == '\n' || c == ',' || c == ']' || c == '}' || c == ')')) break;
      if (depth == 0 && at_comment()) break;
      if (c == '"') {
        string_literal();
        continue;
      }
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') --depth;
      advance();
    }
    if (depth > 0) fail("unbalanced brackets in expression");
    const std::string text(trim(s_.substr(start, i_ - start)));
    if (text.empty()) fail("expected expression");
    return make_ref("expr", text, line);
  }

  std::string_view s_;
  TemplateModel& model_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

void parse_hcl(std::string_view contents, TemplateModel& model) {
  HclParser(contents, model).parse();
}

}  // namespace slsa::iac::detail
