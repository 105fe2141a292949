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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <regex>

#include "iac/detail.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::iac {

std::string_view to_string(Framework f) {
  switch (f) {
    case Framework::kTerraform: return "Terraform";
    case Framework::kCloudFormation: return "CloudFormation";
    case Framework::kSam: return "SAM";
  }
  return "?";
}

Framework parse_framework(std::string_view text) {
  for (auto f : kAllFrameworks) {
    if (iequals(text, to_string(f))) return f;
  }
  throw Error(ErrorKind::kParse, "unknown IaC framework '" + std::string(text) + "'");
}

Node Node::null_at(int line) {
  Node n;
  n.line = line;
  return n;
}

Node Node::scalar_at(std::string text, int line) {
  Node n;
  n.kind = Kind::kScalar;
  n.scalar = std::move(text);
  n.line = line;
  return n;
}

Node Node::map_at(int line) {
  Node n;
  n.kind = Kind::kMap;
  n.line = line;
  return n;
}

Node Node::list_at(int line) {
  Node n;
  n.kind = Kind::kList;
  n.line = line;
  return n;
}

const Node* Node::get(std::string_view key) const {
  if (kind != Kind::kMap) return nullptr;
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

int Node::last_line() const {
  int best = line;
  for (const auto& item : items) best = std::max(best, item.last_line());
  for (const auto& [k, v] : fields) best = std::max(best, v.last_line());
  return best;
}

std::string Node::text() const {
  switch (kind) {
    case Kind::kNull: return "null";
    case Kind::kScalar: return scalar;
    case Kind::kList:
    case Kind::kRef: {
      if (kind == Kind::kRef && (scalar == "expr" || scalar == "template") && items.size() == 1) {
        return items[0].scalar;
      }
      std::string out = kind == Kind::kRef ? scalar + "(" : "[";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].text();
      }
      return out + (kind == Kind::kRef ? ")" : "]");
    }
    case Kind::kMap: {
      std::string out = "{";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ", ";
        out += fields[i].first + ": " + fields[i].second.text();
      }
      return out + "}";
    }
  }
  return "";
}

const ResourceNode* TemplateModel::find(std::string_view logical_id) const {
  for (const auto& r : resources) {
    if (r.logical_id == logical_id) return &r;
  }
  return nullptr;
}

namespace detail {

int count_lines(std::string_view contents) {
  if (contents.empty()) return 1;
  int n = static_cast<int>(std::count(contents.begin(), contents.end(), '\n'));
  if (contents.back() != '\n') ++n;
  return std::max(n, 1);
}

std::string normalize_key(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

namespace {

std::string intrinsic_name(const std::string& tag) {
  if (tag == "!Ref") return "Ref";
  if (tag == "!Condition") return "Condition";
  return "Fn::" + tag.substr(1);
}

bool is_intrinsic_key(const std::string& key) {
  return key == "Ref" || key.rfind("Fn::", 0) == 0;
}

Node from_yaml(const YAML::Node& y) {
  const int line = y.Mark().line + 1;
  const std::string& tag = y.Tag();
  if (tag.size() > 1 && tag[0] == '!') {
    Node r;
    r.kind = Node::Kind::kRef;
    r.scalar = intrinsic_name(tag);
    r.line = line;
    if (y.IsScalar()) {
      r.items.push_back(Node::scalar_at(y.Scalar(), line));
    } else if (y.IsSequence()) {
      for (const auto& e : y) r.items.push_back(from_yaml(e));
    } else if (y.IsMap()) {
      YAML::Node copy = y;
      copy.SetTag("?");
      r.items.push_back(from_yaml(copy));
    }
    return r;
  }
  switch (y.Type()) {
    case YAML::NodeType::Scalar:
      return Node::scalar_at(y.Scalar(), line);
    case YAML::NodeType::Sequence: {
      Node n = Node::list_at(line);
      for (const auto& e : y) n.items.push_back(from_yaml(e));
      return n;
    }
    case YAML::NodeType::Map: {
      Node n = Node::map_at(line);
      std::set<std::string> seen;
      for (const auto& kv : y) {
        std::string key = kv.first.IsScalar() ? kv.first.Scalar() : "?";
        if (!seen.insert(key).second) {
          throw ParseError("duplicate key '" + key + "'", kv.first.Mark().line + 1,
                           kv.first.Mark().column + 1);
        }
        n.fields.emplace_back(std::move(key), from_yaml(kv.second));
      }
      if (n.fields.size() == 1 && is_intrinsic_key(n.fields[0].first)) {
        Node r;
        r.kind = Node::Kind::kRef;
        r.scalar = n.fields[0].first;
        r.line = line;
        Node arg = std::move(n.fields[0].second);
        if (arg.is_list()) {
          r.items = std::move(arg.items);
        } else {
          r.items.push_back(std::move(arg));
        }
        return r;
      }
      return n;
    }
    default:
      return Node::null_at(line);
  }
}

void clamp_lines(Node& n, int max_line) {
  n.line = std::clamp(n.line, 1, max_line);
  for (auto& item : n.items) clamp_lines(item, max_line);
  for (auto& [k, v] : n.fields) clamp_lines(v, max_line);
}

YAML::Node load_yaml(std::string_view contents) {
  try {
    return YAML::Load(std::string(contents));
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

std::vector<std::string> transforms_of(const YAML::Node& root) {
  std::vector<std::string> out;
  if (!root.IsMap()) return out;
  const YAML::Node t = root["Transform"];
  if (!t) return out;
  if (t.IsScalar()) {
    out.push_back(t.Scalar());
  } else if (t.IsSequence()) {
    for (const auto& e : t) {
      if (e.IsScalar()) out.push_back(e.Scalar());
    }
  } else if (t.IsMap() && t["Name"] && t["Name"].IsScalar()) {
    out.push_back(t["Name"].Scalar());
  }
  return out;
}

}  // namespace

void parse_structured(std::string_view contents, TemplateModel& model) {
  const YAML::Node root = load_yaml(contents);
  if (!root || root.IsNull()) return;
  if (!root.IsMap()) throw ParseError("template root must be a mapping", 1);

  Node top = from_yaml(root);
  clamp_lines(top, model.line_count);
  model.transforms = transforms_of(root);

  if (const Node* params = top.get("Parameters"); params && params->is_map()) {
    for (const auto& kv : root["Parameters"]) {
      const std::string name = kv.first.Scalar();
      const Node* p = params->get(name);
      Parameter param;
      param.line = std::clamp(kv.first.Mark().line + 1, 1, model.line_count);
      if (p && p->is_map()) {
        if (const Node* t = p->get("Type"); t && t->is_scalar()) param.type = t->scalar;
        if (const Node* d = p->get("Default"); d && d->is_scalar()) param.default_value = d->scalar;
      }
      model.parameters.emplace(name, std::move(param));
    }
  }

  if (const Node* res = top.get("Resources"); res && res->is_map()) {
    for (const auto& kv : root["Resources"]) {
      const std::string id = kv.first.Scalar();
      const Node* body = res->get(id);
      ResourceNode node;
      node.logical_id = id;
      node.span.file = model.file;
      node.span.first_line = std::clamp(kv.first.Mark().line + 1, 1, model.line_count);
      node.span.last_line =
          std::clamp(std::max(node.span.first_line, body->last_line()), 1, model.line_count);
      node.properties = Node::map_at(node.span.first_line);
      if (body->is_map()) {
        if (const Node* t = body->get("Type"); t && t->is_scalar()) node.resource_type = t->scalar;
        if (const Node* p = body->get("Properties"); p && !p->is_null()) node.properties = *p;
      }
      if (node.resource_type.empty()) {
        model.notices.push_back(model.file + ":" + std::to_string(node.span.first_line) +
                                ": resource " + id + " has no Type");
      }
      model.resources.push_back(std::move(node));
    }
  }

  if (const Node* g = top.get("Globals")) model.globals = *g;
}

std::optional<std::string> resolve_scalar(const Node& n, const TemplateModel* model) {
  if (n.is_scalar()) return n.scalar;
  if (!n.is_ref() || !model) return std::nullopt;
  auto param_default = [&](const std::string& name) -> std::optional<std::string> {
    const auto it = model->parameters.find(name);
    if (it == model->parameters.end()) return std::nullopt;
    return it->second.default_value;
  };
  // Replaces every `${...}` with lookup(inner); nullopt if any lookup fails.
  auto substitute = [](const std::string& text, auto lookup) -> std::optional<std::string> {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      const auto open = text.find("${", i);
      if (open == std::string::npos) {
        out.append(text, i);
        break;
      }
      out.append(text, i, open - i);
      const auto close = text.find('}', open);
      if (close == std::string::npos) return std::nullopt;
      const auto value = lookup(text.substr(open + 2, close - open - 2));
      if (!value) return std::nullopt;
      out += *value;
      i = close + 1;
    }
    return out;
  };

  if (n.scalar == "Ref" && n.items.size() == 1 && n.items[0].is_scalar()) {
    return param_default(n.items[0].scalar);
  }
  if (n.scalar == "Fn::Sub" && !n.items.empty() && n.items[0].is_scalar()) {
    const Node* vars = n.items.size() > 1 && n.items[1].is_map() ? &n.items[1] : nullptr;
    return substitute(n.items[0].scalar, [&](const std::string& name) -> std::optional<std::string> {
      if (vars) {
        if (const Node* v = vars->get(name)) return resolve_scalar(*v, model);
      }
      return param_default(name);
    });
  }
  static const std::regex var_ref(R"(^\s*var\.([A-Za-z_][A-Za-z0-9_-]*)\s*$)");
  if ((n.scalar == "expr" || n.scalar == "template") && n.items.size() == 1) {
    const std::string& text = n.items[0].scalar;
    auto lookup = [&](const std::string& inner) -> std::optional<std::string> {
      std::smatch m;
      if (std::regex_match(inner, m, var_ref)) return param_default(m[1]);
      return std::nullopt;
    };
    if (n.scalar == "expr") return lookup(text);
    return substitute(text, lookup);
  }
  return std::nullopt;
}

std::set<std::string> referenced_params(const Node& ref) {
  std::set<std::string> out;
  if (!ref.is_ref()) return out;
  if (ref.scalar == "Ref" && ref.items.size() == 1 && ref.items[0].is_scalar()) {
    out.insert(ref.items[0].scalar);
  } else if (ref.scalar == "Fn::Sub" && !ref.items.empty() && ref.items[0].is_scalar()) {
    static const std::regex sub_ref(R"(\$\{([A-Za-z0-9_]+)\})");
    const std::string& s = ref.items[0].scalar;
    for (std::sregex_iterator it(s.begin(), s.end(), sub_ref), end; it != end; ++it) {
      out.insert((*it)[1]);
    }
  } else if ((ref.scalar == "expr" || ref.scalar == "template") && ref.items.size() == 1) {
    static const std::regex tf_ref(R"(\bvar\.([A-Za-z_][A-Za-z0-9_-]*))");
    const std::string& s = ref.items[0].scalar;
    for (std::sregex_iterator it(s.begin(), s.end(), tf_ref), end; it != end; ++it) {
      out.insert((*it)[1]);
    }
  }
  for (const auto& item : ref.items) {
    if (item.is_ref()) out.merge(referenced_params(item));
  }
  return out;
}

}  // namespace detail

bool is_template_extension(const fs::path& path) {
  const std::string ext = to_lower(path.extension().string());
  return ext == ".tf" || ext == ".json" || ext == ".yaml" || ext == ".yml";
}

Framework classify_template(const fs::path& path, std::string_view contents,
                            std::vector<std::string>* notices) {
  const std::string ext = to_lower(path.extension().string());
  if (ext == ".tf") return Framework::kTerraform;
  if (ext != ".json" && ext != ".yaml" && ext != ".yml") {
    throw Error(ErrorKind::kUnsupportedExtension,
                "unsupported template extension '" + ext + "' for " + path.generic_string() +
                    " (expected .tf, .json, .yaml or .yml)");
  }
  std::vector<std::string> transforms;
  try {
    const YAML::Node root = YAML::Load(std::string(contents));
    transforms = detail::transforms_of(root);
  } catch (const YAML::Exception& e) {
    if (notices) {
      notices->push_back(path.generic_string() + ": not parseable (" + e.msg + " at line " +
                         std::to_string(e.mark.line + 1) +
                         "); classified by a textual Transform search");
    }
    static const std::regex textual(R"("?\bTransform"?\s*:[\s\-\["',A-Za-z0-9:]*?AWS::Serverless-2016-10-31)");
    const std::string text(contents);
    return std::regex_search(text, textual) ? Framework::kSam : Framework::kCloudFormation;
  }
  const bool sam = std::find(transforms.begin(), transforms.end(), kSamTransform) != transforms.end();
  return sam ? Framework::kSam : Framework::kCloudFormation;
}

TemplateModel parse_template(std::string_view contents, Framework framework, std::string file) {
  TemplateModel model;
  model.framework = framework;
  model.file = std::move(file);
  model.line_count = detail::count_lines(contents);
  if (framework == Framework::kTerraform) {
    detail::parse_hcl(contents, model);
  } else {
    detail::parse_structured(contents, model);
    if (framework == Framework::kSam &&
        std::find(model.transforms.begin(), model.transforms.end(), kSamTransform) ==
            model.transforms.end()) {
      model.notices.push_back(model.file + ": parsed as SAM without the " +
                              std::string(kSamTransform) + " transform");
    }
  }
  return model;
}

}  // namespace slsa::iac
