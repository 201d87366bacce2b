// Copyright 2026 The TableQuery Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include "support.hpp"

namespace tqt {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>()));
  }
  return false;
}

const json& resolve(const std::string& ref, const json& root) {
  if (ref.rfind("#/", 0) != 0) throw std::runtime_error("unsupported $ref " + ref);
  return root.at(json::json_pointer(ref.substr(1)));
}

std::string check(const json& v, const json& s, const json& root, const std::string& path) {
  if (s.is_boolean()) return s.get<bool>() ? "" : path + ": schema false";
  if (s.contains("$ref")) return check(v, resolve(s["$ref"].get<std::string>(), root), root, path);
  if (s.contains("type")) {
    const json& t = s["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(v, t.get<std::string>());
    } else {
      for (const json& one : t) ok = ok || has_type(v, one.get<std::string>());
    }
    if (!ok) return path + ": expected type " + t.dump() + ", got " + v.dump();
  }
  if (s.contains("const") && v != s["const"]) return path + ": expected " + s["const"].dump();
  if (s.contains("enum")) {
    bool found = false;
    for (const json& e : s["enum"]) found = found || e == v;
    if (!found) return path + ": " + v.dump() + " not in " + s["enum"].dump();
  }
  if (s.contains("oneOf")) {
    int matches = 0;
    std::string last;
    for (const json& alt : s["oneOf"]) {
      const std::string r = check(v, alt, root, path);
      if (r.empty()) {
        ++matches;
      } else {
        last = r;
      }
    }
    if (matches != 1) return path + ": matches " + std::to_string(matches) + " oneOf branches" + (matches ? "" : " (" + last + ")");
  }
  if (v.is_number() && s.contains("minimum") && v.get<double>() < s["minimum"].get<double>()) {
    return path + ": below minimum";
  }
  if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<size_t>()) {
    return path + ": shorter than minLength";
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<size_t>()) return path + ": too few items";
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<size_t>()) return path + ": too many items";
    if (s.contains("items")) {
      for (size_t i = 0; i < v.size(); ++i) {
        const std::string r = check(v[i], s["items"], root, path + "/" + std::to_string(i));
        if (!r.empty()) return r;
      }
    }
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const json& name : s["required"]) {
        if (!v.contains(name.get<std::string>())) return path + ": missing " + name.get<std::string>();
      }
    }
    const json props = s.value("properties", json::object());
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (props.contains(it.key())) {
        const std::string r = check(it.value(), props[it.key()], root, path + "/" + it.key());
        if (!r.empty()) return r;
      } else if (s.contains("additionalProperties")) {
        const json& extra = s["additionalProperties"];
        if (extra.is_boolean() && !extra.get<bool>()) return path + ": unexpected property " + it.key();
        if (extra.is_object()) {
          const std::string r = check(it.value(), extra, root, path + "/" + it.key());
          if (!r.empty()) return r;
        }
      }
    }
  }
  return "";
}

}  // namespace

std::string schema_violation(const json& instance, const json& schema) { return check(instance, schema, schema, ""); }

}  // namespace tqt
