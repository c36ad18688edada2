/*
 * Copyright 2026 The DBOM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dbom/canonical.hpp"

#include <cstdio>

#include "dbom/encoding.hpp"
#include "dbom/error.hpp"

namespace dbom {

namespace {

using json = nlohmann::json;

std::string display(const std::string& path) { return path.empty() ? "(root)" : path; }

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void write_string(std::string& out, const std::string& s, const std::string& path) {
  if (!is_valid_utf8(s)) {
    throw Error(ErrorCode::kCanonicalization, "invalid UTF-8 at " + display(path));
  }
  out.push_back('"');
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

void write(std::string& out, const json& node, const std::string& path) {
  switch (node.type()) {
    case json::value_t::null: out += "null"; return;
    case json::value_t::boolean: out += node.get<bool>() ? "true" : "false"; return;
    case json::value_t::number_integer: out += std::to_string(node.get<std::int64_t>()); return;
    case json::value_t::number_unsigned: out += std::to_string(node.get<std::uint64_t>()); return;
    case json::value_t::number_float:
      throw Error(ErrorCode::kCanonicalization,
                  "raw floating-point value at " + display(path) + " (use decimal text)");
    case json::value_t::string: write_string(out, node.get_ref<const std::string&>(), path); return;
    case json::value_t::array: {
      out.push_back('[');
      std::size_t i = 0;
      for (const auto& item : node) {
        if (i != 0) out.push_back(',');
        write(out, item, child(path, std::to_string(i)));
        ++i;
      }
      out.push_back(']');
      return;
    }
    case json::value_t::object: {
      // object_t is a std::map keyed by std::string; byte order on valid
      // UTF-8 equals code-point order.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, value] : node.items()) {
        if (!first) out.push_back(',');
        first = false;
        const auto key_path = child(path, key);
        write_string(out, key, key_path);
        out.push_back(':');
        write(out, value, key_path);
      }
      out.push_back('}');
      return;
    }
    case json::value_t::binary:
      throw Error(ErrorCode::kCanonicalization, "binary value at " + display(path));
    case json::value_t::discarded:
      throw Error(ErrorCode::kCanonicalization, "discarded value at " + display(path));
  }
}

}  // namespace

std::string canonicalize(const json& doc) {
  std::string out;
  write(out, doc, "");
  return out;
}

Digest canonical_digest(const json& doc) { return Digest::of(canonicalize(doc)); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace dbom
