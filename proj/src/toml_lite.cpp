#include "romaeh/toml_lite.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "romaeh/errors.hpp"

namespace romaeh {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Remove a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

TomlTable TomlTable::parse_string(const std::string& text, const std::string& origin) {
  TomlTable t;
  t.origin_ = origin;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;

  auto parse_scalar = [&](const std::string& tok) -> Value {
    Value v;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
      v.kind = Kind::String;
      v.str = tok.substr(1, tok.size() - 2);
      return v;
    }
    if (tok == "true" || tok == "false") {
      v.kind = Kind::Bool;
      v.b = (tok == "true");
      return v;
    }
    // Integer if it parses fully without '.', 'e', 'E', otherwise float.
    const bool looks_int = tok.find_first_of(".eE") == std::string::npos ||
                           (tok.size() > 1 && (tok[0] == '0') && tok[1] == 'x');
    char* end = nullptr;
    if (looks_int) {
      long long i = std::strtoll(tok.c_str(), &end, 10);
      if (end && *end == '\0') {
        v.kind = Kind::Int;
        v.i = i;
        v.f = static_cast<double>(i);
        return v;
      }
    }
    double f = std::strtod(tok.c_str(), &end);
    if (!end || *end != '\0') fail(origin, lineno, "cannot parse value '" + tok + "'");
    v.kind = Kind::Float;
    v.f = f;
    return v;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated table header");
      section = strip(line.substr(1, line.size() - 2));
      if (!valid_key(section)) fail(origin, lineno, "bad table name '" + section + "'");
      continue;
    }

    size_t eq = std::string::npos;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '=' && !quoted) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");

    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (!valid_key(key)) fail(origin, lineno, "bad key '" + key + "'");
    if (val.empty()) fail(origin, lineno, "missing value for '" + key + "'");
    if (!section.empty()) key = section + "." + key;

    Value v;
    if (val.front() == '[') {
      if (val.back() != ']') fail(origin, lineno, "unterminated array");
      v.kind = Kind::Array;
      std::string body = val.substr(1, val.size() - 2);
      std::string tok;
      bool q = false;
      for (char c : body) {
        if (c == '"') q = !q;
        if (c == ',' && !q) {
          tok = strip(tok);
          if (!tok.empty()) v.items.push_back(parse_scalar(tok));
          tok.clear();
        } else {
          tok += c;
        }
      }
      tok = strip(tok);
      if (!tok.empty()) v.items.push_back(parse_scalar(tok));
    } else {
      v = parse_scalar(val);
    }

    if (t.values_.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
    t.values_[key] = std::move(v);
  }
  return t;
}

bool TomlTable::has(const std::string& key) const { return values_.count(key) != 0; }

const TomlTable::Value& TomlTable::lookup(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double TomlTable::get_double(const std::string& key) const {
  const Value& v = lookup(key);
  if (v.kind != Kind::Float && v.kind != Kind::Int)
    throw ConfigError(origin_ + ": key '" + key + "' is not a number");
  return v.f;
}

double TomlTable::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long TomlTable::get_int(const std::string& key) const {
  const Value& v = lookup(key);
  if (v.kind != Kind::Int) throw ConfigError(origin_ + ": key '" + key + "' is not an integer");
  return v.i;
}

long long TomlTable::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool TomlTable::get_bool(const std::string& key) const {
  const Value& v = lookup(key);
  if (v.kind != Kind::Bool) throw ConfigError(origin_ + ": key '" + key + "' is not a boolean");
  return v.b;
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::string TomlTable::get_string(const std::string& key) const {
  const Value& v = lookup(key);
  if (v.kind != Kind::String) throw ConfigError(origin_ + ": key '" + key + "' is not a string");
  return v.str;
}

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
  const Value& v = lookup(key);
  if (v.kind != Kind::Array) throw ConfigError(origin_ + ": key '" + key + "' is not an array");
  std::vector<double> out;
  for (const Value& item : v.items) {
    if (item.kind != Kind::Float && item.kind != Kind::Int)
      throw ConfigError(origin_ + ": array '" + key + "' holds a non-number");
    out.push_back(item.f);
  }
  return out;
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
  const Value& v = lookup(key);
  if (v.kind != Kind::Array) throw ConfigError(origin_ + ": key '" + key + "' is not an array");
  std::vector<std::string> out;
  for (const Value& item : v.items) {
    if (item.kind != Kind::String)
      throw ConfigError(origin_ + ": array '" + key + "' holds a non-string");
    out.push_back(item.str);
  }
  return out;
}

std::vector<std::string> TomlTable::child_tables(const std::string& prefix) const {
  std::set<std::string> names;
  const std::string p = prefix + ".";
  for (const auto& [key, value] : values_) {
    (void)value;
    if (key.rfind(p, 0) != 0) continue;
    std::string rest = key.substr(p.size());
    size_t dot = rest.find('.');
    if (dot != std::string::npos) names.insert(rest.substr(0, dot));
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> TomlTable::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [key, value] : values_) {
    (void)value;
    out.push_back(key);
  }
  return out;
}

}  // namespace romaeh
