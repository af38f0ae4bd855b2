#ifndef ROMAEH_TOML_LITE_HPP
#define ROMAEH_TOML_LITE_HPP

#include <map>
#include <string>
#include <vector>

namespace romaeh {

// Minimal TOML reader covering the profile the run configurations use:
// comments, [table] / [a.b] headers, and key = value lines where value
// is a string, bool, integer, float, or a flat array of those.  Keys are
// flattened to "table.key".  Anything outside this profile is rejected
// with a line-numbered ConfigError.
class TomlTable {
 public:
  static TomlTable parse_file(const std::string& path);
  static TomlTable parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_array(const std::string& key) const;
  std::vector<std::string> get_string_array(const std::string& key) const;

  // Keys below a prefix, e.g. child_tables("phase") -> {"fiber","matrix"}.
  std::vector<std::string> child_tables(const std::string& prefix) const;
  std::vector<std::string> keys() const;

 private:
  enum class Kind { String, Bool, Int, Float, Array };
  struct Value {
    Kind kind = Kind::String;
    std::string str;
    bool b = false;
    long long i = 0;
    double f = 0.0;
    std::vector<Value> items;
  };

  const Value& lookup(const std::string& key) const;

  std::map<std::string, Value> values_;
  std::string origin_;
};

}  // namespace romaeh

#endif
