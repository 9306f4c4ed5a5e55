#pragma once

// Flat key-value configuration with per-key provenance. Values resolve with
// flag > file > default precedence. The format is deliberately flat (no
// sections, no nesting) so run manifests stay diffable.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/rng.hpp"

namespace factspan {

enum class ConfigSource : std::uint8_t { Default, File, Flag };

inline const char* to_string(ConfigSource s) {
  switch (s) {
    case ConfigSource::Default: return "default";
    case ConfigSource::File: return "file";
    case ConfigSource::Flag: return "flag";
  }
  return "?";
}

class Config {
 public:
  enum class Type : std::uint8_t { Int, Double, String, Bool };

  void declare(const std::string& key, Type type, const std::string& default_value) {
    Entry e;
    e.type = type;
    e.default_value = default_value;
    check_type(key, type, default_value);
    entries_[key] = std::move(e);
  }
  void declare_int(const std::string& key, long long v) {
    declare(key, Type::Int, std::to_string(v));
  }
  void declare_double(const std::string& key, double v) {
    std::ostringstream os;
    os << v;
    declare(key, Type::Double, os.str());
  }
  void declare_string(const std::string& key, const std::string& v) {
    declare(key, Type::String, v);
  }
  void declare_bool(const std::string& key, bool v) {
    declare(key, Type::Bool, v ? "true" : "false");
  }

  // Lines of "key = value"; '#' starts a comment. Unknown keys, nested keys,
  // and type mismatches are errors naming the key and line.
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("cannot open config file '" + path + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto at = std::string(path) + ":" + std::to_string(line_no);
      if (trimmed.front() == '[') {
        throw ConfigError(at + ": sections are not supported (flat keys only)");
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(at + ": expected 'key = value'");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.find('.') != std::string::npos) {
        throw ConfigError(at + ": nested key '" + key + "' rejected");
      }
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        throw ConfigError(at + ": unknown key '" + key + "'");
      }
      check_type(key, it->second.type, value);
      it->second.file_value = value;
    }
  }

  void set_flag(const std::string& key, const std::string& value) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
    check_type(key, it->second.type, value);
    it->second.flag_value = value;
  }

  bool declared(const std::string& key) const { return entries_.count(key) > 0; }

  const std::string& get_raw(const std::string& key) const {
    return entry(key).resolved();
  }
  ConfigSource source(const std::string& key) const { return entry(key).source(); }

  long long get_int(const std::string& key) const {
    const Entry& e = entry(key);
    require_type(key, e, Type::Int);
    return std::stoll(e.resolved());
  }
  double get_double(const std::string& key) const {
    const Entry& e = entry(key);
    if (e.type != Type::Double && e.type != Type::Int) {
      throw ConfigError("key '" + key + "': expected a number");
    }
    return std::stod(e.resolved());
  }
  const std::string& get_string(const std::string& key) const {
    const Entry& e = entry(key);
    require_type(key, e, Type::String);
    return e.resolved();
  }
  bool get_bool(const std::string& key) const {
    const Entry& e = entry(key);
    require_type(key, e, Type::Bool);
    return parse_bool(key, e.resolved());
  }

  // Sorted "key = value" lines of the resolved configuration.
  std::string dump() const {
    std::string out;
    for (const auto& [key, e] : entries_) {
      out += key + " = " + e.resolved() + "\n";
    }
    return out;
  }

  // Resolved values with per-key provenance, for run manifests.
  std::map<std::string, std::pair<std::string, ConfigSource>> resolved() const {
    std::map<std::string, std::pair<std::string, ConfigSource>> out;
    for (const auto& [key, e] : entries_) {
      out[key] = {e.resolved(), e.source()};
    }
    return out;
  }

  std::uint64_t hash() const { return fnv1a64(dump()); }

 private:
  struct Entry {
    Type type = Type::String;
    std::string default_value;
    std::optional<std::string> file_value;
    std::optional<std::string> flag_value;

    const std::string& resolved() const {
      if (flag_value) return *flag_value;
      if (file_value) return *file_value;
      return default_value;
    }
    ConfigSource source() const {
      if (flag_value) return ConfigSource::Flag;
      if (file_value) return ConfigSource::File;
      return ConfigSource::Default;
    }
  };

  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  }

  static bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
  }

  static void check_type(const std::string& key, Type type, const std::string& v) {
    try {
      std::size_t pos = 0;
      switch (type) {
        case Type::Int:
          std::stoll(v, &pos);
          if (pos != v.size()) throw std::invalid_argument(v);
          break;
        case Type::Double:
          std::stod(v, &pos);
          if (pos != v.size()) throw std::invalid_argument(v);
          break;
        case Type::Bool:
          parse_bool(key, v);
          break;
        case Type::String:
          break;
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("key '" + key + "': expected " + type_name(type) +
                        ", got '" + v + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError("key '" + key + "': value '" + v + "' out of range");
    }
  }

  static const char* type_name(Type t) {
    switch (t) {
      case Type::Int: return "an integer";
      case Type::Double: return "a number";
      case Type::String: return "a string";
      case Type::Bool: return "a boolean";
    }
    return "?";
  }

  const Entry& entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
    return it->second;
  }

  static void require_type(const std::string& key, const Entry& e, Type t) {
    if (e.type != t) {
      throw ConfigError("key '" + key + "': declared as " + type_name(e.type) +
                        ", read as " + type_name(t));
    }
  }

  std::map<std::string, Entry> entries_;
};

}  // namespace factspan
