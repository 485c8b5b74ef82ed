#pragma once

// Per-command parameter registry.  Every option is bound to a variable and a
// config key so that a JSON config file can fill in whatever was not given
// on the command line, and the fully resolved set can be echoed back.

#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thermocap/serialization.hpp"

namespace cli {

using thermocap::Json;

/// Bad flags or config; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunConfig {
 public:
  explicit RunConfig(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_,
                     "JSON file with parameters; explicit flags win");
  }

  template <class T>
  CLI::Option* add(const std::string& flag, T& var, const std::string& desc,
                   bool tolerance = false) {
    CLI::Option* opt;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app_->add_flag(flag, var, desc);
    } else {
      opt = app_->add_option(flag, var, desc)->capture_default_str();
      if constexpr (std::is_same_v<T, std::vector<double>> ||
                    std::is_same_v<T, std::vector<int>>) {
        opt->delimiter(',');
      }
    }
    const std::string key = key_of(flag);
    entries_.push_back({key, opt,
                        [&var, key](const Json& j) {
                          try {
                            var = j.get<T>();
                          } catch (const Json::exception&) {
                            throw UsageError("config key '" + key +
                                             "' has the wrong type");
                          }
                        },
                        [&var] { return Json(var); }, tolerance});
    return opt;
  }

  /// Reads --config (if any) into every parameter not set by a flag.
  void merge() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw UsageError("cannot read config file " + config_path_);
    Json file;
    try {
      file = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!file.is_object()) throw UsageError("config file must hold an object");
    std::set<std::string> known;
    for (auto& e : entries_) {
      known.insert(e.key);
      if (!file.contains(e.key) || e.opt->count() > 0) continue;
      e.load(file[e.key]);
      if (e.tolerance) overridden_ = true;
    }
    for (const auto& item : file.items()) {
      if (!known.count(item.key()) && item.key() != "command") {
        throw UsageError("unknown config key '" + item.key() + "'");
      }
    }
  }

  Json resolved() const {
    Json j = Json::object();
    for (const auto& e : entries_) j[e.key] = e.dump();
    return j;
  }

  /// False when a tolerance was changed from its default.
  bool certifying() const {
    if (overridden_) return false;
    for (const auto& e : entries_) {
      if (e.tolerance && e.opt->count() > 0) return false;
    }
    return true;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const Json&)> load;
    std::function<Json()> dump;
    bool tolerance;
  };

  static std::string key_of(const std::string& flag) {
    std::string k = flag;
    while (!k.empty() && k.front() == '-') k.erase(k.begin());
    for (auto& c : k) if (c == '-') c = '_';
    return k;
  }

  CLI::App* app_;
  std::string config_path_;
  std::vector<Entry> entries_;
  bool overridden_ = false;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace cli
