#include "sprox/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "sprox/constraint.hpp"
#include "sprox/errors.hpp"

namespace sprox {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v, const std::string& key, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'", line);
  }
  return out;
}

long to_long(const std::string& v, const std::string& key, int line) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'", line);
  }
  return out;
}

std::uint64_t to_u64(const std::string& v, const std::string& key, int line) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    if (!v.empty() && v[0] != '-') out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'", line);
  }
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&, int)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field text_field(T ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string&, const std::string& v, int) { c.*m = v; },
          [m](const ExperimentConfig& c) { return "\"" + c.*m + "\""; }};
}

Field real_field(double ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
            c.*m = to_double(v, key, line);
          },
          [m](const ExperimentConfig& c) { return fmt(c.*m); }};
}

Field int_field(long ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
            c.*m = to_long(v, key, line);
          },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field u64_field(std::uint64_t ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
            c.*m = to_u64(v, key, line);
          },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field auto_field(std::optional<double> ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
            if (v == "auto") {
              c.*m = std::nullopt;
            } else {
              c.*m = to_double(v, key, line);
            }
          },
          [m](const ExperimentConfig& c) { return (c.*m) ? fmt(*(c.*m)) : "auto"; }};
}

// Serialization order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"problem", text_field(&ExperimentConfig::problem)},
      {"dim", int_field(&ExperimentConfig::dim)},
      {"rows", int_field(&ExperimentConfig::rows)},
      {"cols", int_field(&ExperimentConfig::cols)},
      {"samples", int_field(&ExperimentConfig::samples)},
      {"features", int_field(&ExperimentConfig::features)},
      {"cond", real_field(&ExperimentConfig::cond)},
      {"target_scale", real_field(&ExperimentConfig::target_scale)},
      {"spectrum", text_field(&ExperimentConfig::spectrum)},
      {"spectrum_beta", real_field(&ExperimentConfig::spectrum_beta)},
      {"problem_seed", u64_field(&ExperimentConfig::problem_seed)},
      {"noise", text_field(&ExperimentConfig::noise)},
      {"noise_sigma", real_field(&ExperimentConfig::noise_sigma)},
      {"noise_df", real_field(&ExperimentConfig::noise_df)},
      {"noise_p", real_field(&ExperimentConfig::noise_p)},
      {"reference", text_field(&ExperimentConfig::reference)},
      {"structure", text_field(&ExperimentConfig::structure)},
      {"epsilon", real_field(&ExperimentConfig::epsilon)},
      {"kappa", real_field(&ExperimentConfig::kappa)},
      {"constraint", text_field(&ExperimentConfig::constraint)},
      {"radius", real_field(&ExperimentConfig::radius)},
      {"sparsity", int_field(&ExperimentConfig::sparsity)},
      {"mode", text_field(&ExperimentConfig::mode)},
      {"gamma", auto_field(&ExperimentConfig::gamma)},
      {"gamma_bar", real_field(&ExperimentConfig::gamma_bar)},
      {"horizon", int_field(&ExperimentConfig::horizon)},
      {"eps_hat", auto_field(&ExperimentConfig::eps_hat)},
      {"poly_schedule", text_field(&ExperimentConfig::poly_schedule)},
      {"x0", text_field(&ExperimentConfig::x0)},
      {"x0_scale", real_field(&ExperimentConfig::x0_scale)},
      {"seed", u64_field(&ExperimentConfig::seed)},
      {"repetitions", int_field(&ExperimentConfig::repetitions)},
      {"output", text_field(&ExperimentConfig::output)},
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : fields()) {
    if (k == key) return &f;
  }
  return nullptr;
}

void require_one_of(const std::string& key, const std::string& v,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(key + ": '" + v + "' is not one of " + list);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    // '#' outside quotes starts a comment.
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) {
        s.erase(i);
        break;
      }
    }
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = unquote(trim(s.substr(eq + 1)));
    const Field* f = find_field(key);
    if (!f) throw ConfigError("unknown key '" + key + "'", line);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line);
    f->set(c, key, value, line);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  for (const auto& [k, f] : fields()) os << k << " = " << f.get(c) << "\n";
  return os.str();
}

void check_config(const ExperimentConfig& c) {
  require_one_of("problem", c.problem, {"quadratic", "logistic", "matrix_quadratic"});
  require_one_of("spectrum", c.spectrum, {"log", "power"});
  require_one_of("noise", c.noise, {"none", "gaussian", "student_t"});
  require_one_of("reference", c.reference, {"barrier", "hyper_kappa"});
  require_one_of("structure", c.structure, {"aniso", "iso", "spectral_aniso", "spectral_iso"});
  require_one_of("mode", c.mode, {"deterministic", "polyak", "storm", "polar"});
  require_one_of("x0", c.x0, {"zero", "random"});
  if (!set_kind_from_string(c.constraint)) {
    throw ConfigError("constraint: unknown set '" + c.constraint + "'");
  }
  if (c.dim < 1 || c.rows < 1 || c.cols < 1 || c.samples < 1 || c.features < 1) {
    throw ConfigError("dimensions must be >= 1");
  }
  if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (c.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(c.kappa >= 1.0)) throw ConfigError("kappa must be >= 1");
  if (!(c.cond >= 1.0)) throw ConfigError("cond must be >= 1");
  if (!(c.spectrum_beta > 0.0) || !std::isfinite(c.spectrum_beta)) {
    throw ConfigError("spectrum_beta must be positive");
  }
  if (c.gamma && !(*c.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(c.gamma_bar > 0.0)) throw ConfigError("gamma_bar must be positive");
  if (c.eps_hat && !(*c.eps_hat > 0.0)) throw ConfigError("eps_hat must be positive");
  if (c.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (c.noise == "student_t" && !(c.noise_df > c.noise_p && c.noise_p > 1.0 && c.noise_p <= 2.0)) {
    throw ConfigError("student_t noise needs 1 < noise_p <= 2 and noise_df > noise_p");
  }
  if (c.output.empty()) throw ConfigError("output must be set");
}

}  // namespace sprox
