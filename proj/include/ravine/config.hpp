// Copyright 2026 The ravine Authors
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

#ifndef RAVINE_CONFIG_HPP_
#define RAVINE_CONFIG_HPP_

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ravine/errors.hpp"

namespace ravine {

// Experiment configuration: flat INI sections of key = value lines.
// '#' starts a comment; ';' comments out a whole line. Unknown sections and keys are errors.

/// A step length given either as a number or as a multiple of 1/L ("0.5/L").
struct StepValue {
  double value = 1.0;
  bool per_lipschitz = true;

  double resolve(double lipschitz) const { return per_lipschitz ? value / lipschitz : value; }
  friend bool operator==(const StepValue&, const StepValue&) = default;
};

struct ProblemConfig {
  std::string kind = "quadratic";     // quadratic | least_squares | logistic_regression
  std::string source = "generator";   // generator | inline | file
  long dim = 10;
  std::string spectrum = "log";       // log | power
  std::vector<double> spectrum_range{1.0, 1e-3};
  double spectrum_power = 1.0;        // lambda_i = i^-power for spectrum = power
  bool rotate = true;
  std::string minimizer = "random";   // random | zero | ones | profile
  double profile_beta = 1.0;
  long samples = 50;
  long rank = 0;                      // 0 means full rank
  double ridge = 0.0;
  std::uint64_t seed = 1;
  std::string matrix;                 // inline rows "a,b;c,d"
  std::string vector;
  std::string matrix_file;
  std::string vector_file;
  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct ScheduleConfig {
  std::string kind = "nesterov_offset";  // nesterov_offset | nesterov_ratio | power | constant
  double alpha = 3.0;
  double r = 0.5;
  bool clamp = true;
  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct NoiseConfig {
  std::string family = "none";        // none | gaussian
  std::string schedule = "constant";  // constant | polynomial
  double sigma0 = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct StepConfig {
  std::string rule = "constant";  // constant | poly
  StepValue s0{};
  double d = 0.0;
  friend bool operator==(const StepConfig&, const StepConfig&) = default;
};

struct RunSection {
  std::string method = "nag";  // nag | rag
  long iterations = 1000;
  std::uint64_t seed = 0;
  long record_every = 1;
  std::string x0 = "ones";     // ones | zeros | comma list
  std::string step_policy = "enforce";
  friend bool operator==(const RunSection&, const RunSection&) = default;
};

struct DiagnosticsConfig {
  std::vector<std::string> energies{"V", "W", "E"};
  std::vector<long> rate_window;  // empty: [K/10, K]
  friend bool operator==(const DiagnosticsConfig&, const DiagnosticsConfig&) = default;
};

struct OdeConfig {
  std::string damping = "alpha_over_t";  // alpha_over_t | constant
  double alpha = 4.0;
  double gamma0 = 1.0;
  double horizon = 30.0;
  double offset = 1.0;
  std::vector<double> s_values{0.1, 0.025, 0.00625};
  double t_min = 1.0;
  friend bool operator==(const OdeConfig&, const OdeConfig&) = default;
};

struct RunConfig {
  ProblemConfig problem;
  ScheduleConfig schedule;
  NoiseConfig noise;
  StepConfig stepsize;
  RunSection run;
  DiagnosticsConfig diagnostics;
  OdeConfig ode;
  std::string base_dir;  // for resolving relative file paths; not serialized
  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.problem == b.problem && a.schedule == b.schedule && a.noise == b.noise &&
           a.stepsize == b.stepsize && a.run == b.run && a.diagnostics == b.diagnostics &&
           a.ode == b.ode;
  }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string where(int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : "";
}

inline double to_double(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError(where(line) + key + ": expected a number, got '" + v + "'");
  }
  return x;
}

inline long to_long(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(where(line) + key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

inline std::uint64_t to_u64(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE) {
    throw ConfigError(where(line) + key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return x;
}

inline bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(where(line) + key + ": expected true or false, got '" + v + "'");
}

inline std::string one_of(const std::string& v, const std::string& key, int line,
                          std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return v;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(where(line) + key + ": '" + v + "' is not one of " + list);
}

inline std::vector<double> to_doubles(const std::string& v, const std::string& key, int line) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(item, key, line));
  return out;
}

inline StepValue to_step(const std::string& v, const std::string& key, int line) {
  if (v.size() >= 2 && v.substr(v.size() - 2) == "/L") {
    return {to_double(trim(v.substr(0, v.size() - 2)), key, line), true};
  }
  return {to_double(v, key, line), false};
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string join(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) out += (out.empty() ? "" : ",") + fmt(x);
  return out;
}

}  // namespace config_detail

/// Keys that take a single scalar value (valid sweep axes).
inline bool is_scalar_key(const std::string& section, const std::string& key) {
  static const char* lists[] = {"problem.spectrum_range", "problem.matrix", "problem.vector",
                                "run.x0", "diagnostics.energies", "diagnostics.rate_window",
                                "ode.s_values"};
  const std::string full = section + "." + key;
  return std::none_of(std::begin(lists), std::end(lists),
                      [&](const char* l) { return full == l; });
}

inline const std::vector<std::pair<std::string, std::vector<std::string>>>& config_keys() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> keys = {
      {"problem",
       {"kind", "source", "dim", "spectrum", "spectrum_range", "spectrum_power", "rotate",
        "minimizer", "profile_beta", "samples", "rank", "ridge", "seed", "matrix", "vector",
        "matrix_file", "vector_file"}},
      {"schedule", {"kind", "alpha", "r", "clamp"}},
      {"noise", {"family", "schedule", "sigma0", "p", "seed"}},
      {"stepsize", {"rule", "s0", "d"}},
      {"run", {"method", "iterations", "seed", "record_every", "x0", "step_policy"}},
      {"diagnostics", {"energies", "rate_window"}},
      {"ode", {"damping", "alpha", "gamma0", "horizon", "offset", "s_values", "t_min"}},
  };
  return keys;
}

/// Sets one key; `line` is used in error messages (0 when not from a file).
inline void apply_setting(RunConfig& c, const std::string& section, const std::string& key,
                          const std::string& value, int line = 0) {
  using namespace config_detail;
  const std::string name = section + "." + key;
  auto& P = c.problem;
  auto& S = c.schedule;
  auto& N = c.noise;
  auto& Z = c.stepsize;
  auto& R = c.run;
  auto& D = c.diagnostics;
  auto& O = c.ode;
  if (section == "problem") {
    if (key == "kind") P.kind = one_of(value, name, line, {"quadratic", "least_squares", "logistic_regression"});
    else if (key == "source") P.source = one_of(value, name, line, {"generator", "inline", "file"});
    else if (key == "dim") P.dim = to_long(value, name, line);
    else if (key == "spectrum") P.spectrum = one_of(value, name, line, {"log", "power"});
    else if (key == "spectrum_range") P.spectrum_range = to_doubles(value, name, line);
    else if (key == "spectrum_power") P.spectrum_power = to_double(value, name, line);
    else if (key == "rotate") P.rotate = to_bool(value, name, line);
    else if (key == "minimizer") P.minimizer = one_of(value, name, line, {"random", "zero", "ones", "profile"});
    else if (key == "profile_beta") P.profile_beta = to_double(value, name, line);
    else if (key == "samples") P.samples = to_long(value, name, line);
    else if (key == "rank") P.rank = to_long(value, name, line);
    else if (key == "ridge") P.ridge = to_double(value, name, line);
    else if (key == "seed") P.seed = to_u64(value, name, line);
    else if (key == "matrix") P.matrix = value;
    else if (key == "vector") P.vector = value;
    else if (key == "matrix_file") P.matrix_file = value;
    else if (key == "vector_file") P.vector_file = value;
    else throw ConfigError(where(line) + "unknown key '" + name + "'");
  } else if (section == "schedule") {
    if (key == "kind") S.kind = one_of(value, name, line, {"nesterov_offset", "nesterov_ratio", "power", "constant"});
    else if (key == "alpha") S.alpha = to_double(value, name, line);
    else if (key == "r") S.r = to_double(value, name, line);
    else if (key == "clamp") S.clamp = to_bool(value, name, line);
    else throw ConfigError(where(line) + "unknown key '" + name + "'");
  } else if (section == "noise") {
    if (key == "family") N.family = one_of(value, name, line, {"none", "gaussian"});
    else if (key == "schedule") N.schedule = one_of(value, name, line, {"constant", "polynomial"});
    else if (key == "sigma0") N.sigma0 = to_double(value, name, line);
    else if (key == "p") N.p = to_double(value, name, line);
    else if (key == "seed") N.seed = to_u64(value, name, line);
    else throw ConfigError(where(line) + "unknown key '" + name + "'");
  } else if (section == "stepsize") {
    if (key == "rule") Z.rule = one_of(value, name, line, {"constant", "poly"});
    else if (key == "s0") Z.s0 = to_step(value, name, line);
    else if (key == "d") Z.d = to_double(value, name, line);
    else throw ConfigError(where(line) + "unknown key '" + name + "'");
  } else if (section == "run") {
    if (key == "method") R.method = one_of(value, name, line, {"nag", "rag"});
    else if (key == "iterations") R.iterations = to_long(value, name, line);
    else if (key == "seed") R.seed = to_u64(value, name, line);
    else if (key == "record_every") R.record_every = to_long(value, name, line);
    else if (key == "x0") {
      if (value != "ones" && value != "zeros") to_doubles(value, name, line);
      R.x0 = value;
    } else if (key == "step_policy") R.step_policy = one_of(value, name, line, {"enforce", "warn"});
    else throw ConfigError(where(line) + "unknown key '" + name + "'");
  } else if (section == "diagnostics") {
    if (key == "energies") {
      D.energies.clear();
      for (const auto& e : split(value, ',')) {
        if (!e.empty()) D.energies.push_back(one_of(e, name, line, {"V", "W", "E"}));
      }
    } else if (key == "rate_window") {
      D.rate_window.clear();
      for (const auto& e : split(value, ',')) D.rate_window.push_back(to_long(e, name, line));
      if (!D.rate_window.empty() && D.rate_window.size() != 2) {
        throw ConfigError(where(line) + name + ": expected 'k_lo,k_hi'");
      }
    } else {
      throw ConfigError(where(line) + "unknown key '" + name + "'");
    }
  } else if (section == "ode") {
    if (key == "damping") O.damping = one_of(value, name, line, {"alpha_over_t", "constant"});
    else if (key == "alpha") O.alpha = to_double(value, name, line);
    else if (key == "gamma0") O.gamma0 = to_double(value, name, line);
    else if (key == "horizon") O.horizon = to_double(value, name, line);
    else if (key == "offset") O.offset = to_double(value, name, line);
    else if (key == "s_values") O.s_values = to_doubles(value, name, line);
    else if (key == "t_min") O.t_min = to_double(value, name, line);
    else throw ConfigError(where(line) + "unknown key '" + name + "'");
  } else {
    throw ConfigError(where(line) + "unknown section [" + section + "]");
  }
}

/// Range checks that do not need the problem instance.
inline void validate_basic(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.problem.dim < 1 && c.problem.source == "generator") fail("problem.dim must be >= 1");
  if (c.problem.spectrum_range.size() != 2) fail("problem.spectrum_range must be 'hi,lo'");
  if (c.run.iterations < 1) fail("run.iterations must be >= 1");
  if (c.run.record_every < 1) fail("run.record_every must be >= 1");
  if (!(c.stepsize.s0.value > 0.0)) fail("stepsize.s0 must be > 0");
  if (c.stepsize.d < 0.0) fail("stepsize.d must be >= 0");
  if (c.noise.family == "gaussian" && c.noise.sigma0 < 0.0) fail("noise.sigma0 must be >= 0");
  if (c.ode.horizon <= 0.0) fail("ode.horizon must be > 0");
  for (double s : c.ode.s_values) {
    if (!(s > 0.0)) fail("ode.s_values must be positive");
  }
}

inline RunConfig parse_config_text(const std::string& text, const std::string& base_dir = "") {
  using config_detail::trim;
  RunConfig c;
  c.base_dir = base_dir;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // ';' separates inline matrix rows, so it only comments out whole lines.
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (!s.empty() && s.front() == ';') continue;
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      const auto& keys = config_keys();
      if (std::none_of(keys.begin(), keys.end(), [&](const auto& kv) { return kv.first == section; })) {
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(line) + ": key outside any section");
    apply_setting(c, section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
  }
  validate_basic(c);
  return c;
}

inline RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto slash = path.find_last_of('/');
  return parse_config_text(buf.str(), slash == std::string::npos ? "" : path.substr(0, slash + 1));
}

/// Canonical text with every key written out; parse(emit(c)) == c.
inline std::string emit_config(const RunConfig& c) {
  using config_detail::fmt;
  using config_detail::join;
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  const auto& P = c.problem;
  o << "[problem]\nkind = " << P.kind << "\nsource = " << P.source << "\ndim = " << P.dim
    << "\nspectrum = " << P.spectrum << "\nspectrum_range = " << join(P.spectrum_range)
    << "\nspectrum_power = " << fmt(P.spectrum_power) << "\nrotate = " << b(P.rotate)
    << "\nminimizer = " << P.minimizer << "\nprofile_beta = " << fmt(P.profile_beta)
    << "\nsamples = " << P.samples << "\nrank = " << P.rank << "\nridge = " << fmt(P.ridge)
    << "\nseed = " << P.seed << '\n';
  if (!P.matrix.empty()) o << "matrix = " << P.matrix << '\n';
  if (!P.vector.empty()) o << "vector = " << P.vector << '\n';
  if (!P.matrix_file.empty()) o << "matrix_file = " << P.matrix_file << '\n';
  if (!P.vector_file.empty()) o << "vector_file = " << P.vector_file << '\n';
  const auto& S = c.schedule;
  o << "\n[schedule]\nkind = " << S.kind << "\nalpha = " << fmt(S.alpha) << "\nr = " << fmt(S.r)
    << "\nclamp = " << b(S.clamp) << '\n';
  const auto& N = c.noise;
  o << "\n[noise]\nfamily = " << N.family << "\nschedule = " << N.schedule
    << "\nsigma0 = " << fmt(N.sigma0) << "\np = " << fmt(N.p) << "\nseed = " << N.seed << '\n';
  const auto& Z = c.stepsize;
  o << "\n[stepsize]\nrule = " << Z.rule << "\ns0 = " << fmt(Z.s0.value)
    << (Z.s0.per_lipschitz ? "/L" : "") << "\nd = " << fmt(Z.d) << '\n';
  const auto& R = c.run;
  o << "\n[run]\nmethod = " << R.method << "\niterations = " << R.iterations
    << "\nseed = " << R.seed << "\nrecord_every = " << R.record_every << "\nx0 = " << R.x0
    << "\nstep_policy = " << R.step_policy << '\n';
  const auto& D = c.diagnostics;
  std::string energies;
  for (const auto& e : D.energies) energies += (energies.empty() ? "" : ",") + e;
  o << "\n[diagnostics]\nenergies = " << energies << '\n';
  if (!D.rate_window.empty()) {
    o << "rate_window = " << D.rate_window[0] << ',' << D.rate_window[1] << '\n';
  }
  const auto& O = c.ode;
  o << "\n[ode]\ndamping = " << O.damping << "\nalpha = " << fmt(O.alpha)
    << "\ngamma0 = " << fmt(O.gamma0) << "\nhorizon = " << fmt(O.horizon)
    << "\noffset = " << fmt(O.offset) << "\ns_values = " << join(O.s_values)
    << "\nt_min = " << fmt(O.t_min) << '\n';
  return o.str();
}

/// Resolves a sweep axis, either "section.key" or a key that names exactly
/// one section. Returns {section, key}.
inline std::pair<std::string, std::string> resolve_axis(const std::string& axis) {
  const auto dot = axis.find('.');
  std::vector<std::pair<std::string, std::string>> hits;
  for (const auto& [section, keys] : config_keys()) {
    for (const auto& key : keys) {
      if (dot != std::string::npos ? axis == section + "." + key : axis == key) {
        hits.emplace_back(section, key);
      }
    }
  }
  if (hits.empty()) throw ConfigError("sweep: unknown axis '" + axis + "'");
  if (hits.size() > 1) {
    throw ConfigError("sweep: axis '" + axis + "' is ambiguous; qualify it as section.key");
  }
  if (!is_scalar_key(hits[0].first, hits[0].second)) {
    throw ConfigError("sweep: axis '" + axis + "' is not a scalar key");
  }
  return hits[0];
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ravine

#endif  // RAVINE_CONFIG_HPP_
