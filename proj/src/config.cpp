// Copyright 2026 The cvpurify Authors
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

#include "cvpurify/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cvpurify/errors.hpp"
#include "cvpurify/qnd.hpp"

namespace cvpurify {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Kind { Int, Real, RealList, Choice, Bool };

using E = Experiment;

struct KeySpec {
  std::string name;
  Kind kind;
  std::optional<ConfigValue> fallback;  // nullopt: optional key without default
  std::set<Experiment> experiments;
  std::string help;
  // Returns an empty string when the value is acceptable.
  std::function<std::string(const ConfigValue&, Experiment)> check;
  std::vector<std::string> choices;
};

std::string describe_range(const char* what, double v) {
  return std::string(what) + " (got " + format_real(v) + ")";
}

auto real_check(std::function<bool(double)> ok, const char* what) {
  return [ok, what](const ConfigValue& v, Experiment) -> std::string {
    const double x = std::get<double>(v);
    return ok(x) ? std::string() : describe_range(what, x);
  };
}

auto int_check(std::int64_t lo, std::int64_t hi) {
  return [lo, hi](const ConfigValue& v, Experiment) -> std::string {
    const auto x = std::get<std::int64_t>(v);
    if (x >= lo && x <= hi) return {};
    return "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] (got " +
           std::to_string(x) + ")";
  };
}

// r = 0 is allowed only where the experiment stays defined there.
std::string squeezing_check(double x, Experiment e) {
  const bool allow_zero = e != E::Fig2 && e != E::Fig4;
  if (!std::isfinite(x) || x < 0.0 || (x == 0.0 && !allow_zero) || x > 3.0) {
    return describe_range(allow_zero ? "must lie in [0, 3]" : "must lie in (0, 3]", x);
  }
  return {};
}

const std::set<Experiment> kFigures{E::Fig2, E::Fig3, E::Fig4};
const std::set<Experiment> kQnd{E::QndBudget, E::QndSimulate, E::EndToEnd};
const std::set<Experiment> kLossy{E::PurifyLossy, E::EndToEnd};

std::set<Experiment> every_experiment() {
  const auto& all = all_experiments();
  return {all.begin(), all.end()};
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    const QndParams ref = QndParams::reference();
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    auto nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
    std::vector<KeySpec> s;
    s.push_back({"seed", Kind::Int, ConfigValue(std::int64_t{1}), every_experiment(),
                 "master seed", int_check(0, std::numeric_limits<std::int64_t>::max()), {}});
    s.push_back({"r_values", Kind::RealList, ConfigValue(std::vector<double>{0.5, 1.0, 1.5}),
                 kFigures, "squeezing parameters, comma separated",
                 [](const ConfigValue& v, Experiment e) -> std::string {
                   const auto& xs = std::get<std::vector<double>>(v);
                   if (xs.empty()) return "must not be empty";
                   for (double x : xs) {
                     auto msg = squeezing_check(x, e);
                     if (!msg.empty()) return msg;
                   }
                   return {};
                 },
                 {}});
    s.push_back({"r", Kind::Real, std::nullopt,
                 {E::Fig2, E::Fig3, E::Fig4, E::Concentrate, E::PurifyLossy, E::EndToEnd},
                 "squeezing parameter (replaces r_values in figure runs)",
                 [](const ConfigValue& v, Experiment e) {
                   return squeezing_check(std::get<double>(v), e);
                 },
                 {}});
    s.push_back({"m", Kind::Int, std::nullopt,
                 {E::Fig2, E::Fig3, E::Concentrate, E::PurifyLossy, E::EndToEnd},
                 "number of squeezed pairs", int_check(1, 64), {}});
    s.push_back({"m_min", Kind::Int, ConfigValue(std::int64_t{1}), {E::Fig4},
                 "smallest number of pairs", int_check(1, 200), {}});
    s.push_back({"m_max", Kind::Int, ConfigValue(std::int64_t{20}), {E::Fig4},
                 "largest number of pairs", int_check(1, 200), {}});
    s.push_back({"tail", Kind::Real, ConfigValue(1e-10),
                 {E::Fig2, E::Fig3, E::Fig4, E::PurifyLossy},
                 "probability tail left out of outcome sums",
                 real_check([](double x) { return x > 0.0 && x <= 1e-3; }, "must lie in (0, 1e-3]"),
                 {}});
    s.push_back({"cutoff", Kind::Int, std::nullopt, {E::Concentrate, E::EndToEnd},
                 "Fock cutoff per mode", int_check(1, 200), {}});
    s.push_back({"trials", Kind::Int, std::nullopt,
                 {E::Concentrate, E::PurifyLossy, E::QndSimulate, E::EndToEnd},
                 "Monte-Carlo trials", int_check(1, 100'000'000), {}});
    s.push_back({"eta_A_tau", Kind::Real, ConfigValue(0.05), kLossy,
                 "transmission loss eta_A tau of side A", real_check(nonneg, "must be >= 0"), {}});
    s.push_back({"eta_B_tau", Kind::Real, ConfigValue(0.05), kLossy,
                 "transmission loss eta_B tau of side B", real_check(nonneg, "must be >= 0"), {}});
    s.push_back({"eta0_over_kappac", Kind::Real, ConfigValue(0.0), kLossy,
                 "NOPA internal loss eta_0 / kappa_c", real_check(nonneg, "must be >= 0"), {}});

    auto qnd_real = [&](const char* name, double def, bool strictly_positive, const char* help) {
      s.push_back({name, Kind::Real, ConfigValue(def), kQnd, help,
                   strictly_positive ? real_check(pos, "must be > 0")
                                     : real_check(nonneg, "must be >= 0"),
                   {}});
    };
    qnd_real("gamma", ref.gamma, true, "ring-cavity damping, rad/s");
    qnd_real("chi", ref.chi, true, "cross-phase coefficient, rad/s");
    qnd_real("g_mag", ref.g_mag, true, "drive amplitude |g|");
    qnd_real("kappa", ref.kappa, false, "good-cavity damping, rad/s");
    qnd_real("T", ref.T, true, "measuring time, s");
    qnd_real("delta_t", ref.delta_t, false, "drive phase-variance growth rate, 1/s");
    qnd_real("beta1", ref.beta1, false, "leak rate of ring cavity 1, rad/s");
    qnd_real("beta2", ref.beta2, false, "leak rate of ring cavity 2, rad/s");
    s.push_back({"mu", Kind::Real, ConfigValue(ref.mu), kQnd, "coupling efficiency",
                 real_check([](double x) { return x >= 0.0 && x <= 1.0; }, "must lie in [0, 1]"),
                 {}});
    s.push_back({"nu", Kind::Real, ConfigValue(ref.nu), kQnd, "detector efficiency",
                 real_check([](double x) { return x > 0.0 && x <= 1.0; }, "must lie in (0, 1]"),
                 {}});
    qnd_real("chi_i", ref.chi_i, false, "two-photon absorption, rad/s");
    for (const char* name : {"gamma1", "gamma2", "chi1", "chi2"}) {
      s.push_back({name, Kind::Real, std::nullopt, kQnd,
                   "per-cavity value (defaults to the common gamma or chi)",
                   real_check(pos, "must be > 0"), {}});
    }
    qnd_real("n1", ref.n1, false, "<n_1>");
    qnd_real("n2", ref.n2, false, "<n_2>");
    s.push_back({"j_max", Kind::Int, ConfigValue(std::int64_t{5}), {E::QndSimulate},
                 "largest true photon number simulated", int_check(0, 1000), {}});
    s.push_back({"qnd", Kind::Choice, ConfigValue(std::string("ideal")), {E::EndToEnd},
                 "QND readout model", nullptr, {"ideal", "noisy"}});
    s.push_back({"sampler", Kind::Choice, ConfigValue(std::string("fock")), {E::EndToEnd},
                 "state model", nullptr, {"fock", "closed-form"}});
    s.push_back({"ordering", Kind::Choice, ConfigValue(std::string("simultaneous")),
                 {E::EndToEnd}, "measurement order of the two sides", nullptr,
                 {"simultaneous", "posterior"}});

    auto eit = [&](const char* name, double def, bool strictly_positive, const char* help) {
      s.push_back({name, Kind::Real, ConfigValue(def), {E::EitKerr}, help,
                   strictly_positive ? real_check(pos, "must be > 0")
                                     : real_check(nonneg, "must be >= 0"),
                   {}});
    };
    eit("g13", kTwoPi * 1e4, false, "probe coupling g_13, rad/s");
    eit("g24", kTwoPi * 1e7, false, "signal coupling g_24, rad/s");
    eit("omega_c", kTwoPi * 1e7, true, "control Rabi frequency, rad/s");
    eit("delta_42", 10.0 * kTwoPi * 3e7, true, "detuning Delta_42, rad/s");
    eit("gamma_42", kTwoPi * 3e7, false, "decay gamma_42, rad/s");
    eit("n_atom", 2e5, false, "number of atoms");
    s.push_back({"plot_script", Kind::Bool, ConfigValue(false), kFigures,
                 "also write a gnuplot script", nullptr, {}});
    return s;
  }();
  return specs;
}

// Per-experiment defaults for keys shared with different meanings of "typical".
std::optional<ConfigValue> experiment_default(const std::string& key, Experiment e) {
  if (key == "m") {
    switch (e) {
      case E::Fig3: return ConfigValue(std::int64_t{4});
      case E::EndToEnd: return ConfigValue(std::int64_t{1});
      default: return ConfigValue(std::int64_t{2});
    }
  }
  if (key == "r") {
    if (e == E::Concentrate) return ConfigValue(1.0);
    if (e == E::PurifyLossy || e == E::EndToEnd) return ConfigValue(0.5);
    return std::nullopt;
  }
  if (key == "cutoff") return ConfigValue(std::int64_t{e == E::EndToEnd ? 6 : 8});
  if (key == "trials") {
    switch (e) {
      case E::Concentrate: return ConfigValue(std::int64_t{1000});
      case E::PurifyLossy: return ConfigValue(std::int64_t{100000});
      case E::QndSimulate: return ConfigValue(std::int64_t{10000});
      default: return ConfigValue(std::int64_t{2000});
    }
  }
  return std::nullopt;
}

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : key_specs()) {
    if (s.name == key) return &s;
  }
  return nullptr;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

// Returns nullopt and sets `problem` on a type error.
std::optional<ConfigValue> parse_value(const KeySpec& spec, const std::string& text,
                                       std::string& problem) {
  switch (spec.kind) {
    case Kind::Int:
      if (auto v = parse_int(text)) return ConfigValue(*v);
      problem = "expected an integer, got '" + text + "'";
      return std::nullopt;
    case Kind::Real:
      if (auto v = parse_real(text)) return ConfigValue(*v);
      problem = "expected a finite real number, got '" + text + "'";
      return std::nullopt;
    case Kind::RealList: {
      std::vector<double> xs;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = parse_real(item);
        if (!v) {
          problem = "expected a comma-separated list of reals, got '" + text + "'";
          return std::nullopt;
        }
        xs.push_back(*v);
      }
      return ConfigValue(std::move(xs));
    }
    case Kind::Choice: {
      const std::string t = trim(text);
      if (std::find(spec.choices.begin(), spec.choices.end(), t) != spec.choices.end()) {
        return ConfigValue(t);
      }
      problem = "expected one of";
      for (const auto& c : spec.choices) problem += " " + c;
      problem += ", got '" + text + "'";
      return std::nullopt;
    }
    case Kind::Bool: {
      const std::string t = trim(text);
      if (t == "true" || t == "1" || t == "yes") return ConfigValue(true);
      if (t == "false" || t == "0" || t == "no") return ConfigValue(false);
      problem = "expected true or false, got '" + text + "'";
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct RawEntry {
  std::string key;
  std::string value;
  std::string origin;
};

void read_ini(const ConfigInput& in, std::vector<RawEntry>& out, std::vector<std::string>& problems) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(*in.file_text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    problems.push_back(in.file_name + ": " + e.message() + " (line " + std::to_string(e.line()) +
                       ")");
    return;
  }
  std::set<std::string> seen;
  auto add = [&](const std::string& key, const std::string& value, const std::string& where) {
    if (!seen.insert(key).second) {
      problems.push_back(in.file_name + ": key '" + key + "' given more than once");
      return;
    }
    out.push_back({key, value, in.file_name + where});
  };
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      add(name, node.data(), "");
      continue;
    }
    for (const auto& [key, leaf] : node) add(key, leaf.data(), " [" + name + "]");
  }
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::invalid_argument([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(problems) {}

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case E::Fig2: return "fig2";
    case E::Fig3: return "fig3";
    case E::Fig4: return "fig4";
    case E::Concentrate: return "concentrate";
    case E::PurifyLossy: return "purify-lossy";
    case E::QndBudget: return "qnd-budget";
    case E::QndSimulate: return "qnd-simulate";
    case E::EitKerr: return "eit-kerr";
    case E::EndToEnd: return "end-to-end";
  }
  return "?";
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all{E::Fig2,        E::Fig3,      E::Fig4,
                                           E::Concentrate, E::PurifyLossy, E::QndBudget,
                                           E::QndSimulate, E::EitKerr,   E::EndToEnd};
  return all;
}

std::optional<Experiment> experiment_from_name(std::string_view name) {
  for (auto e : all_experiments()) {
    if (experiment_name(e) == name) return e;
  }
  return std::nullopt;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_value(const ConfigValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(x);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string s;
          for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + format_real(x[i]);
          return s;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return x;
        }
      },
      v);
}

namespace {

template <class T>
const T& lookup(const RunConfig& c, const std::string& key) {
  auto it = c.values.find(key);
  if (it == c.values.end()) throw DomainError("configuration has no key '" + key + "'");
  if (const T* p = std::get_if<T>(&it->second)) return *p;
  throw DomainError("configuration key '" + key + "' has a different type");
}

}  // namespace

double RunConfig::real(const std::string& key) const { return lookup<double>(*this, key); }
std::int64_t RunConfig::integer(const std::string& key) const {
  return lookup<std::int64_t>(*this, key);
}
const std::vector<double>& RunConfig::reals(const std::string& key) const {
  return lookup<std::vector<double>>(*this, key);
}
const std::string& RunConfig::text(const std::string& key) const {
  return lookup<std::string>(*this, key);
}
bool RunConfig::flag(const std::string& key) const { return lookup<bool>(*this, key); }
std::uint64_t RunConfig::seed() const { return static_cast<std::uint64_t>(integer("seed")); }

std::vector<std::string> RunConfig::echo() const {
  std::vector<std::string> lines;
  for (const auto& [k, v] : values) lines.push_back(k + "=" + format_value(v));
  return lines;
}

std::vector<KeyDoc> schema(Experiment e) {
  std::vector<KeyDoc> out;
  for (const auto& s : key_specs()) {
    if (!s.experiments.count(e)) continue;
    auto def = s.fallback ? s.fallback : experiment_default(s.name, e);
    static const char* kinds[] = {"int", "real", "real list", "choice", "bool"};
    std::string type = kinds[static_cast<int>(s.kind)];
    if (s.kind == Kind::Choice) {
      type += " {";
      for (std::size_t i = 0; i < s.choices.size(); ++i) type += (i ? "|" : "") + s.choices[i];
      type += "}";
    }
    out.push_back({s.name, type, def ? format_value(*def) : "", s.help});
  }
  return out;
}

RunConfig parse_config(const ConfigInput& in) {
  std::vector<std::string> problems;
  std::vector<RawEntry> raw;
  if (in.file_text) read_ini(in, raw, problems);
  for (const auto& o : in.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || trim(o.substr(0, eq)).empty()) {
      problems.push_back("--set '" + o + "': expected key=value");
      continue;
    }
    raw.push_back({trim(o.substr(0, eq)), o.substr(eq + 1), "--set"});
  }

  // Experiment: positional argument, or an `experiment` key.
  std::optional<std::string> exp_name = in.experiment;
  std::vector<RawEntry> entries;
  for (auto& r : raw) {
    if (r.key != "experiment") {
      entries.push_back(std::move(r));
      continue;
    }
    const std::string v = trim(r.value);
    if (exp_name && *exp_name != v) {
      problems.push_back(r.origin + ": experiment '" + v + "' conflicts with '" + *exp_name + "'");
    } else {
      exp_name = v;
    }
  }
  RunConfig cfg;
  if (!exp_name) {
    problems.push_back("no experiment given");
    throw ConfigError(problems);
  }
  if (auto e = experiment_from_name(*exp_name)) {
    cfg.experiment = *e;
  } else {
    problems.push_back("unknown experiment '" + *exp_name + "'");
    throw ConfigError(problems);
  }
  const Experiment e = cfg.experiment;

  if (in.format == "csv") {
    cfg.format = OutputFormat::Csv;
  } else if (in.format == "tsv") {
    cfg.format = OutputFormat::Tsv;
  } else {
    problems.push_back("format must be csv or tsv (got '" + in.format + "')");
  }
  cfg.output_dir = in.output_dir;

  std::set<std::string> explicit_keys;
  for (const auto& r : entries) {
    const KeySpec* spec = find_spec(r.key);
    if (!spec) {
      problems.push_back(r.origin + ": unknown key '" + r.key + "'");
      continue;
    }
    if (!spec->experiments.count(e)) {
      problems.push_back(r.origin + ": key '" + r.key + "' does not apply to experiment '" +
                         std::string(experiment_name(e)) + "'");
      continue;
    }
    std::string problem;
    auto value = parse_value(*spec, r.value, problem);
    if (value && spec->check) problem = spec->check(*value, e);
    if (!problem.empty()) {
      problems.push_back(r.origin + ": key '" + r.key + "' " + problem);
      continue;
    }
    cfg.values[r.key] = *value;  // later entries (flags) override the file
    explicit_keys.insert(r.key);
  }
  if (in.seed) cfg.values["seed"] = ConfigValue(static_cast<std::int64_t>(*in.seed));

  for (const auto& s : key_specs()) {
    if (!s.experiments.count(e) || cfg.values.count(s.name)) continue;
    auto def = s.fallback ? s.fallback : experiment_default(s.name, e);
    if (def) cfg.values[s.name] = *def;
  }

  // Cross-key rules.
  const bool figure = kFigures.count(e) != 0;
  if (figure && cfg.values.count("r")) {
    if (explicit_keys.count("r_values")) {
      problems.push_back("keys 'r' and 'r_values' are mutually exclusive");
    }
    cfg.values["r_values"] = std::vector<double>{std::get<double>(cfg.values["r"])};
    cfg.values.erase("r");
  }
  if (e == E::Fig4 && cfg.has("m_min") && cfg.has("m_max") &&
      cfg.integer("m_min") > cfg.integer("m_max")) {
    problems.push_back("m_min must not exceed m_max");
  }
  if (e == E::EndToEnd && cfg.has("sampler") && cfg.text("sampler") == "fock") {
    if (cfg.has("m") && cfg.integer("m") > 2) {
      problems.push_back("end-to-end with sampler=fock needs m <= 2 (use sampler=closed-form)");
    }
    if (cfg.has("cutoff") && cfg.integer("cutoff") > 8) {
      problems.push_back("end-to-end with sampler=fock needs cutoff <= 8");
    }
  }
  if (kLossy.count(e)) {
    for (const char* k : {"eta_A_tau", "eta_B_tau"}) {
      if (cfg.has(k) && cfg.real(k) + cfg.real("eta0_over_kappac") > 50.0) {
        problems.push_back(std::string("key '") + k + "' gives a loss exponent above 50");
      }
    }
  }

  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

}  // namespace cvpurify
