#pragma once

// TOML experiment manifests.
//
//   [model]    type = "model1" | "model2" | "sir" | "linear" | "custom"
//              lambda, mu, alpha, beta, gamma, n_pop, b, d, b_expr, d_expr, x_max
//   [sim]      replicates, master_seed, max_events, max_time, grid, eps_list,
//              init = { z, x }, trajectories
//   [sweep]    parameter, values (list or "start:stop:step")
//   [outputs]  directory, csv, svg
//   [numeric]  quad_rel_tol, root_tol, ode_rel_tol, bracket_growth, max_iters

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "progeny/error.hpp"
#include "progeny/fluid.hpp"
#include "progeny/models.hpp"
#include "progeny/ssa.hpp"

namespace progeny::cli {

struct SimConfig {
  std::size_t replicates = 1000;
  std::uint64_t master_seed = 0;
  ssa::Caps caps{};
  std::vector<double> grid;
  std::vector<std::int64_t> eps_list;
  ssa::PopState init{};
  std::size_t trajectories = 1;  // full paths written by `simulate`
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool svg = false;
};

struct ExperimentConfig {
  models::RateModel model = models::Model1{1.0, 1.0};
  SimConfig sim;
  std::optional<SweepConfig> sweep;
  OutputConfig outputs;
  fluid::NumericOptions numeric;
  std::filesystem::path source;
};

// Inclusive arithmetic range "start:stop:step"; the count is rounded so that
// stop is reached despite floating-point drift.
inline std::vector<double> parse_range(std::string_view text) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t colon = std::min(text.find(':', pos), text.size());
    std::string_view piece = text.substr(pos, colon - pos);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || res.ec != std::errc{} || res.ptr != piece.data() + piece.size())
      throw ConfigError("malformed range '" + std::string(text) + "': expected start:stop:step");
    parts.push_back(v);
    pos = colon + 1;
  }
  if (parts.size() != 3) throw ConfigError("malformed range '" + std::string(text) + "': expected start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
    throw ConfigError("range '" + std::string(text) + "' needs step > 0 and stop >= start");
  const double count = std::floor((stop - start) / step + 1e-9);
  if (count > 1e7) throw ConfigError("range '" + std::string(text) + "' has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(count); ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

namespace detail {

struct Reader {
  std::vector<std::string> problems;

  static std::string where(const toml::node& n) {
    const auto& src = n.source();
    return "line " + std::to_string(src.begin.line) + ", column " + std::to_string(src.begin.column);
  }

  void unknown_keys(const toml::table& t, const std::string& section, const std::set<std::string>& known) {
    for (const auto& [k, v] : t)
      if (!known.count(std::string(k.str())))
        problems.push_back("[" + section + "] unknown key '" + std::string(k.str()) + "' at " + where(v));
  }

  std::optional<double> number(const toml::table& t, const std::string& section, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (auto s = n->value_exact<std::string>()) {
      if (*s == "inf" || *s == "infinity") return INFINITY;
    }
    if (!n->is_number()) {
      problems.push_back("[" + section + "] " + key + " must be a number at " + where(*n));
      return std::nullopt;
    }
    return n->value<double>();
  }

  std::optional<std::int64_t> integer(const toml::table& t, const std::string& section, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_integer()) {
      problems.push_back("[" + section + "] " + key + " must be an integer at " + where(*n));
      return std::nullopt;
    }
    return n->value<std::int64_t>();
  }

  std::optional<std::string> string(const toml::table& t, const std::string& section, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_string()) {
      problems.push_back("[" + section + "] " + key + " must be a string at " + where(*n));
      return std::nullopt;
    }
    return n->value<std::string>();
  }

  std::optional<bool> boolean(const toml::table& t, const std::string& section, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) {
      problems.push_back("[" + section + "] " + key + " must be true or false at " + where(*n));
      return std::nullopt;
    }
    return n->value<bool>();
  }

  // A list of numbers or a "start:stop:step" string.
  std::optional<std::vector<double>> series(const toml::table& t, const std::string& section, const char* key) {
    const toml::node* n = t.get(key);
    if (!n) return std::nullopt;
    if (auto s = n->value_exact<std::string>()) {
      try {
        return parse_range(*s);
      } catch (const ConfigError& e) {
        problems.push_back("[" + section + "] " + key + ": " + e.what() + " at " + where(*n));
        return std::nullopt;
      }
    }
    if (const auto* arr = n->as_array()) {
      std::vector<double> out;
      for (const auto& el : *arr) {
        if (!el.is_number()) {
          problems.push_back("[" + section + "] " + key + " entries must be numbers at " + where(el));
          return std::nullopt;
        }
        out.push_back(*el.value<double>());
      }
      return out;
    }
    problems.push_back("[" + section + "] " + key + " must be a list or \"start:stop:step\" at " + where(*n));
    return std::nullopt;
  }

  const toml::table* section(const toml::table& root, const char* name, bool required) {
    const toml::node* n = root.get(name);
    if (!n) {
      if (required) problems.push_back("missing [" + std::string(name) + "] section");
      return nullptr;
    }
    if (!n->is_table()) {
      problems.push_back("'" + std::string(name) + "' must be a table at " + where(*n));
      return nullptr;
    }
    return n->as_table();
  }
};

inline const std::set<std::string>& model_keys(const std::string& type) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model1", {"type", "lambda", "mu"}},
      {"model2", {"type", "lambda", "alpha", "mu"}},
      {"sir", {"type", "beta", "gamma", "n_pop"}},
      {"linear", {"type", "b", "d"}},
      {"custom", {"type", "b_expr", "d_expr", "x_max"}},
  };
  static const std::set<std::string> none = {"type"};
  const auto it = keys.find(type);
  return it == keys.end() ? none : it->second;
}

}  // namespace detail

// Names accepted as sweep parameters for a model.
inline std::vector<std::string> sweepable_parameters(const models::RateModel& m) {
  switch (m.index()) {
    case 0: return {"lambda", "mu"};
    case 1: return {"lambda", "alpha", "mu"};
    case 2: return {"beta", "gamma", "n_pop"};
    case 3: return {"b", "d"};
    default: return {"x_max"};
  }
}

// Copy of `m` with one named parameter replaced.
inline models::RateModel set_parameter(models::RateModel m, const std::string& name, double value) {
  bool ok = true;
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, models::Model1>) {
          if (name == "lambda") p.lambda = value;
          else if (name == "mu") p.mu = value;
          else ok = false;
        } else if constexpr (std::is_same_v<T, models::Model2>) {
          if (name == "lambda") p.lambda = value;
          else if (name == "alpha") p.alpha = value;
          else if (name == "mu") p.mu = value;
          else ok = false;
        } else if constexpr (std::is_same_v<T, models::Sir>) {
          if (name == "beta") p.beta = value;
          else if (name == "gamma") p.gamma = value;
          else if (name == "n_pop" && value == std::floor(value) && std::abs(value) < 9e15)
            p.n_pop = static_cast<std::int64_t>(value);
          else ok = false;
        } else if constexpr (std::is_same_v<T, models::LinearBdp>) {
          if (name == "b") p.b = value;
          else if (name == "d") p.d = value;
          else ok = false;
        } else {
          if (name == "x_max") p.x_max = value;
          else ok = false;
        }
      },
      m);
  if (!ok) throw ConfigError("model " + models::model_name(m) + " has no parameter '" + name + "' to sweep");
  return m;
}

inline ExperimentConfig config_from_table(const toml::table& root, const std::filesystem::path& source = {}) {
  detail::Reader r;
  ExperimentConfig cfg;
  cfg.source = source;
  r.unknown_keys(root, "top level", {"model", "sim", "sweep", "outputs", "numeric"});

  if (const auto* mt = r.section(root, "model", true)) {
    const auto type = r.string(*mt, "model", "type");
    if (!type) {
      r.problems.push_back("[model] type is required");
    } else {
      r.unknown_keys(*mt, "model", detail::model_keys(*type));
      auto need = [&](const char* key) {
        auto v = r.number(*mt, "model", key);
        if (!v && !mt->get(key)) r.problems.push_back("[model] " + std::string(key) + " is required for " + *type);
        return v.value_or(NAN);
      };
      if (*type == "model1") {
        cfg.model = models::Model1{need("lambda"), need("mu")};
      } else if (*type == "model2") {
        cfg.model = models::Model2{need("lambda"), need("alpha"), need("mu")};
      } else if (*type == "sir") {
        const double beta = need("beta"), gamma = need("gamma");
        const auto n = r.integer(*mt, "model", "n_pop");
        if (!n && !mt->get("n_pop")) r.problems.push_back("[model] n_pop is required for sir");
        cfg.model = models::Sir{beta, gamma, n.value_or(0)};
      } else if (*type == "linear") {
        cfg.model = models::LinearBdp{need("b"), need("d")};
      } else if (*type == "custom") {
        const auto b = r.string(*mt, "model", "b_expr");
        const auto d = r.string(*mt, "model", "d_expr");
        const double x_max = r.number(*mt, "model", "x_max").value_or(INFINITY);
        if (!b) r.problems.push_back("[model] b_expr is required for custom");
        if (!d) r.problems.push_back("[model] d_expr is required for custom");
        if (b && d) {
          try {
            cfg.model = models::Custom{models::RateExpr::parse(*b), models::RateExpr::parse(*d), x_max};
          } catch (const ParseError& e) {
            r.problems.push_back(std::string("[model] rate expression: ") + e.what());
          }
        }
      } else {
        r.problems.push_back("[model] unknown type '" + *type +
                             "' (expected model1, model2, sir, linear or custom)");
      }
    }
  }

  if (const auto* st = r.section(root, "sim", false)) {
    r.unknown_keys(*st, "sim", {"replicates", "master_seed", "max_events", "max_time", "grid", "eps_list", "init",
                                "trajectories"});
    if (auto v = r.integer(*st, "sim", "replicates")) {
      if (*v < 1) r.problems.push_back("[sim] replicates must be >= 1");
      else cfg.sim.replicates = static_cast<std::size_t>(*v);
    }
    if (auto v = r.integer(*st, "sim", "master_seed")) {
      if (*v < 0) r.problems.push_back("[sim] master_seed must be >= 0");
      else cfg.sim.master_seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = r.integer(*st, "sim", "max_events")) {
      if (*v < 1) r.problems.push_back("[sim] max_events must be >= 1");
      else cfg.sim.caps.max_events = static_cast<std::uint64_t>(*v);
    }
    if (auto v = r.number(*st, "sim", "max_time")) {
      if (!(*v > 0.0)) r.problems.push_back("[sim] max_time must be > 0");
      else cfg.sim.caps.max_time = *v;
    }
    if (auto v = r.integer(*st, "sim", "trajectories")) {
      if (*v < 0) r.problems.push_back("[sim] trajectories must be >= 0");
      else cfg.sim.trajectories = static_cast<std::size_t>(*v);
    }
    if (auto g = r.series(*st, "sim", "grid")) {
      bool good = true;
      for (std::size_t i = 0; i < g->size(); ++i) {
        if (!((*g)[i] >= 0.0) || !std::isfinite((*g)[i])) good = false;
        if (i > 0 && !((*g)[i] > (*g)[i - 1])) good = false;
      }
      if (!good) r.problems.push_back("[sim] grid must be non-negative and strictly increasing");
      else cfg.sim.grid = *g;
    }
    if (const toml::node* n = st->get("eps_list")) {
      const auto* arr = n->as_array();
      if (!arr) {
        r.problems.push_back("[sim] eps_list must be a list of positive integers at " + detail::Reader::where(*n));
      } else {
        for (const auto& el : *arr) {
          const auto v = el.value_exact<std::int64_t>();
          if (!v || *v < 1) {
            r.problems.push_back("[sim] eps_list entries must be positive integers at " + detail::Reader::where(el));
            break;
          }
          cfg.sim.eps_list.push_back(*v);
        }
      }
    }
    if (const toml::node* n = st->get("init")) {
      if (const auto* it = n->as_table()) {
        r.unknown_keys(*it, "sim.init", {"z", "x"});
        if (auto z = r.integer(*it, "sim.init", "z")) cfg.sim.init.z = *z;
        if (auto x = r.integer(*it, "sim.init", "x")) cfg.sim.init.x = *x;
        if (cfg.sim.init.z < 1 || cfg.sim.init.x < cfg.sim.init.z)
          r.problems.push_back("[sim] init needs z >= 1 and x >= z");
      } else {
        r.problems.push_back("[sim] init must be a table { z = ..., x = ... }");
      }
    }
  }

  if (const auto* sw = r.section(root, "sweep", false)) {
    r.unknown_keys(*sw, "sweep", {"parameter", "values"});
    SweepConfig s;
    if (auto p = r.string(*sw, "sweep", "parameter")) s.parameter = *p;
    else r.problems.push_back("[sweep] parameter is required");
    if (auto v = r.series(*sw, "sweep", "values")) s.values = *v;
    else if (!sw->get("values")) r.problems.push_back("[sweep] values is required");
    if (!s.parameter.empty()) {
      const auto names = sweepable_parameters(cfg.model);
      if (std::find(names.begin(), names.end(), s.parameter) == names.end())
        r.problems.push_back("[sweep] parameter '" + s.parameter + "' does not exist on model " +
                             models::model_name(cfg.model));
    }
    if (s.values.empty() && sw->get("values")) r.problems.push_back("[sweep] values must not be empty");
    cfg.sweep = std::move(s);
  }

  if (const auto* ot = r.section(root, "outputs", false)) {
    r.unknown_keys(*ot, "outputs", {"directory", "csv", "svg"});
    if (auto d = r.string(*ot, "outputs", "directory")) {
      std::filesystem::path p(*d);
      if (p.is_relative() && !source.empty()) p = source.parent_path() / p;
      cfg.outputs.directory = p;
    }
    if (auto v = r.boolean(*ot, "outputs", "csv")) cfg.outputs.csv = *v;
    if (auto v = r.boolean(*ot, "outputs", "svg")) cfg.outputs.svg = *v;
  } else if (!source.empty()) {
    cfg.outputs.directory = source.parent_path() / "out";
  }

  if (const auto* nt = r.section(root, "numeric", false)) {
    r.unknown_keys(*nt, "numeric", {"quad_rel_tol", "root_tol", "ode_rel_tol", "bracket_growth", "max_iters"});
    if (auto v = r.number(*nt, "numeric", "quad_rel_tol")) cfg.numeric.quad_rel_tol = *v;
    if (auto v = r.number(*nt, "numeric", "root_tol")) cfg.numeric.root_tol = *v;
    if (auto v = r.number(*nt, "numeric", "ode_rel_tol")) cfg.numeric.ode_rel_tol = *v;
    if (auto v = r.number(*nt, "numeric", "bracket_growth")) cfg.numeric.bracket_growth = *v;
    if (auto v = r.integer(*nt, "numeric", "max_iters")) {
      if (*v < 1) r.problems.push_back("[numeric] max_iters must be >= 1");
      else cfg.numeric.max_iters = static_cast<std::size_t>(*v);
    }
    try {
      cfg.numeric.check();
    } catch (const DomainError& e) {
      r.problems.push_back(std::string("[numeric] ") + e.what());
    }
  }

  if (r.problems.empty()) {
    for (const auto& v : models::validate(cfg.model)) r.problems.push_back("[model] " + v.message);
  }
  if (!r.problems.empty()) {
    std::string msg = "invalid configuration";
    if (!source.empty()) msg += " " + source.string();
    msg += ":";
    for (const auto& p : r.problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

inline ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& source = {}) {
  try {
    const toml::table root = toml::parse(text, source.string());
    return config_from_table(root, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "cannot parse " << (source.empty() ? std::string("configuration") : source.string()) << " at line "
       << e.source().begin.line << ", column " << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw ConfigError("config file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace progeny::cli
