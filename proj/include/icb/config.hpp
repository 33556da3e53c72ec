#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "icb/csv.hpp"
#include "icb/environment.hpp"
#include "icb/policies.hpp"

namespace icb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimal INI reader: [section] headers, key = value lines, # or ;
/// comments. Section and key order is preserved for error reporting;
/// duplicate keys within a section are errors.
class IniFile {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static IniFile parse(std::istream& is) {
    IniFile ini;
    std::string line, current;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::size_t hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ConfigError("line " + std::to_string(lineno) +
                            ": unterminated section header");
        }
        current = trim(line.substr(1, line.size() - 2));
        if (current.empty()) {
          throw ConfigError("line " + std::to_string(lineno) +
                            ": empty section name");
        }
        ini.touch(current);
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": expected key = value");
      }
      if (current.empty()) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": key outside any section");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      }
      Section& sec = ini.sections_[ini.index_.at(current)].second;
      for (const auto& [k, v] : sec) {
        if (k == key) {
          throw ConfigError("line " + std::to_string(lineno) +
                            ": duplicate key '" + key + "'");
        }
      }
      sec.emplace_back(key, value);
    }
    return ini;
  }

  static IniFile parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse(is);
  }

  const std::vector<std::pair<std::string, Section>>& sections() const {
    return sections_;
  }

  bool has(const std::string& section) const { return index_.count(section); }

  const Section* find(const std::string& section) const {
    auto it = index_.find(section);
    return it == index_.end() ? nullptr : &sections_[it->second].second;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  void touch(const std::string& name) {
    if (!index_.count(name)) {
      index_[name] = sections_.size();
      sections_.emplace_back(name, Section{});
    }
  }

  std::vector<std::pair<std::string, Section>> sections_;
  std::map<std::string, std::size_t> index_;
};

enum class ExperimentKind { regret, coverage_beta, coverage_v, movielens };

inline const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::regret: return "regret";
    case ExperimentKind::coverage_beta: return "coverage_beta";
    case ExperimentKind::coverage_v: return "coverage_v";
    case ExperimentKind::movielens: return "movielens";
  }
  return "?";
}

struct MovielensConfig {
  std::string ratings_path;
  std::string users_path;
  int rounds = 200;
  double l_w_target = 5.0;
  bool strict = false;
  std::vector<int> reward_models{1, 2};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::regret;
  EnvironmentConfig env;
  MovielensConfig ml;
  std::vector<std::pair<std::string, PolicyConfig>> policies;
  bool include_oracle = false;
  int replications = 20;
  std::vector<int> checkpoints;
  double alpha_level = 0.05;
  long v_star_samples = 1000000;
  std::string output_dir = "out";
  std::uint64_t master_seed = 20240601;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const {
    if (replications < 1) throw ConfigError("replications < 1");
    if (alpha_level <= 0.0 || alpha_level >= 1.0) {
      throw ConfigError("alpha_level out of (0,1)");
    }
    if (policies.empty() && !include_oracle) {
      throw ConfigError("no policies configured");
    }
    for (const auto& [name, p] : policies) {
      try {
        p.validate();
      } catch (const std::exception& e) {
        throw ConfigError("policy '" + name + "': " + e.what());
      }
    }
    if (kind == ExperimentKind::movielens) {
      if (ml.ratings_path.empty() || ml.users_path.empty()) {
        throw ConfigError("movielens requires ratings and users paths");
      }
      if (ml.rounds < 1) throw ConfigError("movielens rounds < 1");
      for (int m : ml.reward_models) {
        if (m != 1 && m != 2) throw ConfigError("reward_models must be 1/2");
      }
    } else {
      try {
        env.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("environment: ") + e.what());
      }
      if (checkpoints.empty()) throw ConfigError("no checkpoints configured");
      int prev = 0;
      for (int c : checkpoints) {
        if (c <= prev || c > env.horizon) {
          throw ConfigError("checkpoints must ascend and stay within horizon");
        }
        prev = c;
      }
      if (kind == ExperimentKind::regret) {
        bool has_wi = false, has_classical = false;
        for (const auto& [name, p] : policies) {
          (is_classical(p.algorithm) ? has_classical : has_wi) = true;
        }
        if (!has_wi || !has_classical) {
          throw ConfigError(
              "regret needs at least one interference-aware and one"
              " classical policy");
        }
      }
      if ((kind == ExperimentKind::coverage_beta ||
           kind == ExperimentKind::coverage_v) &&
          env.sigma <= 0.0) {
        throw ConfigError("coverage uses the known-sigma protocol: sigma > 0");
      }
    }
  }
};

namespace config_detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

inline long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, sep)) {
    std::size_t b = cur.find_first_not_of(" \t");
    std::size_t e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

inline Vector to_vector(const std::string& key, const std::string& v) {
  auto parts = split_list(v, ',');
  Vector x(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    x[static_cast<Eigen::Index>(k)] = to_double(key, parts[k]);
  }
  return x;
}

inline ContextFeatureSpec parse_feature(const std::string& key,
                                        const std::string& spec) {
  auto tok = split_list(spec, ' ');
  tok.erase(std::remove(tok.begin(), tok.end(), std::string{}), tok.end());
  if (tok.empty()) throw ConfigError("key '" + key + "': empty feature spec");
  if (tok[0] == "constant" && tok.size() == 2) {
    return ContextFeatureSpec::constant(to_double(key, tok[1]));
  }
  if (tok[0] == "normal" && tok.size() == 3) {
    return ContextFeatureSpec::normal(to_double(key, tok[1]),
                                      to_double(key, tok[2]));
  }
  if (tok[0] == "uniform" && tok.size() == 3) {
    return ContextFeatureSpec::uniform(to_double(key, tok[1]),
                                       to_double(key, tok[2]));
  }
  throw ConfigError("key '" + key + "': expected 'constant v'," +
                    " 'normal mean var' or 'uniform lo hi'");
}

inline WSpec parse_w(const std::string& key, const std::string& spec) {
  auto tok = split_list(spec, ' ');
  tok.erase(std::remove(tok.begin(), tok.end(), std::string{}), tok.end());
  if (tok.size() == 1 && tok[0] == "identity") return WSpec::identity();
  if (tok.size() == 6 && tok[0] == "mixture") {
    bool symmetric;
    if (tok[5] == "symmetric") symmetric = true;
    else if (tok[5] == "asymmetric") symmetric = false;
    else throw ConfigError("key '" + key + "': expected symmetric|asymmetric");
    return WSpec::mixture(to_double(key, tok[1]), to_double(key, tok[2]),
                          to_double(key, tok[3]), to_double(key, tok[4]),
                          symmetric);
  }
  throw ConfigError("key '" + key +
                    "': expected 'identity' or 'mixture nlo nhi plo phi"
                    " symmetric|asymmetric'");
}

inline Algorithm parse_algorithm(const std::string& v) {
  if (v == "eg") return Algorithm::eg;
  if (v == "ucb") return Algorithm::ucb;
  if (v == "ts") return Algorithm::ts;
  if (v == "classical_eg") return Algorithm::classical_eg;
  if (v == "classical_ucb") return Algorithm::classical_ucb;
  if (v == "classical_ts") return Algorithm::classical_ts;
  throw ConfigError("unknown algorithm '" + v + "'");
}

}  // namespace config_detail

/// Parses and fully validates an experiment configuration. Unknown
/// sections and keys are errors.
inline ExperimentConfig parse_experiment_config(const IniFile& ini) {
  using namespace config_detail;
  ExperimentConfig cfg;
  cfg.checkpoints.clear();
  cfg.policies.clear();
  bool env_d_set = false;
  std::vector<std::string> context_specs;

  for (const auto& [section, entries] : ini.sections()) {
    if (section == "experiment") {
      for (const auto& [key, value] : entries) {
        if (key == "kind") {
          if (value == "regret") cfg.kind = ExperimentKind::regret;
          else if (value == "coverage_beta") cfg.kind = ExperimentKind::coverage_beta;
          else if (value == "coverage_v") cfg.kind = ExperimentKind::coverage_v;
          else if (value == "movielens") cfg.kind = ExperimentKind::movielens;
          else throw ConfigError("unknown experiment kind '" + value + "'");
        } else if (key == "replications") {
          cfg.replications = static_cast<int>(to_long(key, value));
        } else if (key == "checkpoints") {
          for (const auto& c : split_list(value, ',')) {
            cfg.checkpoints.push_back(static_cast<int>(to_long(key, c)));
          }
        } else if (key == "alpha_level") {
          cfg.alpha_level = to_double(key, value);
        } else if (key == "v_star_samples") {
          cfg.v_star_samples = to_long(key, value);
        } else if (key == "output_dir") {
          cfg.output_dir = value;
        } else if (key == "master_seed") {
          cfg.master_seed = static_cast<std::uint64_t>(to_long(key, value));
        } else if (key == "workers") {
          cfg.workers = static_cast<int>(to_long(key, value));
        } else if (key == "include_oracle") {
          cfg.include_oracle = to_bool(key, value);
        } else {
          throw ConfigError("unknown key 'experiment." + key + "'");
        }
      }
    } else if (section == "environment") {
      for (const auto& [key, value] : entries) {
        if (key == "horizon") {
          cfg.env.horizon = static_cast<int>(to_long(key, value));
        } else if (key == "poisson_lambda") {
          cfg.env.poisson_lambda = to_double(key, value);
        } else if (key == "d") {
          cfg.env.d = static_cast<int>(to_long(key, value));
          env_d_set = true;
        } else if (key == "context") {
          context_specs = split_list(value, '|');
        } else if (key == "w") {
          cfg.env.w = parse_w(key, value);
        } else if (key == "beta0" || key == "beta1") {
          Vector v = to_vector(key, value);
          if (!cfg.env.beta_fixed) {
            cfg.env.beta_fixed = BetaVector(Vector::Zero(v.size()),
                                            Vector::Zero(v.size()));
          }
          if (key == "beta0") cfg.env.beta_fixed->beta0 = v;
          else cfg.env.beta_fixed->beta1 = v;
        } else if (key == "beta0_range" || key == "beta1_range") {
          Vector v = to_vector(key, value);
          if (v.size() != 2) {
            throw ConfigError("key '" + key + "': expected 'lo,hi'");
          }
          auto& range = key == "beta0_range" ? cfg.env.beta0_range
                                             : cfg.env.beta1_range;
          range = {v[0], v[1]};
        } else if (key == "sigma") {
          cfg.env.sigma = to_double(key, value);
        } else {
          throw ConfigError("unknown key 'environment." + key + "'");
        }
      }
    } else if (section == "movielens") {
      for (const auto& [key, value] : entries) {
        if (key == "ratings") cfg.ml.ratings_path = value;
        else if (key == "users") cfg.ml.users_path = value;
        else if (key == "rounds") cfg.ml.rounds = static_cast<int>(to_long(key, value));
        else if (key == "l_w_target") cfg.ml.l_w_target = to_double(key, value);
        else if (key == "strict") cfg.ml.strict = to_bool(key, value);
        else if (key == "reward_models") {
          cfg.ml.reward_models.clear();
          for (const auto& m : split_list(value, ',')) {
            cfg.ml.reward_models.push_back(static_cast<int>(to_long(key, m)));
          }
        } else {
          throw ConfigError("unknown key 'movielens." + key + "'");
        }
      }
    } else if (section.rfind("policy.", 0) == 0) {
      const std::string name = section.substr(7);
      if (name.empty()) throw ConfigError("empty policy name");
      PolicyConfig p;
      for (const auto& [key, value] : entries) {
        if (key == "algorithm") p.algorithm = parse_algorithm(value);
        else if (key == "t0") p.t0 = static_cast<int>(to_long(key, value));
        else if (key == "alpha") p.alpha = to_double(key, value);
        else if (key == "v") p.v = to_double(key, value);
        else if (key == "eg_c") p.eg_c = to_double(key, value);
        else if (key == "eg_constant_eps") p.eg_constant_eps = to_double(key, value);
        else if (key == "clip_c") p.clipping.c = to_double(key, value);
        else if (key == "clip_exponent") p.clipping.exponent = to_double(key, value);
        else if (key == "known_sigma") p.known_sigma = to_double(key, value);
        else throw ConfigError("unknown key '" + section + "." + key + "'");
      }
      cfg.policies.emplace_back(name, std::move(p));
    } else {
      throw ConfigError("unknown section '" + section + "'");
    }
  }

  if (cfg.kind != ExperimentKind::movielens) {
    if (!context_specs.empty()) {
      cfg.env.context.clear();
      for (std::size_t k = 0; k < context_specs.size(); ++k) {
        cfg.env.context.push_back(parse_feature("context", context_specs[k]));
      }
      if (!env_d_set) cfg.env.d = static_cast<int>(cfg.env.context.size());
    }
  }
  cfg.validate();
  return cfg;
}

/// Deterministic canonical serialization; its FNV-1a hash is the
/// provenance stamp written into every CSV.
inline std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[experiment]\n";
  os << "kind = " << experiment_kind_name(cfg.kind) << "\n";
  os << "replications = " << cfg.replications << "\n";
  os << "checkpoints = ";
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
    os << (k ? "," : "") << cfg.checkpoints[k];
  }
  os << "\n";
  os << "alpha_level = " << cfg.alpha_level << "\n";
  os << "v_star_samples = " << cfg.v_star_samples << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  os << "include_oracle = " << (cfg.include_oracle ? "true" : "false") << "\n";
  if (cfg.kind == ExperimentKind::movielens) {
    os << "[movielens]\n";
    os << "ratings = " << cfg.ml.ratings_path << "\n";
    os << "users = " << cfg.ml.users_path << "\n";
    os << "rounds = " << cfg.ml.rounds << "\n";
    os << "l_w_target = " << cfg.ml.l_w_target << "\n";
    os << "strict = " << (cfg.ml.strict ? "true" : "false") << "\n";
    os << "reward_models = ";
    for (std::size_t k = 0; k < cfg.ml.reward_models.size(); ++k) {
      os << (k ? "," : "") << cfg.ml.reward_models[k];
    }
    os << "\n";
  } else {
    os << "[environment]\n";
    os << "horizon = " << cfg.env.horizon << "\n";
    os << "poisson_lambda = " << cfg.env.poisson_lambda << "\n";
    os << "d = " << cfg.env.d << "\n";
    os << "context = ";
    for (std::size_t k = 0; k < cfg.env.context.size(); ++k) {
      const auto& f = cfg.env.context[k];
      if (k) os << " | ";
      switch (f.kind) {
        case ContextFeatureSpec::Kind::constant:
          os << "constant " << f.a;
          break;
        case ContextFeatureSpec::Kind::normal:
          os << "normal " << f.a << " " << f.b;
          break;
        case ContextFeatureSpec::Kind::uniform:
          os << "uniform " << f.a << " " << f.b;
          break;
      }
    }
    os << "\n";
    os << "w = ";
    if (cfg.env.w.kind == WSpec::Kind::identity) {
      os << "identity";
    } else {
      os << "mixture " << cfg.env.w.neg_lo << " " << cfg.env.w.neg_hi << " "
         << cfg.env.w.pos_lo << " " << cfg.env.w.pos_hi << " "
         << (cfg.env.w.symmetric ? "symmetric" : "asymmetric");
    }
    os << "\n";
    if (cfg.env.beta_fixed) {
      for (int arm = 0; arm < 2; ++arm) {
        const Vector& b = cfg.env.beta_fixed->arm(arm);
        os << "beta" << arm << " = ";
        for (Eigen::Index k = 0; k < b.size(); ++k) {
          os << (k ? "," : "") << b[k];
        }
        os << "\n";
      }
    } else {
      os << "beta0_range = " << cfg.env.beta0_range.first << ","
         << cfg.env.beta0_range.second << "\n";
      os << "beta1_range = " << cfg.env.beta1_range.first << ","
         << cfg.env.beta1_range.second << "\n";
    }
    os << "sigma = " << cfg.env.sigma << "\n";
  }
  for (const auto& [name, p] : cfg.policies) {
    os << "[policy." << name << "]\n";
    os << "algorithm = " << algorithm_name(p.algorithm) << "\n";
    os << "t0 = " << p.t0 << "\n";
    os << "alpha = " << p.alpha << "\n";
    os << "v = " << p.v << "\n";
    os << "eg_c = " << p.eg_c << "\n";
    if (p.eg_constant_eps) os << "eg_constant_eps = " << *p.eg_constant_eps << "\n";
    os << "clip_c = " << p.clipping.c << "\n";
    os << "clip_exponent = " << p.clipping.exponent << "\n";
    if (p.known_sigma) os << "known_sigma = " << *p.known_sigma << "\n";
  }
  return os.str();
}

inline std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(fnv1a(canonical_config_text(cfg)));
}

// ---------------------------------------------------------------------------
// Presets. Desk scale runs in seconds to minutes; paper scale mirrors the
// replication counts and horizons used for the headline figures.

enum class Preset { desk, paper };

namespace config_detail {

inline EnvironmentConfig beta_coverage_environment() {
  EnvironmentConfig env;
  env.poisson_lambda = 5.0;
  env.d = 3;
  env.context = {ContextFeatureSpec::constant(1.0),
                 ContextFeatureSpec::normal(4.0, 1.0),
                 ContextFeatureSpec::uniform(0.0, 3.0)};
  env.w = WSpec::mixture(-0.6, -0.3, 0.1, 0.4, true);
  env.beta_fixed = BetaVector((Vector(3) << 2, -3, 1).finished(),
                              (Vector(3) << 1, 1, 3).finished());
  env.sigma = 1.0;
  return env;
}

inline EnvironmentConfig v_coverage_environment() {
  EnvironmentConfig env;
  env.poisson_lambda = 5.0;
  env.d = 3;
  env.context = {ContextFeatureSpec::constant(0.2),
                 ContextFeatureSpec::normal(0.8, 0.04),
                 ContextFeatureSpec::uniform(0.0, 0.6)};
  env.w = WSpec::mixture(-0.2, -0.1, 0.05, 0.2, false);
  env.beta_fixed = BetaVector((Vector(3) << 2, -3, 1).finished(),
                              (Vector(3) << 1, 1, 3).finished());
  env.sigma = 1.0;
  return env;
}

inline EnvironmentConfig regret_environment() {
  EnvironmentConfig env;
  env.horizon = 100;
  env.poisson_lambda = 5.0;
  env.d = 5;
  env.context = {ContextFeatureSpec::constant(1.0),
                 ContextFeatureSpec::normal(0.0, 1.0),
                 ContextFeatureSpec::normal(0.0, 1.0),
                 ContextFeatureSpec::uniform(0.0, 1.0),
                 ContextFeatureSpec::uniform(0.0, 1.0)};
  env.w = WSpec::mixture(-0.9, -0.6, 0.1, 0.4, true);
  env.beta0_range = {1.0, 3.0};
  env.beta1_range = {-2.0, 5.0};
  env.sigma = 1.0;
  return env;
}

inline PolicyConfig base_policy(Algorithm alg, double known_sigma) {
  PolicyConfig p;
  p.algorithm = alg;
  p.t0 = 5;
  p.known_sigma = known_sigma;
  return p;
}

inline std::vector<int> spread_checkpoints(int horizon, int count) {
  std::vector<int> cps;
  for (int k = 1; k <= count; ++k) cps.push_back(horizon * k / count);
  return cps;
}

}  // namespace config_detail

inline ExperimentConfig preset_config(ExperimentKind kind, Preset preset) {
  using namespace config_detail;
  ExperimentConfig cfg;
  cfg.kind = kind;
  const bool desk = preset == Preset::desk;
  switch (kind) {
    case ExperimentKind::coverage_beta:
      cfg.env = beta_coverage_environment();
      cfg.env.horizon = desk ? 200 : 500;
      cfg.replications = desk ? 200 : 1000;
      cfg.checkpoints = spread_checkpoints(cfg.env.horizon, 4);
      cfg.policies = {{"eg", base_policy(Algorithm::eg, 1.0)},
                      {"ucb", base_policy(Algorithm::ucb, 1.0)},
                      {"ts", base_policy(Algorithm::ts, 1.0)}};
      break;
    case ExperimentKind::coverage_v:
      cfg.env = v_coverage_environment();
      cfg.env.horizon = desk ? 200 : 500;
      cfg.replications = desk ? 200 : 1000;
      cfg.v_star_samples = desk ? 1000000 : 4000000;
      cfg.checkpoints = spread_checkpoints(cfg.env.horizon, 4);
      cfg.policies = {{"eg", base_policy(Algorithm::eg, 1.0)},
                      {"ucb", base_policy(Algorithm::ucb, 1.0)},
                      {"ts", base_policy(Algorithm::ts, 1.0)}};
      break;
    case ExperimentKind::regret:
      cfg.env = regret_environment();
      cfg.replications = desk ? 20 : 100;
      cfg.checkpoints = spread_checkpoints(cfg.env.horizon, 4);
      cfg.include_oracle = true;
      cfg.policies = {
          {"eg", base_policy(Algorithm::eg, 1.0)},
          {"ucb", base_policy(Algorithm::ucb, 1.0)},
          {"ts", base_policy(Algorithm::ts, 1.0)},
          {"classical_eg", base_policy(Algorithm::classical_eg, 1.0)},
          {"classical_ucb", base_policy(Algorithm::classical_ucb, 1.0)},
          {"classical_ts", base_policy(Algorithm::classical_ts, 1.0)}};
      break;
    case ExperimentKind::movielens:
      cfg.ml.ratings_path = "tests/fixtures/ml_ratings.csv";
      cfg.ml.users_path = "tests/fixtures/ml_users.csv";
      cfg.ml.rounds = 200;
      cfg.replications = desk ? 10 : 20;
      cfg.include_oracle = true;
      cfg.policies = {
          {"eg", base_policy(Algorithm::eg, 0.0)},
          {"ucb", base_policy(Algorithm::ucb, 0.0)},
          {"ts", base_policy(Algorithm::ts, 0.0)},
          {"classical_eg", base_policy(Algorithm::classical_eg, 0.0)},
          {"classical_ucb", base_policy(Algorithm::classical_ucb, 0.0)},
          {"classical_ts", base_policy(Algorithm::classical_ts, 0.0)}};
      for (auto& [name, p] : cfg.policies) p.known_sigma.reset();
      break;
  }
  return cfg;
}

}  // namespace icb
