#include "simcr/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "simcr/errors.hpp"
#include "simcr/rng.hpp"

namespace simcr {

double ScenarioConfig::sigma2() const {
  // N0 is dBm/Hz; convert to W/Hz and integrate over one subcarrier.
  return std::pow(10.0, (N0 - 30.0) / 10.0) * delta_f;
}

double ScenarioConfig::delta_cap(int i) const {
  if (delta_caps.size() == 1) return delta_caps[0];
  return delta_caps.at(static_cast<size_t>(i));
}

ScenarioConfig default_scenario(bool paper_scale) {
  ScenarioConfig cfg;  // field initializers are the desk-scale defaults
  if (paper_scale) apply_paper_scale(cfg);
  return cfg;
}

void apply_paper_scale(ScenarioConfig& cfg) {
  cfg.I = 50;
  cfg.M_p = 20000;
  cfg.N_e = 200;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& key, const std::string& v,
                                  size_t expect = 0) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("scenario key '" + key + "': bad number '" + tok + "'");
    }
  }
  if (expect != 0 && out.size() != expect) {
    throw ConfigError("scenario key '" + key + "': expected " +
                      std::to_string(expect) + " values, got " +
                      std::to_string(out.size()));
  }
  return out;
}

double parse_scalar(const std::string& key, const std::string& v) {
  return parse_numbers(key, v, 1)[0];
}

int parse_int(const std::string& key, const std::string& v) {
  double x = parse_scalar(key, v);
  if (x != std::floor(x) || std::abs(x) > 2e9) {
    throw ConfigError("scenario key '" + key + "': expected an integer");
  }
  return static_cast<int>(x);
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  try {
    size_t pos = 0;
    unsigned long long u = std::stoull(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("scenario key '" + key + "': bad seed '" + t + "'");
  }
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
  auto scalar = [](double ScenarioConfig::* f) {
    return Setter([f](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.*f = parse_scalar(k, v);
    });
  };
  auto integer = [](int ScenarioConfig::* f) {
    return Setter([f](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.*f = parse_int(k, v);
    });
  };
  auto vec3 = [](Vec3 ScenarioConfig::* f) {
    return Setter([f](ScenarioConfig& c, const std::string& k, const std::string& v) {
      auto n = parse_numbers(k, v, 3);
      c.*f = Vec3(n[0], n[1], n[2]);
    });
  };
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"scene-channels",
       {
           {"f_c", scalar(&ScenarioConfig::f_c)},
           {"delta_f", scalar(&ScenarioConfig::delta_f)},
           {"I", integer(&ScenarioConfig::I)},
           {"P_sb", scalar(&ScenarioConfig::P_sb)},
           {"P_pb", scalar(&ScenarioConfig::P_pb)},
           {"P_sws_target", scalar(&ScenarioConfig::P_sws_target)},
           {"kappa", scalar(&ScenarioConfig::kappa)},
           {"N0", scalar(&ScenarioConfig::N0)},
           {"p_sb", vec3(&ScenarioConfig::p_sb)},
           {"p_pb", vec3(&ScenarioConfig::p_pb)},
           {"R_s",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              auto n = parse_numbers(k, v, 9);
              for (int r = 0; r < 3; ++r)
                for (int cc = 0; cc < 3; ++cc) c.R_s(r, cc) = n[3 * r + cc];
            }},
           {"pu_positions",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              auto n = parse_numbers(k, v);
              if (n.empty() || n.size() % 3 != 0) {
                throw ConfigError("scenario key '" + k +
                                  "': expected a multiple of 3 values");
              }
              c.pu_positions.clear();
              for (size_t t = 0; t < n.size(); t += 3) {
                c.pu_positions.emplace_back(n[t], n[t + 1], n[t + 2]);
              }
            }},
           {"prior_cuboid",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              auto n = parse_numbers(k, v, 6);  // x_min x_max y_min y_max z_min z_max
              c.prior_cuboid.lo = Vec3(n[0], n[2], n[4]);
              c.prior_cuboid.hi = Vec3(n[1], n[3], n[5]);
            }},
           {"Q_su_s", integer(&ScenarioConfig::Q_su_s)},
           {"Q_pu_s", integer(&ScenarioConfig::Q_pu_s)},
           {"Q_pu_pb", integer(&ScenarioConfig::Q_pu_pb)},
           {"rng_seed",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              c.rng_seed = parse_seed(k, v);
            }},
       }},
      {"sim-propagation",
       {
           {"L", integer(&ScenarioConfig::L)},
           {"N_h", integer(&ScenarioConfig::N_h)},
           {"N_v", integer(&ScenarioConfig::N_v)},
           {"d", scalar(&ScenarioConfig::d)},
           {"d_s", scalar(&ScenarioConfig::d_s)},
           {"A_s", scalar(&ScenarioConfig::A_s)},
       }},
      {"fisher-estimation",
       {
           {"M_p", integer(&ScenarioConfig::M_p)},
           {"epsilon_reg", scalar(&ScenarioConfig::epsilon_reg)},
       }},
      {"beam-optimizer",
       {
           {"delta_caps",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              c.delta_caps = parse_numbers(k, v);
              if (c.delta_caps.empty()) {
                throw ConfigError("scenario key '" + k + "': expected values");
              }
            }},
           {"xi_rel", scalar(&ScenarioConfig::xi_rel)},
           {"eps_tol", scalar(&ScenarioConfig::eps_tol)},
           {"tau_tol", scalar(&ScenarioConfig::tau_tol)},
           {"max_ao_iters", integer(&ScenarioConfig::max_ao_iters)},
       }},
      {"phase-trainer",
       {
           {"eta", scalar(&ScenarioConfig::eta)},
           {"beta1", scalar(&ScenarioConfig::beta1)},
           {"beta2", scalar(&ScenarioConfig::beta2)},
           {"eps_adam", scalar(&ScenarioConfig::eps_adam)},
           {"N_g", integer(&ScenarioConfig::N_g)},
           {"N_b", integer(&ScenarioConfig::N_b)},
           {"N_e", integer(&ScenarioConfig::N_e)},
           {"grad_scale",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              std::string t = trim(v);
              if (t == "algorithm") c.grad_scale = GradScale::kAlgorithm;
              else if (t == "loss") c.grad_scale = GradScale::kLoss;
              else throw ConfigError("scenario key '" + k + "': expected 'algorithm' or 'loss'");
            }},
           {"el_sampling",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              std::string t = trim(v);
              if (t == "uniform") c.el_sampling = ElSampling::kUniform;
              else if (t == "cosine") c.el_sampling = ElSampling::kCosine;
              else throw ConfigError("scenario key '" + k + "': expected 'uniform' or 'cosine'");
            }},
       }},
  };
  return table;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig cfg;
  const auto& table = key_table();
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("scenario line " + std::to_string(lineno) +
                          ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (table.find(section) == table.end()) {
        throw ConfigError("scenario line " + std::to_string(lineno) +
                          ": unknown section '" + section + "'");
      }
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("scenario line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("scenario line " + std::to_string(lineno) + ": key '" +
                        key + "' appears before any section");
    }
    const auto& keys = table.at(section);
    auto it = keys.find(key);
    if (it == keys.end()) {
      throw ConfigError("scenario line " + std::to_string(lineno) +
                        ": unknown key '" + key + "' in section '" + section +
                        "'");
    }
    it->second(cfg, key, value);
  }
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str());
}

void validate_scenario(const ScenarioConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("scenario key '" + key + "': " + why);
  };
  if (!(c.f_c > 0)) fail("f_c", "must be positive");
  if (!(c.delta_f > 0)) fail("delta_f", "must be positive");
  if (c.I < 1) fail("I", "must be >= 1");
  if (!(c.f_c - (c.I - 1) * c.delta_f > 0)) {
    fail("I", "lowest subcarrier frequency f_c - (I-1)*delta_f must stay positive");
  }
  if (!(c.P_sb > 0)) fail("P_sb", "must be positive");
  if (!(c.P_pb > 0)) fail("P_pb", "must be positive");
  if (!(c.P_sws_target > 0)) fail("P_sws_target", "must be positive");
  if (!(c.kappa > 0.0 && c.kappa <= 1.0)) fail("kappa", "must lie in (0, 1]");
  if (c.pu_positions.empty()) fail("pu_positions", "need at least one position");
  if ((c.R_s.transpose() * c.R_s - Mat3::Identity()).norm() > 1e-9) {
    fail("R_s", "must be orthonormal");
  }
  for (int k = 0; k < 3; ++k) {
    if (!(c.prior_cuboid.lo[k] < c.prior_cuboid.hi[k])) {
      fail("prior_cuboid", "needs positive volume (min < max per axis)");
    }
  }
  const Vec3& lo = c.prior_cuboid.lo;
  const Vec3& hi = c.prior_cuboid.hi;
  bool inside = true;
  for (int k = 0; k < 3; ++k) {
    inside = inside && c.p_sb[k] >= lo[k] && c.p_sb[k] <= hi[k];
  }
  if (inside) fail("prior_cuboid", "must not contain the surface position p_sb");
  if (c.Q_su_s < 0) fail("Q_su_s", "must be >= 0");
  if (c.Q_pu_s < 0) fail("Q_pu_s", "must be >= 0");
  if (c.Q_pu_pb < 0) fail("Q_pu_pb", "must be >= 0");
  if (c.L < 1) fail("L", "must be >= 1");
  if (c.N_h < 1) fail("N_h", "must be >= 1");
  if (c.N_v < 1) fail("N_v", "must be >= 1");
  if (!(c.d > 0)) fail("d", "must be positive");
  if (!(c.d_s > 0)) fail("d_s", "must be positive");
  if (!(c.A_s > 0)) fail("A_s", "must be positive");
  if (c.M_p < 1) fail("M_p", "must be >= 1");
  if (c.epsilon_reg < 0) fail("epsilon_reg", "must be >= 0");
  if (c.delta_caps.size() != 1 &&
      c.delta_caps.size() != static_cast<size_t>(c.I)) {
    fail("delta_caps", "need one value or exactly I values");
  }
  for (double dc : c.delta_caps) {
    if (!(dc > 0)) fail("delta_caps", "entries must be positive");
  }
  if (!(c.xi_rel > 0)) fail("xi_rel", "must be positive");
  if (!(c.eps_tol > 0)) fail("eps_tol", "must be positive");
  if (!(c.tau_tol > 0)) fail("tau_tol", "must be positive");
  if (c.max_ao_iters < 1) fail("max_ao_iters", "must be >= 1");
  if (!(c.eta > 0)) fail("eta", "must be positive");
  if (!(c.beta1 >= 0 && c.beta1 < 1)) fail("beta1", "must lie in [0, 1)");
  if (!(c.beta2 >= 0 && c.beta2 < 1)) fail("beta2", "must lie in [0, 1)");
  if (!(c.eps_adam > 0)) fail("eps_adam", "must be positive");
  if (c.N_g < 1) fail("N_g", "must be >= 1");
  if (c.N_b < 1) fail("N_b", "must be >= 1");
  if (c.N_e < 0) fail("N_e", "must be >= 0");
}

std::string scenario_canonical(const ScenarioConfig& c) {
  std::map<std::string, std::string> kv;
  kv["scene-channels.f_c"] = fmt(c.f_c);
  kv["scene-channels.delta_f"] = fmt(c.delta_f);
  kv["scene-channels.I"] = std::to_string(c.I);
  kv["scene-channels.P_sb"] = fmt(c.P_sb);
  kv["scene-channels.P_pb"] = fmt(c.P_pb);
  kv["scene-channels.P_sws_target"] = fmt(c.P_sws_target);
  kv["scene-channels.kappa"] = fmt(c.kappa);
  kv["scene-channels.N0"] = fmt(c.N0);
  auto vec_str = [](const auto& v, int n) {
    std::string s;
    for (int k = 0; k < n; ++k) {
      if (k) s += ' ';
      s += fmt(v[k]);
    }
    return s;
  };
  kv["scene-channels.p_sb"] = vec_str(c.p_sb, 3);
  kv["scene-channels.p_pb"] = vec_str(c.p_pb, 3);
  {
    std::string s;
    for (int r = 0; r < 3; ++r)
      for (int cc = 0; cc < 3; ++cc) {
        if (r || cc) s += ' ';
        s += fmt(c.R_s(r, cc));
      }
    kv["scene-channels.R_s"] = s;
  }
  {
    std::string s;
    for (size_t r = 0; r < c.pu_positions.size(); ++r) {
      if (r) s += ' ';
      s += vec_str(c.pu_positions[r], 3);
    }
    kv["scene-channels.pu_positions"] = s;
  }
  kv["scene-channels.prior_cuboid"] =
      fmt(c.prior_cuboid.lo[0]) + " " + fmt(c.prior_cuboid.hi[0]) + " " +
      fmt(c.prior_cuboid.lo[1]) + " " + fmt(c.prior_cuboid.hi[1]) + " " +
      fmt(c.prior_cuboid.lo[2]) + " " + fmt(c.prior_cuboid.hi[2]);
  kv["scene-channels.Q_su_s"] = std::to_string(c.Q_su_s);
  kv["scene-channels.Q_pu_s"] = std::to_string(c.Q_pu_s);
  kv["scene-channels.Q_pu_pb"] = std::to_string(c.Q_pu_pb);
  kv["scene-channels.rng_seed"] = std::to_string(c.rng_seed);
  kv["sim-propagation.L"] = std::to_string(c.L);
  kv["sim-propagation.N_h"] = std::to_string(c.N_h);
  kv["sim-propagation.N_v"] = std::to_string(c.N_v);
  kv["sim-propagation.d"] = fmt(c.d);
  kv["sim-propagation.d_s"] = fmt(c.d_s);
  kv["sim-propagation.A_s"] = fmt(c.A_s);
  kv["fisher-estimation.M_p"] = std::to_string(c.M_p);
  kv["fisher-estimation.epsilon_reg"] = fmt(c.epsilon_reg);
  {
    std::string s;
    for (size_t k = 0; k < c.delta_caps.size(); ++k) {
      if (k) s += ' ';
      s += fmt(c.delta_caps[k]);
    }
    kv["beam-optimizer.delta_caps"] = s;
  }
  kv["beam-optimizer.xi_rel"] = fmt(c.xi_rel);
  kv["beam-optimizer.eps_tol"] = fmt(c.eps_tol);
  kv["beam-optimizer.tau_tol"] = fmt(c.tau_tol);
  kv["beam-optimizer.max_ao_iters"] = std::to_string(c.max_ao_iters);
  kv["phase-trainer.eta"] = fmt(c.eta);
  kv["phase-trainer.beta1"] = fmt(c.beta1);
  kv["phase-trainer.beta2"] = fmt(c.beta2);
  kv["phase-trainer.eps_adam"] = fmt(c.eps_adam);
  kv["phase-trainer.N_g"] = std::to_string(c.N_g);
  kv["phase-trainer.N_b"] = std::to_string(c.N_b);
  kv["phase-trainer.N_e"] = std::to_string(c.N_e);
  kv["phase-trainer.grad_scale"] =
      c.grad_scale == GradScale::kAlgorithm ? "algorithm" : "loss";
  kv["phase-trainer.el_sampling"] =
      c.el_sampling == ElSampling::kUniform ? "uniform" : "cosine";

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t scenario_hash(const ScenarioConfig& c) {
  return fnv1a64(scenario_canonical(c));
}

}  // namespace simcr
