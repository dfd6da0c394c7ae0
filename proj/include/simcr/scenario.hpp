#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simcr/types.hpp"

namespace simcr {

struct Cuboid {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};
};

enum class GradScale {
  kAlgorithm,  // batch average 1/(I*N_g)
  kLoss,       // loss-exact average 1/I
};

enum class ElSampling {
  kUniform,  // elevation uniform on [0, pi]
  kCosine,   // elevation from arccos(u), u uniform on [-1, 1]
};

// Full experiment description. Section/key names in scenario files match the
// field names below one-to-one.
struct ScenarioConfig {
  // [scene-channels]
  double f_c = 30e9;       // carrier frequency, Hz
  double delta_f = 1e6;    // subcarrier spacing, Hz
  int I = 8;               // number of subcarriers
  double P_sb = 1.0;       // secondary-basestation transmit power, W
  double P_pb = 1.0;       // primary-basestation transmit power, W
  double P_sws_target = 1.0;  // radiated-power normalization target, W
  double kappa = 0.98;     // QoS fraction in (0, 1]
  double N0 = -173.855;    // noise PSD, dBm/Hz
  Vec3 p_sb{0.0, 0.0, 5.0};
  Vec3 p_pb{-50.0, 100.0, 5.0};
  Mat3 R_s = Mat3::Identity();  // surface orientation (rows = local axes)
  std::vector<Vec3> pu_positions{{55.0, 8.0, 1.5}, {62.0, -6.0, 1.5}};
  Cuboid prior_cuboid{{50.0, -10.0, 0.0}, {70.0, 10.0, 5.0}};
  int Q_su_s = 50;   // scatter paths, SU <-> surface
  int Q_pu_s = 50;   // scatter paths, PU <-> surface
  int Q_pu_pb = 50;  // scatter paths, PU <-> PB
  std::uint64_t rng_seed = 20260815;

  // [sim-propagation]
  int L = 4;          // metasurface layers
  int N_h = 6;        // meta-atoms per row
  int N_v = 6;        // meta-atoms per column
  double d = 0.005;   // intra-layer atom spacing, m
  double d_s = 0.015; // inter-layer spacing, m
  double A_s = 2.5e-5;  // meta-atom area, m^2

  // [fisher-estimation]
  int M_p = 500;             // Monte-Carlo prior samples
  double epsilon_reg = 1e-9; // prior-information regularizer

  // [beam-optimizer]
  std::vector<double> delta_caps{1.0};  // per-subcarrier power caps (1 => broadcast)
  double xi_rel = 1e-9;   // bisection band relative to the interference budget
  double eps_tol = 1e-12; // relative objective-change tolerance
  double tau_tol = 1e-12; // Frobenius direction-change tolerance
  int max_ao_iters = 50;

  // [phase-trainer]
  double eta = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  int N_g = 512;  // directions per batch
  int N_b = 50;   // batches per epoch
  int N_e = 20;   // epochs
  GradScale grad_scale = GradScale::kAlgorithm;
  ElSampling el_sampling = ElSampling::kUniform;

  // Derived quantities. Subcarriers are 0-based internally; reports are 1-based.
  int n_atoms() const { return N_h * N_v; }
  int n_pu() const { return static_cast<int>(pu_positions.size()); }
  double lambda_c() const { return kSpeedOfLight / f_c; }
  double freq(int i) const { return f_c - static_cast<double>(i) * delta_f; }
  double wavelength(int i) const { return kSpeedOfLight / freq(i); }
  double zeta(int i) const { return 2.0 * kPi * static_cast<double>(i) * delta_f; }
  double sigma2() const;  // noise power over one subcarrier, W
  double delta_cap(int i) const;
};

// Built-in experiment at desk scale; paper_scale widens the grid sizes
// (I=50, M_p=20000, N_e=200) while keeping the same geometry.
ScenarioConfig default_scenario(bool paper_scale = false);

// Applies the paper-scale overrides listed above to an existing config.
void apply_paper_scale(ScenarioConfig& cfg);

// Parses a scenario file (INI-style sections, '#'/';' comments). Unknown
// sections or keys and malformed values throw ConfigError naming the key.
// The result is validated before being returned.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text);

// Range/consistency checks; throws ConfigError naming the violated key.
void validate_scenario(const ScenarioConfig& cfg);

// Canonical "section.key=value" dump, sorted by key, locale-independent
// formatting. Input key order never changes this string.
std::string scenario_canonical(const ScenarioConfig& cfg);
std::uint64_t scenario_hash(const ScenarioConfig& cfg);

}  // namespace simcr
