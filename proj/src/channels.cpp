#include "simcr/channels.hpp"

#include <cmath>

#include "simcr/errors.hpp"
#include "simcr/rng.hpp"

namespace simcr {

namespace {

double wrap_to_2pi(double x) {
  double y = std::fmod(x, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  return y;
}

double free_space_gain(double dist, double lambda) {
  return lambda / (4.0 * kPi * dist);
}

struct ScatterBox {
  Vec3 lo, hi;
};

// 1.5x-inflated bounding box of every deployed element; scatterers are drawn
// uniformly inside it.
ScatterBox deployment_box(const ScenarioConfig& cfg) {
  Vec3 lo = cfg.p_sb.cwiseMin(cfg.p_pb);
  Vec3 hi = cfg.p_sb.cwiseMax(cfg.p_pb);
  for (const Vec3& p : cfg.pu_positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo = lo.cwiseMin(cfg.prior_cuboid.lo);
  hi = hi.cwiseMax(cfg.prior_cuboid.hi);
  Vec3 c = 0.5 * (lo + hi);
  Vec3 half = 0.75 * (hi - lo);  // 1.5x inflation
  for (int k = 0; k < 3; ++k) half[k] = std::max(half[k], 1.0);
  return {c - half, c + half};
}

Vec3 draw_scatterer(const ScatterBox& box, const Vec3& a, const Vec3& b,
                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int tries = 0; tries < 1000; ++tries) {
    Vec3 s;
    for (int k = 0; k < 3; ++k) {
      s[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u01(rng);
    }
    if ((s - a).norm() >= 1.0 && (s - b).norm() >= 1.0) return s;
  }
  throw DegenerateGeometryError(
      "scatterer sampling failed: deployment box too tight around endpoints");
}

cplx reflection_coefficient(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 0.8);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  double m = mag(rng);
  double p = ph(rng);
  return std::polar(m, p);
}

VectorChannel make_vector_channel(const Vec3& terminal, int n_paths,
                                  const ScatterBox& box,
                                  const ScenarioConfig& cfg,
                                  std::mt19937_64& rng) {
  VectorChannel ch;
  double lc = cfg.lambda_c();
  double dist = (terminal - cfg.p_sb).norm();
  ch.los.rho = free_space_gain(dist, lc);
  ch.los.tau = dist / kSpeedOfLight;
  ch.los.phi = wrap_to_2pi(-2.0 * kPi * cfg.f_c * ch.los.tau);
  ch.los.dir = local_direction(terminal, cfg.p_sb, cfg.R_s);

  for (int q = 0; q < n_paths; ++q) {
    Vec3 s = draw_scatterer(box, cfg.p_sb, terminal, rng);
    double d1 = (s - cfg.p_sb).norm();
    double d2 = (terminal - s).norm();
    ScatterPath path;
    path.alpha = reflection_coefficient(rng) * free_space_gain(d1, lc) *
                 free_space_gain(d2, lc);
    path.tau = (d1 + d2) / kSpeedOfLight;
    path.dir = local_direction(s, cfg.p_sb, cfg.R_s);
    ch.paths.push_back(path);
  }

  ch.h.resize(cfg.I);
  cplx los_alpha = std::polar(ch.los.rho, ch.los.phi);
  for (int i = 0; i < cfg.I; ++i) {
    CVec h = channel_tap(los_alpha, ch.los.tau, ch.los.dir, cfg, i);
    for (const ScatterPath& p : ch.paths) {
      h += channel_tap(p.alpha, p.tau, p.dir, cfg, i);
    }
    ch.h[i] = std::move(h);
  }
  return ch;
}

ScalarChannel make_scalar_channel(const Vec3& a, const Vec3& b, int n_paths,
                                  const ScatterBox& box,
                                  const ScenarioConfig& cfg,
                                  std::mt19937_64& rng) {
  ScalarChannel ch;
  double lc = cfg.lambda_c();
  double dist = (b - a).norm();
  ch.los_tau = dist / kSpeedOfLight;
  ch.los_alpha = std::polar(free_space_gain(dist, lc),
                            wrap_to_2pi(-2.0 * kPi * cfg.f_c * ch.los_tau));
  for (int q = 0; q < n_paths; ++q) {
    Vec3 s = draw_scatterer(box, a, b, rng);
    double d1 = (s - a).norm();
    double d2 = (b - s).norm();
    ch.path_alpha.push_back(reflection_coefficient(rng) *
                            free_space_gain(d1, lc) * free_space_gain(d2, lc));
    ch.path_tau.push_back((d1 + d2) / kSpeedOfLight);
  }
  ch.h.resize(cfg.I);
  for (int i = 0; i < cfg.I; ++i) {
    cplx v = ch.los_alpha * std::polar(1.0, -cfg.zeta(i) * ch.los_tau);
    for (size_t q = 0; q < ch.path_alpha.size(); ++q) {
      v += ch.path_alpha[q] * std::polar(1.0, -cfg.zeta(i) * ch.path_tau[q]);
    }
    ch.h[i] = v;
  }
  return ch;
}

}  // namespace

CVec channel_tap(cplx alpha, double tau, const Direction& dir,
                 const ScenarioConfig& cfg, int i) {
  CVec a = steering_vector(dir, cfg.wavelength(i), cfg.d, cfg.N_h, cfg.N_v);
  cplx gain = alpha * std::polar(1.0, -cfg.zeta(i) * tau);
  return gain * a;
}

ChannelSet synth_channels(const ScenarioConfig& cfg) {
  ScatterBox box = deployment_box(cfg);
  auto rng = make_rng(derive_seed(cfg.rng_seed, "channels"));

  ChannelSet set;
  Vec3 su_nominal = 0.5 * (cfg.prior_cuboid.lo + cfg.prior_cuboid.hi);
  set.su_s = make_vector_channel(su_nominal, cfg.Q_su_s, box, cfg, rng);
  for (const Vec3& pu : cfg.pu_positions) {
    set.pu_s.push_back(make_vector_channel(pu, cfg.Q_pu_s, box, cfg, rng));
  }
  for (const Vec3& pu : cfg.pu_positions) {
    set.pu_pb.push_back(
        make_scalar_channel(cfg.p_pb, pu, cfg.Q_pu_pb, box, cfg, rng));
  }
  return set;
}

}  // namespace simcr
