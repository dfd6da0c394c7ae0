#include "simcr/fisher.hpp"

#include <cmath>

#include "simcr/errors.hpp"
#include "simcr/linalg.hpp"
#include "simcr/rng.hpp"

namespace simcr {

std::vector<StateSample> draw_samples(const ScenarioConfig& cfg,
                                      std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * kPi);
  const Vec3& lo = cfg.prior_cuboid.lo;
  const Vec3& hi = cfg.prior_cuboid.hi;

  std::vector<StateSample> out;
  out.reserve(cfg.M_p);
  for (int m = 0; m < cfg.M_p; ++m) {
    StateSample s;
    bool ok = false;
    for (int tries = 0; tries < 1000 && !ok; ++tries) {
      for (int k = 0; k < 3; ++k) {
        s.p[k] = lo[k] + (hi[k] - lo[k]) * u01(rng);
      }
      Direction dir = local_direction(s.p, cfg.p_sb, cfg.R_s);
      ok = dir.el > 1e-6 && dir.el < kPi - 1e-6;
    }
    if (!ok) {
      throw DegenerateGeometryError(
          "prior sampling failed: cuboid hugs the array's polar axis");
    }
    s.rho = cfg.lambda_c() / (4.0 * kPi * (s.p - cfg.p_sb).norm());
    s.phi = uphase(rng);
    out.push_back(s);
  }
  return out;
}

DerivativeBundle tap_derivatives(const StateSample& s,
                                 const ScenarioConfig& cfg, int i,
                                 double p_sb) {
  Direction dir = local_direction(s.p, cfg.p_sb, cfg.R_s);
  double tau = (s.p - cfg.p_sb).norm() / kSpeedOfLight;
  double lam = cfg.wavelength(i);
  double zeta = cfg.zeta(i);

  CVec a = steering_vector(dir, lam, cfg.d, cfg.N_h, cfg.N_v);
  SteeringDerivatives sd =
      steering_derivative_factors(dir, lam, cfg.d, cfg.N_h, cfg.N_v);

  cplx gain = std::sqrt(p_sb) * std::polar(s.rho, s.phi) *
              std::polar(1.0, -zeta * tau);
  DerivativeBundle b;
  b.c = gain * a;
  b.dc.resize(a.size(), 5);
  b.dc.col(0) = b.c.cwiseProduct(sd.del_factor);
  b.dc.col(1) = b.c.cwiseProduct(sd.daz_factor);
  b.dc.col(2) = cplx(0.0, -zeta) * b.c;
  b.dc.col(3) = b.c / s.rho;
  b.dc.col(4) = cplx(0.0, 1.0) * b.c;
  return b;
}

Mat5 state_jacobian(const StateSample& s, const ScenarioConfig& cfg) {
  DirectionJacobian dj = direction_jacobian(s.p, cfg.p_sb, cfg.R_s);
  Mat5 T = Mat5::Zero();
  for (int k = 0; k < 3; ++k) {
    T(k, 0) = dj.del_dp[k];
    T(k, 1) = dj.daz_dp[k];
    T(k, 2) = dj.dtau_dp[k];
  }
  T(3, 3) = 1.0;
  T(4, 4) = 1.0;
  return T;
}

CMat transformed_derivatives(const StateSample& s, const ScenarioConfig& cfg,
                             int i, double p_sb) {
  DerivativeBundle b = tap_derivatives(s, cfg, i, p_sb);
  Mat5 T = state_jacobian(s, cfg);
  // ctilde_u = sum_j T(u,j) dc_j  =>  Ctilde = dc * T^T
  return b.dc * T.transpose().cast<cplx>();
}

SampleCache::SampleCache(std::vector<StateSample> samples,
                         const ScenarioConfig& cfg, std::size_t max_bytes)
    : samples_(std::move(samples)), cfg_(cfg) {
  const std::size_t n = samples_.size();
  const std::size_t bytes =
      n * static_cast<std::size_t>(cfg_.I) * cfg_.n_atoms() * 5 * sizeof(cplx);
  materialized_ = bytes <= max_bytes;
  if (!materialized_) return;
  ct_.resize(n * cfg_.I);
  for (std::size_t m = 0; m < n; ++m) {
    for (int i = 0; i < cfg_.I; ++i) {
      ct_[m * cfg_.I + i] =
          transformed_derivatives(samples_[m], cfg_, i, cfg_.P_sb);
    }
  }
}

void SampleCache::ctilde_into(int m, int i, CMat& out) const {
  if (materialized_) {
    out = ct_[static_cast<std::size_t>(m) * cfg_.I + i];
  } else {
    out = transformed_derivatives(samples_[static_cast<std::size_t>(m)], cfg_,
                                  i, cfg_.P_sb);
  }
}

BfimParts bayesian_fim(const std::vector<CVec>& f, const SampleCache& cache,
                       double p_sb_scale) {
  const ScenarioConfig& cfg = cache.config();
  if (f.size() != static_cast<size_t>(cfg.I)) {
    throw InvalidInputError("bayesian_fim: need one beamformer per subcarrier");
  }
  const int M = cache.count();
  const double w = 2.0 / cfg.sigma2() / M * p_sb_scale;

  BfimParts parts;
  CMat ct;
  for (int i = 0; i < cfg.I; ++i) {
    Mat5 Ki = Mat5::Zero();
    for (int m = 0; m < M; ++m) {
      cache.ctilde_into(m, i, ct);
      Eigen::Matrix<cplx, 5, 1> s = ct.transpose() * f[i];
      for (int u = 0; u < 5; ++u) {
        for (int v = 0; v < 5; ++v) {
          Ki(u, v) += (std::conj(s[u]) * s[v]).real();
        }
      }
    }
    parts.J_D += w * Ki;
  }
  parts.J_D = 0.5 * (parts.J_D + parts.J_D.transpose().eval());
  parts.J_P = cfg.epsilon_reg * Mat5::Identity();
  parts.J_B = parts.J_D + parts.J_P;
  return parts;
}

double position_crb(const Mat5& J_B) {
  double out = 0.0;
  for (int j = 0; j < 3; ++j) {
    RVec e = RVec::Zero(5);
    e[j] = 1.0;
    RVec x = solve_spd(J_B, e);
    out += x[j];
  }
  return out;
}

double trace_lower_bound(const Mat5& J_B) {
  double tr = J_B(0, 0) + J_B(1, 1) + J_B(2, 2);
  if (!(tr > 0.0)) {
    throw InvalidInputError("trace_lower_bound: nonpositive position trace");
  }
  return 9.0 / tr;
}

}  // namespace simcr
