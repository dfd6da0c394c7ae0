#include "simcr/metrics.hpp"

#include "simcr/errors.hpp"

namespace simcr {

LinkReport link_report(const std::vector<CVec>& f, const ChannelSet& channels,
                       const ScenarioConfig& cfg, double p_sb_scale) {
  const int n_pu = cfg.n_pu();
  const double sigma_v2 = cfg.sigma2();
  LinkReport rep;
  rep.sinr.resize(cfg.I);
  rep.sinr_bar.resize(cfg.I);
  rep.interference.resize(cfg.I);
  rep.se.resize(cfg.I);
  rep.se_bar.resize(cfg.I);
  double norm_sum = 0.0;
  for (int i = 0; i < cfg.I; ++i) {
    double S2 = 0.0;
    double I2 = 0.0;
    for (int r = 0; r < n_pu; ++r) {
      S2 += std::norm(channels.pu_pb[r].h.at(i));
      cplx proj = channels.pu_s[r].h.at(i).transpose() * f.at(i);
      I2 += std::norm(proj);
    }
    S2 *= cfg.P_pb / n_pu;
    I2 *= cfg.P_sb * p_sb_scale / n_pu;
    rep.interference[i] = I2;
    rep.sinr[i] = S2 / (I2 + sigma_v2);
    rep.sinr_bar[i] = S2 / sigma_v2;
    rep.se[i] = std::log2(1.0 + rep.sinr[i]);
    rep.se_bar[i] = std::log2(1.0 + rep.sinr_bar[i]);
    rep.se_avg += rep.se[i];
    rep.se_bar_avg += rep.se_bar[i];
    norm_sum += f.at(i).squaredNorm();
  }
  rep.se_avg /= cfg.I;
  rep.se_bar_avg /= cfg.I;
  rep.qos_ratio =
      rep.se_bar_avg > 0.0 ? rep.se_avg / rep.se_bar_avg : 1.0;
  rep.p_sws =
      norm_sum > 0.0 ? cfg.I * cfg.P_sb * p_sb_scale / norm_sum : 0.0;
  return rep;
}

double radiated_power(const std::vector<CVec>& f, double P_sb) {
  double norm_sum = 0.0;
  for (const CVec& fi : f) norm_sum += fi.squaredNorm();
  if (norm_sum <= 0.0) {
    throw InvalidInputError("radiated_power: all beamformers are zero");
  }
  return static_cast<double>(f.size()) * P_sb / norm_sum;
}

double normalize_psws(const std::vector<CVec>& f, const ScenarioConfig& cfg) {
  double p_sws = radiated_power(f, cfg.P_sb);
  return cfg.P_sws_target / p_sws;
}

}  // namespace simcr
