#pragma once

#include <cmath>
#include <vector>

#include "simcr/channels.hpp"
#include "simcr/scenario.hpp"
#include "simcr/types.hpp"

namespace simcr {

inline double to_db(double x) { return 10.0 * std::log10(x); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double dbm_to_watts(double x) {
  return std::pow(10.0, (x - 30.0) / 10.0);
}

struct LinkReport {
  std::vector<double> sinr;          // with secondary interference
  std::vector<double> sinr_bar;      // interference-free
  std::vector<double> interference;  // f^H R_pu f, watts
  std::vector<double> se;            // log2(1 + sinr), bits/s/Hz
  std::vector<double> se_bar;
  double se_avg = 0.0;
  double se_bar_avg = 0.0;
  double qos_ratio = 1.0;  // se_avg / se_bar_avg
  double p_sws = 0.0;      // total radiated power, watts
};

// Primary-user link quality under the beamformer set `f`. `p_sb_scale`
// rescales the secondary transmit power (interference and radiated power are
// linear in it). sinr[i] <= sinr_bar[i] always; f = 0 gives qos_ratio = 1.
LinkReport link_report(const std::vector<CVec>& f, const ChannelSet& channels,
                       const ScenarioConfig& cfg, double p_sb_scale = 1.0);

// Total radiated power P_sws = I * P_sb / sum_i ||f[i]||^2.
double radiated_power(const std::vector<CVec>& f, double P_sb);

// Secondary-power scale factor that makes the radiated power hit
// cfg.P_sws_target. Throws InvalidInputError when every f[i] is zero.
double normalize_psws(const std::vector<CVec>& f, const ScenarioConfig& cfg);

}  // namespace simcr
