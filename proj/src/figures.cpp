#include "simcr/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "simcr/artifacts.hpp"
#include "simcr/beam.hpp"
#include "simcr/channels.hpp"
#include "simcr/errors.hpp"
#include "simcr/fisher.hpp"
#include "simcr/metrics.hpp"
#include "simcr/parallel.hpp"
#include "simcr/rng.hpp"
#include "simcr/sim_stack.hpp"
#include "simcr/trainer.hpp"

namespace simcr {

const std::vector<std::string> kFigureIds = {
    "ao-convergence",  "per-subcarrier-bcrb", "bisection-trace",
    "grad-norms",      "bp-error",            "beampattern-2d",
    "beampattern-cuts", "bcrb-vs-power",      "bcrb-vs-layers",
    "se-vs-power",     "se-vs-pb",            "bcrb-vs-npu"};

namespace {

constexpr double kGainFloorDb = -200.0;
const std::vector<int> kLayerSweep = {1, 2, 4};
const std::vector<int> kSizeSweep = {4, 6};
const std::vector<double> kPowerMults = {0.1, 1.0, 10.0};

class Csv {
 public:
  Csv(const std::string& dir, const std::string& id) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    path_ = (fs::path(dir) / (id + ".csv")).string();
    os_.open(path_, std::ios::trunc);
    if (!os_) throw ConfigError("cannot write figure CSV: " + path_);
  }
  void header(const std::string& line) { os_ << line << '\n'; }
  Csv& field(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }
  Csv& field(int v) { return field(std::to_string(v)); }
  Csv& field(double v) { return field(fmt_g17(v)); }
  void endrow() {
    os_ << '\n';
    first_ = true;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream os_;
  bool first_ = true;
};

// Channels -> budget -> prior cache -> alternating optimization, the common
// front of every figure.
struct CoreRun {
  ChannelSet ch;
  InterferenceBudget budget;
  SampleCache cache;
  AlternateResult ao;

  CoreRun(const ScenarioConfig& cfg, int jobs)
      : ch(synth_channels(cfg)),
        budget(interference_budget(ch, cfg)),
        cache(draw_samples(cfg, derive_seed(cfg.rng_seed, "prior")), cfg),
        ao(alternate(cache, budget, cfg, jobs)) {}
};

SimStack stack_for(const ScenarioConfig& cfg, const std::string& cache_dir) {
  return cache_dir.empty() ? build_sim(cfg) : build_sim_cached(cfg, cache_dir);
}

std::vector<CVec> trained_responses(const SimStack& stack, const RMat& phi,
                                    int I) {
  std::vector<CVec> f(I);
  for (int i = 0; i < I; ++i) f[i] = end_to_end(stack, phi, i);
  return f;
}

double gain_db_floored(double power, double peak) {
  if (power <= 0.0 || peak <= 0.0) return kGainFloorDb;
  return std::max(kGainFloorDb, 10.0 * std::log10(power / peak));
}

void fig_ao_convergence(const ScenarioConfig& cfg, Csv& csv, int jobs,
                        const std::string&) {
  csv.header("iteration,bcrb,layer_size");
  for (int n : kSizeSweep) {
    ScenarioConfig c = cfg;
    c.N_h = c.N_v = n;
    CoreRun core(c, jobs);
    for (size_t k = 0; k < core.ao.bcrb.size(); ++k) {
      csv.field(static_cast<int>(k + 1))
          .field(core.ao.bcrb[k])
          .field(n * n);
      csv.endrow();
    }
  }
}

void fig_per_subcarrier_bcrb(const ScenarioConfig& cfg, Csv& csv, int jobs,
                             const std::string&) {
  csv.header("subcarrier,bcrb,layer_size");
  for (int n : kSizeSweep) {
    ScenarioConfig c = cfg;
    c.N_h = c.N_v = n;
    CoreRun core(c, jobs);
    auto rng = make_rng(derive_seed(c.rng_seed, "sweep-init"));
    std::vector<CVec> f_init(c.I);
    for (int i = 0; i < c.I; ++i) {
      f_init[i] = core.budget.eps[i] > 0.0
                      ? random_feasible(core.budget.R[i], core.budget.eps[i],
                                        core.budget.delta[i], rng)
                      : CVec::Zero(c.n_atoms());
    }
    std::vector<int> order(c.I);
    for (int i = 0; i < c.I; ++i) order[i] = i;
    SweepResult sweep = subcarrier_sweep(core.cache, core.budget, core.ao.d,
                                         f_init, order, c);
    for (int i = 0; i < c.I; ++i) {
      csv.field(i + 1).field(sweep.bcrb_after[i]).field(n * n);
      csv.endrow();
    }
  }
}

void fig_bisection_trace(const ScenarioConfig& cfg, Csv& csv, int jobs,
                         const std::string&) {
  CoreRun core(cfg, jobs);
  csv.header("subcarrier,iteration,g_over_eps");
  std::vector<std::vector<double>> ratios(cfg.I);
  parallel_for_indexed(cfg.I, jobs, [&](int i) {
    if (core.budget.eps[i] == 0.0) return;
    CMat A = assemble_quadratic(core.cache, core.ao.d, i);
    double xi_abs = cfg.xi_rel * core.budget.eps[i] / core.budget.delta[i];
    InnerResult r = inner_solve(A, core.budget.R[i], core.budget.eps[i],
                                core.budget.delta[i], xi_abs);
    for (const InnerTracePoint& t : r.trace) ratios[i].push_back(t.ratio);
    if (ratios[i].empty()) ratios[i].push_back(r.case_id == 2 ? r.g : 1.0);
  });
  size_t longest = 0;
  for (int i = 0; i < cfg.I; ++i) {
    for (size_t t = 0; t < ratios[i].size(); ++t) {
      csv.field(i + 1).field(static_cast<int>(t + 1)).field(ratios[i][t]);
      csv.endrow();
    }
    longest = std::max(longest, ratios[i].size());
  }
  // Subcarrier 0 row: the mean trace; finished traces hold their last value.
  for (size_t t = 0; t < longest; ++t) {
    double sum = 0.0;
    int counted = 0;
    for (int i = 0; i < cfg.I; ++i) {
      if (ratios[i].empty()) continue;
      sum += t < ratios[i].size() ? ratios[i][t] : ratios[i].back();
      ++counted;
    }
    if (counted == 0) break;
    csv.field(0).field(static_cast<int>(t + 1)).field(sum / counted);
    csv.endrow();
  }
}

void fig_train_history(const ScenarioConfig& cfg, Csv& csv, int jobs,
                       const std::string& cache_dir, bool grad_norms) {
  csv.header(grad_norms ? "epoch,mean_grad_norm,layers,layer_size"
                        : "epoch,normalized_bp_error,layers,layer_size");
  CoreRun core(cfg, jobs);
  for (int L : {2, 4}) {
    ScenarioConfig c = cfg;
    c.L = L;
    SimStack stack = stack_for(c, cache_dir);
    TrainResult tr = train(stack, core.ao.f, c, jobs);
    for (size_t e = 0; e < tr.history.size(); ++e) {
      csv.field(static_cast<int>(e + 1))
          .field(grad_norms ? tr.history[e].mean_grad_norm
                            : tr.history[e].bp_error)
          .field(L)
          .field(c.n_atoms());
      csv.endrow();
    }
  }
}

void fig_beampattern_2d(const ScenarioConfig& cfg, Csv& csv, int jobs,
                        const std::string& cache_dir) {
  CoreRun core(cfg, jobs);
  SimStack stack = stack_for(cfg, cache_dir);
  TrainResult tr = train(stack, core.ao.f, cfg, jobs);
  CVec f_opt = core.ao.f[0];
  CVec f_tr = end_to_end(stack, tr.phi, 0);
  double lam = cfg.wavelength(0);

  // az-major 2 degree grid; powers first, then one normalization pass.
  std::vector<double> p_opt, p_tr;
  p_opt.reserve(181 * 91);
  p_tr.reserve(181 * 91);
  for (int a = -180; a <= 180; a += 2) {
    for (int e = 0; e <= 180; e += 2) {
      Direction dir{e * kPi / 180.0, a * kPi / 180.0};
      CVec s = steering_vector(dir, lam, cfg.d, cfg.N_h, cfg.N_v);
      p_opt.push_back(std::norm((s.transpose() * f_opt).value()));
      p_tr.push_back(std::norm((s.transpose() * f_tr).value()));
    }
  }
  double peak_opt = *std::max_element(p_opt.begin(), p_opt.end());
  double peak_tr = *std::max_element(p_tr.begin(), p_tr.end());

  csv.header("source,az_deg,el_deg,gain_db");
  size_t idx = 0;
  for (int a = -180; a <= 180; a += 2) {
    for (int e = 0; e <= 180; e += 2, ++idx) {
      csv.field("optimal").field(a).field(e).field(
          gain_db_floored(p_opt[idx], peak_opt));
      csv.endrow();
    }
  }
  idx = 0;
  for (int a = -180; a <= 180; a += 2) {
    for (int e = 0; e <= 180; e += 2, ++idx) {
      csv.field("trained").field(a).field(e).field(
          gain_db_floored(p_tr[idx], peak_tr));
      csv.endrow();
    }
  }
  for (const Vec3& pu : cfg.pu_positions) {
    Direction dir = local_direction(pu, cfg.p_sb, cfg.R_s);
    csv.field("pu-aod")
        .field(dir.az * 180.0 / kPi)
        .field(dir.el * 180.0 / kPi)
        .field(0.0);
    csv.endrow();
  }
}

void fig_beampattern_cuts(const ScenarioConfig& cfg, Csv& csv, int jobs,
                          const std::string& cache_dir) {
  CoreRun core(cfg, jobs);
  struct Source {
    std::string name;
    CVec f;
  };
  std::vector<Source> sources;
  sources.push_back({"optimal", core.ao.f[0]});
  for (int L : kLayerSweep) {
    ScenarioConfig c = cfg;
    c.L = L;
    SimStack stack = stack_for(c, cache_dir);
    TrainResult tr = train(stack, core.ao.f, c, jobs);
    sources.push_back({"trained-L" + std::to_string(L),
                       end_to_end(stack, tr.phi, 0)});
  }

  double lam = cfg.wavelength(0);
  struct Cut {
    std::string name;
    std::vector<Direction> dirs;
    std::vector<int> angles;
  };
  std::vector<Cut> cuts(2);
  cuts[0].name = "el90";
  for (int a = -180; a <= 180; a += 2) {
    cuts[0].dirs.push_back(Direction{kPi / 2.0, a * kPi / 180.0});
    cuts[0].angles.push_back(a);
  }
  cuts[1].name = "az0";
  for (int e = 0; e <= 180; e += 2) {
    cuts[1].dirs.push_back(Direction{e * kPi / 180.0, 0.0});
    cuts[1].angles.push_back(e);
  }

  csv.header("cut,source,angle_deg,gain_db");
  for (const Source& src : sources) {
    // One normalization per source across both cuts.
    std::vector<std::vector<double>> powers(cuts.size());
    double peak = 0.0;
    for (size_t ci = 0; ci < cuts.size(); ++ci) {
      for (const Direction& dir : cuts[ci].dirs) {
        CVec s = steering_vector(dir, lam, cfg.d, cfg.N_h, cfg.N_v);
        double p = std::norm((s.transpose() * src.f).value());
        powers[ci].push_back(p);
        peak = std::max(peak, p);
      }
    }
    for (size_t ci = 0; ci < cuts.size(); ++ci) {
      for (size_t k = 0; k < powers[ci].size(); ++k) {
        csv.field(cuts[ci].name)
            .field(src.name)
            .field(cuts[ci].angles[k])
            .field(gain_db_floored(powers[ci][k], peak));
        csv.endrow();
      }
    }
  }
}

void fig_bcrb_vs_power(const ScenarioConfig& cfg, Csv& csv, int jobs,
                       const std::string& cache_dir) {
  CoreRun core(cfg, jobs);
  SimStack stack = stack_for(cfg, cache_dir);
  TrainResult tr = train(stack, core.ao.f, cfg, jobs);
  std::vector<CVec> f_tr = trained_responses(stack, tr.phi, cfg.I);
  double base_opt = normalize_psws(core.ao.f, cfg);
  double base_tr = normalize_psws(f_tr, cfg);

  csv.header("p_sws_dbm,source,bcrb");
  for (double mult : kPowerMults) {
    double p = mult * cfg.P_sws_target;
    BfimParts opt = bayesian_fim(core.ao.f, core.cache, base_opt * mult);
    csv.field(watts_to_dbm(p)).field("optimal").field(position_crb(opt.J_B));
    csv.endrow();
    BfimParts trained = bayesian_fim(f_tr, core.cache, base_tr * mult);
    csv.field(watts_to_dbm(p))
        .field("trained")
        .field(position_crb(trained.J_B));
    csv.endrow();
  }
}

void fig_bcrb_vs_layers(const ScenarioConfig& cfg, Csv& csv, int jobs,
                        const std::string& cache_dir) {
  CoreRun core(cfg, jobs);
  double bcrb_opt = position_crb(
      bayesian_fim(core.ao.f, core.cache, normalize_psws(core.ao.f, cfg)).J_B);
  csv.header("layers,source,bcrb");
  for (int L : kLayerSweep) {
    ScenarioConfig c = cfg;
    c.L = L;
    SimStack stack = stack_for(c, cache_dir);
    TrainResult tr = train(stack, core.ao.f, c, jobs);
    std::vector<CVec> f_tr = trained_responses(stack, tr.phi, cfg.I);
    double scale = normalize_psws(f_tr, cfg);
    double bcrb = position_crb(bayesian_fim(f_tr, core.cache, scale).J_B);
    csv.field(L).field("trained").field(bcrb);
    csv.endrow();
    csv.field(L).field("optimal").field(bcrb_opt);
    csv.endrow();
  }
}

void fig_se_vs_power(const ScenarioConfig& cfg, Csv& csv, int jobs,
                     const std::string& cache_dir) {
  CoreRun core(cfg, jobs);
  struct Source {
    std::string name;
    std::vector<CVec> f;
  };
  std::vector<Source> sources;
  sources.push_back({"optimal", core.ao.f});
  for (int L : kLayerSweep) {
    ScenarioConfig c = cfg;
    c.L = L;
    SimStack stack = stack_for(c, cache_dir);
    TrainResult tr = train(stack, core.ao.f, c, jobs);
    sources.push_back({"trained-L" + std::to_string(L),
                       trained_responses(stack, tr.phi, cfg.I)});
  }
  csv.header("p_sws_dbm,source,se_avg,se_bar_avg");
  for (double mult : kPowerMults) {
    double p = mult * cfg.P_sws_target;
    for (const Source& src : sources) {
      double scale = normalize_psws(src.f, cfg) * mult;
      LinkReport rep = link_report(src.f, core.ch, cfg, scale);
      csv.field(watts_to_dbm(p))
          .field(src.name)
          .field(rep.se_avg)
          .field(rep.se_bar_avg);
      csv.endrow();
    }
  }
}

void fig_se_vs_pb(const ScenarioConfig& cfg, Csv& csv, int jobs,
                  const std::string& cache_dir) {
  CoreRun core(cfg, jobs);
  SimStack stack = stack_for(cfg, cache_dir);
  TrainResult tr = train(stack, core.ao.f, cfg, jobs);
  std::vector<CVec> f_tr = trained_responses(stack, tr.phi, cfg.I);
  double scale_opt = normalize_psws(core.ao.f, cfg);
  double scale_tr = normalize_psws(f_tr, cfg);

  csv.header("p_pb_dbm,source,se_avg,se_bar_avg");
  for (double mult : kPowerMults) {
    ScenarioConfig c = cfg;
    c.P_pb = cfg.P_pb * mult;
    LinkReport opt = link_report(core.ao.f, core.ch, c, scale_opt);
    csv.field(watts_to_dbm(c.P_pb))
        .field("optimal")
        .field(opt.se_avg)
        .field(opt.se_bar_avg);
    csv.endrow();
    LinkReport trained = link_report(f_tr, core.ch, c, scale_tr);
    csv.field(watts_to_dbm(c.P_pb))
        .field("trained")
        .field(trained.se_avg)
        .field(trained.se_bar_avg);
    csv.endrow();
  }
}

void fig_bcrb_vs_npu(const ScenarioConfig& cfg, Csv& csv, int jobs,
                     const std::string& cache_dir) {
  csv.header("n_pu,source,bcrb");
  for (int n = 1; n <= cfg.n_pu(); ++n) {
    ScenarioConfig c = cfg;
    c.pu_positions.resize(n);
    CoreRun core(c, jobs);
    double bcrb_opt = position_crb(
        bayesian_fim(core.ao.f, core.cache, normalize_psws(core.ao.f, c)).J_B);
    SimStack stack = stack_for(c, cache_dir);
    TrainResult tr = train(stack, core.ao.f, c, jobs);
    std::vector<CVec> f_tr = trained_responses(stack, tr.phi, c.I);
    double bcrb_tr = position_crb(
        bayesian_fim(f_tr, core.cache, normalize_psws(f_tr, c)).J_B);
    csv.field(n).field("optimal").field(bcrb_opt);
    csv.endrow();
    csv.field(n).field("trained").field(bcrb_tr);
    csv.endrow();
  }
}

}  // namespace

std::string write_figure(const std::string& figure_id,
                         const ScenarioConfig& cfg, const std::string& out_dir,
                         int jobs, const std::string& cache_dir) {
  using Fn = std::function<void(const ScenarioConfig&, Csv&, int,
                                const std::string&)>;
  static const std::map<std::string, Fn> dispatch = {
      {"ao-convergence", fig_ao_convergence},
      {"per-subcarrier-bcrb", fig_per_subcarrier_bcrb},
      {"bisection-trace", fig_bisection_trace},
      {"grad-norms",
       [](const ScenarioConfig& c, Csv& csv, int j, const std::string& cd) {
         fig_train_history(c, csv, j, cd, true);
       }},
      {"bp-error",
       [](const ScenarioConfig& c, Csv& csv, int j, const std::string& cd) {
         fig_train_history(c, csv, j, cd, false);
       }},
      {"beampattern-2d", fig_beampattern_2d},
      {"beampattern-cuts", fig_beampattern_cuts},
      {"bcrb-vs-power", fig_bcrb_vs_power},
      {"bcrb-vs-layers", fig_bcrb_vs_layers},
      {"se-vs-power", fig_se_vs_power},
      {"se-vs-pb", fig_se_vs_pb},
      {"bcrb-vs-npu", fig_bcrb_vs_npu},
  };
  auto it = dispatch.find(figure_id);
  if (it == dispatch.end()) {
    std::string valid;
    for (const std::string& id : kFigureIds) {
      if (!valid.empty()) valid += ", ";
      valid += id;
    }
    throw ConfigError("unknown figure id '" + figure_id +
                      "'; valid ids: " + valid);
  }
  Csv csv(out_dir, figure_id);
  it->second(cfg, csv, jobs, cache_dir);
  return csv.path();
}

}  // namespace simcr
