#include "simcr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "json.hpp"

#include "simcr/artifacts.hpp"
#include "simcr/beam.hpp"
#include "simcr/channels.hpp"
#include "simcr/errors.hpp"
#include "simcr/fisher.hpp"
#include "simcr/metrics.hpp"
#include "simcr/rng.hpp"
#include "simcr/sim_stack.hpp"
#include "simcr/trainer.hpp"

namespace simcr {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<std::string> kStageOrder = {"synth", "budget", "alternate",
                                              "train", "evaluate"};

namespace {

std::string iso_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double dbm_or_floor(double watts) {
  // Keeps artifacts free of -inf when a beamformer is exactly zero.
  return watts > 0.0 ? watts_to_dbm(watts) : -400.0;
}

// Lazily materialized pipeline state shared between stages in one invocation.
struct StageContext {
  const RunOptions& opts;
  std::uint64_t hash;
  std::optional<ChannelSet> channels;
  std::optional<InterferenceBudget> budget;
  std::optional<SampleCache> cache;
  std::optional<TargetArtifact> targets;
  std::optional<PhasesArtifact> phases;

  explicit StageContext(const RunOptions& o)
      : opts(o), hash(scenario_hash(o.cfg)) {}

  std::string path(const char* name) const {
    return (fs::path(opts.out_dir) / name).string();
  }

  const ChannelSet& need_channels(const char* stage) {
    if (!channels) {
      channels = load_channels(path("channels.bin"), hash);
      if (!channels) {
        throw ConfigError(std::string("stage '") + stage +
                          "' needs channels.bin; run stage 'synth' into the "
                          "same output directory first");
      }
    }
    return *channels;
  }

  const InterferenceBudget& need_budget(const char* stage) {
    if (!budget) budget = interference_budget(need_channels(stage), opts.cfg);
    return *budget;
  }

  const SampleCache& need_cache() {
    if (!cache) {
      cache.emplace(draw_samples(opts.cfg, derive_seed(opts.cfg.rng_seed, "prior")),
                    opts.cfg);
    }
    return *cache;
  }

  const TargetArtifact& need_targets(const char* stage) {
    if (!targets) {
      targets = load_targets(path("targets.json"), hash);
      if (!targets) {
        throw ConfigError(std::string("stage '") + stage +
                          "' needs targets.json; run stage 'alternate' into "
                          "the same output directory first");
      }
    }
    return *targets;
  }

  const PhasesArtifact& need_phases(const char* stage) {
    if (!phases) {
      phases = load_phases(path("phases.json"), hash,
                           stack_layout_hash(opts.cfg));
      if (!phases) {
        throw ConfigError(std::string("stage '") + stage +
                          "' needs phases.json; run stage 'train' into the "
                          "same output directory first");
      }
    }
    return *phases;
  }

  SimStack build_stack() const {
    return opts.cache_dir.empty() ? build_sim(opts.cfg)
                                  : build_sim_cached(opts.cfg, opts.cache_dir);
  }
};

TargetArtifact to_targets(const AlternateResult& r) {
  TargetArtifact t;
  t.f = r.f;
  t.d = r.d;
  t.objective = r.objective;
  t.bcrb = r.bcrb;
  t.iterations = r.iterations;
  t.converged = r.converged;
  t.zero_subcarriers = r.zero_subcarriers;
  return t;
}

json stage_synth(StageContext& ctx, std::vector<std::string>& artifacts) {
  ctx.channels = synth_channels(ctx.opts.cfg);
  save_channels(ctx.path("channels.bin"), *ctx.channels, ctx.hash);
  artifacts.push_back("channels.bin");
  json m;
  m["scatter_paths_su"] = static_cast<int>(ctx.channels->su_s.paths.size());
  return m;
}

json stage_budget(StageContext& ctx, std::vector<std::string>& artifacts) {
  const InterferenceBudget& b = ctx.need_budget("budget");
  save_budget(ctx.path("budget.json"), b, ctx.hash);
  artifacts.push_back("budget.json");
  json m;
  m["eps_min_watts"] = *std::min_element(b.eps.begin(), b.eps.end());
  m["eps_max_watts"] = *std::max_element(b.eps.begin(), b.eps.end());
  return m;
}

json stage_alternate(StageContext& ctx, std::vector<std::string>& artifacts) {
  const InterferenceBudget& b = ctx.need_budget("alternate");
  AlternateResult r = alternate(ctx.need_cache(), b, ctx.opts.cfg, ctx.opts.jobs);
  save_targets(ctx.path("targets.json"), r, ctx.hash);
  artifacts.push_back("targets.json");
  json m;
  m["iterations"] = r.iterations;
  m["converged"] = r.converged;
  m["bcrb"] = r.bcrb.back();
  m["objective"] = r.objective.back();
  ctx.targets = to_targets(r);
  return m;
}

json stage_train(StageContext& ctx, std::vector<std::string>& artifacts) {
  const TargetArtifact& t = ctx.need_targets("train");
  SimStack stack = ctx.build_stack();
  TrainResult tr = train(stack, t.f, ctx.opts.cfg, ctx.opts.jobs);
  save_phases(ctx.path("phases.json"), tr, ctx.hash,
              stack_layout_hash(ctx.opts.cfg));
  artifacts.push_back("phases.json");

  std::ofstream csv(ctx.path("train_history.csv"), std::ios::trunc);
  if (!csv) throw ConfigError("cannot write " + ctx.path("train_history.csv"));
  csv << "epoch,mean_grad_norm,normalized_bp_error,loss\n";
  for (size_t e = 0; e < tr.history.size(); ++e) {
    const EpochStats& s = tr.history[e];
    csv << (e + 1) << ',' << fmt_g17(s.mean_grad_norm) << ','
        << fmt_g17(s.bp_error) << ',' << fmt_g17(s.mean_loss) << '\n';
  }
  artifacts.push_back("train_history.csv");

  PhasesArtifact p;
  p.phi = tr.phi;
  p.history = tr.history;
  p.initial_bp_error = tr.initial_bp_error;
  ctx.phases = std::move(p);

  json m;
  m["initial_bp_error"] = tr.initial_bp_error;
  if (!tr.history.empty()) {
    m["final_bp_error"] = tr.history.back().bp_error;
    m["final_loss"] = tr.history.back().mean_loss;
  }
  return m;
}

json stage_evaluate(StageContext& ctx, std::vector<std::string>& artifacts) {
  const ScenarioConfig& cfg = ctx.opts.cfg;
  const ChannelSet& ch = ctx.need_channels("evaluate");
  const TargetArtifact& t = ctx.need_targets("evaluate");
  const PhasesArtifact& p = ctx.need_phases("evaluate");

  SimStack stack = ctx.build_stack();
  std::vector<CVec> f_tr(cfg.I);
  for (int i = 0; i < cfg.I; ++i) f_tr[i] = end_to_end(stack, p.phi, i);

  const SampleCache& cache = ctx.need_cache();
  std::ofstream csv(ctx.path("evaluate.csv"), std::ios::trunc);
  if (!csv) throw ConfigError("cannot write " + ctx.path("evaluate.csv"));
  csv << "source,subcarrier,sinr_db,sinr_bar_db,interference_dbm,se,se_bar\n";

  json m;
  struct Source {
    const char* name;
    const std::vector<CVec>* f;
  } sources[] = {{"optimal", &t.f}, {"trained", &f_tr}};
  for (const Source& src : sources) {
    double scale = normalize_psws(*src.f, cfg);
    LinkReport rep = link_report(*src.f, ch, cfg, scale);
    for (int i = 0; i < cfg.I; ++i) {
      csv << src.name << ',' << (i + 1) << ',' << fmt_g17(to_db(rep.sinr[i]))
          << ',' << fmt_g17(to_db(rep.sinr_bar[i])) << ','
          << fmt_g17(dbm_or_floor(rep.interference[i])) << ','
          << fmt_g17(rep.se[i]) << ',' << fmt_g17(rep.se_bar[i]) << '\n';
    }
    BfimParts fim = bayesian_fim(*src.f, cache, scale);
    json sm;
    sm["bcrb"] = position_crb(fim.J_B);
    sm["trace_floor"] = trace_lower_bound(fim.J_B);
    sm["qos_ratio"] = rep.qos_ratio;
    sm["se_avg"] = rep.se_avg;
    sm["se_bar_avg"] = rep.se_bar_avg;
    sm["p_sws_dbm"] = watts_to_dbm(rep.p_sws);
    m[src.name] = sm;
  }
  m["trained"]["bp_error"] = normalized_bp_error(stack, p.phi, t.f, cfg);
  artifacts.push_back("evaluate.csv");
  return m;
}

}  // namespace

void run_stages(const RunOptions& opts, std::ostream& log) {
  for (const std::string& s : opts.stages) {
    if (std::find(kStageOrder.begin(), kStageOrder.end(), s) ==
        kStageOrder.end()) {
      std::string valid;
      for (const std::string& k : kStageOrder) {
        if (!valid.empty()) valid += ", ";
        valid += k;
      }
      throw ConfigError("unknown stage '" + s + "'; valid stages: " + valid);
    }
  }
  fs::create_directories(opts.out_dir);
  StageContext ctx(opts);

  auto requested = [&](const std::string& s) {
    return opts.stages.empty() ||
           std::find(opts.stages.begin(), opts.stages.end(), s) !=
               opts.stages.end();
  };

  json stages = json::array();
  for (const std::string& stage : kStageOrder) {
    if (!requested(stage)) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> artifacts;
    json metrics;
    if (stage == "synth") metrics = stage_synth(ctx, artifacts);
    if (stage == "budget") metrics = stage_budget(ctx, artifacts);
    if (stage == "alternate") metrics = stage_alternate(ctx, artifacts);
    if (stage == "train") metrics = stage_train(ctx, artifacts);
    if (stage == "evaluate") metrics = stage_evaluate(ctx, artifacts);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    json rec;
    rec["name"] = stage;
    rec["wall_ms"] = ms;
    rec["artifacts"] = artifacts;
    rec["metrics"] = metrics;
    stages.push_back(rec);
    log << "[" << stage << "] done in " << fmt_g17(ms) << " ms";
    for (const std::string& a : artifacts) log << " " << a;
    log << "\n";
  }

  json manifest;
  manifest["version"] = "simcr-0.1.0";
  manifest["scenario_hash"] = fmt_hash(ctx.hash);
  manifest["seed"] = opts.cfg.rng_seed;
  manifest["created_utc"] = iso_utc_now();
  manifest["stages"] = stages;
  std::ofstream os(ctx.path("manifest.json"), std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + ctx.path("manifest.json"));
  os << manifest.dump(2) << "\n";
}

void validate_report(const ScenarioConfig& cfg, std::ostream& os) {
  validate_scenario(cfg);
  os << "scenario hash   " << fmt_hash(scenario_hash(cfg)) << "\n";
  os << "atoms per layer " << cfg.n_atoms() << " (" << cfg.N_h << " x "
     << cfg.N_v << "), layers " << cfg.L << "\n";
  os << "noise power     " << fmt_g17(cfg.sigma2()) << " W per subcarrier\n";
  os << "subcarriers:\n";
  for (int i = 0; i < cfg.I; ++i) {
    os << "  " << (i + 1) << ": f = " << fmt_g17(cfg.freq(i))
       << " Hz, lambda = " << fmt_g17(cfg.wavelength(i)) << " m\n";
  }
  ChannelSet ch = synth_channels(cfg);
  InterferenceBudget b = interference_budget(ch, cfg);
  os << "interference budget per subcarrier (W):\n";
  for (int i = 0; i < cfg.I; ++i) {
    os << "  " << (i + 1) << ": eps = " << fmt_g17(b.eps[i])
       << ", clean sinr = " << fmt_g17(to_db(b.sinr_bar[i])) << " dB\n";
  }
  os << "all checks passed\n";
}

}  // namespace simcr
