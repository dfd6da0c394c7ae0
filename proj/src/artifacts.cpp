#include "simcr/artifacts.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "simcr/errors.hpp"

namespace simcr {

using json = nlohmann::ordered_json;

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

constexpr char kChannelMagic[9] = "SIMCRCH1";

void put_bytes(std::ofstream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
template <typename T>
void put(std::ofstream& os, T v) {
  put_bytes(os, &v, sizeof(T));
}
void get_bytes(std::ifstream& is, void* p, size_t n, const std::string& path) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw ConfigError("truncated channel artifact: " + path);
}
template <typename T>
T get(std::ifstream& is, const std::string& path) {
  T v;
  get_bytes(is, &v, sizeof(T), path);
  return v;
}

void put_direction(std::ofstream& os, const Direction& d) {
  put(os, d.el);
  put(os, d.az);
}
Direction get_direction(std::ifstream& is, const std::string& path) {
  Direction d;
  d.el = get<double>(is, path);
  d.az = get<double>(is, path);
  return d;
}

void put_vector_channel(std::ofstream& os, const VectorChannel& ch) {
  put(os, ch.los.rho);
  put(os, ch.los.phi);
  put(os, ch.los.tau);
  put_direction(os, ch.los.dir);
  put(os, static_cast<std::uint32_t>(ch.paths.size()));
  for (const ScatterPath& p : ch.paths) {
    put(os, p.alpha.real());
    put(os, p.alpha.imag());
    put(os, p.tau);
    put_direction(os, p.dir);
  }
  put(os, static_cast<std::uint32_t>(ch.h.size()));
  put(os, static_cast<std::uint32_t>(ch.h.empty() ? 0 : ch.h[0].size()));
  for (const CVec& hi : ch.h) {
    for (Eigen::Index n = 0; n < hi.size(); ++n) {
      put(os, hi[n].real());
      put(os, hi[n].imag());
    }
  }
}

VectorChannel get_vector_channel(std::ifstream& is, const std::string& path) {
  VectorChannel ch;
  ch.los.rho = get<double>(is, path);
  ch.los.phi = get<double>(is, path);
  ch.los.tau = get<double>(is, path);
  ch.los.dir = get_direction(is, path);
  auto n_paths = get<std::uint32_t>(is, path);
  ch.paths.resize(n_paths);
  for (ScatterPath& p : ch.paths) {
    double re = get<double>(is, path);
    double im = get<double>(is, path);
    p.alpha = cplx(re, im);
    p.tau = get<double>(is, path);
    p.dir = get_direction(is, path);
  }
  auto I = get<std::uint32_t>(is, path);
  auto N = get<std::uint32_t>(is, path);
  ch.h.resize(I);
  for (CVec& hi : ch.h) {
    hi.resize(N);
    for (std::uint32_t n = 0; n < N; ++n) {
      double re = get<double>(is, path);
      double im = get<double>(is, path);
      hi[n] = cplx(re, im);
    }
  }
  return ch;
}

void put_scalar_channel(std::ofstream& os, const ScalarChannel& ch) {
  put(os, ch.los_alpha.real());
  put(os, ch.los_alpha.imag());
  put(os, ch.los_tau);
  put(os, static_cast<std::uint32_t>(ch.path_alpha.size()));
  for (size_t q = 0; q < ch.path_alpha.size(); ++q) {
    put(os, ch.path_alpha[q].real());
    put(os, ch.path_alpha[q].imag());
    put(os, ch.path_tau[q]);
  }
  put(os, static_cast<std::uint32_t>(ch.h.size()));
  for (cplx v : ch.h) {
    put(os, v.real());
    put(os, v.imag());
  }
}

ScalarChannel get_scalar_channel(std::ifstream& is, const std::string& path) {
  ScalarChannel ch;
  double re = get<double>(is, path);
  double im = get<double>(is, path);
  ch.los_alpha = cplx(re, im);
  ch.los_tau = get<double>(is, path);
  auto n_paths = get<std::uint32_t>(is, path);
  ch.path_alpha.resize(n_paths);
  ch.path_tau.resize(n_paths);
  for (std::uint32_t q = 0; q < n_paths; ++q) {
    re = get<double>(is, path);
    im = get<double>(is, path);
    ch.path_alpha[q] = cplx(re, im);
    ch.path_tau[q] = get<double>(is, path);
  }
  auto I = get<std::uint32_t>(is, path);
  ch.h.resize(I);
  for (std::uint32_t i = 0; i < I; ++i) {
    re = get<double>(is, path);
    im = get<double>(is, path);
    ch.h[i] = cplx(re, im);
  }
  return ch;
}

json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

json cvec_to_json(const CVec& v) {
  json arr = json::array();
  for (Eigen::Index n = 0; n < v.size(); ++n) arr.push_back(complex_to_json(v[n]));
  return arr;
}

CVec cvec_from_json(const json& arr) {
  CVec v(arr.size());
  for (size_t n = 0; n < arr.size(); ++n) {
    v[static_cast<Eigen::Index>(n)] =
        cplx(arr[n][0].get<double>(), arr[n][1].get<double>());
  }
  return v;
}

json load_json_checked(const std::string& path, const char* kind,
                       std::uint64_t expected_hash, bool* missing) {
  std::ifstream is(path);
  if (!is) {
    *missing = true;
    return json();
  }
  *missing = false;
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed ") + kind + " artifact " + path +
                      ": " + e.what());
  }
  if (!j.contains("scenario_hash") ||
      j["scenario_hash"].get<std::string>() != fmt_hash(expected_hash)) {
    throw ConfigError(std::string(kind) + " artifact " + path +
                      " belongs to a different scenario; rerun its stage");
  }
  return j;
}

}  // namespace

void save_channels(const std::string& path, const ChannelSet& set,
                   std::uint64_t scenario_hash) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write channel artifact: " + path);
  put_bytes(os, kChannelMagic, 8);
  put(os, static_cast<std::uint32_t>(1));
  put(os, scenario_hash);
  put_vector_channel(os, set.su_s);
  put(os, static_cast<std::uint32_t>(set.pu_s.size()));
  for (const VectorChannel& ch : set.pu_s) put_vector_channel(os, ch);
  for (const ScalarChannel& ch : set.pu_pb) put_scalar_channel(os, ch);
  if (!os) throw ConfigError("write failed: " + path);
}

std::optional<ChannelSet> load_channels(const std::string& path,
                                        std::uint64_t expected_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  get_bytes(is, magic, 8, path);
  if (std::memcmp(magic, kChannelMagic, 8) != 0) {
    throw ConfigError("not a channel artifact: " + path);
  }
  auto version = get<std::uint32_t>(is, path);
  if (version != 1) {
    throw ConfigError("unsupported channel artifact version in " + path);
  }
  auto hash = get<std::uint64_t>(is, path);
  if (hash != expected_hash) {
    throw ConfigError("channel artifact " + path +
                      " belongs to a different scenario; rerun stage synth");
  }
  ChannelSet set;
  set.su_s = get_vector_channel(is, path);
  auto n_pu = get<std::uint32_t>(is, path);
  set.pu_s.resize(n_pu);
  for (VectorChannel& ch : set.pu_s) ch = get_vector_channel(is, path);
  set.pu_pb.resize(n_pu);
  for (ScalarChannel& ch : set.pu_pb) ch = get_scalar_channel(is, path);
  return set;
}

std::string fmt_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void save_budget(const std::string& path, const InterferenceBudget& budget,
                 std::uint64_t scenario_hash) {
  json j;
  j["scenario_hash"] = fmt_hash(scenario_hash);
  j["sigma_v2_watts"] = budget.sigma_v2;
  json rows = json::array();
  for (size_t i = 0; i < budget.eps.size(); ++i) {
    json row;
    row["subcarrier"] = i + 1;
    row["signal_power_watts"] = budget.S2[i];
    row["sinr_free_db"] = 10.0 * std::log10(budget.sinr_bar[i]);
    row["rate_threshold"] = budget.R_rate[i];
    row["interference_budget_watts"] = budget.eps[i];
    row["power_cap"] = budget.delta[i];
    rows.push_back(row);
  }
  j["subcarriers"] = rows;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write budget artifact: " + path);
  os << j.dump(2) << "\n";
}

void save_targets(const std::string& path, const AlternateResult& result,
                  std::uint64_t scenario_hash) {
  json j;
  j["scenario_hash"] = fmt_hash(scenario_hash);
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["objective"] = result.objective;
  j["bcrb"] = result.bcrb;
  json zs = json::array();
  for (int i : result.zero_subcarriers) zs.push_back(i + 1);
  j["zero_subcarriers"] = zs;
  json d = json::array();
  for (const Vec5& dj : result.d) {
    json col = json::array();
    for (int u = 0; u < 5; ++u) col.push_back(dj[u]);
    d.push_back(col);
  }
  j["d"] = d;
  json f = json::array();
  for (const CVec& fi : result.f) f.push_back(cvec_to_json(fi));
  j["f"] = f;
  json inner = json::array();
  for (const InnerResult& r : result.last_inner) {
    json ji;
    ji["case_id"] = r.case_id;
    ji["mu"] = r.mu;
    ji["g"] = r.g;
    ji["doublings"] = r.doublings;
    ji["bisections"] = r.bisections;
    ji["safeguarded"] = r.safeguarded;
    json trace = json::array();
    for (const InnerTracePoint& t : r.trace) {
      trace.push_back(json::array(
          {std::string(1, t.phase), t.iter, t.mu, t.g, t.ratio}));
    }
    ji["trace"] = trace;
    inner.push_back(ji);
  }
  j["inner"] = inner;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write target artifact: " + path);
  os << j.dump(2) << "\n";
}

std::optional<TargetArtifact> load_targets(const std::string& path,
                                           std::uint64_t expected_hash) {
  bool missing = false;
  json j = load_json_checked(path, "target", expected_hash, &missing);
  if (missing) return std::nullopt;
  TargetArtifact t;
  try {
    t.iterations = j["iterations"].get<int>();
    t.converged = j["converged"].get<bool>();
    t.objective = j["objective"].get<std::vector<double>>();
    t.bcrb = j["bcrb"].get<std::vector<double>>();
    for (const auto& z : j["zero_subcarriers"]) {
      t.zero_subcarriers.push_back(z.get<int>() - 1);
    }
    for (int jcol = 0; jcol < 3; ++jcol) {
      for (int u = 0; u < 5; ++u) t.d[jcol][u] = j["d"][jcol][u].get<double>();
    }
    for (const auto& fi : j["f"]) t.f.push_back(cvec_from_json(fi));
  } catch (const std::exception& e) {
    throw ConfigError("malformed target artifact " + path + ": " + e.what());
  }
  return t;
}

void save_phases(const std::string& path, const TrainResult& result,
                 std::uint64_t scenario_hash, std::uint64_t layout_hash) {
  json j;
  j["scenario_hash"] = fmt_hash(scenario_hash);
  j["layout_hash"] = fmt_hash(layout_hash);
  j["initial_bp_error"] = result.initial_bp_error;
  json phi = json::array();
  for (Eigen::Index l = 0; l < result.phi.rows(); ++l) {
    json row = json::array();
    for (Eigen::Index n = 0; n < result.phi.cols(); ++n) {
      row.push_back(result.phi(l, n));
    }
    phi.push_back(row);
  }
  j["phi"] = phi;
  json hist = json::array();
  for (size_t e = 0; e < result.history.size(); ++e) {
    const EpochStats& s = result.history[e];
    json row;
    row["epoch"] = e + 1;
    row["mean_grad_norm"] = s.mean_grad_norm;
    row["normalized_bp_error"] = s.bp_error;
    row["loss"] = s.mean_loss;
    hist.push_back(row);
  }
  j["history"] = hist;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write phase artifact: " + path);
  os << j.dump(2) << "\n";
}

std::optional<PhasesArtifact> load_phases(const std::string& path,
                                          std::uint64_t expected_hash,
                                          std::uint64_t expected_layout) {
  bool missing = false;
  json j = load_json_checked(path, "phase", expected_hash, &missing);
  if (missing) return std::nullopt;
  if (j["layout_hash"].get<std::string>() != fmt_hash(expected_layout)) {
    throw ConfigError("phase artifact " + path +
                      " was trained on a different stack layout");
  }
  PhasesArtifact p;
  try {
    p.initial_bp_error = j["initial_bp_error"].get<double>();
    const auto& phi = j["phi"];
    p.phi.resize(phi.size(), phi.empty() ? 0 : phi[0].size());
    for (Eigen::Index l = 0; l < p.phi.rows(); ++l) {
      for (Eigen::Index n = 0; n < p.phi.cols(); ++n) {
        p.phi(l, n) = phi[l][n].get<double>();
      }
    }
    for (const auto& row : j["history"]) {
      EpochStats s;
      s.mean_grad_norm = row["mean_grad_norm"].get<double>();
      s.bp_error = row["normalized_bp_error"].get<double>();
      s.mean_loss = row["loss"].get<double>();
      p.history.push_back(s);
    }
  } catch (const std::exception& e) {
    throw ConfigError("malformed phase artifact " + path + ": " + e.what());
  }
  return p;
}

}  // namespace simcr
