#include "simcr/sim_stack.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "simcr/errors.hpp"
#include "simcr/rng.hpp"

namespace simcr {

namespace {

// In-plane atom offsets; the grid is centered on the stack axis.
inline double plane_y(int n, int n_h, int n_v, double d) {
  int mh = n / n_v;
  return (mh - 0.5 * (n_h - 1)) * d;
}
inline double plane_z(int n, int n_v, double d) {
  int mv = n % n_v;
  return (mv - 0.5 * (n_v - 1)) * d;
}

RMat random_phases(int L, int N, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  RMat phi(L, N);
  for (int l = 0; l < L; ++l) {
    for (int n = 0; n < N; ++n) {
      double x = u(rng);
      phi(l, n) = (x == -kPi) ? kPi : x;  // keep the (-pi, pi] convention
    }
  }
  return phi;
}

CVec phase_column(const RMat& phi, int layer) {
  CVec p(phi.cols());
  for (Eigen::Index n = 0; n < phi.cols(); ++n) {
    p[n] = std::polar(1.0, phi(layer, n));
  }
  return p;
}

}  // namespace

cplx coupling_coefficient(double dist, double freq, double A_s, double d_s) {
  if (!(dist > 0.0)) {
    throw InvalidInputError("coupling_coefficient: distance must be positive");
  }
  double k = 2.0 * kPi * dist * freq / kSpeedOfLight;
  cplx radial(1.0 / (2.0 * kPi * dist), -freq / kSpeedOfLight);
  return (A_s * d_s / (dist * dist)) * radial * std::polar(1.0, k);
}

std::uint64_t stack_layout_hash(const ScenarioConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "L=%d N_h=%d N_v=%d I=%d f_c=%.17g df=%.17g d=%.17g d_s=%.17g A_s=%.17g",
                cfg.L, cfg.N_h, cfg.N_v, cfg.I, cfg.f_c, cfg.delta_f, cfg.d,
                cfg.d_s, cfg.A_s);
  return fnv1a64(buf);
}

SimStack build_sim(const ScenarioConfig& cfg) {
  SimStack st;
  st.L = cfg.L;
  st.N_h = cfg.N_h;
  st.N_v = cfg.N_v;
  st.I = cfg.I;
  const int N = st.n_atoms();

  // Pairwise distances depend only on in-plane offsets plus the axial gap,
  // so one matrix per subcarrier serves every layer pair.
  RMat dist(N, N);
  for (int n = 0; n < N; ++n) {
    double yn = plane_y(n, cfg.N_h, cfg.N_v, cfg.d);
    double zn = plane_z(n, cfg.N_v, cfg.d);
    for (int m = 0; m < N; ++m) {
      double dy = yn - plane_y(m, cfg.N_h, cfg.N_v, cfg.d);
      double dz = zn - plane_z(m, cfg.N_v, cfg.d);
      dist(n, m) = std::sqrt(cfg.d_s * cfg.d_s + dy * dy + dz * dz);
    }
  }
  RVec feed_dist(N);
  for (int n = 0; n < N; ++n) {
    double yn = plane_y(n, cfg.N_h, cfg.N_v, cfg.d);
    double zn = plane_z(n, cfg.N_v, cfg.d);
    feed_dist[n] = std::sqrt(cfg.d_s * cfg.d_s + yn * yn + zn * zn);
  }

  st.W.assign(std::max(0, cfg.L - 1), std::vector<CMat>(cfg.I));
  st.w_feed.resize(cfg.I);
  for (int i = 0; i < cfg.I; ++i) {
    double f = cfg.freq(i);
    CMat Wi(N, N);
    for (int n = 0; n < N; ++n) {
      for (int m = 0; m < N; ++m) {
        Wi(n, m) = coupling_coefficient(dist(n, m), f, cfg.A_s, cfg.d_s);
      }
    }
    for (int l = 0; l + 1 < cfg.L; ++l) st.W[l][i] = Wi;
    CVec wi(N);
    for (int n = 0; n < N; ++n) {
      wi[n] = coupling_coefficient(feed_dist[n], f, cfg.A_s, cfg.d_s);
    }
    st.w_feed[i] = std::move(wi);
  }
  st.phi = random_phases(cfg.L, N, derive_seed(cfg.rng_seed, "phases"));
  return st;
}

SimStack build_sim_cached(const ScenarioConfig& cfg,
                          const std::string& cache_dir) {
  std::uint64_t h = stack_layout_hash(cfg);
  char name[64];
  std::snprintf(name, sizeof(name), "wstack_%016llx.bin",
                static_cast<unsigned long long>(h));
  std::filesystem::path path = std::filesystem::path(cache_dir) / name;
  if (auto cached = load_stack_cache(path.string(), h)) {
    cached->phi = random_phases(cfg.L, cached->n_atoms(),
                                derive_seed(cfg.rng_seed, "phases"));
    return std::move(*cached);
  }
  SimStack st = build_sim(cfg);
  std::filesystem::create_directories(cache_dir);
  save_stack_cache(path.string(), st, h);
  return st;
}

CVec end_to_end(const SimStack& stack, const RMat& phi, int i) {
  if (phi.rows() != stack.L || phi.cols() != stack.n_atoms()) {
    throw InvalidInputError("end_to_end: phase matrix shape mismatch");
  }
  CVec x = phase_column(phi, 0).cwiseProduct(stack.w_feed.at(i));
  for (int l = 1; l < stack.L; ++l) {
    x = stack.W[l - 1][i] * x;
    x = phase_column(phi, l).cwiseProduct(x);
  }
  return x;
}

Recursion forward_backward(const SimStack& stack, const RMat& phi, int i) {
  if (phi.rows() != stack.L || phi.cols() != stack.n_atoms()) {
    throw InvalidInputError("forward_backward: phase matrix shape mismatch");
  }
  const int L = stack.L;
  const int N = stack.n_atoms();
  Recursion rec;
  rec.r.resize(L);
  rec.Lmat.resize(L);
  rec.r[0] = stack.w_feed.at(i);
  for (int l = 1; l < L; ++l) {
    rec.r[l] =
        stack.W[l - 1][i] * phase_column(phi, l - 1).cwiseProduct(rec.r[l - 1]);
  }
  rec.Lmat[L - 1] = CMat::Identity(N, N);
  for (int l = L - 2; l >= 0; --l) {
    rec.Lmat[l] = rec.Lmat[l + 1] *
                  (phase_column(phi, l + 1).asDiagonal() * stack.W[l][i]);
  }
  rec.f = phase_column(phi, L - 1).cwiseProduct(rec.r[L - 1]);
  return rec;
}

namespace {
constexpr char kMagic[9] = "SIMCRWT1";

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
bool get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return bool(is);
}
}  // namespace

void save_stack_cache(const std::string& path, const SimStack& stack,
                      std::uint64_t layout_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write stack cache '" + path + "'");
  os.write(kMagic, 8);
  put(os, std::uint32_t{1});
  put(os, layout_hash);
  put(os, std::int32_t{stack.L});
  put(os, std::int32_t{stack.N_h});
  put(os, std::int32_t{stack.N_v});
  put(os, std::int32_t{stack.I});
  const int N = stack.n_atoms();
  for (int i = 0; i < stack.I; ++i) {
    const CMat& Wi = stack.L > 1 ? stack.W[0][i] : CMat::Zero(0, 0);
    if (stack.L > 1) {
      os.write(reinterpret_cast<const char*>(Wi.data()),
               sizeof(cplx) * N * N);
    }
    os.write(reinterpret_cast<const char*>(stack.w_feed[i].data()),
             sizeof(cplx) * N);
  }
}

std::optional<SimStack> load_stack_cache(const std::string& path,
                                         std::uint64_t expected_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string_view(magic, 8) != std::string_view(kMagic, 8)) {
    return std::nullopt;
  }
  std::uint32_t version = 0;
  std::uint64_t hash = 0;
  if (!get(is, version) || version != 1) return std::nullopt;
  if (!get(is, hash) || hash != expected_hash) return std::nullopt;
  std::int32_t L = 0, N_h = 0, N_v = 0, I = 0;
  if (!get(is, L) || !get(is, N_h) || !get(is, N_v) || !get(is, I)) {
    return std::nullopt;
  }
  SimStack st;
  st.L = L;
  st.N_h = N_h;
  st.N_v = N_v;
  st.I = I;
  const int N = st.n_atoms();
  st.W.assign(std::max(0, L - 1), std::vector<CMat>(I));
  st.w_feed.resize(I);
  for (int i = 0; i < I; ++i) {
    if (L > 1) {
      CMat Wi(N, N);
      is.read(reinterpret_cast<char*>(Wi.data()), sizeof(cplx) * N * N);
      if (!is) return std::nullopt;
      for (int l = 0; l + 1 < L; ++l) st.W[l][i] = Wi;
    }
    CVec wi(N);
    is.read(reinterpret_cast<char*>(wi.data()), sizeof(cplx) * N);
    if (!is) return std::nullopt;
    st.w_feed[i] = std::move(wi);
  }
  st.phi = RMat::Zero(L, N);
  return st;
}

}  // namespace simcr
