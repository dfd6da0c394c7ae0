#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <random>

#include "simcr/rng.hpp"
#include "simcr/scenario.hpp"
#include "simcr/sim_stack.hpp"

using namespace simcr;

namespace {

ScenarioConfig tiny_stack_config(int L, int n_h, int n_v) {
  ScenarioConfig cfg = default_scenario();
  cfg.L = L;
  cfg.N_h = n_h;
  cfg.N_v = n_v;
  return cfg;
}

// Centered in-plane offset of atom n (row-major horizontal-major order).
void atom_offset(int n, int n_h, int n_v, double d, double* y, double* z) {
  int mh = n / n_v;
  int mv = n % n_v;
  *y = (mh - 0.5 * (n_h - 1)) * d;
  *z = (mv - 0.5 * (n_v - 1)) * d;
}

RMat random_phi(int L, int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  RMat phi(L, N);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < N; ++n) phi(l, n) = u(rng);
  return phi;
}

}  // namespace

TEST_CASE("coupling coefficient restates the spherical-wave kernel") {
  double d_s = 0.015, A_s = 2.5e-5;
  for (double dist : {0.015, 0.0213, 0.04}) {
    for (double freq : {30e9, 29.993e9}) {
      cplx got = coupling_coefficient(dist, freq, A_s, d_s);
      cplx want = (A_s * d_s / (dist * dist)) *
                  (cplx(1.0 / (2.0 * kPi * dist), -freq / kSpeedOfLight)) *
                  std::polar(1.0, 2.0 * kPi * dist * freq / kSpeedOfLight);
      CHECK(std::abs(got - want) < 1e-15 * std::abs(want));
    }
  }
}

TEST_CASE("coupling matrices tabulate the kernel over the atom grid") {
  ScenarioConfig cfg = tiny_stack_config(3, 2, 2);
  SimStack stack = build_sim(cfg);
  REQUIRE(stack.W.size() == 2);      // L-1 inter-layer couplings
  REQUIRE(stack.W[0].size() == 8);   // one per subcarrier
  REQUIRE(stack.W[0][0].rows() == 4);

  for (int i : {0, 7}) {
    for (int n = 0; n < 4; ++n) {
      for (int m = 0; m < 4; ++m) {
        double yn, zn, ym, zm;
        atom_offset(n, 2, 2, cfg.d, &yn, &zn);
        atom_offset(m, 2, 2, cfg.d, &ym, &zm);
        double dist = std::sqrt(cfg.d_s * cfg.d_s + (yn - ym) * (yn - ym) +
                                (zn - zm) * (zn - zm));
        cplx want = coupling_coefficient(dist, cfg.freq(i), cfg.A_s, cfg.d_s);
        CHECK(std::abs(stack.W[0][i](n, m) - want) < 1e-15 * std::abs(want));
        // identical coaxial layers: same matrix at every depth
        CHECK(stack.W[1][i](n, m) == stack.W[0][i](n, m));
      }
    }
  }
}

TEST_CASE("feed vector is a point source behind the first layer") {
  ScenarioConfig cfg = tiny_stack_config(2, 3, 2);
  SimStack stack = build_sim(cfg);
  REQUIRE(stack.w_feed.size() == 8);
  for (int i : {0, 3}) {
    for (int n = 0; n < 6; ++n) {
      double yn, zn;
      atom_offset(n, 3, 2, cfg.d, &yn, &zn);
      double dist = std::sqrt(cfg.d_s * cfg.d_s + yn * yn + zn * zn);
      cplx want = coupling_coefficient(dist, cfg.freq(i), cfg.A_s, cfg.d_s);
      CHECK(std::abs(stack.w_feed[i][n] - want) < 1e-15 * std::abs(want));
    }
  }
}

TEST_CASE("single-layer response is the phased feed") {
  ScenarioConfig cfg = tiny_stack_config(1, 2, 2);
  SimStack stack = build_sim(cfg);
  RMat phi = random_phi(1, 4, 3);
  CVec f = end_to_end(stack, phi, 2);
  for (int n = 0; n < 4; ++n) {
    cplx want = std::polar(1.0, phi(0, n)) * stack.w_feed[2][n];
    CHECK(std::abs(f[n] - want) < 1e-15 * std::abs(want));
  }
}

TEST_CASE("end-to-end response equals the explicit matrix product") {
  ScenarioConfig cfg = tiny_stack_config(4, 2, 3);
  SimStack stack = build_sim(cfg);
  RMat phi = random_phi(4, 6, 17);
  for (int i : {0, 5}) {
    CVec acc = stack.w_feed[i];
    for (int l = 0; l < 4; ++l) {
      for (int n = 0; n < 6; ++n) acc[n] *= std::polar(1.0, phi(l, n));
      if (l < 3) acc = (stack.W[l][i] * acc).eval();
    }
    CVec f = end_to_end(stack, phi, i);
    CHECK((f - acc).norm() < 1e-13 * acc.norm());
  }
}

TEST_CASE("forward-backward recursion reproduces the response at every layer") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    ScenarioConfig cfg = tiny_stack_config(3, 3, 3);
    cfg.rng_seed = seed;
    SimStack stack = build_sim(cfg);
    RMat phi = random_phi(3, 9, seed + 100);
    for (int i : {0, 7}) {
      Recursion rec = forward_backward(stack, phi, i);
      CVec direct = end_to_end(stack, phi, i);
      CHECK((rec.f - direct).norm() < 1e-13 * direct.norm());
      CHECK((rec.r[0] - stack.w_feed[i]).norm() == 0.0);
      for (int l = 0; l < 3; ++l) {
        CVec phased = rec.r[l];
        for (int n = 0; n < 9; ++n) phased[n] *= std::polar(1.0, phi(l, n));
        CVec via = rec.Lmat[l] * phased;
        CHECK((via - rec.f).norm() < 1e-12 * rec.f.norm());
      }
    }
  }
}

TEST_CASE("phases wrap: shifting any entry by 2*pi leaves the response") {
  ScenarioConfig cfg = tiny_stack_config(2, 2, 2);
  SimStack stack = build_sim(cfg);
  RMat phi = random_phi(2, 4, 5);
  CVec f0 = end_to_end(stack, phi, 1);
  RMat shifted = phi;
  shifted(1, 2) += 2.0 * kPi;
  shifted(0, 0) -= 2.0 * kPi;
  CVec f1 = end_to_end(stack, shifted, 1);
  CHECK((f0 - f1).norm() < 1e-12 * f0.norm());
}

TEST_CASE("build_sim seeds phases deterministically in (-pi, pi]") {
  ScenarioConfig cfg = tiny_stack_config(3, 2, 2);
  SimStack a = build_sim(cfg);
  SimStack b = build_sim(cfg);
  CHECK(a.phi == b.phi);
  CHECK(a.phi.minCoeff() > -kPi);
  CHECK(a.phi.maxCoeff() <= kPi);
  cfg.rng_seed = 99;
  SimStack c = build_sim(cfg);
  CHECK(a.phi != c.phi);
  CHECK((a.W[0][0] - c.W[0][0]).norm() == 0.0);  // layout independent of seed
}

TEST_CASE("layout hash tracks propagation geometry only") {
  ScenarioConfig cfg = default_scenario();
  std::uint64_t h0 = stack_layout_hash(cfg);
  ScenarioConfig c2 = cfg;
  c2.kappa = 0.5;  // irrelevant to the stack
  CHECK(stack_layout_hash(c2) == h0);
  c2 = cfg;
  c2.d_s = 0.016;
  CHECK(stack_layout_hash(c2) != h0);
  c2 = cfg;
  c2.I = 4;
  CHECK(stack_layout_hash(c2) != h0);
}

TEST_CASE("stack cache round-trips bit-exactly and rejects other layouts") {
  namespace fs = std::filesystem;
  ScenarioConfig cfg = tiny_stack_config(2, 2, 2);
  SimStack stack = build_sim(cfg);
  fs::path dir = fs::temp_directory_path() / "simcr_stack_cache_test";
  fs::create_directories(dir);
  std::string path = (dir / "stack.bin").string();
  std::uint64_t h = stack_layout_hash(cfg);
  save_stack_cache(path, stack, h);

  auto back = load_stack_cache(path, h);
  REQUIRE(back.has_value());
  CHECK(back->L == stack.L);
  for (int i = 0; i < cfg.I; ++i) {
    CHECK((back->w_feed[i] - stack.w_feed[i]).norm() == 0.0);
    CHECK((back->W[0][i] - stack.W[0][i]).norm() == 0.0);
  }
  CHECK_FALSE(load_stack_cache(path, h ^ 1).has_value());
  CHECK_FALSE(load_stack_cache((dir / "missing.bin").string(), h).has_value());
  fs::remove_all(dir);
}

TEST_CASE("cached build equals a fresh build") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "simcr_stack_cache_test2";
  fs::remove_all(dir);
  ScenarioConfig cfg = tiny_stack_config(2, 2, 2);
  SimStack fresh = build_sim(cfg);
  SimStack miss = build_sim_cached(cfg, dir.string());  // writes
  SimStack hit = build_sim_cached(cfg, dir.string());   // reads
  for (int i = 0; i < cfg.I; ++i) {
    CHECK((miss.W[0][i] - fresh.W[0][i]).norm() == 0.0);
    CHECK((hit.W[0][i] - fresh.W[0][i]).norm() == 0.0);
    CHECK((hit.w_feed[i] - fresh.w_feed[i]).norm() == 0.0);
  }
  CHECK(hit.phi == fresh.phi);  // phases come from the seed, not the cache
  fs::remove_all(dir);
}
