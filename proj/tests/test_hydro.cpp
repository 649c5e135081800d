#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pmm/hydro.hpp"

using namespace pmm;

TEST_CASE("constant profiles are fixed points") {
  auto g = make_grid(64, InitialProfile::Flat);
  double dt = pme_max_dt(g) * 0.5;
  for (int i = 0; i < 100; ++i) pme_step(g, dt);
  for (double v : g.rho) CHECK(v == 0.5);
}

TEST_CASE("the stencil preserves mirror symmetry") {
  auto g = make_grid(128, InitialProfile::Bump);
  pme_run(g, 0.02);
  for (int i = 0; i < 128; ++i)
    CHECK(g.rho[i] == doctest::Approx(g.rho[127 - i]).epsilon(1e-12));
}

TEST_CASE("mass is conserved to round-off and the range never grows") {
  auto g = make_grid(256, InitialProfile::Step);
  const double mass0 = g.mass();
  const double lo0 = *std::min_element(g.rho.begin(), g.rho.end());
  const double hi0 = *std::max_element(g.rho.begin(), g.rho.end());
  double dt = pme_max_dt(g);
  for (int i = 0; i < 500; ++i) {
    pme_step(g, dt);
    CHECK(std::abs(g.mass() - mass0) <= 1e-13);
    CHECK(*std::min_element(g.rho.begin(), g.rho.end()) >= lo0 - 1e-12);
    CHECK(*std::max_element(g.rho.begin(), g.rho.end()) <= hi0 + 1e-12);
  }
}

TEST_CASE("stability bound is enforced") {
  auto g = make_grid(64, InitialProfile::Step);
  CHECK_THROWS_AS(pme_step(g, pme_max_dt(g) * 4.0), std::invalid_argument);
  CHECK_THROWS_AS(pme_step(g, -0.1), std::invalid_argument);
}

TEST_CASE("grid refinement self-check at t = 0.05") {
  auto coarse = make_grid(256, InitialProfile::Step);
  auto fine = make_grid(512, InitialProfile::Step);
  pme_run(coarse, 0.05);
  pme_run(fine, 0.05);
  double sup = 0.0;
  for (int i = 0; i < 256; ++i) {
    double pair_mean = 0.5 * (fine.rho[2 * i] + fine.rho[2 * i + 1]);
    sup = std::max(sup, std::abs(coarse.rho[i] - pair_mean));
  }
  CHECK(sup <= 1e-3);
}

TEST_CASE("block averaging and profile comparison") {
  std::vector<double> vals(64);
  for (int i = 0; i < 64; ++i) vals[i] = i < 32 ? 1.0 : 0.0;
  auto blocks = block_average(vals, 8);
  REQUIRE(blocks.size() == 8);
  CHECK(blocks[0] == 1.0);
  CHECK(blocks[7] == 0.0);
  CHECK_THROWS(block_average(vals, 7));

  PdeGrid g;
  g.rho.assign(64, 0.5);
  std::vector<double> emp(64, 0.5);
  auto d = compare_profiles(emp, g, 8);
  CHECK(d.l2 == 0.0);
  CHECK(d.sup == 0.0);
  std::vector<double> off(60, 0.5);
  CHECK_THROWS(compare_profiles(off, g, 8));
}

TEST_CASE("flat initial data stays flat up to replica noise") {
  auto fam = pmm_family();
  auto result = hydro_experiment(fam, 64, 24, 0.01, InitialProfile::Flat,
                                 2718, 1, 16, 64);
  CHECK(result.total_events > 0);
  CHECK(result.discrepancy.l2 <= 0.08);  // pure CLT noise at 24 replicas
  for (double v : result.pde_blocks) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("profiles stay inside the density interval") {
  for (auto profile :
       {InitialProfile::Step, InitialProfile::Bump, InitialProfile::Flat}) {
    for (int i = 0; i <= 200; ++i) {
      double v = profile_value(profile, i / 200.0);
      CHECK(v >= 0.2 - 1e-12);
      CHECK(v <= 0.8 + 1e-12);
    }
    // periodic continuity
    CHECK(profile_value(profile, 0.0) ==
          doctest::Approx(profile_value(profile, 1.0)).epsilon(1e-9));
  }
}
