#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "pmm/classify.hpp"
#include "pmm/connect.hpp"
#include "pmm/exact.hpp"
#include "pmm/kmc.hpp"

using namespace pmm;

namespace {

Measure mix(const Measure& a, const Measure& b, double wa) {
  Measure out;
  out.w.resize(a.w.size());
  for (std::size_t i = 0; i < a.w.size(); ++i)
    out.w[i] = wa * a.w[i] + (1.0 - wa) * b.w[i];
  return out;
}

}  // namespace

TEST_CASE("three-site ring enumerates eight states with one mobile class") {
  auto model = build_model(pmm_family(), 3, Boundary::Periodic);
  CHECK(model.n_states() == 8);

  std::set<std::int32_t> two_particle_classes;
  for (std::int32_t s = 0; s < model.n_states(); ++s)
    if (std::popcount(model.states[s]) == 2)
      two_particle_classes.insert(model.class_of[s]);
  CHECK(two_particle_classes.size() == 1);

  auto measures = stationary_measures(model);
  for (const auto& nu : measures) {
    std::int32_t support_class = -1;
    for (std::int32_t s = 0; s < model.n_states(); ++s)
      if (nu.w[s] > 0) support_class = model.class_of[s];
    if (support_class == *two_particle_classes.begin()) {
      for (std::int32_t s = 0; s < model.n_states(); ++s)
        if (std::popcount(model.states[s]) == 2)
          CHECK(nu.w[s] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("empty-boundary four-site window has six frozen singletons") {
  auto model = build_model(pmm_family(), 4, Boundary::Empty);
  std::set<std::string> frozen;
  for (std::int32_t s = 0; s < model.n_states(); ++s)
    if (model.state_frozen[s]) {
      CHECK(model.classes[model.class_of[s]].size() == 1);
      frozen.insert(model.config(s).to_string());
    }
  CHECK(frozen == std::set<std::string>{"0000", "1000", "0100", "0010", "0001",
                                        "1001"});
}

TEST_CASE("four-site ring at count two is a single class of six") {
  auto model = build_model(pmm_family(), 4, Boundary::Periodic, 2);
  CHECK(model.n_states() == 6);
  CHECK(model.classes.size() == 1);
  CHECK(model.classes[0].size() == 6);
}

TEST_CASE("generator is symmetric with zero row sums") {
  for (auto boundary : {Boundary::Periodic, Boundary::Empty}) {
    auto model = build_model(pmm_family(), 6, boundary);
    std::map<std::pair<std::int32_t, std::int32_t>, double> q;
    for (std::int32_t s = 0; s < model.n_states(); ++s) {
      double row = model.diag[s];
      for (auto [t, r] : model.out[s]) {
        row += r;
        q[{s, t}] = r;
      }
      CHECK(std::abs(row) <= 1e-12);
    }
    for (const auto& [key, r] : q) {
      auto rev = q.find({key.second, key.first});
      REQUIRE(rev != q.end());
      CHECK(rev->second == r);
    }
  }
}

TEST_CASE("transitions conserve the particle count") {
  auto model = build_model(pmm_family(), 7, Boundary::Periodic);
  for (std::int32_t s = 0; s < model.n_states(); ++s)
    for (auto [t, r] : model.out[s])
      CHECK(std::popcount(model.states[s]) == std::popcount(model.states[t]));
}

TEST_CASE("product measures are stationary and reversible on rings") {
  for (int L : {3, 5, 8}) {
    auto model = build_model(pmm_family(), L, Boundary::Periodic);
    for (double rho : {0.3, 0.5, 0.7}) {
      auto mu = bernoulli_product(model, rho);
      CHECK(check_stationary(model, mu) <= 1e-12);
      CHECK(check_detailed_balance(model, mu) <= 1e-12);
      auto ex = check_exchangeability(model, mu);
      CHECK(ex.max_spread <= 1e-12);
    }
  }
  CHECK_THROWS(bernoulli_product(build_model(pmm_family(), 3, Boundary::Periodic), 1.0));
}

TEST_CASE("point masses: frozen states are stationary, mobile ones leak") {
  auto model = build_model(pmm_family(), 5, Boundary::Periodic);
  auto frozen = point_mass(model, 0u);  // empty ring
  CHECK(check_stationary(model, frozen) == 0.0);

  auto mobile = point_mass(
      model, static_cast<std::uint32_t>(Configuration::from_string("11000").mask()));
  CHECK(check_stationary(model, mobile) > 0.1);
}

TEST_CASE("solved class measures are uniform without assuming it") {
  auto model = build_model(pmm_family(), 5, Boundary::Periodic, 2);
  CHECK(model.classes.size() == 1);  // every pair is within ring distance 2
  auto measures = stationary_measures(model);
  REQUIRE(measures.size() == 1);
  for (double v : measures[0].w) CHECK(v == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(check_stationary(model, measures[0]) <= 1e-12);

  for (int L : {6, 7, 8}) {
    auto full = build_model(pmm_family(), L, Boundary::Periodic);
    for (const auto& nu : stationary_measures(full)) {
      CHECK(check_stationary(full, nu) <= 1e-10);
      for (const auto& members : full.classes) {
        double lo = 2.0, hi = -1.0, mass = 0.0;
        for (auto s : members) {
          lo = std::min(lo, nu.w[s]);
          hi = std::max(hi, nu.w[s]);
          mass += nu.w[s];
        }
        if (mass > 1e-9) CHECK(hi - lo <= 1e-10);  // uniform on its class
      }
    }
  }
}

TEST_CASE("decomposition into frozen and mobile parts") {
  auto model = build_model(pmm_family(), 6, Boundary::Periodic);
  auto frozen_point = point_mass(
      model, static_cast<std::uint32_t>(Configuration::from_string(
                                            "100100", 0, Boundary::Periodic)
                                            .mask()));
  auto d1 = decompose(model, frozen_point);
  CHECK(d1.alpha_frozen == doctest::Approx(1.0));

  auto measures = stationary_measures(model);
  const Measure* class_uniform = nullptr;
  for (const auto& nu : measures) {
    for (std::int32_t s = 0; s < model.n_states(); ++s)
      if (nu.w[s] > 0 && !model.state_frozen[s] &&
          std::popcount(model.states[s]) == 3) {
        class_uniform = &nu;
        break;
      }
    if (class_uniform) break;
  }
  REQUIRE(class_uniform != nullptr);
  auto d2 = decompose(model, *class_uniform);
  CHECK(d2.alpha_ergodic == doctest::Approx(1.0));

  auto blend = mix(frozen_point, *class_uniform, 0.5);
  auto d3 = decompose(model, blend);
  CHECK(d3.alpha_frozen == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d3.alpha_ergodic == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d3.residual_frozen <= 1e-12);
  CHECK(d3.residual_ergodic <= 1e-10);

  // reassembly
  for (std::int32_t s = 0; s < model.n_states(); ++s) {
    double back = d3.alpha_frozen * d3.nu_frozen.w[s] +
                  d3.alpha_ergodic * d3.nu_ergodic.w[s];
    CHECK(std::abs(back - blend.w[s]) <= 1e-12);
  }
}

TEST_CASE("stationary weight is all-or-nothing on each class") {
  auto model = build_model(pmm_family(), 6, Boundary::Periodic);
  auto measures = stationary_measures(model);
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Measure blend;
    blend.w.assign(model.n_states(), 0.0);
    double total = 0.0;
    for (const auto& nu : measures) {
      double a = rng.next_unit() < 0.4 ? 0.0 : rng.next_unit();
      for (std::int32_t s = 0; s < model.n_states(); ++s)
        blend.w[s] += a * nu.w[s];
      total += a;
    }
    if (total == 0.0) continue;
    blend.normalize();
    CHECK(check_positivity(model, blend));
  }

  Measure broken;
  broken.w.assign(model.n_states(), 0.0);
  const auto& big = *std::max_element(
      model.classes.begin(), model.classes.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  REQUIRE(big.size() >= 2);
  for (std::size_t i = 1; i < big.size(); ++i) broken.w[big[i]] = 1.0;
  broken.normalize();
  CHECK(!check_positivity(model, broken));
}

TEST_CASE("mirror reflection") {
  CHECK(mirror(Configuration::from_string("1100")).to_string() == "0011");
  CHECK(mirror(Configuration::from_string("0110")).to_string() == "0110");
  CHECK(mirror_mask(0b0011u, 4) == 0b1100u);

  // stationary weight is mirror-invariant when the images are connected
  auto fam = pmm_family();
  for (int L : {5, 6, 7}) {
    auto model = build_model(fam, L, Boundary::Empty);
    for (const auto& nu : stationary_measures(model)) {
      for (std::int32_t s = 0; s < model.n_states(); ++s) {
        if (nu.w[s] <= 0 || model.state_frozen[s]) continue;
        std::uint32_t m = mirror_mask(model.states[s], L);
        std::int32_t t = model.index_of(m);
        if (model.class_of[t] == model.class_of[s])
          CHECK(std::abs(nu.w[t] - nu.w[s]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("count filter restricts the state space") {
  auto model = build_model(pmm_family(), 8, Boundary::Periodic, 3);
  CHECK(model.n_states() == 56);
  for (auto m : model.states) CHECK(std::popcount(m) == 3);
  CHECK(model.index_of(0b111u) >= 0);
  CHECK(model.index_of(0b11u) == -1);
  CHECK_THROWS_AS(build_model(pmm_family(), 26, Boundary::Periodic),
                  std::length_error);
}
