#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <set>
#include <string>

#include "pmm/classify.hpp"
#include "pmm/connect.hpp"
#include "pmm/kmc.hpp"

using namespace pmm;

namespace {

// Independent closure oracle: saturate a string set by applying every
// allowed exchange through the Configuration interface. Deliberately
// built on different machinery than the packed-mask search it checks.
std::set<std::string> closure_oracle(const ConstraintFamily& fam,
                                     const std::string& start) {
  std::set<std::string> seen{start};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& s : std::set<std::string>(seen)) {
      auto c = Configuration::from_string(s);
      for (int x = 0; x + 1 < c.length(); ++x) {
        if (c.occ(x) == c.occ(x + 1)) continue;
        if (fam.rate(c, x) <= 0.0) continue;
        auto t = c.with_swap(x).to_string();
        if (seen.insert(t).second) grew = true;
      }
    }
  }
  return seen;
}

std::set<std::string> as_strings(const std::vector<std::uint32_t>& masks, int len) {
  std::set<std::string> out;
  for (auto m : masks)
    out.insert(Configuration::from_mask(m, len).to_string());
  return out;
}

}  // namespace

TEST_CASE("search agrees with the closure oracle on every 6-site window") {
  auto fam = pmm_family();
  for (std::uint32_t m = 0; m < (1u << 6); ++m) {
    auto start = Configuration::from_mask(m, 6).to_string();
    auto expect = closure_oracle(fam, start);
    auto got = as_strings(reachable_masks(fam, m, 6), 6);
    CHECK(got == expect);
  }
}

TEST_CASE("reachable sets of the small landmark states") {
  auto fam = pmm_family();

  // a lone particle is frozen
  auto lone = as_strings(reachable_masks(fam, 0b0001, 4), 4);
  CHECK(lone == std::set<std::string>{"1000"});

  // two adjacent particles on four sites: every state with a mobile
  // cluster, and nothing else -- 1001 is frozen and cannot be entered
  auto oracle = closure_oracle(fam, "1100");
  CHECK(oracle == std::set<std::string>{"1100", "1010", "0110", "0101", "0011"});
  auto pair = as_strings(reachable_masks(
      fam, static_cast<std::uint32_t>(Configuration::from_string("1100").mask()), 4), 4);
  CHECK(pair == oracle);
  CHECK(pair.count("1001") == 0);

  auto frozen = as_strings(reachable_masks(
      fam, static_cast<std::uint32_t>(Configuration::from_string("100100").mask()), 6), 6);
  CHECK(frozen == std::set<std::string>{"100100"});
}

TEST_CASE("connectivity of equal-count cluster states") {
  auto fam = pmm_family();
  auto conn = [&](const char* a, const char* b) {
    return connected(fam, Configuration::from_string(a),
                     Configuration::from_string(b));
  };
  CHECK(conn("11000", "00011"));
  CHECK(conn("11000", "00110"));
  CHECK(!conn("10010", "01001"));  // both frozen
  CHECK(!conn("11000", "00111"));  // count mismatch short-circuits
  CHECK_THROWS(connected(fam, Configuration::from_string("110"),
                         Configuration::from_string("1100")));
}

TEST_CASE("reachability is symmetric") {
  auto fam = pmm_family();
  for (std::uint32_t m = 0; m < (1u << 6); ++m) {
    auto reach = reachable_masks(fam, m, 6);
    for (auto t : reach) {
      auto back = reachable_masks(fam, t, 6);
      CHECK(std::binary_search(back.begin(), back.end(), m));
    }
  }
}

TEST_CASE("budget guard") {
  auto fam = pmm_family();
  CHECK_THROWS_AS(reachable_masks(fam, 1, 25), std::length_error);
  CHECK_THROWS_AS(reachable_masks(fam, 1, 20, 12), std::length_error);
}

TEST_CASE("planned transport between landmark pairs") {
  auto fam = pmm_family();

  auto path = plan_transport(fam, Configuration::from_string("0110"),
                             Configuration::from_string("0011"));
  auto end = replay_path(fam, path);
  REQUIRE(end.has_value());
  CHECK(end->to_string() == "0011");
  CHECK(validate_path(fam, path));

  auto same = plan_transport(fam, Configuration::from_string("0110"),
                             Configuration::from_string("0110"));
  CHECK(same.moves.empty());
  CHECK(validate_path(fam, same));

  auto spread = Configuration::from_string("1101000000");
  auto massed = Configuration::from_string("0000000111");
  auto long_path = plan_transport(fam, spread, massed);
  auto long_end = replay_path(fam, long_path);
  REQUIRE(long_end.has_value());
  CHECK(*long_end == massed);

  CHECK_THROWS_AS(plan_transport(fam, Configuration::from_string("10010"),
                                 Configuration::from_string("00011")),
                  std::invalid_argument);
  CHECK_THROWS_AS(plan_transport(fam, Configuration::from_string("11000"),
                                 Configuration::from_string("11100")),
                  std::invalid_argument);
}

TEST_CASE("a path through a rate-zero bond is rejected") {
  auto fam = pmm_family();
  JumpPath bad{Configuration::from_string("1100"), {2}};
  CHECK(validate_path(fam, bad));  // occ(1)=1 facilitates bond 2

  JumpPath illegal{Configuration::from_string("1001000"), {3}};
  CHECK(!validate_path(fam, illegal));

  JumpPath empty{Configuration::from_string("1001000"), {}};
  CHECK(validate_path(fam, empty));
}

TEST_CASE("planner soundness, exhaustive on small windows") {
  auto fam = pmm_family();
  for (int n = 2; n <= 8; ++n) {
    std::vector<std::vector<std::uint32_t>> by_count(n + 1);
    for (std::uint32_t m = 0; m < (1u << n); ++m)
      if (mask_has_mobile_cluster(m, n)) by_count[std::popcount(m)].push_back(m);
    for (int k = 0; k <= n; ++k) {
      for (auto a : by_count[k]) {
        for (auto b : by_count[k]) {
          auto pa = Configuration::from_mask(a, n);
          auto pb = Configuration::from_mask(b, n);
          auto path = plan_transport(fam, pa, pb);
          auto end = replay_path(fam, path);
          REQUIRE(end.has_value());
          CHECK(*end == pb);
        }
      }
    }
  }
}

TEST_CASE("planner soundness on random wide-window pairs") {
  auto fam = pmm_family();
  CounterRng rng(7, 3);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 16 + static_cast<int>(rng.next_u64() % 5);  // 16..20 sites
    int k = 2 + static_cast<int>(rng.next_u64() % (n - 4));
    auto draw = [&] {
      while (true) {
        std::uint32_t m = static_cast<std::uint32_t>(rng.next_u64()) &
                          ((1u << n) - 1);
        // thin to the wanted count by clearing/raising random bits
        while (std::popcount(m) > k) m &= m - 1;
        while (std::popcount(m) < k) {
          int bit = static_cast<int>(rng.next_u64() % n);
          m |= 1u << bit;
        }
        if (mask_has_mobile_cluster(m, n)) return m;
      }
    };
    std::uint32_t a = draw(), b = draw();
    auto pa = Configuration::from_mask(a, n);
    auto pb = Configuration::from_mask(b, n);
    auto path = plan_transport(fam, pa, pb);
    auto end = replay_path(fam, path);
    REQUIRE(end.has_value());
    CHECK(*end == pb);
    // polynomial length bound: window length x count is generous
    CHECK(static_cast<long>(path.moves.size()) <= 4L * n * n * k);
  }
}

TEST_CASE("certification sweep on an 8-site window") {
  auto fam = pmm_family();
  auto report = certify_connectivity(fam, 8, true, 1);
  CHECK(report.pass());
  CHECK(report.window_length == 8);
  CHECK(report.cluster_states > 0);
  CHECK(report.planner_pairs > 0);
  CHECK(report.failures == 0);
}

TEST_CASE("support-confined connection sweep at small half-width") {
  auto fam = pmm_family();
  auto report = certify_support_cases(fam, 4, 1);
  CHECK(report.pass());
  CHECK(report.nonfrozen_cases > 0);
  CHECK(report.dense_cases > 0);
}
