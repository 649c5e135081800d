#include "pmm/connect.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pmm/classify.hpp"

namespace pmm {

namespace {

void check_budget(int length, int budget) {
  if (length > budget || length > 28)
    throw std::length_error("window length exceeds the enumeration budget");
  if (length <= 0) throw std::invalid_argument("window length must be positive");
}

// Neighbors of `mask` under allowed jumps inside the window.
template <typename F>
void for_each_jump(const ConstraintFamily& fam, std::uint32_t mask, int length, F&& f) {
  for (int x = 0; x + 1 < length; ++x) {
    std::uint32_t a = (mask >> x) & 1u, b = (mask >> (x + 1)) & 1u;
    if (a == b) continue;
    if (fam.rate_mask(mask, length, x) > 0.0)
      f(mask ^ (std::uint32_t{3} << x));
  }
}

}  // namespace

std::vector<std::uint32_t> reachable_masks(const ConstraintFamily& family,
                                           std::uint32_t start, int length,
                                           int budget) {
  check_budget(length, budget);
  std::vector<bool> visited(std::size_t{1} << length, false);
  std::vector<std::uint32_t> frontier{start}, out{start};
  visited[start] = true;
  while (!frontier.empty()) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t m : frontier) {
      for_each_jump(family, m, length, [&](std::uint32_t t) {
        if (!visited[t]) {
          visited[t] = true;
          next.push_back(t);
          out.push_back(t);
        }
      });
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> reachable_masks_parallel(const ConstraintFamily& family,
                                                    std::uint32_t start, int length,
                                                    int budget) {
  check_budget(length, budget);
  std::vector<bool> visited(std::size_t{1} << length, false);
  std::vector<std::uint32_t> frontier{start}, out{start};
  visited[start] = true;
  while (!frontier.empty()) {
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::vector<std::vector<std::uint32_t>> local(threads);
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
    {
      int tid = omp_get_thread_num();
      auto& mine = local[tid];
#pragma omp for schedule(static)
      for (long i = 0; i < static_cast<long>(frontier.size()); ++i) {
        // visited is read-only inside the level; duplicates are culled below
        for_each_jump(family, frontier[i], length, [&](std::uint32_t t) {
          if (!visited[t]) mine.push_back(t);
        });
      }
    }
#else
    for (std::uint32_t m : frontier)
      for_each_jump(family, m, length, [&](std::uint32_t t) {
        if (!visited[t]) local[0].push_back(t);
      });
#endif
    std::vector<std::uint32_t> next;
    for (auto& mine : local) {
      for (std::uint32_t t : mine) {
        if (!visited[t]) {
          visited[t] = true;
          next.push_back(t);
          out.push_back(t);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Configuration> reachable_set(const ConstraintFamily& family,
                                         const Configuration& config,
                                         int budget) {
  if (config.boundary() != Boundary::Empty)
    throw std::invalid_argument("reachability inside a window assumes empty boundary");
  auto masks = reachable_masks(family, static_cast<std::uint32_t>(config.mask()),
                               config.length(), budget);
  std::vector<Configuration> out;
  out.reserve(masks.size());
  for (auto m : masks)
    out.push_back(Configuration::from_mask(m, config.length(), config.lo()));
  return out;
}

bool connected(const ConstraintFamily& family, const Configuration& a,
               const Configuration& b, int budget) {
  if (a.lo() != b.lo() || a.length() != b.length())
    throw std::invalid_argument("configurations must share a window");
  if (a.count() != b.count()) return false;  // exchanges conserve the count
  auto masks = reachable_masks(family, static_cast<std::uint32_t>(a.mask()),
                               a.length(), budget);
  return std::binary_search(masks.begin(), masks.end(),
                            static_cast<std::uint32_t>(b.mask()));
}

std::optional<Configuration> replay_path(const ConstraintFamily& family,
                                         const JumpPath& path) {
  Configuration c = path.start;
  for (int x : path.moves) {
    if (!c.swap_resolvable(x)) return std::nullopt;
    if (family.rate(c, x, EdgePolicy::ZeroPad) <= 0.0) return std::nullopt;
    c.apply_swap(x);
  }
  return c;
}

bool validate_path(const ConstraintFamily& family, const JumpPath& path) {
  return replay_path(family, path).has_value();
}

namespace {

struct SweepState {
  std::uint32_t mask;
  std::vector<int>* moves;

  void emit(int x) {
    mask ^= std::uint32_t{3} << x;
    moves->push_back(x);
  }
  int occ(int j) const { return static_cast<int>((mask >> j) & 1u); }
};

}  // namespace

void plan_right_mass(const ConstraintFamily& family, std::uint32_t mask,
                     int length, std::vector<int>& moves) {
  (void)family;  // admissible rates make every emitted move allowed
  SweepState s{mask, &moves};

  // seed: leftmost pair within distance 2, made adjacent
  int lo = -1;
  for (int i = 0; i + 1 < length && lo < 0; ++i) {
    if (!s.occ(i)) continue;
    if (s.occ(i + 1)) {
      lo = i;
    } else if (i + 2 < length && s.occ(i + 2)) {
      s.emit(i);  // facilitated by the particle at i+2
      lo = i + 1;
    }
  }
  if (lo < 0)
    throw std::invalid_argument("no mobile cluster: cannot normalize");
  int hi = lo + 1;
  while (hi + 1 < length && s.occ(hi + 1)) ++hi;
  while (lo > 0 && s.occ(lo - 1)) --lo;

  auto stray_left = [&] {
    for (int j = 0; j < lo; ++j)
      if (s.occ(j)) return true;
    return false;
  };

  // sweep left, absorbing every particle below the block
  while (stray_left()) {
    if (s.occ(lo - 1)) {
      --lo;
      continue;
    }
    for (int x = lo - 1; x < hi; ++x) s.emit(x);
    --lo;
    --hi;
  }

  // sweep right to the window edge, absorbing the rest
  while (hi + 1 < length) {
    if (s.occ(hi + 1)) {
      ++hi;
      continue;
    }
    for (int x = hi; x >= lo; --x) s.emit(x);
    ++lo;
    ++hi;
  }
}

JumpPath plan_transport(const ConstraintFamily& family, const Configuration& from,
                        const Configuration& to) {
  if (from.boundary() != Boundary::Empty || to.boundary() != Boundary::Empty)
    throw std::invalid_argument("transport planning assumes empty boundary");
  if (from.lo() != to.lo() || from.length() != to.length())
    throw std::invalid_argument("configurations must share a window");
  if (from.count() != to.count())
    throw std::invalid_argument("configurations must have equal particle counts");
  if (!has_mobile_cluster(from) || !has_mobile_cluster(to))
    throw std::invalid_argument("both configurations must contain a mobile cluster");

  JumpPath path{from, {}};
  if (from == to) return path;

  const int n = from.length();
  std::vector<int> fwd, bwd;
  plan_right_mass(family, static_cast<std::uint32_t>(from.mask()), n, fwd);
  plan_right_mass(family, static_cast<std::uint32_t>(to.mask()), n, bwd);

  path.moves = std::move(fwd);
  for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) path.moves.push_back(*it);
  // report moves as absolute bond positions
  for (int& x : path.moves) x += from.lo();
  return path;
}

namespace {

// Masks of the window grouped by particle count.
std::vector<std::vector<std::uint32_t>> masks_by_count(int length) {
  std::vector<std::vector<std::uint32_t>> by_count(length + 1);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << length); ++m)
    by_count[std::popcount(m)].push_back(m);
  return by_count;
}

long certify_count_class(const ConstraintFamily& family,
                         const std::vector<std::uint32_t>& members, int length,
                         long* pairs_connected) {
  if (members.empty()) return 0;
  auto closure = reachable_masks(family, members.front(), length, length);
  long failures = 0;
  for (std::uint32_t m : members)
    if (!std::binary_search(closure.begin(), closure.end(), m)) ++failures;
  if (failures == 0 && pairs_connected) {
    long g = static_cast<long>(members.size());
    *pairs_connected += g * (g - 1) / 2;
  }
  return failures;
}

long planner_pair_failures(const ConstraintFamily& family,
                           const std::vector<std::uint32_t>& members, int length,
                           std::size_t i) {
  std::vector<int> moves;
  long failures = 0;
  const std::uint32_t target_mass =
      ((std::uint32_t{1} << std::popcount(members[i])) - 1)
      << (length - std::popcount(members[i]));
  for (std::size_t j = 0; j < members.size(); ++j) {
    moves.clear();
    plan_right_mass(family, members[i], length, moves);
    std::size_t split = moves.size();
    plan_right_mass(family, members[j], length, moves);
    std::reverse(moves.begin() + split, moves.end());
    if (members[i] == members[j]) moves.clear();  // identity plans are empty

    std::uint32_t cur = members[i];
    bool ok = true;
    std::size_t step = 0;
    for (int x : moves) {
      if (family.rate_mask(cur, length, x) <= 0.0) {
        ok = false;
        break;
      }
      cur ^= std::uint32_t{3} << x;
      // the forward half must land on the right-massed block
      if (++step == split && cur != target_mass) {
        ok = false;
        break;
      }
    }
    if (!ok || cur != members[j]) ++failures;
  }
  return failures;
}

}  // namespace

CertifyReport certify_connectivity(const ConstraintFamily& family, int length,
                                   bool planner_pairs, int jobs) {
  check_budget(length, 24);
  CertifyReport report;
  report.window_length = length;

  auto by_count = masks_by_count(length);
  std::vector<std::vector<std::uint32_t>> clusters(length + 1);
  for (int k = 0; k <= length; ++k) {
    for (std::uint32_t m : by_count[k])
      if (mask_has_mobile_cluster(m, length)) clusters[k].push_back(m);
    if (!clusters[k].empty()) {
      ++report.counts_checked;
      report.cluster_states += static_cast<long>(clusters[k].size());
    }
  }

  for (int k = 0; k <= length; ++k)
    report.failures +=
        certify_count_class(family, clusters[k], length, &report.pairs_connected);

  if (planner_pairs) {
    for (int k = 0; k <= length; ++k) {
      const auto& members = clusters[k];
      if (members.empty()) continue;
      long fail = 0;
      if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : fail) num_threads(jobs)
        for (long i = 0; i < static_cast<long>(members.size()); ++i)
          fail += planner_pair_failures(family, members, length, i);
#else
        for (std::size_t i = 0; i < members.size(); ++i)
          fail += planner_pair_failures(family, members, length, i);
#endif
      } else {
        for (std::size_t i = 0; i < members.size(); ++i)
          fail += planner_pair_failures(family, members, length, i);
      }
      report.failures += fail;
      report.planner_pairs +=
          static_cast<long>(members.size()) * static_cast<long>(members.size());
    }
  }
  return report;
}

SupportCertifyReport certify_support_cases(const ConstraintFamily& family, int n,
                                           int jobs) {
  if (n < 1) throw std::invalid_argument("half-width must be >= 1");
  const int length = 2 * n + 1;
  check_budget(length, 24);
  SupportCertifyReport report;
  report.half_width = n;

  auto by_count = masks_by_count(length);

  // Equal-count nonfrozen configurations supported in the window.
  std::vector<int> ks;
  for (int k = 2; k <= length; ++k) ks.push_back(k);
  long fail_nonfrozen = 0, cases_nonfrozen = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : fail_nonfrozen, cases_nonfrozen) \
    num_threads(std::max(jobs, 1))
#endif
  for (std::size_t idx = 0; idx < ks.size(); ++idx) {
    std::vector<std::uint32_t> members;
    for (std::uint32_t m : by_count[ks[idx]])
      if (!mask_is_frozen(m, length)) members.push_back(m);
    if (members.empty()) continue;
    ++cases_nonfrozen;
    fail_nonfrozen += certify_count_class(family, members, length, nullptr);
  }
  report.nonfrozen_cases = cases_nonfrozen;
  report.failures += fail_nonfrozen;

  // Fully occupied outside the inner window [-(n-2), n-2]: the outer two
  // sites on each edge carry particles, holes live inside.
  if (n >= 2) {
    const int inner = length - 4;
    const std::uint32_t outer =
        0b11u | (0b11u << (length - 2));
    long fail_dense = 0, cases_dense = 0;
    std::vector<int> holes;
    for (int h = 0; h <= inner; ++h) holes.push_back(h);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : fail_dense, cases_dense) \
    num_threads(std::max(jobs, 1))
#endif
    for (std::size_t idx = 0; idx < holes.size(); ++idx) {
      std::vector<std::uint32_t> members;
      for (std::uint32_t im = 0; im < (std::uint32_t{1} << inner); ++im) {
        if (inner - std::popcount(im) != holes[idx]) continue;
        members.push_back(outer | (im << 2));
      }
      if (members.empty()) continue;
      ++cases_dense;
      fail_dense += certify_count_class(family, members, length, nullptr);
    }
    report.dense_cases = cases_dense;
    report.failures += fail_dense;
  }
  return report;
}

}  // namespace pmm
