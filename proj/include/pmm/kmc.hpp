#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pmm/lattice.hpp"

namespace pmm {

/// Counter-based generator: the stream is a pure function of
/// (seed, stream, counter), so replicas split deterministically by index.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double next_unit();
  double next_exponential(double rate);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fenwick tree over per-bond rates: point update, total, and inverse
/// prefix-sum sampling in O(log n).
class RateIndex {
 public:
  explicit RateIndex(int n);

  void rebuild(const std::vector<double>& values);
  void set(int i, double value);
  double get(int i) const { return values_[i]; }
  double total() const { return total_; }
  int size() const { return n_; }

  /// Largest index with prefix sum <= u; u must lie in [0, total).
  int sample(double u) const;

 private:
  int n_;
  std::vector<double> tree_;
  std::vector<double> values_;
  double total_ = 0.0;
};

enum class StepResult { Stepped, Horizon, Absorbed };

/// Event-driven realization of the exchange dynamics on a ring. Per-bond
/// rates count occupation-changing exchanges only, so a frozen ring has
/// total rate exactly zero and the state is absorbing.
class SimState {
 public:
  SimState(ConstraintFamily family, const Configuration& ring,
           std::uint64_t seed, std::uint64_t stream = 0);

  /// Next event if it falls before t_max, else the clock stops at t_max.
  /// A frozen state also jumps the clock to t_max and reports Absorbed.
  StepResult advance(double t_max);
  StepResult step();
  /// Advances to time t exactly (absorbing early when frozen).
  void run_until(double t);
  /// Bond fired by the most recent event.
  int last_bond() const { return last_bond_; }

  const ConstraintFamily& family() const { return family_; }
  Configuration config() const;
  int length() const { return static_cast<int>(occ_.size()); }
  double clock() const { return clock_; }
  std::uint64_t events() const { return events_; }
  double total_rate() const { return rates_.total(); }
  bool absorbed() const { return rates_.total() <= 0.0; }

  /// Per-site occupation integral over [0, clock()].
  std::vector<double> occupation_integral() const;

  std::uint64_t rebuild_period = 1'000'000;

 private:
  double effective_rate(int x) const;
  void refresh_bond(int x);

  ConstraintFamily family_;
  std::vector<std::uint8_t> occ_;
  RateIndex rates_;
  CounterRng rng_;
  double clock_ = 0.0;
  std::uint64_t events_ = 0;
  int last_bond_ = -1;
  std::vector<double> occ_integral_;
  std::vector<double> last_flip_;
};

struct DensityProfile {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> bins;  // per-site time-averaged occupation
};

struct RunOptions {
  double horizon = 0.0;
  int samples = 0;           // instantaneous profiles at k evenly spaced times
  bool track_states = false; // per-state occupation time (length <= 24)
};

struct RunSummary {
  DensityProfile time_average;
  std::vector<double> sample_times;
  std::vector<std::vector<double>> snapshots;  // occupations at sample times
  std::unordered_map<std::uint32_t, double> state_time;
  std::uint64_t events = 0;
  double final_time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Deterministic given (seed, stream): identical inputs produce identical
/// summaries bit for bit.
RunSummary run(const ConstraintFamily& family, const Configuration& initial,
               const RunOptions& options, std::uint64_t seed,
               std::uint64_t stream = 0);

struct EnsembleSummary {
  DensityProfile mean_time_average;
  std::vector<double> sample_times;
  std::vector<std::vector<double>> mean_snapshots;
  std::uint64_t total_events = 0;
  int replicas = 0;
};

EnsembleSummary merge_replicas(const std::vector<RunSummary>& results);

/// Replica r uses stream r; merging is done in replica order, so the
/// result does not depend on the worker count. jobs <= 1 runs the serial
/// reference loop.
EnsembleSummary run_ensemble(const ConstraintFamily& family,
                             const Configuration& initial,
                             const RunOptions& options, int replicas,
                             std::uint64_t seed, int jobs = 1);

/// Ring sampled site-by-site from Bernoulli(rho(site / L)).
Configuration sample_profile_ring(int length, const std::vector<double>& site_density,
                                  std::uint64_t seed, std::uint64_t stream);

}  // namespace pmm
