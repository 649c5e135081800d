#include "pmm/kmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pmm {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream * 0xda942042e4dd58b5ull))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ ^ counter_++); }

double CounterRng::next_unit() {
  // 53 random bits centered in (0, 1); never returns an endpoint
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_exponential(double rate) {
  return -std::log(next_unit()) / rate;
}

RateIndex::RateIndex(int n) : n_(n), tree_(n + 1, 0.0), values_(n, 0.0) {}

void RateIndex::rebuild(const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != n_)
    throw std::invalid_argument("rate vector size mismatch");
  values_ = values;
  tree_.assign(n_ + 1, 0.0);
  total_ = 0.0;
  for (int i = 0; i < n_; ++i) {
    total_ += values_[i];
    int j = i + 1;
    tree_[j] += values_[i];
    int parent = j + (j & -j);
    if (parent <= n_) tree_[parent] += tree_[j];
  }
}

void RateIndex::set(int i, double value) {
  double delta = value - values_[i];
  if (delta == 0.0) return;
  values_[i] = value;
  total_ += delta;
  for (int j = i + 1; j <= n_; j += j & -j) tree_[j] += delta;
}

int RateIndex::sample(double u) const {
  int pos = 0;
  int step = 1;
  while (2 * step <= n_) step *= 2;
  for (; step > 0; step /= 2) {
    int next = pos + step;
    if (next <= n_ && tree_[next] <= u) {
      u -= tree_[next];
      pos = next;
    }
  }
  // rounding can land on an empty slot at a prefix boundary
  while (pos < n_ - 1 && values_[pos] <= 0.0) ++pos;
  return pos;
}

SimState::SimState(ConstraintFamily family, const Configuration& ring,
                   std::uint64_t seed, std::uint64_t stream)
    : family_(std::move(family)),
      occ_(ring.length()),
      rates_(ring.length()),
      rng_(seed, stream) {
  if (ring.boundary() != Boundary::Periodic)
    throw std::invalid_argument("simulation runs on rings");
  for (int j = 0; j < ring.length(); ++j)
    occ_[j] = static_cast<std::uint8_t>(ring.occ(ring.lo() + j));
  std::vector<double> values(length());
  for (int x = 0; x < length(); ++x) values[x] = effective_rate(x);
  rates_.rebuild(values);
  occ_integral_.assign(length(), 0.0);
  last_flip_.assign(length(), 0.0);
}

double SimState::effective_rate(int x) const {
  const int L = length();
  if (occ_[x] == occ_[(x + 1) % L]) return 0.0;  // exchange is a no-op
  const int R = family_.radius();
  std::uint32_t bits = 0;
  for (int j = 0; j < family_.window_length(); ++j) {
    int site = ((x - R + j) % L + L) % L;
    bits |= static_cast<std::uint32_t>(occ_[site]) << j;
  }
  return family_.rate_local(bits);
}

void SimState::refresh_bond(int x) {
  const int L = length();
  const int b = ((x % L) + L) % L;
  rates_.set(b, effective_rate(b));
}

StepResult SimState::advance(double t_max) {
  const double total = rates_.total();
  if (total <= 0.0) {
    clock_ = std::max(clock_, t_max);  // frozen: hold to the query horizon
    return StepResult::Absorbed;
  }
  const double dt = rng_.next_exponential(total);
  if (clock_ + dt > t_max) {
    // no event before the horizon; memorylessness lets the next call redraw
    clock_ = t_max;
    return StepResult::Horizon;
  }
  clock_ += dt;
  const int x = rates_.sample(rng_.next_unit() * total);
  const int L = length();
  const int y = (x + 1) % L;
  last_bond_ = x;

  for (int s : {x, y}) {
    occ_integral_[s] += occ_[s] * (clock_ - last_flip_[s]);
    last_flip_[s] = clock_;
  }
  std::swap(occ_[x], occ_[y]);

  const int R = family_.radius();
  for (int d = -R - 1; d <= R + 1; ++d) refresh_bond(x + d);

  if (++events_ % rebuild_period == 0) {
    std::vector<double> values(L);
    for (int b = 0; b < L; ++b) values[b] = effective_rate(b);
    rates_.rebuild(values);
  }
  return StepResult::Stepped;
}

StepResult SimState::step() {
  StepResult r = advance(std::numeric_limits<double>::infinity());
  return r == StepResult::Stepped ? StepResult::Stepped : StepResult::Absorbed;
}

void SimState::run_until(double t) {
  while (advance(t) == StepResult::Stepped) {
  }
}

Configuration SimState::config() const {
  Configuration c(0, length(), Boundary::Periodic);
  for (int j = 0; j < length(); ++j)
    if (occ_[j]) c.set(j, 1);
  return c;
}

std::vector<double> SimState::occupation_integral() const {
  std::vector<double> out = occ_integral_;
  for (int j = 0; j < length(); ++j)
    out[j] += occ_[j] * (clock_ - last_flip_[j]);
  return out;
}

RunSummary run(const ConstraintFamily& family, const Configuration& initial,
               const RunOptions& options, std::uint64_t seed,
               std::uint64_t stream) {
  if (options.horizon < 0.0)
    throw std::invalid_argument("horizon must be non-negative");
  if (options.track_states && initial.length() > 24)
    throw std::length_error("state tracking needs a packable ring");

  SimState sim(family, initial, seed, stream);
  RunSummary summary;
  summary.seed = seed;
  summary.stream = stream;
  for (int i = 1; i <= options.samples; ++i)
    summary.sample_times.push_back(options.horizon * i / options.samples);

  std::size_t next_sample = 0;
  double held_since = 0.0;
  std::uint32_t held_mask =
      options.track_states ? static_cast<std::uint32_t>(initial.mask()) : 0;

  auto snapshot_held = [&](const std::vector<std::uint8_t>& occ) {
    std::vector<double> snap(occ.begin(), occ.end());
    summary.snapshots.push_back(std::move(snap));
    ++next_sample;
  };

  std::vector<std::uint8_t> held(initial.length());
  for (int j = 0; j < initial.length(); ++j)
    held[j] = static_cast<std::uint8_t>(initial.occ(initial.lo() + j));

  while (true) {
    StepResult r = sim.advance(options.horizon);
    if (r == StepResult::Stepped) {
      const double t_event = sim.clock();
      while (next_sample < summary.sample_times.size() &&
             summary.sample_times[next_sample] < t_event)
        snapshot_held(held);
      if (options.track_states) {
        summary.state_time[held_mask] += t_event - held_since;
        held_since = t_event;
        const int x = sim.last_bond();
        const int y = (x + 1) % sim.length();
        held_mask ^= (std::uint32_t{1} << x) ^ (std::uint32_t{1} << y);
      }
      const int x = sim.last_bond();
      const int y = (x + 1) % sim.length();
      std::swap(held[x], held[y]);
    } else {
      // clock now sits at the horizon; the held state fills the rest
      while (next_sample < summary.sample_times.size()) snapshot_held(held);
      if (options.track_states)
        summary.state_time[held_mask] += options.horizon - held_since;
      break;
    }
  }

  summary.events = sim.events();
  summary.final_time = options.horizon;

  summary.time_average.t_begin = 0.0;
  summary.time_average.t_end = options.horizon;
  auto integral = sim.occupation_integral();
  summary.time_average.bins.resize(sim.length());
  for (int j = 0; j < sim.length(); ++j)
    summary.time_average.bins[j] =
        options.horizon > 0.0 ? integral[j] / options.horizon
                              : static_cast<double>(held[j]);
  return summary;
}

EnsembleSummary merge_replicas(const std::vector<RunSummary>& results) {
  EnsembleSummary merged;
  merged.replicas = static_cast<int>(results.size());
  if (results.empty()) return merged;
  merged.sample_times = results.front().sample_times;
  const std::size_t L = results.front().time_average.bins.size();
  merged.mean_time_average.t_begin = results.front().time_average.t_begin;
  merged.mean_time_average.t_end = results.front().time_average.t_end;
  merged.mean_time_average.bins.assign(L, 0.0);
  merged.mean_snapshots.assign(results.front().snapshots.size(),
                               std::vector<double>(L, 0.0));
  for (const auto& r : results) {
    merged.total_events += r.events;
    for (std::size_t j = 0; j < L; ++j)
      merged.mean_time_average.bins[j] += r.time_average.bins[j];
    for (std::size_t s = 0; s < r.snapshots.size(); ++s)
      for (std::size_t j = 0; j < L; ++j)
        merged.mean_snapshots[s][j] += r.snapshots[s][j];
  }
  const double inv = 1.0 / merged.replicas;
  for (auto& v : merged.mean_time_average.bins) v *= inv;
  for (auto& snap : merged.mean_snapshots)
    for (auto& v : snap) v *= inv;
  return merged;
}

EnsembleSummary run_ensemble(const ConstraintFamily& family,
                             const Configuration& initial,
                             const RunOptions& options, int replicas,
                             std::uint64_t seed, int jobs) {
  std::vector<RunSummary> results(replicas);
  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int r = 0; r < replicas; ++r)
      results[r] = run(family, initial, options, seed, r);
#else
    for (int r = 0; r < replicas; ++r)
      results[r] = run(family, initial, options, seed, r);
#endif
  } else {
    for (int r = 0; r < replicas; ++r)
      results[r] = run(family, initial, options, seed, r);
  }
  return merge_replicas(results);
}

Configuration sample_profile_ring(int length, const std::vector<double>& site_density,
                                  std::uint64_t seed, std::uint64_t stream) {
  if (static_cast<int>(site_density.size()) != length)
    throw std::invalid_argument("density vector size mismatch");
  CounterRng rng(seed, stream);
  Configuration c(0, length, Boundary::Periodic);
  for (int j = 0; j < length; ++j)
    if (rng.next_unit() < site_density[j]) c.set(j, 1);
  return c;
}

}  // namespace pmm
