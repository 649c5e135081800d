#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pmm/lattice.hpp"

namespace pmm {

struct Measure {
  std::vector<double> w;

  double sum() const;
  void normalize();
};

/// Explicit generator over an enumerated window state space. Rows hold the
/// occupation-changing exchanges only (equal-occupation bonds are no-ops
/// and never enter the generator); the diagonal is the negative row sum.
struct MarkovModel {
  ConstraintFamily family;
  int lo = 0;
  int length = 0;
  Boundary boundary = Boundary::Empty;
  std::optional<int> count_filter;

  std::vector<std::uint32_t> states;  // sorted masks
  std::vector<std::vector<std::pair<std::int32_t, double>>> out;
  std::vector<double> diag;
  std::vector<std::int32_t> class_of;
  std::vector<std::vector<std::int32_t>> classes;
  std::vector<bool> state_frozen;

  int n_states() const { return static_cast<int>(states.size()); }
  int n_bonds() const { return boundary == Boundary::Periodic ? length : length - 1; }
  std::int32_t index_of(std::uint32_t mask) const;  // -1 when absent
  Configuration config(std::int32_t s) const;

  /// Raw rate of bond x (window-relative site index) in state s.
  double bond_rate(std::uint32_t mask, int x) const;
  /// State reached by exchanging bond x, same mask if the bond is equal.
  std::uint32_t apply_bond(std::uint32_t mask, int x) const;
};

/// Enumerates the states (optionally restricted to one particle count),
/// assembles the sparse generator, and partitions states into
/// communicating classes. Throws std::length_error beyond the budget.
MarkovModel build_model(const ConstraintFamily& family, int length,
                        Boundary boundary, std::optional<int> count_filter = {},
                        int budget = 24);

/// One extremal stationary measure per communicating class, computed by a
/// least-squares solve of the class-restricted balance equations with the
/// normalization row appended. Uniformity is not assumed.
std::vector<Measure> stationary_measures(const MarkovModel& model);

Measure point_mass(const MarkovModel& model, std::uint32_t mask);

/// Bernoulli(rho) product weights over the enumerated states, normalized.
/// Requires rho in (0,1).
Measure bernoulli_product(const MarkovModel& model, double rho);

/// max over states sigma of |(nu Q)(sigma)|: the worst stationarity
/// residual over indicator observables.
double check_stationary(const MarkovModel& model, const Measure& nu);

/// max over states and bonds of |rate * (nu(swapped) - nu(state))|.
double check_detailed_balance(const MarkovModel& model, const Measure& nu);

struct ExchangeabilityReport {
  double max_spread = 0.0;  // over counts whose nonfrozen states form one class
  std::vector<int> multi_class_counts;  // counts where that premise fails
  bool single_class_everywhere() const { return multi_class_counts.empty(); }
};

/// Spread (max - min) of nu over the nonfrozen states at each fixed
/// particle count, where those states form a single communicating class.
ExchangeabilityReport check_exchangeability(const MarkovModel& model,
                                            const Measure& nu);

struct Decomposition {
  double alpha_frozen = 0.0;
  double alpha_ergodic = 0.0;
  Measure nu_frozen;    // conditional on frozen states (zeros when alpha = 0)
  Measure nu_ergodic;   // complementary conditional
  double residual_frozen = 0.0;   // stationarity residuals of the conditionals
  double residual_ergodic = 0.0;
};

Decomposition decompose(const MarkovModel& model, const Measure& nu);

/// Within every class, nu is identically zero or strictly positive.
bool check_positivity(const MarkovModel& model, const Measure& nu,
                      double tol = 0.0);

/// Mirror reflection within the window: out(lo + j) = in(hi - j).
Configuration mirror(const Configuration& config);
std::uint32_t mirror_mask(std::uint32_t mask, int length);

}  // namespace pmm
