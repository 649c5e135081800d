#pragma once

#include <cstdint>
#include <vector>

#include "pmm/exact.hpp"
#include "pmm/lattice.hpp"

namespace pmm {

/// (u - v) log(u / v) for u, v > 0; 0 at (0, 0); +infinity when exactly
/// one argument vanishes. Non-negative, 1-homogeneous and subadditive.
/// Throws on negative input.
double phi(double u, double v);

/// Weights over the packed states of a window, together with the rate
/// family needed to evaluate bond rates against it. Under Empty boundary
/// rates zero-pad outside the window; Periodic wraps.
struct WindowMeasure {
  ConstraintFamily family;
  int lo = 0;
  int length = 0;
  Boundary boundary = Boundary::Empty;
  std::vector<double> w;  // size 2^length, indexed by mask

  double total() const;
  double bond_rate(std::uint32_t mask, int x) const;       // x window-relative
  std::uint32_t apply_bond(std::uint32_t mask, int x) const;
  int n_bonds() const { return boundary == Boundary::Periodic ? length : length - 1; }
  /// Rate of bond x depends only on sites inside the window.
  bool bond_measurable(int x) const;
};

WindowMeasure measure_on_window(const MarkovModel& model, const Measure& nu);

/// Contraction onto the subwindow [sub_lo, sub_lo+sub_len-1]; the result
/// carries Empty boundary semantics (proper subwindows of a ring included).
WindowMeasure marginal(const WindowMeasure& nu, int sub_lo, int sub_len);

/// sum_sigma nu(sigma) log(nu(sigma) / mu_rho(sigma)); zero-weight terms
/// contribute 0. Throws unless rho lies in (0, 1).
double relative_entropy(const WindowMeasure& nu, double rho);

/// The same sum truncated to states with at most k_max particles.
double modified_entropy(const WindowMeasure& nu, double rho, int k_max);

struct Cylinder {
  int lo = 0;
  int length = 0;
  std::uint32_t bits = 0;
};

/// Gamma(x, sigma) = nu(c_x 1_sigma): expected bond rate on the cylinder.
double gamma_flow(const WindowMeasure& nu, int x, const Cylinder& sigma);

/// alpha(x) = sum_sigma c_x(sigma) Phi(nu(sigma^x), nu(sigma)).
/// Requires bond x measurable in the window.
double alpha_dissipation(const WindowMeasure& nu, int x);

/// beta(x) = sum_sigma c_x(sigma) |nu(sigma) - nu(sigma^x)|.
double beta_discrepancy(const WindowMeasure& nu, int x);

struct BalanceSplit {
  double bulk = 0.0;      // dissipation terms, rates measurable in the subwindow
  double boundary = 0.0;  // terms that must look outside the subwindow
  double total() const { return bulk + boundary; }
};

/// Splits the stationarity identity for the subwindow's log-density
/// observable into bulk and boundary bond sums. For a stationary measure
/// the two parts cancel; the bulk part equals -(1/2) sum of the marginal
/// bond dissipations.
BalanceSplit entropy_balance(const WindowMeasure& nu, double rho, int sub_lo,
                             int sub_len);

struct EntropyReport {
  double relative_entropy = 0.0;
  std::vector<double> alpha;  // per bond
  std::vector<double> beta;
  double balance_residual = 0.0;  // max per-bond flux imbalance
};

EntropyReport entropy_report(const MarkovModel& model, const Measure& nu,
                             double rho);

/// Strictly positive normalized weights, deterministic in the rng stream.
WindowMeasure random_positive_measure(const ConstraintFamily& family, int length,
                                      Boundary boundary, std::uint64_t seed,
                                      std::uint64_t stream);

struct BetaAlphaSweep {
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0;  // max of beta - sqrt(c_max * alpha)
};

/// Checks beta(x) <= sqrt(c_max * alpha(x)) on random positive measures
/// over every measurable bond. jobs <= 1 runs the serial reference.
BetaAlphaSweep sweep_beta_alpha(const ConstraintFamily& family, int length,
                                long n_samples, std::uint64_t seed, int jobs = 1);

}  // namespace pmm
