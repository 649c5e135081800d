#include "pmm/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pmm/kmc.hpp"

namespace pmm {

double phi(double u, double v) {
  if (u < 0.0 || v < 0.0) throw std::invalid_argument("phi needs non-negative input");
  if (u == v) return 0.0;  // covers (0, 0)
  if (u == 0.0 || v == 0.0) return std::numeric_limits<double>::infinity();
  return (u - v) * std::log(u / v);
}

double WindowMeasure::total() const {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

double WindowMeasure::bond_rate(std::uint32_t mask, int x) const {
  if (boundary == Boundary::Empty) return family.rate_mask(mask, length, x);
  const int R = family.radius();
  std::uint32_t bits = 0;
  for (int j = 0; j < family.window_length(); ++j) {
    int site = ((x - R + j) % length + length) % length;
    bits |= ((mask >> site) & 1u) << j;
  }
  return family.rate_local(bits);
}

std::uint32_t WindowMeasure::apply_bond(std::uint32_t mask, int x) const {
  int a = x, b = x + 1;
  if (boundary == Boundary::Periodic) b %= length;
  std::uint32_t va = (mask >> a) & 1u, vb = (mask >> b) & 1u;
  if (va == vb) return mask;
  return mask ^ (std::uint32_t{1} << a) ^ (std::uint32_t{1} << b);
}

bool WindowMeasure::bond_measurable(int x) const {
  if (boundary == Boundary::Periodic) return true;
  return x - family.radius() >= 0 && x + family.radius() + 1 < length;
}

WindowMeasure measure_on_window(const MarkovModel& model, const Measure& nu) {
  WindowMeasure wm{model.family, model.lo, model.length, model.boundary, {}};
  wm.w.assign(std::size_t{1} << model.length, 0.0);
  for (std::int32_t s = 0; s < model.n_states(); ++s)
    wm.w[model.states[s]] = nu.w[s];
  return wm;
}

WindowMeasure marginal(const WindowMeasure& nu, int sub_lo, int sub_len) {
  const int off = sub_lo - nu.lo;
  if (off < 0 || off + sub_len > nu.length)
    throw std::out_of_range("subwindow must lie inside the window");
  WindowMeasure out{nu.family, sub_lo, sub_len, Boundary::Empty, {}};
  out.w.assign(std::size_t{1} << sub_len, 0.0);
  const std::uint32_t sub_mask = (std::uint32_t{1} << sub_len) - 1;
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << nu.length); ++m)
    out.w[(m >> off) & sub_mask] += nu.w[m];
  return out;
}

namespace {

double log_mu_rho(std::uint32_t mask, int length, double rho) {
  int k = std::popcount(mask);
  return k * std::log(rho) + (length - k) * std::log(1.0 - rho);
}

void require_density(double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("density must lie in (0, 1)");
}

}  // namespace

double relative_entropy(const WindowMeasure& nu, double rho) {
  require_density(rho);
  double h = 0.0;
  for (std::uint32_t m = 0; m < nu.w.size(); ++m) {
    double p = nu.w[m];
    if (p <= 0.0) continue;
    h += p * (std::log(p) - log_mu_rho(m, nu.length, rho));
  }
  return h;
}

double modified_entropy(const WindowMeasure& nu, double rho, int k_max) {
  require_density(rho);
  double h = 0.0;
  for (std::uint32_t m = 0; m < nu.w.size(); ++m) {
    if (std::popcount(m) > k_max) continue;
    double p = nu.w[m];
    if (p <= 0.0) continue;
    h += p * (std::log(p) - log_mu_rho(m, nu.length, rho));
  }
  return h;
}

double gamma_flow(const WindowMeasure& nu, int x, const Cylinder& sigma) {
  const int off = sigma.lo - nu.lo;
  if (off < 0 || off + sigma.length > nu.length)
    throw std::out_of_range("cylinder must lie inside the window");
  const std::uint32_t sub_mask = (std::uint32_t{1} << sigma.length) - 1;
  double g = 0.0;
  for (std::uint32_t m = 0; m < nu.w.size(); ++m) {
    if (((m >> off) & sub_mask) != sigma.bits) continue;
    if (nu.w[m] == 0.0) continue;
    g += nu.w[m] * nu.bond_rate(m, x - nu.lo);
  }
  return g;
}

double alpha_dissipation(const WindowMeasure& nu, int x) {
  const int xb = x - nu.lo;
  if (!nu.bond_measurable(xb))
    throw std::out_of_range("bond rate must be measurable in the window");
  double a = 0.0;
  for (std::uint32_t m = 0; m < nu.w.size(); ++m) {
    double c = nu.bond_rate(m, xb);
    if (c <= 0.0) continue;
    std::uint32_t t = nu.apply_bond(m, xb);
    if (t == m) continue;
    a += c * phi(nu.w[t], nu.w[m]);
  }
  return a;
}

double beta_discrepancy(const WindowMeasure& nu, int x) {
  const int xb = x - nu.lo;
  if (!nu.bond_measurable(xb))
    throw std::out_of_range("bond rate must be measurable in the window");
  double b = 0.0;
  for (std::uint32_t m = 0; m < nu.w.size(); ++m) {
    double c = nu.bond_rate(m, xb);
    if (c <= 0.0) continue;
    std::uint32_t t = nu.apply_bond(m, xb);
    if (t == m) continue;
    b += c * std::abs(nu.w[m] - nu.w[t]);
  }
  return b;
}

BalanceSplit entropy_balance(const WindowMeasure& nu, double rho, int sub_lo,
                             int sub_len) {
  require_density(rho);
  const int off = sub_lo - nu.lo;
  if (off < 0 || off + sub_len > nu.length)
    throw std::out_of_range("subwindow must lie inside the window");

  WindowMeasure nu_sub = marginal(nu, sub_lo, sub_len);
  const std::uint32_t sub_mask = (std::uint32_t{1} << sub_len) - 1;
  auto log_ratio = [&](std::uint32_t full_mask) {
    std::uint32_t sm = (full_mask >> off) & sub_mask;
    double p = nu_sub.w[sm];
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(p) - log_mu_rho(sm, sub_len, rho);
  };

  BalanceSplit split;
  for (int xb = 0; xb < nu.n_bonds(); ++xb) {
    const int a = xb, b = nu.boundary == Boundary::Periodic ? (xb + 1) % nu.length : xb + 1;
    const bool a_in = a >= off && a < off + sub_len;
    const bool b_in = b >= off && b < off + sub_len;
    if (!a_in && !b_in) continue;  // exchange cannot move the subwindow state

    const bool bulk = a_in && b_in && nu.bond_measurable(xb) &&
                      a - nu.family.radius() >= off &&
                      a + nu.family.radius() + 1 < off + sub_len;
    if (bulk) {
      // rate and both endpoints resolve in the subwindow marginal
      double term = 0.0;
      const int xs = a - off;
      for (std::uint32_t sm = 0; sm < nu_sub.w.size(); ++sm) {
        double c = nu_sub.bond_rate(sm, xs);
        if (c <= 0.0) continue;
        std::uint32_t st = nu_sub.apply_bond(sm, xs);
        if (st == sm) continue;
        double p = nu_sub.w[sm], q = nu_sub.w[st];
        if (p <= 0.0 && q <= 0.0) continue;
        double lr = (p > 0.0) ? std::log(p) - log_mu_rho(sm, sub_len, rho)
                              : -std::numeric_limits<double>::infinity();
        term += lr * c * (q - p);
      }
      split.bulk += term;
    } else {
      double term = 0.0;
      for (std::uint32_t m = 0; m < nu.w.size(); ++m) {
        if (nu.w[m] == 0.0) continue;
        double c = nu.bond_rate(m, xb);
        if (c <= 0.0) continue;
        std::uint32_t t = nu.apply_bond(m, xb);
        if (((t >> off) & sub_mask) == ((m >> off) & sub_mask)) continue;
        term += nu.w[m] * c * (log_ratio(t) - log_ratio(m));
      }
      split.boundary += term;
    }
  }
  return split;
}

EntropyReport entropy_report(const MarkovModel& model, const Measure& nu,
                             double rho) {
  EntropyReport report;
  WindowMeasure wm = measure_on_window(model, nu);
  report.relative_entropy = relative_entropy(wm, rho);
  for (int xb = 0; xb < wm.n_bonds(); ++xb) {
    if (!wm.bond_measurable(xb)) {
      report.alpha.push_back(std::numeric_limits<double>::quiet_NaN());
      report.beta.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    report.alpha.push_back(alpha_dissipation(wm, wm.lo + xb));
    report.beta.push_back(beta_discrepancy(wm, wm.lo + xb));
  }
  report.balance_residual = check_detailed_balance(model, nu);
  return report;
}

WindowMeasure random_positive_measure(const ConstraintFamily& family, int length,
                                      Boundary boundary, std::uint64_t seed,
                                      std::uint64_t stream) {
  CounterRng rng(seed, stream);
  WindowMeasure nu{family, 0, length, boundary, {}};
  nu.w.resize(std::size_t{1} << length);
  double total = 0.0;
  for (double& v : nu.w) {
    v = 0.05 + rng.next_unit();
    total += v;
  }
  for (double& v : nu.w) v /= total;
  return nu;
}

BetaAlphaSweep sweep_beta_alpha(const ConstraintFamily& family, int length,
                                long n_samples, std::uint64_t seed, int jobs) {
  BetaAlphaSweep sweep;
  sweep.samples = n_samples;
  const double c_max = family.c_max();
  long violations = 0;
  double worst = -std::numeric_limits<double>::infinity();

  auto margin_for = [&](long i) {
    WindowMeasure nu = random_positive_measure(family, length, Boundary::Empty,
                                               seed, static_cast<std::uint64_t>(i));
    double m = -std::numeric_limits<double>::infinity();
    for (int xb = 0; xb < nu.n_bonds(); ++xb) {
      if (!nu.bond_measurable(xb)) continue;
      double a = alpha_dissipation(nu, xb);
      double b = beta_discrepancy(nu, xb);
      m = std::max(m, b - std::sqrt(c_max * a));
    }
    return m;
  };

  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : violations) \
    reduction(max : worst) num_threads(jobs)
    for (long i = 0; i < n_samples; ++i) {
      double m = margin_for(i);
      if (m > 1e-12) ++violations;
      worst = std::max(worst, m);
    }
#else
    jobs = 1;
#endif
  }
  if (jobs <= 1) {
    for (long i = 0; i < n_samples; ++i) {
      double m = margin_for(i);
      if (m > 1e-12) ++violations;
      worst = std::max(worst, m);
    }
  }
  sweep.violations = violations;
  sweep.worst_margin = worst;
  return sweep;
}

}  // namespace pmm
