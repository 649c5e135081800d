#include "pmm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pmm/classify.hpp"

namespace pmm {

double Measure::sum() const { return std::accumulate(w.begin(), w.end(), 0.0); }

void Measure::normalize() {
  double s = sum();
  if (s <= 0.0) throw std::invalid_argument("cannot normalize a zero measure");
  for (double& v : w) v /= s;
}

std::int32_t MarkovModel::index_of(std::uint32_t mask) const {
  if (!count_filter) return static_cast<std::int32_t>(mask);
  auto it = std::lower_bound(states.begin(), states.end(), mask);
  if (it == states.end() || *it != mask) return -1;
  return static_cast<std::int32_t>(it - states.begin());
}

Configuration MarkovModel::config(std::int32_t s) const {
  return Configuration::from_mask(states[s], length, lo, boundary);
}

double MarkovModel::bond_rate(std::uint32_t mask, int x) const {
  if (boundary == Boundary::Empty) return family.rate_mask(mask, length, x);
  const int R = family.radius();
  std::uint32_t bits = 0;
  for (int j = 0; j < family.window_length(); ++j) {
    int site = ((x - R + j) % length + length) % length;
    bits |= ((mask >> site) & 1u) << j;
  }
  return family.rate_local(bits);
}

std::uint32_t MarkovModel::apply_bond(std::uint32_t mask, int x) const {
  int a = x, b = x + 1;
  if (boundary == Boundary::Periodic) b %= length;
  std::uint32_t va = (mask >> a) & 1u, vb = (mask >> b) & 1u;
  if (va == vb) return mask;
  return mask ^ (std::uint32_t{1} << a) ^ (std::uint32_t{1} << b);
}

namespace {

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MarkovModel build_model(const ConstraintFamily& family, int length,
                        Boundary boundary, std::optional<int> count_filter,
                        int budget) {
  if (length <= 0) throw std::invalid_argument("window length must be positive");
  if (length > budget || length > 28)
    throw std::length_error("window length exceeds the enumeration budget");

  MarkovModel model{family, 0, length, boundary, count_filter, {}, {}, {}, {}, {}, {}};
  const std::uint32_t space = std::uint32_t{1} << length;
  if (count_filter) {
    for (std::uint32_t m = 0; m < space; ++m)
      if (std::popcount(m) == *count_filter) model.states.push_back(m);
  } else {
    model.states.resize(space);
    std::iota(model.states.begin(), model.states.end(), 0u);
  }

  const int n = model.n_states();
  model.out.resize(n);
  model.diag.assign(n, 0.0);
  model.state_frozen.resize(n);
  UnionFind uf(n);

  for (std::int32_t s = 0; s < n; ++s) {
    const std::uint32_t mask = model.states[s];
    Configuration c = model.config(s);
    model.state_frozen[s] = is_frozen(c);
    for (int x = 0; x < model.n_bonds(); ++x) {
      std::uint32_t target = model.apply_bond(mask, x);
      if (target == mask) continue;
      double r = model.bond_rate(mask, x);
      if (r <= 0.0) continue;
      std::int32_t t = model.index_of(target);
      model.out[s].emplace_back(t, r);
      model.diag[s] -= r;
      uf.unite(s, t);
    }
    // merge parallel bonds (tiny rings can connect a pair twice)
    auto& row = model.out[s];
    std::sort(row.begin(), row.end());
    std::size_t w = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (w > 0 && row[w - 1].first == row[i].first)
        row[w - 1].second += row[i].second;
      else
        row[w++] = row[i];
    }
    row.resize(w);
  }

  model.class_of.assign(n, -1);
  for (std::int32_t s = 0; s < n; ++s) {
    std::int32_t root = uf.find(s);
    if (model.class_of[root] < 0) {
      model.class_of[root] = static_cast<std::int32_t>(model.classes.size());
      model.classes.emplace_back();
    }
    model.class_of[s] = model.class_of[root];
    model.classes[model.class_of[s]].push_back(s);
  }
  return model;
}

namespace {

// Least squares for the class-restricted balance equations: rows are
// (nu Q)|class = 0 plus the normalization row. Solved through the normal
// equations with partial pivoting; the system is tiny and well scaled.
std::vector<double> solve_class_measure(const MarkovModel& model,
                                        const std::vector<std::int32_t>& members) {
  const int m = static_cast<int>(members.size());
  std::vector<std::int32_t> local(model.n_states(), -1);
  for (int i = 0; i < m; ++i) local[members[i]] = i;

  // dense B: m balance rows + normalization; column j = weight on members[j]
  std::vector<double> B(static_cast<std::size_t>(m + 1) * m, 0.0);
  for (int j = 0; j < m; ++j) {
    std::int32_t s = members[j];
    B[static_cast<std::size_t>(local[s]) * m + j] += model.diag[s];
    for (auto [t, r] : model.out[s]) {
      // transitions stay inside the class
      B[static_cast<std::size_t>(local[t]) * m + j] += r;
    }
    B[static_cast<std::size_t>(m) * m + j] = 1.0;
  }

  // normal equations N x = c with c = B^T e_{m+1} = ones
  std::vector<double> N(static_cast<std::size_t>(m) * m, 0.0);
  for (int row = 0; row <= m; ++row)
    for (int i = 0; i < m; ++i) {
      double bi = B[static_cast<std::size_t>(row) * m + i];
      if (bi == 0.0) continue;
      for (int j = 0; j < m; ++j)
        N[static_cast<std::size_t>(i) * m + j] +=
            bi * B[static_cast<std::size_t>(row) * m + j];
    }
  std::vector<double> x(m, 1.0);

  // Gaussian elimination with partial pivoting on [N | ones]
  std::vector<double> rhs(m, 1.0);
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(N[static_cast<std::size_t>(r) * m + col]) >
          std::abs(N[static_cast<std::size_t>(piv) * m + col]))
        piv = r;
    if (std::abs(N[static_cast<std::size_t>(piv) * m + col]) < 1e-300)
      throw std::runtime_error("singular balance system");
    if (piv != col) {
      for (int j = 0; j < m; ++j)
        std::swap(N[static_cast<std::size_t>(piv) * m + j],
                  N[static_cast<std::size_t>(col) * m + j]);
      std::swap(rhs[piv], rhs[col]);
    }
    double d = N[static_cast<std::size_t>(col) * m + col];
    for (int r = col + 1; r < m; ++r) {
      double f = N[static_cast<std::size_t>(r) * m + col] / d;
      if (f == 0.0) continue;
      for (int j = col; j < m; ++j)
        N[static_cast<std::size_t>(r) * m + j] -=
            f * N[static_cast<std::size_t>(col) * m + j];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = m - 1; r >= 0; --r) {
    double v = rhs[r];
    for (int j = r + 1; j < m; ++j)
      v -= N[static_cast<std::size_t>(r) * m + j] * x[j];
    x[r] = v / N[static_cast<std::size_t>(r) * m + r];
  }
  return x;
}

}  // namespace

std::vector<Measure> stationary_measures(const MarkovModel& model) {
  std::vector<Measure> out;
  out.reserve(model.classes.size());
  for (const auto& members : model.classes) {
    Measure nu;
    nu.w.assign(model.n_states(), 0.0);
    if (members.size() == 1) {
      nu.w[members[0]] = 1.0;
    } else {
      auto x = solve_class_measure(model, members);
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (x[i] < -1e-9) throw std::runtime_error("negative stationary weight");
        nu.w[members[i]] = std::max(x[i], 0.0);
      }
      nu.normalize();
    }
    out.push_back(std::move(nu));
  }
  return out;
}

Measure point_mass(const MarkovModel& model, std::uint32_t mask) {
  std::int32_t s = model.index_of(mask);
  if (s < 0) throw std::invalid_argument("state not in the model");
  Measure nu;
  nu.w.assign(model.n_states(), 0.0);
  nu.w[s] = 1.0;
  return nu;
}

Measure bernoulli_product(const MarkovModel& model, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("density must lie in (0, 1)");
  Measure nu;
  nu.w.resize(model.n_states());
  for (std::int32_t s = 0; s < model.n_states(); ++s) {
    int k = std::popcount(model.states[s]);
    nu.w[s] = std::pow(rho, k) * std::pow(1.0 - rho, model.length - k);
  }
  nu.normalize();
  return nu;
}

double check_stationary(const MarkovModel& model, const Measure& nu) {
  std::vector<double> flow(model.n_states(), 0.0);
  for (std::int32_t s = 0; s < model.n_states(); ++s) {
    flow[s] += nu.w[s] * model.diag[s];
    for (auto [t, r] : model.out[s]) flow[t] += nu.w[s] * r;
  }
  double worst = 0.0;
  for (double v : flow) worst = std::max(worst, std::abs(v));
  return worst;
}

double check_detailed_balance(const MarkovModel& model, const Measure& nu) {
  double worst = 0.0;
  for (std::int32_t s = 0; s < model.n_states(); ++s) {
    const std::uint32_t mask = model.states[s];
    for (int x = 0; x < model.n_bonds(); ++x) {
      std::uint32_t target = model.apply_bond(mask, x);
      if (target == mask) continue;
      double r = model.bond_rate(mask, x);
      if (r <= 0.0) continue;
      std::int32_t t = model.index_of(target);
      worst = std::max(worst, r * std::abs(nu.w[t] - nu.w[s]));
    }
  }
  return worst;
}

ExchangeabilityReport check_exchangeability(const MarkovModel& model,
                                            const Measure& nu) {
  ExchangeabilityReport report;
  for (int k = 0; k <= model.length; ++k) {
    std::int32_t cls = -1;
    bool single = true, any = false;
    double lo = 1.0, hi = 0.0;
    for (std::int32_t s = 0; s < model.n_states(); ++s) {
      if (std::popcount(model.states[s]) != k || model.state_frozen[s]) continue;
      any = true;
      if (cls < 0)
        cls = model.class_of[s];
      else if (model.class_of[s] != cls)
        single = false;
      lo = std::min(lo, nu.w[s]);
      hi = std::max(hi, nu.w[s]);
    }
    if (!any) continue;
    if (!single)
      report.multi_class_counts.push_back(k);
    else
      report.max_spread = std::max(report.max_spread, hi - lo);
  }
  return report;
}

Decomposition decompose(const MarkovModel& model, const Measure& nu) {
  Decomposition d;
  d.nu_frozen.w.assign(model.n_states(), 0.0);
  d.nu_ergodic.w.assign(model.n_states(), 0.0);
  for (std::int32_t s = 0; s < model.n_states(); ++s) {
    if (model.state_frozen[s])
      d.alpha_frozen += nu.w[s];
    else
      d.alpha_ergodic += nu.w[s];
  }
  for (std::int32_t s = 0; s < model.n_states(); ++s) {
    if (model.state_frozen[s]) {
      if (d.alpha_frozen > 0.0) d.nu_frozen.w[s] = nu.w[s] / d.alpha_frozen;
    } else if (d.alpha_ergodic > 0.0) {
      d.nu_ergodic.w[s] = nu.w[s] / d.alpha_ergodic;
    }
  }
  if (d.alpha_frozen > 0.0) d.residual_frozen = check_stationary(model, d.nu_frozen);
  if (d.alpha_ergodic > 0.0)
    d.residual_ergodic = check_stationary(model, d.nu_ergodic);
  return d;
}

bool check_positivity(const MarkovModel& model, const Measure& nu, double tol) {
  for (const auto& members : model.classes) {
    bool any_positive = false, any_zero = false;
    for (std::int32_t s : members) {
      if (nu.w[s] > tol)
        any_positive = true;
      else
        any_zero = true;
    }
    if (any_positive && any_zero) return false;
  }
  return true;
}

std::uint32_t mirror_mask(std::uint32_t mask, int length) {
  std::uint32_t out = 0;
  for (int j = 0; j < length; ++j)
    if ((mask >> j) & 1u) out |= std::uint32_t{1} << (length - 1 - j);
  return out;
}

Configuration mirror(const Configuration& config) {
  Configuration out(config.lo(), config.length(), config.boundary());
  for (int j = 0; j < config.length(); ++j)
    out.set(config.lo() + j, config.occ(config.hi() - j));
  return out;
}

}  // namespace pmm
