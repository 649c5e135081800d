#include "pmm/hydro.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pmm/kmc.hpp"

namespace pmm {

double PdeGrid::mass() const {
  return std::accumulate(rho.begin(), rho.end(), 0.0) * dx();
}

double profile_value(InitialProfile profile, double x) {
  constexpr double pi = 3.14159265358979323846;
  switch (profile) {
    case InitialProfile::Flat:
      return 0.5;
    case InitialProfile::Bump:
      return 0.2 + 0.6 * std::exp(-std::pow(std::sin(pi * (x - 0.5)), 2) / 0.08);
    case InitialProfile::Step: {
      // smoothed square wave between 0.2 and 0.8
      double s = std::tanh(std::sin(2.0 * pi * x) / 0.25);
      return 0.5 + 0.3 * s / std::tanh(1.0 / 0.25);
    }
  }
  return 0.5;
}

PdeGrid make_grid(int cells, const std::function<double(double)>& rho0) {
  if (cells < 2) throw std::invalid_argument("grid needs at least two cells");
  PdeGrid g;
  g.rho.resize(cells);
  for (int i = 0; i < cells; ++i) {
    double v = rho0((i + 0.5) / cells);
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("densities must lie in [0, 1]");
    g.rho[i] = v;
  }
  return g;
}

PdeGrid make_grid(int cells, InitialProfile profile) {
  return make_grid(cells, [profile](double x) { return profile_value(profile, x); });
}

double pme_max_dt(const PdeGrid& grid) {
  double rho_max = 0.0;
  for (double v : grid.rho) rho_max = std::max(rho_max, v);
  if (rho_max <= 0.0) return 1.0;  // identically zero profile never moves
  return grid.dx() * grid.dx() / (4.0 * 2.0 * rho_max);
}

void pme_step(PdeGrid& grid, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  if (dt > pme_max_dt(grid) * (1.0 + 1e-12))
    throw std::invalid_argument("dt violates the explicit stability bound");
  const int M = grid.cells();
  const double f = dt / (grid.dx() * grid.dx());
  std::vector<double> u(M);
  for (int i = 0; i < M; ++i) u[i] = grid.rho[i] * grid.rho[i];
  std::vector<double> next(M);
  for (int i = 0; i < M; ++i) {
    double lap = u[(i + 1) % M] - 2.0 * u[i] + u[(i + M - 1) % M];
    next[i] = grid.rho[i] + f * lap;
  }
  grid.rho = std::move(next);
  grid.time += dt;
}

void pme_run(PdeGrid& grid, double t_final) {
  if (t_final < grid.time)
    throw std::invalid_argument("cannot integrate backwards");
  const double span = t_final - grid.time;
  if (span == 0.0) return;
  // the profile can only flatten, so the initial bound stays valid
  const double dt_max = pme_max_dt(grid) * 0.9;
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max)));
  const double dt = span / steps;
  for (long s = 0; s < steps; ++s) pme_step(grid, dt);
}

std::vector<double> block_average(const std::vector<double>& values, int blocks) {
  const int n = static_cast<int>(values.size());
  if (blocks <= 0 || n % blocks != 0)
    throw std::invalid_argument("size must be divisible by the block count");
  const int width = n / blocks;
  std::vector<double> out(blocks, 0.0);
  for (int b = 0; b < blocks; ++b) {
    for (int j = 0; j < width; ++j) out[b] += values[b * width + j];
    out[b] /= width;
  }
  return out;
}

Discrepancy compare_profiles(const std::vector<double>& empirical,
                             const PdeGrid& pde, int blocks) {
  if (static_cast<int>(empirical.size()) % blocks != 0 ||
      pde.cells() % blocks != 0)
    throw std::invalid_argument("profiles do not share the block grid");
  auto a = block_average(empirical, blocks);
  auto b = block_average(pde.rho, blocks);
  Discrepancy d;
  d.blocks = blocks;
  double sq = 0.0;
  for (int i = 0; i < blocks; ++i) {
    double diff = a[i] - b[i];
    sq += diff * diff;
    d.sup = std::max(d.sup, std::abs(diff));
  }
  d.l2 = std::sqrt(sq / blocks);
  return d;
}

HydroResult hydro_experiment(const ConstraintFamily& family, int lattice_sites,
                             int replicas, double t_macro, InitialProfile profile,
                             std::uint64_t seed, int jobs, int blocks,
                             int pde_cells) {
  if (lattice_sites % blocks != 0 || pde_cells % blocks != 0)
    throw std::invalid_argument("sites and cells must be divisible by the block count");

  HydroResult result;
  result.lattice_sites = lattice_sites;
  result.replicas = replicas;
  result.t_macro = t_macro;

  std::vector<double> site_density(lattice_sites);
  for (int j = 0; j < lattice_sites; ++j)
    site_density[j] = profile_value(profile, (j + 0.5) / lattice_sites);

  const double horizon =
      static_cast<double>(lattice_sites) * lattice_sites * t_macro;
  std::vector<double> mean_final(lattice_sites, 0.0);
  std::vector<std::vector<double>> finals(replicas);
  std::vector<std::uint64_t> events(replicas, 0);

  auto run_replica = [&](int r) {
    Configuration init = sample_profile_ring(lattice_sites, site_density, seed, r);
    SimState sim(family, init, seed, 0x9e00 + static_cast<std::uint64_t>(r));
    sim.run_until(horizon);
    std::vector<double> occ(lattice_sites);
    Configuration final = sim.config();
    for (int j = 0; j < lattice_sites; ++j) occ[j] = final.occ(j);
    finals[r] = std::move(occ);
    events[r] = sim.events();
  };

  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int r = 0; r < replicas; ++r) run_replica(r);
#else
    for (int r = 0; r < replicas; ++r) run_replica(r);
#endif
  } else {
    for (int r = 0; r < replicas; ++r) run_replica(r);
  }

  for (int r = 0; r < replicas; ++r) {
    result.total_events += events[r];
    for (int j = 0; j < lattice_sites; ++j) mean_final[j] += finals[r][j];
  }
  for (double& v : mean_final) v /= replicas;

  PdeGrid grid = make_grid(pde_cells, profile);
  pme_run(grid, t_macro);

  result.empirical_blocks = block_average(mean_final, blocks);
  result.pde_blocks = block_average(grid.rho, blocks);
  Discrepancy d;
  d.blocks = blocks;
  double sq = 0.0;
  for (int i = 0; i < blocks; ++i) {
    double diff = result.empirical_blocks[i] - result.pde_blocks[i];
    sq += diff * diff;
    d.sup = std::max(d.sup, std::abs(diff));
  }
  d.l2 = std::sqrt(sq / blocks);
  result.discrepancy = d;
  return result;
}

}  // namespace pmm
