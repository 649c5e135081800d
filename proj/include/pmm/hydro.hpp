#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pmm/lattice.hpp"

namespace pmm {

/// Cell-averaged density on the periodic unit interval.
struct PdeGrid {
  double time = 0.0;
  std::vector<double> rho;

  int cells() const { return static_cast<int>(rho.size()); }
  double dx() const { return 1.0 / cells(); }
  double mass() const;  // integral of rho
};

enum class InitialProfile { Step, Bump, Flat };

/// Smooth periodic initial data with values inside [0.2, 0.8].
double profile_value(InitialProfile profile, double x);

PdeGrid make_grid(int cells, const std::function<double(double)>& rho0);
PdeGrid make_grid(int cells, InitialProfile profile);

/// Largest stable forward-Euler step for the nonlinear diffusion
/// d_t rho = d_xx(rho^2): dx^2 / (4 max(2 rho)).
double pme_max_dt(const PdeGrid& grid);

/// One forward-Euler step with centered second differences on the
/// periodic grid; throws when dt violates the stability bound.
void pme_step(PdeGrid& grid, double dt);

/// Integrates to t_final with uniform substeps within the stability bound.
void pme_run(PdeGrid& grid, double t_final);

struct Discrepancy {
  double l2 = 0.0;   // root mean square over blocks
  double sup = 0.0;
  int blocks = 0;
};

/// Block-averages both profiles onto `blocks` cells of the unit torus and
/// compares. Sizes must be divisible by the block count.
Discrepancy compare_profiles(const std::vector<double>& empirical,
                             const PdeGrid& pde, int blocks);

std::vector<double> block_average(const std::vector<double>& values, int blocks);

struct HydroResult {
  int lattice_sites = 0;
  int replicas = 0;
  double t_macro = 0.0;
  std::vector<double> empirical_blocks;
  std::vector<double> pde_blocks;
  Discrepancy discrepancy;
  std::uint64_t total_events = 0;
};

/// Diffusive-scaling comparison: rings of L sites run to microscopic time
/// L^2 t_macro from site-wise Bernoulli(rho0) initial data; the replica
/// mean of the final occupations is block-averaged and compared with the
/// macroscopic solution at t_macro.
HydroResult hydro_experiment(const ConstraintFamily& family, int lattice_sites,
                             int replicas, double t_macro, InitialProfile profile,
                             std::uint64_t seed, int jobs = 1, int blocks = 64,
                             int pde_cells = 512);

}  // namespace pmm
