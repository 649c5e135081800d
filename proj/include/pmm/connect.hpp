#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pmm/lattice.hpp"

namespace pmm {

/// Sequence of bond exchanges applied from a start configuration. Moves
/// are absolute bond positions x, each exchanging sites (x, x+1).
struct JumpPath {
  Configuration start;
  std::vector<int> moves;
};

/// BFS closure of `start` (packed window at lo = 0, Empty boundary, sites
/// outside read 0) under allowed jumps inside the window. Sorted masks,
/// always containing `start`. Throws std::length_error beyond `budget`.
std::vector<std::uint32_t> reachable_masks(const ConstraintFamily& family,
                                           std::uint32_t start, int length,
                                           int budget = 24);

/// Level-synchronous OpenMP variant; returns the identical sorted set.
std::vector<std::uint32_t> reachable_masks_parallel(const ConstraintFamily& family,
                                                    std::uint32_t start, int length,
                                                    int budget = 24);

std::vector<Configuration> reachable_set(const ConstraintFamily& family,
                                         const Configuration& config,
                                         int budget = 24);

/// Same window, same count required; false immediately on count mismatch.
bool connected(const ConstraintFamily& family, const Configuration& a,
               const Configuration& b, int budget = 24);

/// Replays the path, requiring a positive zero-padded rate at every move.
bool validate_path(const ConstraintFamily& family, const JumpPath& path);

/// End configuration after replay, or nullopt if a move is not allowed.
std::optional<Configuration> replay_path(const ConstraintFamily& family,
                                         const JumpPath& path);

/// Constructive path between two equal-count configurations that each
/// contain a mobile cluster: both are normalized to the right-massed form
/// by sweeping a particle block across the window, and the second path is
/// reversed. Throws std::invalid_argument on precondition violations.
JumpPath plan_transport(const ConstraintFamily& family, const Configuration& from,
                        const Configuration& to);

// Planner building block, exposed for the certification sweeps: moves
// normalizing `mask` to the right-massed block, appended to `moves`.
void plan_right_mass(const ConstraintFamily& family, std::uint32_t mask,
                     int length, std::vector<int>& moves);

struct CertifyReport {
  int window_length = 0;
  long cluster_states = 0;       // states containing a mobile cluster
  long counts_checked = 0;       // particle counts with such states
  long pairs_connected = 0;      // equal-count pairs certified connected
  long planner_pairs = 0;        // ordered pairs replay-validated
  long failures = 0;
  bool pass() const { return failures == 0; }
};

/// Exhaustive connectivity certification on a window: for every particle
/// count, all configurations containing a mobile cluster are mutually
/// reachable, and (optionally) planned paths replay to the right endpoint
/// for every ordered pair. jobs <= 1 runs the serial reference.
CertifyReport certify_connectivity(const ConstraintFamily& family, int length,
                                   bool planner_pairs, int jobs = 1);

struct SupportCertifyReport {
  int half_width = 0;          // window is [-n, n]
  long nonfrozen_cases = 0;    // finite-particle families checked
  long dense_cases = 0;        // finite-hole families checked
  long failures = 0;
  bool pass() const { return failures == 0; }
};

/// Exhaustive check of the two support-confined connection statements on
/// [-n, n]: equal-count nonfrozen configurations are mutually reachable,
/// and configurations that are fully occupied outside [-(n-2), n-2] are
/// mutually reachable at equal hole count.
SupportCertifyReport certify_support_cases(const ConstraintFamily& family, int n,
                                           int jobs = 1);

}  // namespace pmm
