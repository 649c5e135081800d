#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pmm/lattice.hpp"

namespace pmm {

/// True iff some other particle lies within distance 2 of the occupied
/// site x (ring metric under Periodic). Throws when x is unoccupied.
bool is_active(const Configuration& config, long x);

/// No occupied site has another particle within distance 2.
bool is_frozen(const Configuration& config);

/// Two occupied sites of [sub_lo, sub_lo+sub_len-1] at distance 1 or 2.
bool has_mobile_cluster(const Configuration& config, long sub_lo, int sub_len);
bool has_mobile_cluster(const Configuration& config);

// Mask-level helpers for packed windows at lo = 0, Empty boundary.
bool mask_has_mobile_cluster(std::uint64_t mask, int length);
bool mask_is_frozen(std::uint64_t mask, int length);

enum class SetLabel { Frozen, FiniteParticles, FiniteHoles, FiniteClusters, Ergodic };

struct ClassLabel {
  SetLabel set;
  long k = -1;  // particle count (FiniteParticles) or hole count (FiniteHoles)

  bool operator==(const ClassLabel&) const = default;
  std::string to_string() const;
};

/// Infinite configuration given as a periodic left tail, a finite core on
/// a stated window, and a periodic right tail. Tail words abut the core
/// edges: the right word starts at core_hi+1 repeating rightward, the left
/// word ends at core_lo-1 repeating leftward.
class EventuallyPeriodic {
 public:
  EventuallyPeriodic(std::string left, std::string core, std::string right,
                     int core_lo = 0);

  /// Parse "(100)* 11 (100)*": tail words starred in parentheses, core in
  /// the middle, whitespace separated. Core placed at [0, len).
  static EventuallyPeriodic parse(std::string_view text);
  std::string to_string() const;

  int occ(long site) const;
  int core_lo() const { return core_lo_; }
  int core_hi() const { return core_lo_ + static_cast<int>(core_.size()) - 1; }
  const std::string& left() const { return left_; }
  const std::string& core() const { return core_; }
  const std::string& right() const { return right_; }

  /// Equivalent configuration with tail periods unrolled into the core.
  EventuallyPeriodic extended(int periods_left, int periods_right) const;

  double rate_at(const ConstraintFamily& family, long x) const;

  /// Applies the exchange at (x, x+1), unrolling tail periods first when
  /// the bond touches a tail site. Throws when the rate vanishes.
  EventuallyPeriodic with_jump(const ConstraintFamily& family, long x) const;

  bool operator==(const EventuallyPeriodic&) const = default;

 private:
  std::string left_, core_, right_;
  int core_lo_;
};

/// Decides the invariant set of an eventually periodic configuration:
/// frozen, finitely many particles (k >= 2), finitely many holes,
/// finitely many particle pairs within distance 2, or none of those.
ClassLabel classify_infinite(const EventuallyPeriodic& config);

}  // namespace pmm
