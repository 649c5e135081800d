#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pmm {

enum class Boundary { Empty, Periodic };

// How rate evaluation treats sites outside the window under Empty boundary.
// ZeroPad reads them as holes (the "jump inside a window" convention);
// Strict throws when the rate's neighborhood leaves the window.
enum class EdgePolicy { ZeroPad, Strict };

/// Occupation pattern on a finite lattice window [lo, lo+length-1].
/// Under Empty boundary, sites outside the window read 0; under Periodic,
/// site arithmetic is modulo the window length. Value type: operations
/// return modified copies unless the owner mutates its own instance.
class Configuration {
 public:
  Configuration() = default;
  Configuration(int lo, int length, Boundary boundary);

  static Configuration from_string(std::string_view bits, int lo = 0,
                                   Boundary boundary = Boundary::Empty);
  static Configuration from_mask(std::uint64_t mask, int length, int lo = 0,
                                 Boundary boundary = Boundary::Empty);

  int lo() const { return lo_; }
  int hi() const { return lo_ + length_ - 1; }
  int length() const { return length_; }
  Boundary boundary() const { return boundary_; }

  bool in_window(long site) const {
    return site >= lo_ && site <= static_cast<long>(hi());
  }

  // Window index of a site, or -1 when the site falls outside under Empty.
  int resolve(long site) const;

  int occ(long site) const;
  void set(long site, int value);

  int count() const;

  // Low-order packed bits; requires length <= 64. Bit j is site lo+j.
  std::uint64_t mask() const;

  std::string to_string() const;

  bool swap_resolvable(long x) const;
  void apply_swap(long x);
  Configuration with_swap(long x) const;

  bool operator==(const Configuration&) const = default;

 private:
  int lo_ = 0;
  int length_ = 0;
  Boundary boundary_ = Boundary::Empty;
  std::vector<std::uint64_t> words_;
};

/// Translation-invariant bond rate family with finite support radius R:
/// the rate of exchanging sites (x, x+1) is a function of the local window
/// [x-R, x+R+1], stored as an explicit table so the admissibility
/// conditions can be checked exhaustively.
class ConstraintFamily {
 public:
  ConstraintFamily(int radius, std::vector<double> table);

  int radius() const { return radius_; }
  int window_length() const { return 2 * radius_ + 2; }
  double c_max() const { return c_max_; }

  // Local windows are indexed with bit j holding site -R+j (relative to
  // the bond's left site).
  double rate_local(std::uint32_t local_bits) const {
    return table_[local_bits];
  }
  const std::vector<double>& table() const { return table_; }

  /// Rate of the bond (x, x+1) in a configuration, respecting its boundary.
  double rate(const Configuration& config, long x,
              EdgePolicy policy = EdgePolicy::ZeroPad) const;

  /// Fast path for packed windows at lo = 0 under Empty boundary.
  double rate_mask(std::uint64_t mask, int length, int x) const;

  /// FNV-1a over radius and table bit patterns; stable across runs.
  std::uint64_t fingerprint() const;

 private:
  int radius_;
  std::vector<double> table_;
  double c_max_;
};

/// The porous medium model: radius 1, rate(x) = occ(x-1) + occ(x+2).
ConstraintFamily pmm_family();

struct FamilyReport {
  // Translation invariance and locality hold by construction of the table.
  bool structural = true;
  bool nonnegative = false;
  bool swap_symmetric = false;
  bool positivity = false;
  std::vector<std::string> failures;

  bool pass() const {
    return structural && nonnegative && swap_symmetric && positivity;
  }
};

/// Exhaustively checks the admissibility conditions over all local windows:
/// non-negative rates, invariance under exchanging the bond's own sites,
/// and rate positive exactly when site -1 or site +2 is occupied.
FamilyReport validate_family(const ConstraintFamily& family);

/// Parse {"radius": R, "rates": [{"window": "0101", "value": 1.0}, ...]};
/// windows are binary strings over [-R, R+1], left to right. Missing
/// windows default to rate 0.
ConstraintFamily family_from_json(const std::string& text);
std::string family_to_json(const ConstraintFamily& family);

}  // namespace pmm
