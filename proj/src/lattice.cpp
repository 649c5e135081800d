#include "pmm/lattice.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "json.hpp"

namespace pmm {

namespace {

int mod_floor(long a, long m) {
  long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

}  // namespace

Configuration::Configuration(int lo, int length, Boundary boundary)
    : lo_(lo), length_(length), boundary_(boundary) {
  if (length <= 0) throw std::invalid_argument("window length must be positive");
  words_.assign((length + 63) / 64, 0);
}

Configuration Configuration::from_string(std::string_view bits, int lo,
                                         Boundary boundary) {
  Configuration c(lo, static_cast<int>(bits.size()), boundary);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1') {
      c.set(lo + static_cast<long>(j), 1);
    } else if (bits[j] != '0') {
      throw std::invalid_argument("configuration string must be over {0,1}");
    }
  }
  return c;
}

Configuration Configuration::from_mask(std::uint64_t mask, int length, int lo,
                                       Boundary boundary) {
  Configuration c(lo, length, boundary);
  if (length < 64 && (mask >> length) != 0)
    throw std::invalid_argument("mask has bits outside the window");
  c.words_[0] = mask;
  return c;
}

int Configuration::resolve(long site) const {
  long off = site - lo_;
  if (boundary_ == Boundary::Periodic) return mod_floor(off, length_);
  if (off < 0 || off >= length_) return -1;
  return static_cast<int>(off);
}

int Configuration::occ(long site) const {
  int j = resolve(site);
  if (j < 0) return 0;  // Empty boundary zero-pads
  return static_cast<int>((words_[j >> 6] >> (j & 63)) & 1u);
}

void Configuration::set(long site, int value) {
  int j = resolve(site);
  if (j < 0) throw std::out_of_range("site outside window under empty boundary");
  std::uint64_t bit = std::uint64_t{1} << (j & 63);
  if (value)
    words_[j >> 6] |= bit;
  else
    words_[j >> 6] &= ~bit;
}

int Configuration::count() const {
  int n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

std::uint64_t Configuration::mask() const {
  if (length_ > 64) throw std::length_error("window too long for a packed mask");
  return words_.empty() ? 0 : words_[0];
}

std::string Configuration::to_string() const {
  std::string s(length_, '0');
  for (int j = 0; j < length_; ++j)
    if (occ(lo_ + j)) s[j] = '1';
  return s;
}

bool Configuration::swap_resolvable(long x) const {
  if (boundary_ == Boundary::Periodic) return true;
  return in_window(x) && in_window(x + 1);
}

void Configuration::apply_swap(long x) {
  if (!swap_resolvable(x))
    throw std::out_of_range("exchange undefined: bond leaves the window");
  int a = occ(x), b = occ(x + 1);
  if (a == b) return;
  set(x, b);
  set(x + 1, a);
}

Configuration Configuration::with_swap(long x) const {
  Configuration c = *this;
  c.apply_swap(x);
  return c;
}

ConstraintFamily::ConstraintFamily(int radius, std::vector<double> table)
    : radius_(radius), table_(std::move(table)) {
  if (radius < 0 || radius > 10)
    throw std::invalid_argument("support radius out of range [0, 10]");
  std::size_t expected = std::size_t{1} << (2 * radius + 2);
  if (table_.size() != expected)
    throw std::invalid_argument("rate table must cover all local windows");
  c_max_ = 0.0;
  for (double v : table_) {
    if (!std::isfinite(v)) throw std::invalid_argument("rates must be finite");
    c_max_ = std::max(c_max_, v);
  }
}

double ConstraintFamily::rate(const Configuration& config, long x,
                              EdgePolicy policy) const {
  int w = window_length();
  std::uint32_t bits = 0;
  for (int j = 0; j < w; ++j) {
    long site = x - radius_ + j;
    if (policy == EdgePolicy::Strict && config.boundary() == Boundary::Empty &&
        !config.in_window(site))
      throw std::out_of_range("rate neighborhood leaves the window");
    bits |= static_cast<std::uint32_t>(config.occ(site)) << j;
  }
  return table_[bits];
}

double ConstraintFamily::rate_mask(std::uint64_t mask, int length, int x) const {
  int w = window_length();
  int start = x - radius_;
  if (start >= 0 && start + w <= length) {
    return table_[(mask >> start) & ((std::uint64_t{1} << w) - 1)];
  }
  std::uint32_t bits = 0;
  for (int j = 0; j < w; ++j) {
    int site = start + j;
    if (site >= 0 && site < length)
      bits |= static_cast<std::uint32_t>((mask >> site) & 1u) << j;
  }
  return table_[bits];
}

std::uint64_t ConstraintFamily::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(radius_));
  for (double v : table_) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  }
  return h;
}

ConstraintFamily pmm_family() {
  // Local window bits over sites (-1, 0, 1, 2).
  std::vector<double> table(16, 0.0);
  for (std::uint32_t w = 0; w < 16; ++w)
    table[w] = static_cast<double>((w & 1u) + ((w >> 3) & 1u));
  return ConstraintFamily(1, std::move(table));
}

FamilyReport validate_family(const ConstraintFamily& family) {
  FamilyReport report;
  const int R = family.radius();
  const int w = family.window_length();
  const std::uint32_t n = std::uint32_t{1} << w;

  report.nonnegative = true;
  for (std::uint32_t bits = 0; bits < n; ++bits) {
    if (family.rate_local(bits) < 0.0) {
      report.nonnegative = false;
      report.failures.push_back("negative rate on window " + std::to_string(bits));
      break;
    }
  }

  // Exchanging the bond's own sites (local positions R and R+1).
  report.swap_symmetric = true;
  for (std::uint32_t bits = 0; bits < n; ++bits) {
    std::uint32_t a = (bits >> R) & 1u, b = (bits >> (R + 1)) & 1u;
    if (a == b) continue;
    std::uint32_t swapped = bits ^ (std::uint32_t{1} << R) ^ (std::uint32_t{1} << (R + 1));
    if (family.rate_local(bits) != family.rate_local(swapped)) {
      report.swap_symmetric = false;
      report.failures.push_back("rate changes under exchanging the bond sites, window " +
                                std::to_string(bits));
      break;
    }
  }

  // Positive exactly when site -1 or site +2 is occupied. Radius 0 cannot
  // see those sites, so no radius-0 table can satisfy this.
  if (R < 1) {
    report.positivity = false;
    report.failures.push_back("support radius 0 cannot resolve sites -1 and +2");
  } else {
    report.positivity = true;
    for (std::uint32_t bits = 0; bits < n; ++bits) {
      bool facilitated = (((bits >> (R - 1)) & 1u) | ((bits >> (R + 2)) & 1u)) != 0;
      bool positive = family.rate_local(bits) > 0.0;
      if (facilitated != positive) {
        report.positivity = false;
        report.failures.push_back(
            std::string(positive ? "positive" : "zero") +
            " rate where the facilitation condition is " +
            (facilitated ? "met" : "not met") + ", window " + std::to_string(bits));
        break;
      }
    }
  }
  return report;
}

namespace {

std::string window_string(std::uint32_t bits, int w) {
  std::string s(w, '0');
  for (int j = 0; j < w; ++j)
    if ((bits >> j) & 1u) s[j] = '1';
  return s;
}

}  // namespace

ConstraintFamily family_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  int radius = doc.at("radius").get<int>();
  if (radius < 0 || radius > 10)
    throw std::invalid_argument("support radius out of range [0, 10]");
  int w = 2 * radius + 2;
  std::vector<double> table(std::size_t{1} << w, 0.0);
  std::vector<bool> seen(table.size(), false);
  for (const auto& entry : doc.at("rates")) {
    std::string win = entry.at("window").get<std::string>();
    if (static_cast<int>(win.size()) != w)
      throw std::invalid_argument("window string length must be 2R+2");
    std::uint32_t bits = 0;
    for (int j = 0; j < w; ++j) {
      if (win[j] == '1')
        bits |= std::uint32_t{1} << j;
      else if (win[j] != '0')
        throw std::invalid_argument("window string must be over {0,1}");
    }
    if (seen[bits]) throw std::invalid_argument("duplicate window " + win);
    seen[bits] = true;
    table[bits] = entry.at("value").get<double>();
  }
  return ConstraintFamily(radius, std::move(table));
}

std::string family_to_json(const ConstraintFamily& family) {
  nlohmann::json doc;
  doc["radius"] = family.radius();
  auto& rates = doc["rates"] = nlohmann::json::array();
  int w = family.window_length();
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << w); ++bits) {
    if (family.rate_local(bits) == 0.0) continue;
    rates.push_back({{"window", window_string(bits, w)},
                     {"value", family.rate_local(bits)}});
  }
  return doc.dump(2);
}

}  // namespace pmm
