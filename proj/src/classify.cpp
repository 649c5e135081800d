#include "pmm/classify.hpp"

#include <sstream>
#include <stdexcept>

namespace pmm {

namespace {

// Another occupied site within distance d of x, excluding x itself.
bool neighbor_within(const Configuration& c, long x, int d) {
  const int L = c.length();
  for (int step = 1; step <= d; ++step) {
    for (int dir : {-1, +1}) {
      long y = x + dir * step;
      if (c.boundary() == Boundary::Periodic) {
        // skip wrap-around self matches on tiny rings
        if (((y - x) % L + L) % L == 0) continue;
      }
      if (c.occ(y)) return true;
    }
  }
  return false;
}

bool word_all(const std::string& w, char ch) {
  return w.find_first_not_of(ch) == std::string::npos;
}

// Frozen-ness of the two-sided infinite repetition of a word.
bool periodic_word_frozen(const std::string& w) {
  const int p = static_cast<int>(w.size());
  for (int i = 0; i < p; ++i) {
    if (w[i] != '1') continue;
    if (w[(i + 1) % p] == '1' || w[(i + 2) % p] == '1') return false;
  }
  return true;
}

}  // namespace

bool is_active(const Configuration& config, long x) {
  if (!config.occ(x))
    throw std::invalid_argument("activity is defined for occupied sites only");
  return neighbor_within(config, x, 2);
}

bool is_frozen(const Configuration& config) {
  for (int j = 0; j < config.length(); ++j) {
    long x = config.lo() + j;
    if (config.occ(x) && neighbor_within(config, x, 2)) return false;
  }
  return true;
}

bool has_mobile_cluster(const Configuration& config, long sub_lo, int sub_len) {
  if (sub_lo < config.lo() || sub_lo + sub_len - 1 > config.hi())
    throw std::out_of_range("subwindow must lie inside the window");
  for (int j = 0; j < sub_len; ++j) {
    long x = sub_lo + j;
    if (!config.occ(x)) continue;
    if (j + 1 < sub_len && config.occ(x + 1)) return true;
    if (j + 2 < sub_len && config.occ(x + 2)) return true;
  }
  if (config.boundary() == Boundary::Periodic && sub_len == config.length()) {
    // pairs straddling the wrap bond
    const long lo = config.lo(), hi = config.hi();
    if (config.occ(hi) && config.occ(lo) && config.length() > 1) return true;
    if (config.length() > 2 &&
        ((config.occ(hi) && config.occ(lo + 1)) ||
         (config.occ(hi - 1) && config.occ(lo))))
      return true;
  }
  return false;
}

bool has_mobile_cluster(const Configuration& config) {
  return has_mobile_cluster(config, config.lo(), config.length());
}

bool mask_has_mobile_cluster(std::uint64_t mask, int length) {
  std::uint64_t within = (mask & (mask >> 1)) | (mask & (mask >> 2));
  (void)length;
  return within != 0;
}

bool mask_is_frozen(std::uint64_t mask, int length) {
  return !mask_has_mobile_cluster(mask, length);
}

std::string ClassLabel::to_string() const {
  switch (set) {
    case SetLabel::Frozen: return "F";
    case SetLabel::FiniteParticles: return "F'(" + std::to_string(k) + ")";
    case SetLabel::FiniteHoles: return "F''(" + std::to_string(k) + ")";
    case SetLabel::FiniteClusters: return "E'";
    case SetLabel::Ergodic: return "E";
  }
  return "?";
}

EventuallyPeriodic::EventuallyPeriodic(std::string left, std::string core,
                                       std::string right, int core_lo)
    : left_(std::move(left)), core_(std::move(core)), right_(std::move(right)),
      core_lo_(core_lo) {
  if (left_.empty() || right_.empty())
    throw std::invalid_argument("tail words must be non-empty");
  if (core_.empty())
    throw std::invalid_argument("core word must be non-empty");
  for (const std::string* w : {&left_, &core_, &right_})
    if (w->find_first_not_of("01") != std::string::npos)
      throw std::invalid_argument("words must be over {0,1}");
}

EventuallyPeriodic EventuallyPeriodic::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string l, c, r;
  if (!(in >> l >> c >> r))
    throw std::invalid_argument("expected \"(left)* core (right)*\"");
  std::string rest;
  if (in >> rest) throw std::invalid_argument("trailing tokens after right tail");
  auto unwrap = [](const std::string& tok) {
    if (tok.size() < 4 || tok.front() != '(' || tok.substr(tok.size() - 2) != ")*")
      throw std::invalid_argument("tail must look like (word)*");
    return tok.substr(1, tok.size() - 3);
  };
  return EventuallyPeriodic(unwrap(l), c, unwrap(r));
}

std::string EventuallyPeriodic::to_string() const {
  return "(" + left_ + ")* " + core_ + " (" + right_ + ")*";
}

int EventuallyPeriodic::occ(long site) const {
  const long lo = core_lo_, hi = core_hi();
  if (site >= lo && site <= hi) return core_[site - lo] == '1';
  if (site > hi) {
    long d = site - hi - 1;
    return right_[d % static_cast<long>(right_.size())] == '1';
  }
  long d = lo - 1 - site;
  long p = static_cast<long>(left_.size());
  return left_[p - 1 - (d % p)] == '1';
}

EventuallyPeriodic EventuallyPeriodic::extended(int periods_left,
                                                int periods_right) const {
  std::string core = core_;
  for (int i = 0; i < periods_left; ++i) core = left_ + core;
  for (int i = 0; i < periods_right; ++i) core += right_;
  return EventuallyPeriodic(left_, core,  right_,
                            core_lo_ - periods_left * static_cast<int>(left_.size()));
}

double EventuallyPeriodic::rate_at(const ConstraintFamily& family, long x) const {
  const int R = family.radius();
  std::uint32_t bits = 0;
  for (int j = 0; j < family.window_length(); ++j)
    bits |= static_cast<std::uint32_t>(occ(x - R + j)) << j;
  return family.rate_local(bits);
}

EventuallyPeriodic EventuallyPeriodic::with_jump(const ConstraintFamily& family,
                                                 long x) const {
  if (rate_at(family, x) <= 0.0)
    throw std::invalid_argument("exchange is not an allowed jump");
  EventuallyPeriodic out = *this;
  while (x < out.core_lo()) out = out.extended(1, 0);
  while (x + 1 > out.core_hi()) out = out.extended(0, 1);
  std::swap(out.core_[x - out.core_lo_], out.core_[x + 1 - out.core_lo_]);
  return out;
}

ClassLabel classify_infinite(const EventuallyPeriodic& config) {
  const bool left_frozen = periodic_word_frozen(config.left());
  const bool right_frozen = periodic_word_frozen(config.right());

  // Any pair within distance 2 either lies wholly in one tail or has its
  // left site in [core_lo-2, core_hi].
  bool crossing_pair = false;
  for (long x = config.core_lo() - 2; x <= config.core_hi(); ++x) {
    if (!config.occ(x)) continue;
    if (config.occ(x + 1) || config.occ(x + 2)) crossing_pair = true;
  }
  if (left_frozen && right_frozen && !crossing_pair)
    return {SetLabel::Frozen, -1};

  const bool finite_particles =
      word_all(config.left(), '0') && word_all(config.right(), '0');
  if (finite_particles) {
    long k = 0;
    for (char ch : config.core()) k += ch == '1';
    return {SetLabel::FiniteParticles, k};
  }

  const bool finite_holes =
      word_all(config.left(), '1') && word_all(config.right(), '1');
  if (finite_holes) {
    long k = 0;
    for (char ch : config.core()) k += ch == '0';
    return {SetLabel::FiniteHoles, k};
  }

  if (left_frozen && right_frozen) return {SetLabel::FiniteClusters, -1};
  return {SetLabel::Ergodic, -1};
}

}  // namespace pmm
