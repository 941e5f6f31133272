#include "coord/item_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coord/text.hpp"

namespace coord {

namespace {

double pow_nonneg(double g, double p) {
  if (g <= 0.0) return 0.0;
  if (p == 1.0) return g;
  if (p == 2.0) return g * g;
  return std::pow(g, p);
}

// Interval [a, b] of values a coordinate may take at some seed; a == b for
// revealed entries. The open upper end of unknown entries is closed here,
// which is exact for continuous functions and for MAX/MIN/OR whose infimum
// is attained at the lower end.
struct Box {
  std::vector<double> a;
  std::vector<double> b;
};

double infimum(const ItemFunction& f, const Box& box) {
  const std::size_t r = box.a.size();
  switch (f.kind) {
    case FunctionKind::kMax:
      return *std::max_element(box.a.begin(), box.a.end());
    case FunctionKind::kMin:
      return *std::min_element(box.a.begin(), box.a.end());
    case FunctionKind::kOr:
      return *std::max_element(box.a.begin(), box.a.end()) > 0.0 ? 1.0 : 0.0;
    case FunctionKind::kRange: {
      // Points chosen from intervals have spread >= max a - min b, attained
      // by clamping every coordinate into [min b, max a].
      double amax = 0.0;
      double bmin = kInf;
      for (std::size_t i = 0; i < r; ++i) {
        amax = std::max(amax, box.a[i]);
        bmin = std::min(bmin, box.b[i]);
      }
      return pow_nonneg(amax - bmin, f.power);
    }
    case FunctionKind::kOneSidedRange:
      return pow_nonneg(box.a[f.hi] - box.b[f.lo], f.power);
  }
  return 0.0;
}

Box box_at(const RevealState& s, const TauScheme& scheme, const Domain& domain, double x) {
  const std::size_t r = s.values.size();
  Box box{std::vector<double>(r), std::vector<double>(r)};
  for (std::size_t i = 0; i < r; ++i) {
    const double t = scheme.map(i).at(x);
    if (s.present[i] && s.values[i] >= t) {
      box.a[i] = box.b[i] = s.values[i];
    } else {
      box.a[i] = domain.lo[i];
      box.b[i] = std::min(t, domain.hi[i]);
    }
  }
  return box;
}

void check_state(const RevealState& s, const TauScheme& scheme, const Domain& domain) {
  if (s.values.size() != scheme.size() || s.present.size() != scheme.size() ||
      domain.lo.size() != scheme.size() || domain.hi.size() != scheme.size()) {
    throw Error("lower bound: arity mismatch between outcome, scheme and domain");
  }
}

std::size_t parse_index(const std::string& text) {
  const long long k = std::stoll(text);
  if (k < 1) throw Error("coordinate indices are 1-based");
  return static_cast<std::size_t>(k - 1);
}

}  // namespace

ItemFunction ItemFunction::parse(std::string_view spec) {
  const auto [name, params] = text::split_kind(spec);
  ItemFunction f;
  if (name == "max") return max();
  if (name == "min") return min();
  if (name == "or") return logical_or();
  if (name == "rg") {
    f = range(1.0);
  } else if (name == "one_sided_rg") {
    f = one_sided_range(1.0, 0, 1);
  } else {
    throw Error("unknown item function '" + std::string(spec) + "'");
  }
  for (const auto& [key, value] : params) {
    if (key == "p") {
      f.power = text::parse_double(value);
      if (!(f.power > 0.0)) throw Error("item function power must be positive");
    } else if (key == "hi" && f.kind == FunctionKind::kOneSidedRange) {
      f.hi = parse_index(value);
    } else if (key == "lo" && f.kind == FunctionKind::kOneSidedRange) {
      f.lo = parse_index(value);
    } else {
      throw Error("unknown parameter '" + key + "' in item function '" + std::string(spec) + "'");
    }
  }
  return f;
}

std::string ItemFunction::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case FunctionKind::kMax: return "max";
    case FunctionKind::kMin: return "min";
    case FunctionKind::kOr: return "or";
    case FunctionKind::kRange:
      os << "rg:p=" << text::format_double(power);
      return os.str();
    case FunctionKind::kOneSidedRange:
      os << "one_sided_rg:p=" << text::format_double(power) << ",hi=" << hi + 1
         << ",lo=" << lo + 1;
      return os.str();
  }
  return "?";
}

void ItemFunction::check_arity(std::size_t r) const {
  if (r == 0) throw Error("item functions need at least one instance");
  if (kind == FunctionKind::kOneSidedRange && (hi >= r || lo >= r || hi == lo)) {
    throw Error("one-sided range coordinates do not fit arity " + std::to_string(r));
  }
}

double eval(const ItemFunction& f, const DataVector& v) {
  f.check_arity(v.size());
  const auto vals = v.values();
  const double mx = *std::max_element(vals.begin(), vals.end());
  const double mn = *std::min_element(vals.begin(), vals.end());
  switch (f.kind) {
    case FunctionKind::kMax: return mx;
    case FunctionKind::kMin: return mn;
    case FunctionKind::kOr: return mx > 0.0 ? 1.0 : 0.0;
    case FunctionKind::kRange: return pow_nonneg(mx - mn, f.power);
    case FunctionKind::kOneSidedRange: return pow_nonneg(v[f.hi] - v[f.lo], f.power);
  }
  return 0.0;
}

RevealState RevealState::of_outcome(const Outcome& o) {
  RevealState s;
  s.from = o.seed.value();
  for (const Slot& slot : o.slots) {
    s.values.push_back(slot.known ? slot.value : 0.0);
    s.present.push_back(slot.known ? 1 : 0);
  }
  return s;
}

RevealState RevealState::of_vector(const DataVector& v) {
  RevealState s;
  s.values.assign(v.values().begin(), v.values().end());
  s.present.assign(v.size(), 1);
  return s;
}

double lower_bound(const ItemFunction& f, const RevealState& state, const TauScheme& scheme,
                   const Domain& domain, double x) {
  check_state(state, scheme, domain);
  f.check_arity(scheme.size());
  if (x < state.from || x > 1.0 || !(x > 0.0)) {
    throw Error("lower bound requested outside [seed, 1]");
  }
  return infimum(f, box_at(state, scheme, domain, x));
}

double lower_bound(const ItemFunction& f, const Outcome& outcome, const TauScheme& scheme,
                   const Domain& domain, Seed x) {
  return lower_bound(f, RevealState::of_outcome(outcome), scheme, domain, x.value());
}

double lower_bound(const ItemFunction& f, const Outcome& outcome, const TauScheme& scheme,
                   Seed x) {
  return lower_bound(f, outcome, scheme, Domain::nonnegative(scheme.size()), x);
}

double lower_bound(const ItemFunction& f, const DataVector& v, const TauScheme& scheme,
                   double x) {
  return lower_bound(f, RevealState::of_vector(v), scheme, Domain::nonnegative(scheme.size()),
                     x);
}

double brute_force_lower_bound(const ItemFunction& f, const Outcome& outcome,
                               const TauScheme& scheme, const Domain& domain, Seed x,
                               std::size_t grid_n) {
  if (!domain.bounded()) throw Error("brute-force lower bound needs a bounded domain");
  if (grid_n == 0) throw Error("grid_n must be positive");
  const RevealState state = RevealState::of_outcome(outcome);
  check_state(state, scheme, domain);
  if (x.value() < state.from) throw Error("lower bound requested below the outcome seed");
  const Box box = box_at(state, scheme, domain, x.value());

  const std::size_t r = box.a.size();
  std::vector<std::size_t> free;
  std::vector<double> step(r, 0.0);
  std::vector<double> z(box.a);
  for (std::size_t i = 0; i < r; ++i) {
    if (box.a[i] != box.b[i]) {
      free.push_back(i);
      step[i] = (box.b[i] - box.a[i]) / static_cast<double>(grid_n);
    }
  }

  double best = kInf;
  std::vector<std::size_t> idx(free.size(), 0);
  while (true) {
    for (std::size_t j = 0; j < free.size(); ++j) {
      const std::size_t i = free[j];
      z[i] = box.a[i] + static_cast<double>(idx[j]) * step[i];
    }
    best = std::min(best, eval(f, DataVector(z)));
    std::size_t j = 0;
    while (j < free.size() && ++idx[j] == grid_n) idx[j++] = 0;
    if (j == free.size()) break;
  }
  return best;
}

double LowerBoundSegment::at(double u) const {
  if (callable) return callable(u);
  return pow_nonneg(c0 + c1 * u, power);
}

LowerBoundFn::LowerBoundFn(std::vector<LowerBoundSegment> segments, double domain_left)
    : segments_(std::move(segments)), domain_left_(domain_left) {
  if (segments_.empty()) throw Error("LowerBoundFn needs at least one piece");
  if (segments_.back().b != 1.0) throw Error("LowerBoundFn pieces must end at 1");
}

LowerBoundFn LowerBoundFn::from_callable(std::function<double(double)> fn,
                                         std::vector<double> breakpoints) {
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<LowerBoundSegment> segs;
  double a = 0.0;
  for (double b : breakpoints) {
    if (b <= a || b >= 1.0) continue;
    segs.push_back({a, b, 0, 0, 1, fn});
    a = b;
  }
  segs.push_back({a, 1.0, 0, 0, 1, fn});
  return LowerBoundFn(std::move(segs), 0.0);
}

std::vector<double> LowerBoundFn::breakpoints() const {
  std::vector<double> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) out.push_back(s.b);
  return out;
}

const LowerBoundSegment& LowerBoundFn::piece(double u) const {
  if (u > 1.0 || u < domain_left_ || !(u > 0.0)) {
    throw Error("LowerBoundFn evaluated outside its domain");
  }
  const auto it = std::lower_bound(segments_.begin(), segments_.end(), u,
                                   [](const LowerBoundSegment& s, double x) { return s.b < x; });
  return it == segments_.end() ? segments_.back() : *it;
}

double LowerBoundFn::operator()(double u) const { return piece(u).at(u); }

double LowerBoundFn::right_limit(double u) const {
  if (u >= 1.0) return (*this)(1.0);
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), u,
                                   [](double x, const LowerBoundSegment& s) { return x < s.b; });
  // A callable only knows its value at u itself; step just past it.
  if (it->callable) return it->at(std::nextafter(u, 2.0));
  return it->at(u);
}

double LowerBoundFn::limit_at_zero() const {
  const auto& s = segments_.front();
  if (s.callable) return s.callable(1e-300);
  return s.at(0.0);
}

bool LowerBoundFn::constant_near_zero() const {
  const auto& s = segments_.front();
  return !s.callable && (s.c1 == 0.0 || s.c0 + s.c1 * s.b <= 0.0);
}

namespace {

LowerBoundFn build_piecewise(const ItemFunction& f, const RevealState& state,
                             const TauScheme& scheme, const Domain& domain) {
  check_state(state, scheme, domain);
  f.check_arity(scheme.size());
  const std::size_t r = scheme.size();
  const double left = state.from;

  std::vector<double> joints{0.0, 1.0};
  for (std::size_t i = 0; i < r; ++i) {
    const auto j = scheme.map(i).joints();
    joints.insert(joints.end(), j.begin(), j.end());
  }
  std::sort(joints.begin(), joints.end());
  joints.erase(std::unique(joints.begin(), joints.end()), joints.end());

  std::vector<double> levels;
  for (std::size_t i = 0; i < r; ++i) {
    if (state.present[i]) levels.push_back(state.values[i]);
    levels.push_back(domain.lo[i]);
    if (std::isfinite(domain.hi[i])) levels.push_back(domain.hi[i]);
  }

  std::vector<double> cuts = joints;
  for (std::size_t i = 0; i < r; ++i) {
    for (double level : levels) cuts.push_back(scheme.map(i).last_at_or_below(level));
  }
  for (std::size_t s = 0; s + 1 < joints.size(); ++s) {
    const double mid = 0.5 * (joints[s] + joints[s + 1]);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = i + 1; j < r; ++j) {
        const auto [ai, bi] = scheme.map(i).linear_piece(mid);
        const auto [aj, bj] = scheme.map(j).linear_piece(mid);
        if (bi != bj) cuts.push_back((aj - ai) / (bi - bj));
      }
    }
  }

  std::vector<double> ends;
  for (double c : cuts) {
    if (c > left && c < 1.0) ends.push_back(c);
  }
  ends.push_back(1.0);
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

  std::vector<LowerBoundSegment> segs;
  double a = left;
  for (double b : ends) {
    const double mid = 0.5 * (a + b);
    LowerBoundSegment seg{a, b, 0.0, 0.0, 1.0, {}};
    // Per coordinate: lower end (constant) and upper end c + d*u on (a, b].
    std::vector<double> lower(r), c(r), d(r);
    for (std::size_t i = 0; i < r; ++i) {
      const TauMap& tau = scheme.map(i);
      if (state.present[i] && state.values[i] >= tau.at(mid)) {
        lower[i] = c[i] = state.values[i];
        d[i] = 0.0;
      } else if (tau.at(mid) < domain.hi[i]) {
        lower[i] = domain.lo[i];
        std::tie(c[i], d[i]) = tau.linear_piece(mid);
      } else {
        lower[i] = domain.lo[i];
        c[i] = domain.hi[i];
        d[i] = 0.0;
      }
    }
    switch (f.kind) {
      case FunctionKind::kMax:
      case FunctionKind::kMin:
      case FunctionKind::kOr: {
        Box box{lower, lower};
        seg.c0 = infimum(f, box);
        break;
      }
      case FunctionKind::kRange: {
        const double amax = *std::max_element(lower.begin(), lower.end());
        std::size_t arg = 0;
        for (std::size_t i = 1; i < r; ++i) {
          if (c[i] + d[i] * mid < c[arg] + d[arg] * mid) arg = i;
        }
        seg.c0 = amax - c[arg];
        seg.c1 = -d[arg];
        seg.power = f.power;
        break;
      }
      case FunctionKind::kOneSidedRange:
        seg.c0 = lower[f.hi] - c[f.lo];
        seg.c1 = -d[f.lo];
        seg.power = f.power;
        break;
    }
    if (seg.c0 + seg.c1 * a <= 0.0 && seg.c0 + seg.c1 * b <= 0.0) {
      seg.c0 = seg.c1 = 0.0;
      seg.power = 1.0;
    }
    segs.push_back(std::move(seg));
    a = b;
  }
  return LowerBoundFn(std::move(segs), left);
}

}  // namespace

LowerBoundFn lb_breakpoints(const ItemFunction& f, const Outcome& outcome,
                            const TauScheme& scheme, const Domain& domain) {
  return build_piecewise(f, RevealState::of_outcome(outcome), scheme, domain);
}

LowerBoundFn lb_breakpoints(const ItemFunction& f, const Outcome& outcome,
                            const TauScheme& scheme) {
  return lb_breakpoints(f, outcome, scheme, Domain::nonnegative(scheme.size()));
}

LowerBoundFn lower_bound_fn(const ItemFunction& f, const DataVector& v,
                            const TauScheme& scheme, const Domain& domain) {
  return build_piecewise(f, RevealState::of_vector(v), scheme, domain);
}

LowerBoundFn lower_bound_fn(const ItemFunction& f, const DataVector& v,
                            const TauScheme& scheme) {
  return lower_bound_fn(f, v, scheme, Domain::nonnegative(scheme.size()));
}

}  // namespace coord
