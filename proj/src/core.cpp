#include "coord/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace coord {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

DataVector::DataVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw Error("DataVector entry " + std::to_string(i) +
                  " must be a finite nonnegative value");
    }
  }
}

void InstanceSet::add(std::string id, DataVector row) {
  if (row.size() != instances_) {
    throw Error("item '" + id + "' has " + std::to_string(row.size()) +
                " values, expected " + std::to_string(instances_));
  }
  if (index_.count(id)) throw Error("duplicate item id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  rows_.push_back(std::move(row));
}

std::ptrdiff_t InstanceSet::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<double> InstanceSet::column(std::size_t i) const {
  if (i >= instances_) throw Error("instance index out of range");
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[i]);
  return out;
}

Seed::Seed(double u) : u_(u) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw Error("seed must lie in (0, 1], got " + std::to_string(u));
  }
}

Seed seed_from_hash(std::uint64_t h) {
  // 2^53 - k for k in [0, 2^53) is exact in double; scaled into (0, 1].
  const std::uint64_t k = h >> 11;
  const double m = static_cast<double>((std::uint64_t{1} << 53) - k);
  return Seed(std::ldexp(m, -53));
}

Seed hash_seed(std::string_view item_id, std::uint64_t salt) {
  return seed_from_hash(splitmix64(fnv1a(item_id) ^ splitmix64(salt)));
}

TauMap::TauMap(PpsTau pps) : rep_(pps) {
  if (!(pps.tau_star > 0.0) || !std::isfinite(pps.tau_star)) {
    throw Error("PPS tau_star must be positive and finite");
  }
}

TauMap::TauMap(PiecewiseTau pwl) : rep_(std::move(pwl)) {
  const auto& p = std::get<PiecewiseTau>(rep_);
  if (p.u.size() < 2 || p.u.size() != p.tau.size()) {
    throw Error("piecewise tau needs at least two (u, tau) knots");
  }
  if (p.u.front() != 0.0 || p.u.back() != 1.0) {
    throw Error("piecewise tau knots must span u = 0 to u = 1");
  }
  for (std::size_t k = 0; k < p.u.size(); ++k) {
    if (!(p.tau[k] >= 0.0) || !std::isfinite(p.tau[k])) {
      throw Error("piecewise tau values must be finite and nonnegative");
    }
    if (k > 0 && !(p.u[k] > p.u[k - 1])) {
      throw Error("piecewise tau knots must have strictly increasing u");
    }
    if (k > 0 && p.tau[k] < p.tau[k - 1]) {
      throw Error("piecewise tau must be non-decreasing");
    }
  }
}

double TauMap::tau_star() const {
  if (const auto* p = std::get_if<PpsTau>(&rep_)) return p->tau_star;
  throw Error("tau_star requested for a non-PPS map");
}

double TauMap::at(double u) const {
  if (const auto* p = std::get_if<PpsTau>(&rep_)) return u * p->tau_star;
  const auto& p = std::get<PiecewiseTau>(rep_);
  if (u <= 0.0) return p.tau.front();
  if (u >= 1.0) return p.tau.back();
  const auto it = std::upper_bound(p.u.begin(), p.u.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - p.u.begin());
  const double t = (u - p.u[k - 1]) / (p.u[k] - p.u[k - 1]);
  return p.tau[k - 1] + t * (p.tau[k] - p.tau[k - 1]);
}

double TauMap::last_at_or_below(double level) const {
  if (const auto* p = std::get_if<PpsTau>(&rep_)) {
    if (level < 0.0) return -1.0;
    return std::min(1.0, level / p->tau_star);
  }
  const auto& p = std::get<PiecewiseTau>(rep_);
  if (p.tau.front() > level) return -1.0;
  if (p.tau.back() <= level) return 1.0;
  for (std::size_t k = p.u.size() - 1; k > 0; --k) {
    if (p.tau[k - 1] <= level && level < p.tau[k]) {
      const double t = (level - p.tau[k - 1]) / (p.tau[k] - p.tau[k - 1]);
      return p.u[k - 1] + t * (p.u[k] - p.u[k - 1]);
    }
  }
  return -1.0;
}

std::vector<double> TauMap::joints() const {
  const auto* p = std::get_if<PiecewiseTau>(&rep_);
  if (!p) return {};
  return {p->u.begin() + 1, p->u.end() - 1};
}

std::pair<double, double> TauMap::linear_piece(double u) const {
  if (const auto* p = std::get_if<PpsTau>(&rep_)) return {0.0, p->tau_star};
  const auto& p = std::get<PiecewiseTau>(rep_);
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(p.u.begin(), p.u.end(), u) - p.u.begin());
  k = std::clamp<std::size_t>(k, 1, p.u.size() - 1);
  const double slope = (p.tau[k] - p.tau[k - 1]) / (p.u[k] - p.u[k - 1]);
  return {p.tau[k - 1] - slope * p.u[k - 1], slope};
}

Domain Domain::nonnegative(std::size_t r) {
  return {std::vector<double>(r, 0.0), std::vector<double>(r, kInf)};
}

Domain Domain::box(std::size_t r, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) throw Error("invalid domain box");
  return {std::vector<double>(r, lo), std::vector<double>(r, hi)};
}

bool Domain::bounded() const {
  return std::all_of(hi.begin(), hi.end(), [](double h) { return std::isfinite(h); });
}

TauScheme::TauScheme(std::vector<TauMap> taus) : taus_(std::move(taus)) {}

TauScheme TauScheme::pps(std::vector<double> tau_stars) {
  std::vector<TauMap> maps;
  maps.reserve(tau_stars.size());
  for (double t : tau_stars) maps.emplace_back(PpsTau{t});
  return TauScheme(std::move(maps));
}

TauScheme TauScheme::pps_uniform(std::size_t r, double tau_star) {
  return pps(std::vector<double>(r, tau_star));
}

void TauScheme::validate(const Domain& domain) const {
  if (domain.lo.size() != taus_.size() || domain.hi.size() != taus_.size()) {
    throw Error("domain arity does not match the scheme");
  }
  for (std::size_t i = 0; i < taus_.size(); ++i) {
    if (taus_[i].at(0.0) > domain.lo[i]) {
      throw Error("tau_" + std::to_string(i + 1) +
                  " infimum exceeds the domain lower bound");
    }
  }
}

bool TauScheme::common_pps(double* tau_star) const {
  if (taus_.empty() || !taus_.front().is_pps()) return false;
  const double t = taus_.front().tau_star();
  for (const auto& m : taus_) {
    if (!m.is_pps() || m.tau_star() != t) return false;
  }
  if (tau_star) *tau_star = t;
  return true;
}

double tau_at(const TauScheme& scheme, std::size_t instance, Seed u) {
  if (instance >= scheme.size()) throw Error("instance index out of range");
  return scheme.map(instance).at(u.value());
}

std::size_t Outcome::known_count() const {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [](const Slot& s) { return s.known; }));
}

void Outcome::validate(const TauScheme& scheme) const {
  if (slots.size() != scheme.size()) throw Error("outcome arity does not match the scheme");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double t = scheme.map(i).at(seed.value());
    if (slots[i].known ? slots[i].value < t : slots[i].value != t) {
      throw Error("outcome slot " + std::to_string(i + 1) +
                  " disagrees with tau at the outcome seed");
    }
  }
}

bool is_consistent(const Outcome& outcome, const DataVector& candidate,
                   const TauScheme& scheme) {
  if (candidate.size() != outcome.slots.size() || scheme.size() != candidate.size()) {
    throw Error("is_consistent: length mismatch");
  }
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const Slot& s = outcome.slots[i];
    if (s.known ? candidate[i] != s.value : !(candidate[i] < s.value)) return false;
  }
  return true;
}

}  // namespace coord
