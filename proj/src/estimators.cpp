#include "coord/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coord/text.hpp"

namespace coord {

double EstimateFn::operator()(double u) const {
  const auto it = std::lower_bound(pieces.begin(), pieces.end(), u,
                                   [](const EstimatePiece& p, double x) { return p.b < x; });
  if (it == pieces.end() || u <= it->a) return 0.0;
  return it->at(u);
}

double EstimateFn::integral() const {
  double total = 0.0;
  for (const auto& p : pieces) {
    if (p.callable) throw Error("integral of callable estimate pieces is not supported");
    total += (p.b - p.a) * p.value;
  }
  return total;
}

int dyadic_index(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error("dyadic_index: rho must lie in (0, 1]");
  int e = 0;
  const double m = std::frexp(rho, &e);  // rho = m * 2^e, m in [0.5, 1)
  return m == 0.5 ? 1 - e : -e;
}

namespace {

// 2^(i+1) * (lb(2^-i) - lb(2^-(i-1))) with lb(2) := 0.
template <class Lb>
double j_piece(const Lb& lb, int i) {
  const double here = lb(std::ldexp(1.0, -i));
  const double prev = i == 0 ? 0.0 : lb(std::ldexp(1.0, 1 - i));
  return std::ldexp(here - prev, i + 1);
}

}  // namespace

double j_estimate(const Outcome& outcome, const ItemFunction& f, const TauScheme& scheme,
                  const Domain& domain) {
  const RevealState state = RevealState::of_outcome(outcome);
  const int i = dyadic_index(outcome.seed.value());
  return j_piece([&](double x) { return lower_bound(f, state, scheme, domain, x); }, i);
}

double j_estimate(const Outcome& outcome, const ItemFunction& f, const TauScheme& scheme) {
  return j_estimate(outcome, f, scheme, Domain::nonnegative(scheme.size()));
}

double j_cumulative(const DataVector& v, double rho, const ItemFunction& f,
                    const TauScheme& scheme, int depth) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error("j_cumulative: rho must lie in (0, 1]");
  if (depth < dyadic_index(rho)) throw Error("j_cumulative: depth too small for rho");
  const auto lb = [&](double x) { return lower_bound(f, v, scheme, x); };
  double total = 0.0;
  for (int j = 0; j < depth; ++j) {
    const double top = std::ldexp(1.0, -j);
    if (top <= rho) break;
    const double bottom = std::max(std::ldexp(1.0, -j - 1), rho);
    total += j_piece(lb, j) * (top - bottom);
  }
  return total;
}

EstimateFn j_estimate_fn(const DataVector& v, const ItemFunction& f, const TauScheme& scheme,
                         int depth) {
  const auto lb = [&](double x) { return lower_bound(f, v, scheme, x); };
  EstimateFn out{EstimateKind::kJDyadic, {}};
  out.pieces.reserve(static_cast<std::size_t>(depth));
  for (int j = depth - 1; j >= 0; --j) {
    out.pieces.push_back({std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j), j_piece(lb, j), {}});
  }
  return out;
}

namespace {

double require_common_tau(const ItemFunction& f, const TauScheme& scheme) {
  if (f.kind != FunctionKind::kMax && f.kind != FunctionKind::kMin) {
    throw Error("Horvitz-Thompson estimates are available for max and min only");
  }
  double tau_star = 0.0;
  if (!scheme.common_pps(&tau_star)) {
    throw Error("Horvitz-Thompson estimates need PPS sampling with a common tau_star");
  }
  return tau_star;
}

}  // namespace

double ht_estimate(const Outcome& outcome, const ItemFunction& f, const TauScheme& scheme) {
  const double tau_star = require_common_tau(f, scheme);
  if (outcome.slots.size() != scheme.size()) throw Error("ht_estimate: arity mismatch");
  if (f.kind == FunctionKind::kMax) {
    double m = -1.0;
    double bound = 0.0;
    for (const Slot& s : outcome.slots) {
      if (s.known) m = std::max(m, s.value);
      else bound = std::max(bound, s.value);
    }
    if (m < 0.0 || bound > m || m == 0.0) return 0.0;
    return m / pps_inclusion_probability(m, tau_star);
  }
  double mn = kInf;
  for (const Slot& s : outcome.slots) {
    if (!s.known) return 0.0;
    mn = std::min(mn, s.value);
  }
  if (mn == 0.0) return 0.0;
  return mn / pps_inclusion_probability(mn, tau_star);
}

EstimateFn ht_estimate_fn(const DataVector& v, const ItemFunction& f, const TauScheme& scheme) {
  const double tau_star = require_common_tau(f, scheme);
  const double fv = eval(f, v);
  EstimateFn out{EstimateKind::kHt, {}};
  if (fv == 0.0) {
    out.pieces.push_back({0.0, 1.0, 0.0, {}});
    return out;
  }
  const double p = pps_inclusion_probability(fv, tau_star);
  out.pieces.push_back({0.0, p, fv / p, {}});
  if (p < 1.0) out.pieces.push_back({p, 1.0, 0.0, {}});
  return out;
}

EstimateFn v_optimal_estimates(const LowerBoundFn& lb, const HullGrid& grid,
                               std::optional<double> left_value) {
  const double left = left_value ? *left_value : lb.limit_at_zero();
  const LowerHull hull = lower_hull(hull_points(lb, left, grid));
  const auto& vs = hull.vertices();
  EstimateFn out{EstimateKind::kVOptimal, {}};
  out.pieces.reserve(vs.size());
  for (std::size_t k = 1; k < vs.size(); ++k) {
    const double slope = (vs[k].value - vs[k - 1].value) / (vs[k].u - vs[k - 1].u);
    out.pieces.push_back({vs[k - 1].u, vs[k].u, -slope, {}});
  }
  return out;
}

EstimateFn v_optimal_estimates(const LowerBoundFn& lb, std::size_t grid_n) {
  if (grid_n < 2) throw Error("v_optimal_estimates: grid_n must be at least 2");
  return v_optimal_estimates(lb, HullGrid{grid_n});
}

EstimatorKind parse_estimator(std::string_view s) {
  if (s == "j") return EstimatorKind::kJ;
  if (s == "ht") return EstimatorKind::kHt;
  if (s == "exact") return EstimatorKind::kExact;
  if (s == "voptimal-oracle") return EstimatorKind::kVOptimalOracle;
  throw Error("unknown estimator '" + std::string(s) + "'");
}

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kJ: return "j";
    case EstimatorKind::kHt: return "ht";
    case EstimatorKind::kExact: return "exact";
    case EstimatorKind::kVOptimalOracle: return "voptimal-oracle";
  }
  return "?";
}

Query Query::parse(std::string_view s) {
  const std::string t = text::trim(s);
  const auto colon = t.find(':');
  const std::string name = t.substr(0, colon);
  Query q;
  const auto power = [&]() {
    if (colon == std::string::npos) throw Error("query '" + t + "' needs a power, e.g. lpp:2");
    std::string arg = t.substr(colon + 1);
    if (arg.rfind("p=", 0) == 0) arg = arg.substr(2);
    const double p = text::parse_double(arg);
    if (!(p > 0.0)) throw Error("query power must be positive");
    return p;
  };
  if (name == "l1") {
    q.kind = QueryKind::kL1;
  } else if (name == "lpp") {
    q.kind = QueryKind::kLpp;
    q.p = power();
  } else if (name == "lp") {
    q.kind = QueryKind::kLp;
    q.p = power();
  } else if (name == "maxsum") {
    q.kind = QueryKind::kMaxSum;
  } else if (name == "minsum") {
    q.kind = QueryKind::kMinSum;
  } else if (name == "jaccard") {
    q.kind = QueryKind::kJaccard;
  } else if (name == "distinct") {
    q.kind = QueryKind::kDistinct;
  } else {
    throw Error("unknown query '" + t + "'");
  }
  return q;
}

Query Query::of_function(const ItemFunction& f) {
  Query q;
  q.kind = QueryKind::kFunction;
  q.function = f;
  return q;
}

std::string Query::to_string() const {
  switch (kind) {
    case QueryKind::kL1: return "l1";
    case QueryKind::kLpp: return "lpp:" + text::format_double(p);
    case QueryKind::kLp: return "lp:" + text::format_double(p);
    case QueryKind::kMaxSum: return "maxsum";
    case QueryKind::kMinSum: return "minsum";
    case QueryKind::kJaccard: return "jaccard";
    case QueryKind::kDistinct: return "distinct";
    case QueryKind::kFunction: return "sum:" + function.to_string();
  }
  return "?";
}

namespace {

std::string scheme_key(const TauScheme& scheme) {
  std::ostringstream os;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const TauMap& m = scheme.map(i);
    if (m.is_pps()) {
      os << 'p' << text::format_double(m.tau_star()) << ';';
    } else {
      const auto* p = m.piecewise();
      for (std::size_t k = 0; k < p->u.size(); ++k) {
        os << text::format_double(p->u[k]) << '/' << text::format_double(p->tau[k]) << ',';
      }
      os << ';';
    }
  }
  return os.str();
}

const DataVector& truth_row(const EstimateContext& ctx, const std::string& id) {
  if (!ctx.truth) throw Error("this estimator needs the true data vectors");
  const auto k = ctx.truth->index_of(id);
  if (k < 0) throw Error("item '" + id + "' is missing from the data");
  return ctx.truth->row(static_cast<std::size_t>(k));
}

std::string subset_description(const ItemSubset& subset) {
  if (!subset) return "all";
  std::vector<std::string> ids(subset->begin(), subset->end());
  std::sort(ids.begin(), ids.end());
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return out;
}

ItemFunction query_function(const Query& q) {
  switch (q.kind) {
    case QueryKind::kL1: return ItemFunction::range(1.0);
    case QueryKind::kLpp:
    case QueryKind::kLp: return ItemFunction::range(q.p);
    case QueryKind::kMaxSum: return ItemFunction::max();
    case QueryKind::kMinSum: return ItemFunction::min();
    case QueryKind::kDistinct: return ItemFunction::logical_or();
    case QueryKind::kFunction: return q.function;
    case QueryKind::kJaccard: break;
  }
  throw Error("query has no single item function");
}

template <class SumFn>
QueryResult combine(const Query& q, const char* estimator, const ItemSubset& subset,
                    SumFn&& sum_of) {
  QueryResult out;
  out.query = q.to_string();
  out.estimator = estimator;
  out.items = subset_description(subset);
  if (q.kind == QueryKind::kJaccard) {
    const QueryResult mins = sum_of(ItemFunction::min());
    const QueryResult maxs = sum_of(ItemFunction::max());
    out.estimate = maxs.estimate > 0.0 ? std::clamp(mins.estimate / maxs.estimate, 0.0, 1.0) : 0.0;
    return out;
  }
  QueryResult inner = sum_of(query_function(q));
  out.contributions = std::move(inner.contributions);
  out.estimate = inner.estimate;
  if (q.kind == QueryKind::kLp) out.estimate = std::pow(out.estimate, 1.0 / q.p);
  return out;
}

}  // namespace

double OracleCache::estimate(const ItemSample& s, const ItemFunction& f,
                             const DataVector& truth) {
  const std::string key = s.id + '|' + f.to_string() + '|' + scheme_key(s.scheme);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_
             .emplace(key, v_optimal_estimates(lower_bound_fn(f, truth, s.scheme), grid_n_))
             .first;
  }
  return it->second(s.outcome.seed.value());
}

double estimate_item(const ItemSample& s, const ItemFunction& f, EstimatorKind kind,
                     const EstimateContext& ctx) {
  switch (kind) {
    case EstimatorKind::kJ: return j_estimate(s.outcome, f, s.scheme);
    case EstimatorKind::kHt: return ht_estimate(s.outcome, f, s.scheme);
    case EstimatorKind::kExact: return eval(f, truth_row(ctx, s.id));
    case EstimatorKind::kVOptimalOracle: {
      const DataVector& v = truth_row(ctx, s.id);
      if (!is_consistent(s.outcome, v, s.scheme) &&
          sample_item(v, s.outcome.seed, s.scheme) != s.outcome) {
        throw Error("item '" + s.id + "': outcome does not match the supplied data");
      }
      if (ctx.oracle) return ctx.oracle->estimate(s, f, v);
      OracleCache local;
      return local.estimate(s, f, v);
    }
  }
  return 0.0;
}

QueryResult sum_estimate(const std::vector<ItemSample>& samples, const ItemFunction& f,
                         EstimatorKind kind, const ItemSubset& subset,
                         const EstimateContext& ctx) {
  QueryResult out;
  out.query = "sum:" + f.to_string();
  out.estimator = estimator_name(kind);
  out.items = subset_description(subset);
  for (const ItemSample& s : samples) {
    if (subset && !subset->count(s.id)) continue;
    const double e = estimate_item(s, f, kind, ctx);
    out.contributions.push_back({s.id, e});
    out.estimate += e;
  }
  return out;
}

QueryResult estimate_query(const std::vector<ItemSample>& samples, const Query& q,
                           EstimatorKind kind, const ItemSubset& subset,
                           const EstimateContext& ctx) {
  return combine(q, estimator_name(kind), subset, [&](const ItemFunction& f) {
    return sum_estimate(samples, f, kind, subset, ctx);
  });
}

QueryResult exact_query(const InstanceSet& data, const Query& q, const ItemSubset& subset) {
  return combine(q, "exact", subset, [&](const ItemFunction& f) {
    QueryResult r;
    for (std::size_t h = 0; h < data.items(); ++h) {
      if (subset && !subset->count(data.id(h))) continue;
      const double e = eval(f, data.row(h));
      r.contributions.push_back({data.id(h), e});
      r.estimate += e;
    }
    return r;
  });
}

}  // namespace coord
