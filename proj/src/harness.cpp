#include "coord/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include "json.hpp"

#include "coord/io.hpp"
#include "coord/kernels.hpp"
#include "coord/text.hpp"

namespace coord {

void RunConfig::validate() const {
  if (reps < 1) throw Error("--reps must be at least 1");
  if (grid_n < 16) throw Error("--grid-n must be at least 16");
  if (depth < 8 || depth > 60) throw Error("--depth must lie in [8, 60]");
  if (rank != "pps" && rank != "exp") throw Error("--rank must be pps or exp");
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ItemSubset select_items(const InstanceSet& data, const std::string& spec) {
  const std::string s = text::trim(spec);
  if (s.empty() || s == "all") return std::nullopt;
  std::unordered_set<std::string> ids;
  if (s == "both-positive" || s.rfind("positive-in:", 0) == 0) {
    std::optional<std::size_t> only;
    if (s != "both-positive") {
      const double k = text::parse_double(s.substr(12));
      if (k < 1 || k > static_cast<double>(data.instances()) || k != std::floor(k)) {
        throw Error("instance index out of range in '" + s + "'");
      }
      only = static_cast<std::size_t>(k) - 1;
    }
    for (std::size_t h = 0; h < data.items(); ++h) {
      const auto vals = data.row(h).values();
      const bool keep = only ? vals[*only] > 0.0
                             : std::all_of(vals.begin(), vals.end(), [](double x) { return x > 0.0; });
      if (keep) ids.insert(data.id(h));
    }
    return ids;
  }
  for (const std::string& id : text::split(s, ',')) {
    const std::string t = text::trim(id);
    if (t.empty()) throw Error("empty item id in '" + s + "'");
    ids.insert(t);
  }
  return ids;
}

RankFunction parse_rank(const std::string& s) {
  if (s == "pps") return {RankKind::kPps};
  if (s == "exp") return {RankKind::kExp};
  throw Error("unknown rank function '" + s + "'");
}

std::vector<ItemSample> draw_samples(const InstanceSet& data, const RunConfig& cfg,
                                     std::uint64_t salt) {
  if (cfg.k > 0) return bottomk_outcomes(data, cfg.k, parse_rank(cfg.rank), salt);
  return sample_instances(data, io::parse_scheme(cfg.scheme, data.instances()), salt);
}

namespace {

Query config_query(const RunConfig& cfg) {
  // A function spec given without a query asks for the plain sum of f.
  if (cfg.query.empty()) return Query::of_function(ItemFunction::parse(cfg.function));
  return Query::parse(cfg.query);
}

}  // namespace

QueryResult run_query(const RunConfig& cfg, const InstanceSet& data) {
  cfg.validate();
  const Query q = config_query(cfg);
  const ItemSubset subset = select_items(data, cfg.items);
  const EstimatorKind kind = parse_estimator(cfg.estimator);
  if (kind == EstimatorKind::kExact) return exact_query(data, q, subset);
  OracleCache oracle(cfg.grid_n);
  return estimate_query(draw_samples(data, cfg, cfg.salt), q, kind, subset, {&data, &oracle});
}

QueryResult run_query_on_samples(const RunConfig& cfg, const std::vector<ItemSample>& samples,
                                 const InstanceSet* truth) {
  cfg.validate();
  const Query q = config_query(cfg);
  const EstimatorKind kind = parse_estimator(cfg.estimator);
  ItemSubset subset;
  if (cfg.items != "all" && !cfg.items.empty()) {
    if (!truth && (cfg.items == "both-positive" || cfg.items.rfind("positive-in:", 0) == 0)) {
      throw Error("value predicates need --input");
    }
    subset = truth ? select_items(*truth, cfg.items) : select_items(InstanceSet(1), cfg.items);
  }
  if (kind == EstimatorKind::kExact) {
    if (!truth) throw Error("the exact estimator needs --input");
    return exact_query(*truth, q, subset);
  }
  OracleCache oracle(cfg.grid_n);
  return estimate_query(samples, q, kind, subset, {truth, &oracle});
}

double MonteCarloSummary::z_score() const {
  if (std_error == 0.0) return mean == truth ? 0.0 : kInf;
  return (mean - truth) / std_error;
}

MonteCarloSummary run_monte_carlo(const RunConfig& cfg, const InstanceSet& data) {
  cfg.validate();
  const Query q = config_query(cfg);
  const ItemSubset subset = select_items(data, cfg.items);
  const EstimatorKind kind = parse_estimator(cfg.estimator);
  const QueryResult exact = exact_query(data, q, subset);

  MonteCarloSummary out;
  out.query = exact.query;
  out.estimator = estimator_name(kind);
  out.items = exact.items;
  out.reps = cfg.reps;
  out.truth = exact.estimate;

  std::vector<double> estimates(cfg.reps);
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.reps);
  const std::size_t chunk = (cfg.reps + threads - 1) / threads;
  parallel_for(threads, threads, [&](std::size_t t) {
    OracleCache oracle(cfg.grid_n);
    const EstimateContext ctx{&data, &oracle};
    const std::size_t end = std::min(cfg.reps, (t + 1) * chunk);
    for (std::size_t r = t * chunk; r < end; ++r) {
      const auto samples = draw_samples(data, cfg, cfg.salt + r);
      estimates[r] = kind == EstimatorKind::kExact
                         ? exact.estimate
                         : estimate_query(samples, q, kind, subset, ctx).estimate;
    }
  });
  const kernels::Moments m = kernels::moments(estimates);
  const double n = static_cast<double>(cfg.reps);
  out.mean = m.sum / n;
  const double var = cfg.reps > 1 ? std::max(0.0, (m.sum_sq - n * out.mean * out.mean) / (n - 1.0)) : 0.0;
  out.std_error = std::sqrt(var / n);
  return out;
}

std::string monte_carlo_to_json(const MonteCarloSummary& s) {
  nlohmann::json j;
  j["query"] = s.query;
  j["estimator"] = s.estimator;
  j["items"] = s.items;
  j["reps"] = s.reps;
  j["truth"] = s.truth;
  j["mean"] = s.mean;
  j["std_error"] = s.std_error;
  return j.dump();
}

std::vector<std::pair<std::string, DataVector>> analysis_vectors(const RunConfig& cfg,
                                                                 const InstanceSet* data) {
  std::vector<std::pair<std::string, DataVector>> out;
  if (!cfg.vector.empty()) {
    out.emplace_back("vector", DataVector(cfg.vector));
    return out;
  }
  if (!data) throw Error("analysis needs --input or --vector");
  const ItemSubset subset = select_items(*data, cfg.items);
  for (std::size_t h = 0; h < data->items(); ++h) {
    if (subset && !subset->count(data->id(h))) continue;
    out.emplace_back(data->id(h), data->row(h));
  }
  return out;
}

namespace {

template <class Fn>
std::vector<AnalysisReport> sweep(const RunConfig& cfg, const InstanceSet* data, Fn&& fn) {
  cfg.validate();
  const auto vectors = analysis_vectors(cfg, data);
  const ItemFunction f = ItemFunction::parse(cfg.function);
  const std::size_t r = vectors.empty() ? (data ? data->instances() : 1) : vectors.front().second.size();
  const TauScheme scheme = io::parse_scheme(cfg.scheme, r);
  std::vector<AnalysisReport> reports(vectors.size());
  parallel_for(vectors.size(), cfg.threads, [&](std::size_t k) {
    reports[k] = fn(vectors[k].second, f, scheme);
    reports[k].vector = vectors[k].first + "=" + reports[k].vector;
  });
  return reports;
}

}  // namespace

std::vector<AnalysisReport> run_analysis(const RunConfig& cfg, const InstanceSet* data, bool* ok) {
  auto reports = sweep(cfg, data, [&](const DataVector& v, const ItemFunction& f,
                                      const TauScheme& scheme) {
    const AnalysisReport c = characterize(v, f, scheme);
    if (!c.estimable) return c;
    return competitiveness_ratio(v, f, scheme, cfg.grid_n, cfg.depth);
  });
  bool good = true;
  for (const auto& r : reports) {
    good = good && r.chain_holds() && r.consistent && !(r.ratio_upper > 84.0);
  }
  if (ok) *ok = good;
  return reports;
}

std::vector<AnalysisReport> run_characterize(const RunConfig& cfg, const InstanceSet* data,
                                             bool* ok) {
  auto reports = sweep(cfg, data, [&](const DataVector& v, const ItemFunction& f,
                                      const TauScheme& scheme) {
    return characterize(v, f, scheme, std::min<std::size_t>(cfg.grid_n, 256));
  });
  bool good = true;
  for (const auto& r : reports) good = good && r.chain_holds();
  if (ok) *ok = good;
  return reports;
}

std::vector<ConditionalInclusion> bottomk_conditional_check(std::span<const double> values,
                                                            std::size_t k, RankFunction rf,
                                                            std::size_t redraws,
                                                            std::uint64_t seed) {
  const std::size_t n = values.size();
  if (k == 0 || k >= n) throw Error("bottom-k check needs 0 < k < number of items");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&] { return 1.0 - unit(rng); };  // (0, 1]

  std::vector<double> seeds(n);
  for (double& s : seeds) s = draw();

  std::vector<ConditionalInclusion> out;
  for (std::size_t h = 0; h < n; ++h) {
    std::vector<double> others;
    for (std::size_t g = 0; g < n; ++g) {
      if (g != h) others.push_back(rank_value(rf, Seed(seeds[g]), values[g]));
    }
    std::nth_element(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     others.end(), std::greater<>());
    ConditionalInclusion c;
    c.item = h;
    c.value = values[h];
    c.threshold = others[k - 1];
    c.predicted = rank_inclusion_probability(rf, values[h], c.threshold);

    std::vector<double> trial = seeds;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < redraws; ++t) {
      trial[h] = draw();
      const BottomKSample s = bottomk_from_seeds(values, trial, k, rf);
      for (const auto& m : s.members) hits += m.item == h;
    }
    c.observed = static_cast<double>(hits) / static_cast<double>(redraws);
    out.push_back(c);
  }
  return out;
}

void run_bottomk_analysis(const RunConfig& cfg, const InstanceSet& data, std::ostream& out,
                          bool* ok) {
  cfg.validate();
  if (cfg.k == 0) throw Error("bottom-k analysis needs --k");
  const RankFunction rf = parse_rank(cfg.rank);
  bool good = true;
  for (std::size_t i = 0; i < data.instances(); ++i) {
    const std::vector<double> column = data.column(i);
    const BottomKSample s = bottomk_sample(column, data.ids(), cfg.k, rf, cfg.salt);
    for (const auto& m : s.members) {
      nlohmann::json j;
      j["instance"] = i + 1;
      j["item"] = data.id(m.item);
      j["value"] = m.value;
      j["rank"] = m.rank;
      j["conditional_threshold"] = m.conditional_threshold;
      out << j.dump() << '\n';
    }
    const auto checks = bottomk_conditional_check(column, cfg.k, rf, cfg.reps, cfg.salt + i);
    for (const auto& c : checks) {
      const bool pass = std::fabs(c.observed - c.predicted) <= 0.01;
      good = good && pass;
      nlohmann::json j;
      j["instance"] = i + 1;
      j["item"] = data.id(c.item);
      j["value"] = c.value;
      j["threshold"] = c.threshold;
      j["predicted"] = c.predicted;
      j["observed"] = c.observed;
      j["within_tolerance"] = pass;
      out << j.dump() << '\n';
    }
  }
  if (ok) *ok = good;
}

}  // namespace coord
