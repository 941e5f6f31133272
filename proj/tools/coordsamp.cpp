// coordsamp: sample, estimate, analyze and characterize coordinated samples.

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"

#include "coord/harness.hpp"
#include "coord/io.hpp"

namespace {

using coord::RunConfig;

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw coord::Error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::optional<coord::InstanceSet> load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) return std::nullopt;
  return coord::io::read_instances_file(cfg.input);
}

int cmd_sample(const RunConfig& cfg) {
  cfg.validate();
  const auto data = load_input(cfg);
  if (!data) throw coord::Error("sample needs --input");
  Output out(cfg.out);
  coord::io::write_samples(out.stream(), coord::draw_samples(*data, cfg, cfg.salt), cfg.k > 0);
  return 0;
}

int cmd_estimate(const RunConfig& cfg) {
  const auto data = load_input(cfg);
  Output out(cfg.out);
  if (!cfg.samples.empty()) {
    std::ifstream in(cfg.samples);
    if (!in) throw coord::Error("cannot open '" + cfg.samples + "'");
    std::size_t r = data ? data->instances() : 0;
    if (r == 0) {
      // Arity from the first record when no data is given.
      std::string first;
      std::getline(in, first);
      r = nlohmann::json::parse(first).at("slots").size();
      in.seekg(0);
    }
    const coord::TauScheme scheme = coord::io::parse_scheme(cfg.scheme, r);
    const auto samples = coord::io::read_samples(in, scheme);
    out.stream() << coord::io::query_result_to_json(
                        coord::run_query_on_samples(cfg, samples, data ? &*data : nullptr))
                 << '\n';
    return 0;
  }
  if (!data) throw coord::Error("estimate needs --input or --samples");
  if (cfg.reps > 1) {
    out.stream() << coord::monte_carlo_to_json(coord::run_monte_carlo(cfg, *data)) << '\n';
  } else {
    out.stream() << coord::io::query_result_to_json(coord::run_query(cfg, *data)) << '\n';
  }
  return 0;
}

int cmd_analyze(RunConfig cfg) {
  const auto data = load_input(cfg);
  Output out(cfg.out);
  bool ok = true;
  if (cfg.k > 0) {
    if (!data) throw coord::Error("bottom-k analysis needs --input");
    if (cfg.reps == 1) cfg.reps = 100000;
    coord::run_bottomk_analysis(cfg, *data, out.stream(), &ok);
    return ok ? 0 : 1;
  }
  for (const auto& r : coord::run_analysis(cfg, data ? &*data : nullptr, &ok)) {
    out.stream() << coord::io::report_to_json(r) << '\n';
  }
  if (!cfg.plot.empty()) {
    const auto vectors = coord::analysis_vectors(cfg, data ? &*data : nullptr);
    if (vectors.size() != 1) throw coord::Error("--plot needs exactly one vector");
    std::ofstream plot(cfg.plot);
    if (!plot) throw coord::Error("cannot write '" + cfg.plot + "'");
    const auto f = coord::ItemFunction::parse(cfg.function);
    const auto scheme = coord::io::parse_scheme(cfg.scheme, vectors.front().second.size());
    coord::write_plot_csv(plot, vectors.front().second, f, scheme, cfg.grid_n);
  }
  return ok ? 0 : 1;
}

int cmd_characterize(const RunConfig& cfg) {
  const auto data = load_input(cfg);
  Output out(cfg.out);
  bool ok = true;
  for (const auto& r : coord::run_characterize(cfg, data ? &*data : nullptr, &ok)) {
    out.stream() << coord::io::report_to_json(r) << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated sampling: samples, estimates and estimator analysis"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "instance CSV (item,v1,...,vr)");
    sub->add_option("--scheme", cfg.scheme, "pps:tau=T, pps:tau=T1/T2, pwl:u@tau,... or a config file")
        ->capture_default_str();
    sub->add_option("--items", cfg.items, "all, id list, both-positive or positive-in:K")
        ->capture_default_str();
    sub->add_option("--salt", cfg.salt, "hash salt")->capture_default_str();
    sub->add_option("--k", cfg.k, "bottom-k sample size");
    sub->add_option("--rank", cfg.rank, "pps or exp")->capture_default_str();
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  };
  const auto analysis = [&](CLI::App* sub) {
    sub->add_option("--function", cfg.function, "max, min, or, rg:p=P, one_sided_rg:p=P,hi=I,lo=J")
        ->capture_default_str();
    sub->add_option("--vector", cfg.vector, "single data vector, e.g. --vector 1 0")
        ->delimiter(',');
    sub->add_option("--grid-n", cfg.grid_n, "hull grid size")->capture_default_str();
    sub->add_option("--depth", cfg.depth, "dyadic depth for J")->capture_default_str();
  };

  auto* sample = app.add_subcommand("sample", "draw coordinated samples as JSON lines");
  common(sample);

  auto* estimate = app.add_subcommand("estimate", "estimate a query from samples");
  common(estimate);
  estimate->add_option("--samples", cfg.samples, "sample records written by 'sample'");
  estimate->add_option("--function", cfg.function, "item function summed when --query is absent")
      ->capture_default_str();
  estimate->add_option("--estimator", cfg.estimator, "j, ht, exact or voptimal-oracle")
      ->capture_default_str();
  estimate->add_option("--query", cfg.query, "l1, lpp:p, lp:p, maxsum, minsum, jaccard, distinct");
  estimate->add_option("--reps", cfg.reps, "Monte Carlo repetitions")->capture_default_str();
  estimate->add_option("--grid-n", cfg.grid_n, "hull grid for voptimal-oracle")
      ->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "competitiveness of J against the v-optimal estimates");
  common(analyze);
  analysis(analyze);
  analyze->add_option("--plot", cfg.plot, "plot CSV (u,lb,H,J,vopt) for a single vector");
  analyze->add_option("--reps", cfg.reps, "redraws for the bottom-k check (default 100000)");

  auto* characterize = app.add_subcommand("characterize", "estimability, boundedness, finite variance");
  common(characterize);
  analysis(characterize);

  CLI11_PARSE(app, argc, argv);
  try {
    if (sample->parsed()) return cmd_sample(cfg);
    if (estimate->parsed()) return cmd_estimate(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    return cmd_characterize(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
