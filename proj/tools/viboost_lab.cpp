// viboost-lab: data generation, single training runs, repeated-split
// experiments and Gibbs reference runs.
//
// Exit codes: 0 success, 2 config/parse error, 3 numeric failure, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "viboost/all.hpp"
#include "viboost/harness.hpp"

namespace {

using namespace viboost;
using namespace viboost::harness;
using nlohmann::json;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> rounds;
  std::optional<int> repeats;
  std::optional<std::string> algo;
  std::string out;
  std::string config;
  std::optional<double> tau;
  std::optional<double> mu0;
  std::optional<double> mu0_prime;
  std::vector<double> zeta;
  CLI::Option* elbo_opt = nullptr;
  bool elbo = false;
};

void add_common(CLI::App& app, CommonFlags& f) {
  app.add_option("--seed", f.seed, "base random seed");
  app.add_option("--rounds", f.rounds, "boosting rounds");
  app.add_option("--repeats", f.repeats, "number of repeated splits");
  app.add_option("--algo", f.algo, "viboost | adaboost | adaboost-smoothed | gibbs");
  app.add_option("--out", f.out, "output file or directory");
  app.add_option("--config", f.config, "key=value config file");
  app.add_option("--tau", f.tau, "temperature of the stage weight");
  app.add_option("--mu0", f.mu0, "phantom-example multiplicity of the weight prior");
  app.add_option("--mu0-prime", f.mu0_prime, "prior multiplicity of the noise grade");
  app.add_option("--zeta", f.zeta, "Beta prior of the type prior (two values)")->expected(2);
  f.elbo_opt = app.add_flag("--elbo,!--no-elbo", f.elbo, "evaluate the ELBO between inner iterations");
}

/// Config file first, then explicit flags on top.
ExperimentSpec build_spec(const CommonFlags& f, ExperimentSpec spec = {}) {
  if (!f.config.empty()) {
    auto in = viboost::harness::detail::open_input(f.config);
    apply_config(spec, read_config(in));
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.rounds) spec.rounds = *f.rounds;
  if (f.repeats) spec.repeats = *f.repeats;
  if (f.algo) spec.algorithm = parse_algorithm(*f.algo);
  if (f.tau) spec.vi.tau = *f.tau;
  if (f.mu0) spec.vi.mu0 = *f.mu0;
  if (f.mu0_prime) spec.vi.mu0_prime = *f.mu0_prime;
  if (!f.zeta.empty()) {
    spec.vi.zeta1 = f.zeta.at(0);
    spec.vi.zeta2 = f.zeta.at(1);
  }
  if (f.elbo_opt->count() > 0) spec.vi.elbo_enabled = f.elbo;
  spec.vi.rounds = spec.rounds;
  return spec;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct DataFlags {
  std::string path;
  std::string format = "dense";
  bool header = false;
  std::string source;  // generator name when no path is given
  double theta = 0.0;
};

void add_data(CLI::App& app, DataFlags& d) {
  app.add_option("--data", d.path, "dataset file");
  app.add_option("--format", d.format, "dense | sparse")->check(CLI::IsMember({"dense", "sparse"}));
  app.add_flag("--header", d.header, "dense CSV has a header row");
  app.add_option("--source", d.source, "generator when --data is absent: step | long-servedio | sparse-text");
  app.add_option("--theta", d.theta, "type prior of the step generator");
}

DataSource to_source(const DataFlags& d, DataSource src) {
  if (!d.path.empty()) {
    src.kind = d.format == "sparse" ? DataSource::Kind::SparseFile : DataSource::Kind::DenseFile;
    src.path = d.path;
    src.has_header = d.header;
    return src;
  }
  if (d.source == "step") src.kind = DataSource::Kind::Step;
  else if (d.source == "long-servedio") src.kind = DataSource::Kind::LongServedio;
  else if (d.source == "sparse-text") src.kind = DataSource::Kind::SparseText;
  else if (!d.source.empty()) throw ParseError("unknown --source '" + d.source + "'");
  src.theta = d.theta;
  return src;
}

int cmd_gen_data(const std::string& kind, const CommonFlags& f, double theta, double xi, int n,
                 double noise, int count, const std::string& domain_path,
                 const std::vector<double>& weights, double bias) {
  Rng rng(f.seed.value_or(1));
  Dataset data;
  if (kind == "step") {
    data = make_step_dataset(theta, rng, xi);
  } else if (kind == "long-servedio") {
    data = make_long_servedio(n, noise, count, rng);
  } else if (kind == "generic") {
    if (domain_path.empty()) throw ParseError("gen-data generic: --domain is required");
    auto in = viboost::harness::detail::open_input(domain_path);
    GenSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto body = viboost::harness::detail::trim(line);
      if (body.empty() || body.front() == '#') continue;
      std::vector<double> x;
      std::size_t start = 0;
      for (;;) {
        const auto comma = body.find(',', start);
        double v = 0.0;
        const auto cell = body.substr(start, comma == std::string_view::npos ? comma : comma - start);
        if (!viboost::harness::detail::parse_double(cell, v)) {
          throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(cell) +
                           "' is not a number");
        }
        x.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      spec.domain.push_back(std::move(x));
    }
    if (spec.domain.empty()) throw ParseError("gen-data generic: empty domain file");
    if (weights.size() != spec.domain.front().size()) {
      throw ParseError("gen-data generic: --weights must have one entry per feature");
    }
    spec.log_odds = [weights, bias](std::span<const double> x) {
      double v = bias;
      for (std::size_t i = 0; i < weights.size(); ++i) v += weights[i] * x[i];
      return v;
    };
    spec.noise_grade = xi;
    spec.type_prior = theta;
    data = generate_labels(spec, rng);
  } else {
    throw ParseError("gen-data: unknown kind '" + kind + "'");
  }
  if (f.out.empty() || f.out == "-") {
    write_dense_csv(std::cout, data);
  } else {
    save_dense_csv(f.out, data);
  }
  return 0;
}

int cmd_train(const CommonFlags& f, const DataFlags& d) {
  ExperimentSpec spec = build_spec(f);
  spec.source = to_source(d, spec.source);
  Rng rng(spec.seed);
  const Dataset data = make_source_dataset(spec.source, rng);
  const StumpSpace space = build_stumps(data);
  json out;
  out["algorithm"] = to_string(spec.algorithm);
  out["examples"] = data.rows();
  out["features"] = data.cols();
  Ensemble ensemble;
  switch (spec.algorithm) {
    case Algorithm::VIBoost: {
      const auto res = run_viboost(data, space, spec.vi);
      ensemble = res.ensemble;
      out["snr"] = finite_or_null(res.report.snr);
      out["noise_grade"] = finite_or_null(res.report.noise_grade);
      out["per_example_true_prob"] = res.report.per_example_true_prob;
      out["elbo_trace"] = res.report.elbo_trace;
      break;
    }
    case Algorithm::AdaBoost:
    case Algorithm::AdaBoostSmoothed: {
      AdaConfig cfg;
      cfg.rounds = spec.rounds;
      cfg.tau = spec.vi.tau;
      cfg.smoothing_mu0 = spec.algorithm == Algorithm::AdaBoostSmoothed ? spec.vi.mu0 : 0.0;
      ensemble = run_adaboost(data, space, cfg).ensemble;
      break;
    }
    case Algorithm::Gibbs:
      throw ParseError("train: use the gibbs subcommand for Gibbs runs");
  }
  out["train_error"] = error_rate(ensemble, space, data);
  json stages = json::array();
  for (const auto& s : ensemble) {
    const auto& h = space.stumps[s.stump];
    stages.push_back({{"feature", h.feature}, {"threshold", h.threshold}, {"alpha", s.alpha}});
  }
  out["stages"] = std::move(stages);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_experiment(const CommonFlags& f) {
  if (f.config.empty()) throw ParseError("experiment: --config is required");
  ExperimentSpec spec = build_spec(f);
  if (!f.out.empty()) spec.output_dir = f.out;
  const ResultTable table = run_experiment(spec);
  if (spec.output_dir.empty()) write_result_csv(std::cout, table);
  return 0;
}

int cmd_gibbs(const CommonFlags& f, const DataFlags& d, int iters, int burnin, int thin) {
  ExperimentSpec spec = build_spec(f);
  spec.source = to_source(d, spec.source);
  if (!spec.source.is_generator() && spec.source.path.empty()) {
    throw ParseError("gibbs: --data is required");
  }
  Rng rng(spec.seed);
  const Dataset data = make_source_dataset(spec.source, rng);
  const StumpSpace space = build_stumps(data);
  const GibbsHyper hyper{spec.vi.mu0, spec.vi.mu0_prime, spec.vi.zeta1, spec.vi.zeta2};
  const auto trace = run_gibbs(data.labels(), space, hyper, iters, burnin, thin, rng);
  if (!f.out.empty()) {
    std::ofstream os(f.out);
    if (!os) throw Error("cannot write '" + f.out + "'");
    write_trace_csv(os, trace);
  }
  const auto mean = posterior_means(trace);
  json out;
  out["samples"] = trace.samples.size();
  out["theta"] = mean.theta;
  out["xi"] = mean.xi;
  out["c"] = mean.c;
  out["w"] = mean.w;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viboost-lab: variational boosting with label-noise modeling"};
  app.require_subcommand(1);

  CommonFlags gen_f, train_f, exp_f, gibbs_f;
  DataFlags train_d, gibbs_d;

  auto* gen = app.add_subcommand("gen-data", "generate a dataset as dense CSV");
  add_common(*gen, gen_f);
  std::string kind = "step";
  double theta = 0.0;
  double xi = kStepNoiseGrade;
  int ls_n = 10;
  double ls_noise = 0.2;
  int ls_count = 1200;
  std::string domain_path;
  std::vector<double> weights;
  double bias = 0.0;
  gen->add_option("kind", kind, "step | long-servedio | generic")
      ->check(CLI::IsMember({"step", "long-servedio", "generic"}));
  gen->add_option("--theta", theta, "type prior");
  gen->add_option("--xi", xi, "noise grade");
  gen->add_option("--n", ls_n, "Long-Servedio size parameter (dimension 2n+11)");
  gen->add_option("--noise", ls_noise, "Long-Servedio label flip rate");
  gen->add_option("--count", ls_count, "Long-Servedio example count");
  gen->add_option("--domain", domain_path, "generic: CSV of instances, one per line");
  gen->add_option("--weights", weights, "generic: linear log-odds weights");
  gen->add_option("--bias", bias, "generic: log-odds intercept");

  auto* train = app.add_subcommand("train", "single training run; prints a JSON noise report");
  add_common(*train, train_f);
  add_data(*train, train_d);

  auto* experiment = app.add_subcommand("experiment", "repeated-split protocol from a config file");
  add_common(*experiment, exp_f);

  auto* gibbs = app.add_subcommand("gibbs", "Gibbs sampler on a micro instance");
  add_common(*gibbs, gibbs_f);
  add_data(*gibbs, gibbs_d);
  int iters = 5000;
  int burnin = 500;
  int thin = 1;
  gibbs->add_option("--iters", iters, "sweeps");
  gibbs->add_option("--burnin", burnin, "discarded sweeps");
  gibbs->add_option("--thin", thin, "keep every k-th sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen_data(kind, gen_f, theta, xi, ls_n, ls_noise, ls_count, domain_path, weights, bias);
    if (*train) return cmd_train(train_f, train_d);
    if (*experiment) return cmd_experiment(exp_f);
    if (*gibbs) return cmd_gibbs(gibbs_f, gibbs_d, iters, burnin, thin);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
