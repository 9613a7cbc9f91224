#pragma once

// Experiment config files: "key = value" lines grouped under [section]
// headers. '#' and ';' start comments. Unknown sections or keys are errors.
//
//   [experiment]  algorithm rounds repeats seed train_fraction train_count output_dir
//   [data]        source (dense | sparse | step | long-servedio | sparse-text) path header
//                 theta n noise count docs vocab informative
//   [viboost]     mu0 mu0_prime zeta1 zeta2 tau elbo inner_tol inner_max fixed_inner
//   [gibbs]       iters burnin thin

#include <charconv>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "viboost/error.hpp"
#include "viboost/harness/experiment.hpp"
#include "viboost/harness/io.hpp"

namespace viboost::harness {

using ConfigMap = std::map<std::string, std::string>;  ///< "section.key" -> value

inline ConfigMap read_config(std::istream& in) {
  ConfigMap out;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (const auto hash = body.find_first_of("#;"); hash != std::string_view::npos) {
      body = detail::trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("line " + std::to_string(line_no) + ": bad section header");
      section = std::string(detail::trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) throw ParseError("line " + std::to_string(line_no) + ": key outside a section");
    const auto key = detail::trim(body.substr(0, eq));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    out[section + "." + std::string(key)] = std::string(detail::trim(body.substr(eq + 1)));
  }
  return out;
}

namespace detail {

inline double as_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out)) throw ParseError(key + ": '" + v + "' is not a number");
  return out;
}

template <class Int>
Int as_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ParseError(key + ": '" + v + "' is not an integer");
  return out;
}

inline bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError(key + ": '" + v + "' is not a boolean");
}

inline DataSource::Kind parse_source_kind(const std::string& v) {
  if (v == "dense") return DataSource::Kind::DenseFile;
  if (v == "sparse") return DataSource::Kind::SparseFile;
  if (v == "step") return DataSource::Kind::Step;
  if (v == "long-servedio") return DataSource::Kind::LongServedio;
  if (v == "sparse-text") return DataSource::Kind::SparseText;
  throw ParseError("data.source: unknown source '" + v + "'");
}

}  // namespace detail

/// Applies every entry of `cfg` on top of `spec`.
inline void apply_config(ExperimentSpec& spec, const ConfigMap& cfg) {
  using detail::as_bool;
  using detail::as_double;
  using detail::as_int;
  for (const auto& [key, v] : cfg) {
    if (key == "experiment.algorithm") spec.algorithm = parse_algorithm(v);
    else if (key == "experiment.rounds") spec.rounds = as_int<int>(key, v);
    else if (key == "experiment.repeats") spec.repeats = as_int<int>(key, v);
    else if (key == "experiment.seed") spec.seed = as_int<std::uint64_t>(key, v);
    else if (key == "experiment.train_fraction") spec.train_fraction = as_double(key, v);
    else if (key == "experiment.train_count") spec.train_count = as_int<int>(key, v);
    else if (key == "experiment.output_dir") spec.output_dir = v;
    else if (key == "data.source") spec.source.kind = detail::parse_source_kind(v);
    else if (key == "data.path") spec.source.path = v;
    else if (key == "data.header") spec.source.has_header = as_bool(key, v);
    else if (key == "data.theta") spec.source.theta = as_double(key, v);
    else if (key == "data.n") spec.source.ls_n = as_int<int>(key, v);
    else if (key == "data.noise") spec.source.ls_noise = as_double(key, v);
    else if (key == "data.count") spec.source.ls_count = as_int<int>(key, v);
    else if (key == "data.docs") spec.source.text_docs = as_int<int>(key, v);
    else if (key == "data.vocab") spec.source.text_vocab = as_int<int>(key, v);
    else if (key == "data.informative") spec.source.text_informative = as_int<int>(key, v);
    else if (key == "viboost.mu0") spec.vi.mu0 = as_double(key, v);
    else if (key == "viboost.mu0_prime") spec.vi.mu0_prime = as_double(key, v);
    else if (key == "viboost.zeta1") spec.vi.zeta1 = as_double(key, v);
    else if (key == "viboost.zeta2") spec.vi.zeta2 = as_double(key, v);
    else if (key == "viboost.tau") spec.vi.tau = as_double(key, v);
    else if (key == "viboost.elbo") spec.vi.elbo_enabled = as_bool(key, v);
    else if (key == "viboost.inner_tol") spec.vi.inner_tol = as_double(key, v);
    else if (key == "viboost.inner_max") spec.vi.inner_max = as_int<int>(key, v);
    else if (key == "viboost.fixed_inner") spec.vi.fixed_inner = as_int<int>(key, v);
    else if (key == "gibbs.iters") spec.gibbs_iters = as_int<int>(key, v);
    else if (key == "gibbs.burnin") spec.gibbs_burnin = as_int<int>(key, v);
    else if (key == "gibbs.thin") spec.gibbs_thin = as_int<int>(key, v);
    else throw ParseError("unknown config key '" + key + "'");
  }
}

inline ExperimentSpec load_experiment_config(const std::string& path) {
  auto in = detail::open_input(path);
  ExperimentSpec spec;
  apply_config(spec, read_config(in));
  return spec;
}

}  // namespace viboost::harness
