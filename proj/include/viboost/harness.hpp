#pragma once

#include <filesystem>
#include <fstream>

#include "viboost/harness/config.hpp"
#include "viboost/harness/experiment.hpp"
#include "viboost/harness/io.hpp"
#include "viboost/harness/svg.hpp"

namespace viboost::harness {

/// Runs the protocol and, if spec.output_dir is set, writes results.csv and the plots there.
inline ResultTable run_experiment(const ExperimentSpec& spec) {
  ResultTable table = run_repeats(spec);
  if (!spec.output_dir.empty()) {
    const std::filesystem::path dir(spec.output_dir);
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "results.csv");
    if (!csv) throw Error("cannot write results.csv in '" + spec.output_dir + "'");
    write_result_csv(csv, table);
    emit_plots(table, dir);
  }
  return table;
}

}  // namespace viboost::harness
