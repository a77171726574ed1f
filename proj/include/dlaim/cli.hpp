#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dlaim/io.hpp"
#include "dlaim/model.hpp"

namespace dlaim {

struct ExperimentResult {
  std::vector<std::pair<int, double>> rows;  // (predicted timestep, AUC)
  double mean_auc = 0.0;
  int networks_trained = 0;
  int warm_starts = 0;
};

/// Rolling forecast protocol: for each timestep t in [config.first,
/// config.last], train on snapshots 1..t-1 (warm-started from the previous
/// horizon's network), forecast t, and score it by AUC. config.last = 0
/// means the final snapshot.
ExperimentResult run_experiment(const SnapshotSequence& data, const RunConfig& config);

/// Entry point behind main(); returns the process exit code.
int cli_dispatch(int argc, const char* const* argv);
/// Convenience for in-process tests: args exclude the program name.
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace dlaim
