#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dlaim/inference.hpp"
#include "dlaim/model.hpp"

namespace dlaim {

/// User-facing run configuration. Noise scales are standard deviations (the
/// convention the CLI flags use); hyperparams() squares them into the
/// variance-based Hyperparams.
struct RunConfig {
  int k = 32;
  double s_theta = 0.1;       // transition std dev, interaction vectors
  double s_psi = 0.1;         // transition std dev, pre-attributes
  double sigma_theta = 10.0;  // prior std dev, interaction vectors
  double sigma_psi = 10.0;    // prior std dev, pre-attributes
  bool directed = false;
  double lr = 0.01;
  int batches = 1500;
  int batch_size = 0;  // 0 = min(N, 256)
  std::uint64_t seed = 0;
  int first = 2;  // first prediction timestep for run-experiment
  int last = 0;   // last prediction timestep; 0 = final snapshot
  int clusters = 2;

  Hyperparams hyperparams() const;
  std::string to_json_string(int indent = 2) const;
  static RunConfig from_json_string(const std::string& text);
  bool operator==(const RunConfig&) const = default;
};

struct ParsedSnapshots {
  SnapshotSequence seq;
  long self_loops_dropped = 0;
};

/// Line format: `t i j` (whitespace-separated), `#` comments, blank lines
/// ignored. Timesteps start at 1 and must be contiguous when the horizon is
/// inferred; node count is max id + 1 unless expect_nodes is given.
/// Undirected mode symmetrizes. Malformed lines are reported with their line
/// number.
ParsedSnapshots parse_snapshots(std::istream& in, bool directed, int expect_nodes = 0,
                                int expect_horizon = 0);
ParsedSnapshots parse_snapshots_file(const std::string& path, bool directed, int expect_nodes = 0,
                                     int expect_horizon = 0);

void write_snapshots(std::ostream& out, const SnapshotSequence& seq);
void write_snapshots_file(const std::string& path, const SnapshotSequence& seq);

/// Raw timestamped edge: `src dst time` lines, arbitrary string node ids.
struct EdgeEvent {
  std::string src, dst;
  std::int64_t time = 0;
};

std::vector<EdgeEvent> parse_events(std::istream& in);
std::vector<EdgeEvent> parse_events_file(const std::string& path);

struct AggregateResult {
  SnapshotSequence seq;
  std::vector<std::string> labels;  // dense node index -> external id
  long self_loops_dropped = 0;
  long events_outside_range = 0;
};

/// Buckets events into half-open windows [start + w*width, start + (w+1)*width)
/// and binarizes. Events before `start` or at window index >= n_windows are
/// dropped; n_windows = 0 derives the count from the last in-range event.
/// Node ids are densified in first-appearance order. Throws if nothing lands
/// in range.
AggregateResult aggregate_windows(const std::vector<EdgeEvent>& events, std::int64_t window_width,
                                  std::int64_t start, int n_windows, bool directed);

/// Plain CSV, 9 significant digits.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_csv_file(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv_file(const std::string& path);

/// Stacked per-timestep blocks: header `t,row,c0..`, then one line per matrix
/// row. Block t has exactly slices[t].rows() rows.
void write_trajectory_csv(std::ostream& out, const std::vector<Eigen::MatrixXd>& slices);
void write_trajectory_csv_file(const std::string& path, const std::vector<Eigen::MatrixXd>& slices);

void write_embeddings_csv_file(const std::string& path, const Embeddings& emb);

/// `timestep,auc` rows followed by a `mean` row.
void write_auc_report(std::ostream& out, const std::vector<std::pair<int, double>>& rows);
void write_auc_report_file(const std::string& path, const std::vector<std::pair<int, double>>& rows);

void write_communities_csv_file(const std::string& path, const std::vector<int>& assignments);
void write_labels_json_file(const std::string& path, const std::vector<std::string>& labels);

struct Checkpoint {
  InferenceNetwork net;
  RunConfig config;
  int horizon = 0;  // snapshot count the network was trained on
};

/// JSON checkpoint: format_version, config echo, shapes, and every named
/// parameter as a row-major array. Values round-trip exactly.
void save_checkpoint(const std::string& path, const InferenceNetwork& net, const RunConfig& config,
                     int horizon);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dlaim
