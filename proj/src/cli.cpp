#include "dlaim/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "dlaim/eval.hpp"
#include "dlaim/inference.hpp"
#include "dlaim/rng.hpp"

namespace dlaim {

ExperimentResult run_experiment(const SnapshotSequence& data, const RunConfig& config) {
  data.validate();
  const int horizon = data.horizon();
  const int first = config.first;
  const int last = config.last == 0 ? horizon : config.last;
  if (first < 2) throw std::invalid_argument("first prediction timestep must be >= 2");
  if (last > horizon) throw std::invalid_argument("last prediction timestep beyond the data");
  if (last < first) throw std::invalid_argument("empty prediction range");

  const Hyperparams hp = config.hyperparams();
  ExperimentResult result;
  InferenceNetwork net;
  for (int t = first; t <= last; ++t) {
    SnapshotSequence train_data;
    train_data.n_nodes = data.n_nodes;
    train_data.directed = data.directed;
    train_data.snapshots.assign(data.snapshots.begin(), data.snapshots.begin() + (t - 1));

    TrainConfig tc;
    tc.lr = config.lr;
    tc.n_batches = config.batches;
    tc.batch_size = config.batch_size;
    tc.seed = mix_seed(config.seed, static_cast<std::uint64_t>(t));
    const bool warm = result.networks_trained > 0;
    tc.warm_start = warm ? &net : nullptr;
    net = train(train_data, hp, tc);
    ++result.networks_trained;
    if (warm) ++result.warm_starts;

    const Eigen::MatrixXd prob = forecast(net, t - 1);
    result.rows.emplace_back(
        t, evaluate_forecast(prob, data.snapshots[static_cast<std::size_t>(t - 1)], data.directed));
  }
  double sum = 0.0;
  for (const auto& [t, score] : result.rows) sum += score;
  result.mean_auc = sum / static_cast<double>(result.rows.size());
  return result;
}

namespace {

void add_model_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--k", config.k, "latent attribute count");
  cmd->add_option("--s-theta", config.s_theta, "transition std dev of the interaction vectors");
  cmd->add_option("--s-psi", config.s_psi, "transition std dev of the node pre-attributes");
  cmd->add_option("--sigma-theta", config.sigma_theta, "prior std dev of the interaction vectors");
  cmd->add_option("--sigma-psi", config.sigma_psi, "prior std dev of the node pre-attributes");
  cmd->add_flag("--directed", config.directed, "treat the network as directed");
}

void add_train_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--lr", config.lr, "Adam learning rate");
  cmd->add_option("--batches", config.batches, "optimizer iterations");
  cmd->add_option("--batch-size", config.batch_size, "node batch size (0 = min(N, 256))");
}

TrainConfig train_config_from(const RunConfig& config) {
  TrainConfig tc;
  tc.lr = config.lr;
  tc.n_batches = config.batches;
  tc.batch_size = config.batch_size;
  tc.seed = config.seed;
  return tc;
}

int dispatch_impl(int argc, const char* const* argv) {
  CLI::App app{"dynamic latent attribute network model"};
  app.require_subcommand(1);

  RunConfig config;
  std::string snapshots_path, checkpoint_path, prob_path, events_path, out_path;
  std::string latents_prefix, labels_path, baseline;
  int n_nodes = 0, horizon = 0, timestep = 0, n_windows = 0;
  std::int64_t width = 0;
  std::int64_t start = std::numeric_limits<std::int64_t>::min();  // sentinel: min event time

  CLI::App* simulate = app.add_subcommand("simulate", "draw a synthetic network");
  simulate->add_option("--nodes", n_nodes, "node count")->required();
  simulate->add_option("--t", horizon, "snapshot count")->required();
  add_model_flags(simulate, config);
  simulate->add_option("--seed", config.seed, "random seed");
  simulate->add_option("--out", out_path, "snapshot file to write")->required();
  simulate->add_option("--latents-prefix", latents_prefix,
                       "prefix for the latent dump (default: the --out path)");

  CLI::App* train_cmd = app.add_subcommand("train", "fit the inference network");
  train_cmd->add_option("--snapshots", snapshots_path, "snapshot file")->required();
  add_model_flags(train_cmd, config);
  add_train_flags(train_cmd, config);
  train_cmd->add_option("--seed", config.seed, "random seed");
  train_cmd->add_option("--out", out_path, "checkpoint file to write")->required();

  CLI::App* forecast_cmd = app.add_subcommand("forecast", "predict the next snapshot");
  forecast_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
  forecast_cmd->add_option("--out", out_path, "probability matrix CSV to write")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a prediction by AUC");
  evaluate->add_option("--prob", prob_path, "probability matrix CSV");
  evaluate->add_option("--baseline", baseline, "score a baseline instead of a matrix (bas)");
  evaluate->add_option("--snapshots", snapshots_path, "snapshot file with the ground truth")
      ->required();
  evaluate->add_option("--t", timestep, "timestep to score (default: last)");
  evaluate->add_flag("--directed", config.directed, "treat the network as directed");
  evaluate->add_option("--out", out_path, "AUC report CSV to write");

  CLI::App* communities = app.add_subcommand("communities", "cluster nodes at a timestep");
  communities->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
  communities->add_option("--t", timestep, "timestep to cluster (default: trained horizon)");
  communities->add_option("--clusters", config.clusters, "community count");
  communities->add_option("--seed", config.seed, "k-means seed");
  communities->add_option("--out", out_path, "assignment CSV to write")->required();

  CLI::App* experiment = app.add_subcommand("run-experiment", "rolling forecast evaluation");
  experiment->add_option("--snapshots", snapshots_path, "snapshot file")->required();
  add_model_flags(experiment, config);
  add_train_flags(experiment, config);
  experiment->add_option("--seed", config.seed, "random seed");
  experiment->add_option("--first", config.first, "first timestep to predict");
  experiment->add_option("--last", config.last, "last timestep to predict (0 = final)");
  experiment->add_option("--out", out_path, "AUC report CSV to write")->required();

  CLI::App* aggregate = app.add_subcommand("aggregate", "bucket raw events into snapshots");
  aggregate->add_option("--events", events_path, "event file (`src dst time` lines)")->required();
  aggregate->add_option("--width", width, "window width in time units")->required();
  aggregate->add_option("--start", start, "window 0 start time (default: first event)");
  aggregate->add_option("--windows", n_windows, "window count (0 = cover all events)");
  aggregate->add_flag("--directed", config.directed, "keep edge direction");
  aggregate->add_option("--out", out_path, "snapshot file to write")->required();
  aggregate->add_option("--labels-out", labels_path,
                        "node label dictionary (default: <out>.labels.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) {
      const Hyperparams hp = config.hyperparams();
      const SampledNetwork sample = sample_network(hp, n_nodes, horizon, config.seed);
      write_snapshots_file(out_path, sample.snapshots);
      const std::string prefix = latents_prefix.empty() ? out_path : latents_prefix;
      write_trajectory_csv_file(prefix + ".psi.csv", sample.latent.psi);
      write_trajectory_csv_file(prefix + ".theta.csv", sample.latent.theta_bar);
      std::cout << "wrote " << out_path << " (" << n_nodes << " nodes, " << horizon
                << " snapshots)\n";
    } else if (*train_cmd) {
      const ParsedSnapshots parsed = parse_snapshots_file(snapshots_path, config.directed);
      if (parsed.self_loops_dropped > 0)
        std::cerr << "warning: dropped " << parsed.self_loops_dropped << " self-loops\n";
      const InferenceNetwork net =
          train(parsed.seq, config.hyperparams(), train_config_from(config));
      save_checkpoint(out_path, net, config, parsed.seq.horizon());
      std::cout << "wrote " << out_path << " (trained on " << parsed.seq.horizon()
                << " snapshots of " << parsed.seq.n_nodes << " nodes)\n";
    } else if (*forecast_cmd) {
      const Checkpoint ckpt = load_checkpoint(checkpoint_path);
      write_matrix_csv_file(out_path, forecast(ckpt.net, ckpt.horizon));
      std::cout << "wrote " << out_path << " (forecast for timestep " << (ckpt.horizon + 1)
                << ")\n";
    } else if (*evaluate) {
      if (prob_path.empty() == baseline.empty())
        throw std::invalid_argument("pass exactly one of --prob and --baseline");
      const ParsedSnapshots parsed = parse_snapshots_file(snapshots_path, config.directed);
      const int t = timestep == 0 ? parsed.seq.horizon() : timestep;
      if (t < 1 || t > parsed.seq.horizon())
        throw std::invalid_argument("--t outside the snapshot range");
      Eigen::MatrixXd prob;
      if (!baseline.empty()) {
        if (baseline != "bas") throw std::invalid_argument("unknown baseline: " + baseline);
        if (t < 2) throw std::invalid_argument("the baseline needs at least one prior snapshot");
        SnapshotSequence history;
        history.n_nodes = parsed.seq.n_nodes;
        history.directed = parsed.seq.directed;
        history.snapshots.assign(parsed.seq.snapshots.begin(),
                                 parsed.seq.snapshots.begin() + (t - 1));
        prob = bas_baseline(history);
      } else {
        prob = read_matrix_csv_file(prob_path);
      }
      const double score = evaluate_forecast(
          prob, parsed.seq.snapshots[static_cast<std::size_t>(t - 1)], parsed.seq.directed);
      if (!out_path.empty()) write_auc_report_file(out_path, {{t, score}});
      std::cout << "timestep " << t << " auc " << score << "\n";
    } else if (*communities) {
      const Checkpoint ckpt = load_checkpoint(checkpoint_path);
      const int t = timestep == 0 ? ckpt.horizon : timestep;
      if (t < 1) throw std::invalid_argument("--t must be >= 1");
      const VariationalState vs = unroll_variational(ckpt.net, t);
      const auto u = static_cast<std::size_t>(t - 1);
      const Eigen::MatrixXd z =
          vs.psi_mean[u].unaryExpr([](double v) { return attribute_activation(v); });
      const Eigen::MatrixXd scores = score_matrix(z, vs.theta_mean[u], ckpt.net.directed);
      const CommunityResult res = community_detect(scores, config.clusters, config.seed);
      write_communities_csv_file(out_path, res.assignments);
      std::cout << "wrote " << out_path << " (" << config.clusters << " communities at timestep "
                << t << ")\n";
    } else if (*experiment) {
      const ParsedSnapshots parsed = parse_snapshots_file(snapshots_path, config.directed);
      const ExperimentResult res = run_experiment(parsed.seq, config);
      write_auc_report_file(out_path, res.rows);
      std::cout << "wrote " << out_path << " (mean auc " << res.mean_auc << " over "
                << res.rows.size() << " snapshots)\n";
    } else if (*aggregate) {
      const std::vector<EdgeEvent> events = parse_events_file(events_path);
      std::int64_t start_time = start;
      if (start_time == std::numeric_limits<std::int64_t>::min()) {
        if (events.empty()) throw std::runtime_error("no events in input");
        start_time = std::min_element(events.begin(), events.end(), [](auto& a, auto& b) {
                       return a.time < b.time;
                     })->time;
      }
      const AggregateResult res =
          aggregate_windows(events, width, start_time, n_windows, config.directed);
      write_snapshots_file(out_path, res.seq);
      write_labels_json_file(labels_path.empty() ? out_path + ".labels.json" : labels_path,
                             res.labels);
      if (res.self_loops_dropped > 0)
        std::cerr << "warning: dropped " << res.self_loops_dropped << " self-loops\n";
      std::cout << "wrote " << out_path << " (" << res.seq.n_nodes << " nodes, "
                << res.seq.horizon() << " snapshots)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) { return dispatch_impl(argc, argv); }

int cli_dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("dlaim");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return dispatch_impl(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dlaim
