#include "dlaim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dlaim {

namespace {

using nlohmann::json;

std::string strip_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

[[noreturn]] void fail_line(long line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("shape").at(0).get<Eigen::Index>();
  const auto cols = j.at("shape").at(1).get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::runtime_error("parameter data length does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data.at(idx++).get<double>();
  return m;
}

json config_to_json(const RunConfig& c) {
  return json{{"k", c.k},
              {"s_theta", c.s_theta},
              {"s_psi", c.s_psi},
              {"sigma_theta", c.sigma_theta},
              {"sigma_psi", c.sigma_psi},
              {"directed", c.directed},
              {"lr", c.lr},
              {"batches", c.batches},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"first", c.first},
              {"last", c.last},
              {"clusters", c.clusters}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.k = j.value("k", c.k);
  c.s_theta = j.value("s_theta", c.s_theta);
  c.s_psi = j.value("s_psi", c.s_psi);
  c.sigma_theta = j.value("sigma_theta", c.sigma_theta);
  c.sigma_psi = j.value("sigma_psi", c.sigma_psi);
  c.directed = j.value("directed", c.directed);
  c.lr = j.value("lr", c.lr);
  c.batches = j.value("batches", c.batches);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.first = j.value("first", c.first);
  c.last = j.value("last", c.last);
  c.clusters = j.value("clusters", c.clusters);
  return c;
}

}  // namespace

Hyperparams RunConfig::hyperparams() const {
  Hyperparams hp;
  hp.n_attrs = k;
  hp.theta_step_var = s_theta * s_theta;
  hp.psi_step_var = s_psi * s_psi;
  hp.theta_prior_var = sigma_theta * sigma_theta;
  hp.psi_prior_var = sigma_psi * sigma_psi;
  hp.directed = directed;
  return hp;
}

std::string RunConfig::to_json_string(int indent) const {
  return config_to_json(*this).dump(indent);
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

ParsedSnapshots parse_snapshots(std::istream& in, bool directed, int expect_nodes,
                                int expect_horizon) {
  struct Edge {
    int t, i, j;
  };
  std::vector<Edge> edges;
  std::set<int> seen_t;
  int max_node = -1;
  int max_t = 0;
  long self_loops = 0;
  long line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    long long t, i, j;
    if (!(fields >> t)) continue;  // blank or comment-only line
    if (!(fields >> i >> j)) fail_line(line_no, "expected `t i j`");
    std::string extra;
    if (fields >> extra) fail_line(line_no, "trailing content after `t i j`");
    if (t < 1) fail_line(line_no, "timesteps start at 1");
    if (i < 0 || j < 0) fail_line(line_no, "negative node id");
    if (expect_horizon > 0 && t > expect_horizon)
      fail_line(line_no, "timestep beyond the expected horizon");
    if (expect_nodes > 0 && (i >= expect_nodes || j >= expect_nodes))
      fail_line(line_no, "node id beyond the expected node count");
    if (i == j) {
      ++self_loops;
      continue;
    }
    edges.push_back({static_cast<int>(t), static_cast<int>(i), static_cast<int>(j)});
    seen_t.insert(static_cast<int>(t));
    max_node = std::max(max_node, static_cast<int>(std::max(i, j)));
    max_t = std::max(max_t, static_cast<int>(t));
  }
  if (edges.empty() && expect_horizon == 0) throw std::runtime_error("no edges in input");
  const int horizon = expect_horizon > 0 ? expect_horizon : max_t;
  if (expect_horizon == 0 && static_cast<int>(seen_t.size()) != max_t)
    throw std::runtime_error("non-contiguous timesteps: " + std::to_string(seen_t.size()) +
                             " distinct values over 1.." + std::to_string(max_t));
  const int n_nodes = expect_nodes > 0 ? expect_nodes : max_node + 1;

  ParsedSnapshots out;
  out.self_loops_dropped = self_loops;
  out.seq.n_nodes = n_nodes;
  out.seq.directed = directed;
  out.seq.snapshots.assign(static_cast<std::size_t>(horizon),
                           Eigen::MatrixXd::Zero(n_nodes, n_nodes));
  for (const Edge& e : edges) {
    Eigen::MatrixXd& snap = out.seq.snapshots[static_cast<std::size_t>(e.t - 1)];
    snap(e.i, e.j) = 1.0;
    if (!directed) snap(e.j, e.i) = 1.0;
  }
  out.seq.validate();
  return out;
}

ParsedSnapshots parse_snapshots_file(const std::string& path, bool directed, int expect_nodes,
                                     int expect_horizon) {
  std::ifstream in = open_in(path);
  return parse_snapshots(in, directed, expect_nodes, expect_horizon);
}

void write_snapshots(std::ostream& out, const SnapshotSequence& seq) {
  for (int t = 0; t < seq.horizon(); ++t) {
    const Eigen::MatrixXd& snap = seq.snapshots[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < snap.rows(); ++i)
      for (Eigen::Index j = seq.directed ? 0 : i + 1; j < snap.cols(); ++j)
        if (i != j && snap(i, j) != 0.0) out << (t + 1) << ' ' << i << ' ' << j << '\n';
  }
}

void write_snapshots_file(const std::string& path, const SnapshotSequence& seq) {
  std::ofstream out = open_out(path);
  write_snapshots(out, seq);
}

std::vector<EdgeEvent> parse_events(std::istream& in) {
  std::vector<EdgeEvent> events;
  long line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    EdgeEvent e;
    if (!(fields >> e.src)) continue;
    if (!(fields >> e.dst >> e.time)) fail_line(line_no, "expected `src dst time`");
    std::string extra;
    if (fields >> extra) fail_line(line_no, "trailing content after `src dst time`");
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<EdgeEvent> parse_events_file(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_events(in);
}

AggregateResult aggregate_windows(const std::vector<EdgeEvent>& events, std::int64_t window_width,
                                  std::int64_t start, int n_windows, bool directed) {
  if (window_width <= 0) throw std::invalid_argument("window width must be positive");
  auto window_of = [&](std::int64_t time) {
    std::int64_t offset = time - start;
    std::int64_t w = offset / window_width;
    if (offset % window_width < 0) --w;  // floor toward -inf for pre-start events
    return w;
  };

  AggregateResult out;
  std::map<std::string, int> index_of;
  auto densify = [&](const std::string& label) {
    auto [it, fresh] = index_of.try_emplace(label, static_cast<int>(out.labels.size()));
    if (fresh) out.labels.push_back(label);
    return it->second;
  };

  struct Placed {
    int w, i, j;
  };
  std::vector<Placed> placed;
  std::int64_t max_window = -1;
  for (const EdgeEvent& e : events) {
    const std::int64_t w = window_of(e.time);
    if (w < 0 || (n_windows > 0 && w >= n_windows)) {
      ++out.events_outside_range;
      continue;
    }
    const int i = densify(e.src);
    const int j = densify(e.dst);
    if (i == j) {
      ++out.self_loops_dropped;
      continue;
    }
    placed.push_back({static_cast<int>(w), i, j});
    max_window = std::max(max_window, w);
  }
  if (placed.empty()) throw std::runtime_error("no events fall inside the aggregation range");

  const int horizon = n_windows > 0 ? n_windows : static_cast<int>(max_window) + 1;
  const int n_nodes = static_cast<int>(out.labels.size());
  out.seq.n_nodes = n_nodes;
  out.seq.directed = directed;
  out.seq.snapshots.assign(static_cast<std::size_t>(horizon),
                           Eigen::MatrixXd::Zero(n_nodes, n_nodes));
  for (const Placed& p : placed) {
    Eigen::MatrixXd& snap = out.seq.snapshots[static_cast<std::size_t>(p.w)];
    snap(p.i, p.j) = 1.0;
    if (!directed) snap(p.j, p.i) = 1.0;
  }
  out.seq.validate();
  return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_g9(m(r, c));
    }
    out << '\n';
  }
}

void write_matrix_csv_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out = open_out(path);
  write_matrix_csv(out, m);
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.find_first_not_of(" \t\r,") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(body);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
        row.push_back(v);
      } catch (const std::exception&) {
        fail_line(line_no, "bad numeric cell `" + cell + "`");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail_line(line_no, "ragged row: expected " + std::to_string(rows.front().size()) + " cells");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix file");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

Eigen::MatrixXd read_matrix_csv_file(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_matrix_csv(in);
}

void write_trajectory_csv(std::ostream& out, const std::vector<Eigen::MatrixXd>& slices) {
  if (slices.empty()) throw std::invalid_argument("no slices to write");
  const Eigen::Index cols = slices.front().cols();
  out << "t,row";
  for (Eigen::Index c = 0; c < cols; ++c) out << ",c" << c;
  out << '\n';
  for (std::size_t t = 0; t < slices.size(); ++t) {
    const Eigen::MatrixXd& m = slices[t];
    if (m.cols() != cols) throw std::invalid_argument("inconsistent slice widths");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << (t + 1) << ',' << r;
      for (Eigen::Index c = 0; c < cols; ++c) out << ',' << format_g9(m(r, c));
      out << '\n';
    }
  }
}

void write_trajectory_csv_file(const std::string& path, const std::vector<Eigen::MatrixXd>& slices) {
  std::ofstream out = open_out(path);
  write_trajectory_csv(out, slices);
}

void write_embeddings_csv_file(const std::string& path, const Embeddings& emb) {
  write_trajectory_csv_file(path, emb.z);
}

void write_auc_report(std::ostream& out, const std::vector<std::pair<int, double>>& rows) {
  out << "timestep,auc\n";
  double sum = 0.0;
  for (const auto& [t, score] : rows) {
    out << t << ',' << format_g9(score) << '\n';
    sum += score;
  }
  if (!rows.empty()) out << "mean," << format_g9(sum / static_cast<double>(rows.size())) << '\n';
}

void write_auc_report_file(const std::string& path, const std::vector<std::pair<int, double>>& rows) {
  std::ofstream out = open_out(path);
  write_auc_report(out, rows);
}

void write_communities_csv_file(const std::string& path, const std::vector<int>& assignments) {
  std::ofstream out = open_out(path);
  out << "node,community\n";
  for (std::size_t i = 0; i < assignments.size(); ++i) out << i << ',' << assignments[i] << '\n';
}

void write_labels_json_file(const std::string& path, const std::vector<std::string>& labels) {
  std::ofstream out = open_out(path);
  out << json(labels).dump(2) << '\n';
}

void save_checkpoint(const std::string& path, const InferenceNetwork& net, const RunConfig& config,
                     int horizon) {
  json params = json::object();
  for (const std::string& name : net.params.names())
    params[name] = matrix_to_json(net.params.at(name));
  const json doc{{"format_version", 1},
                 {"config", config_to_json(config)},
                 {"n_nodes", net.n_nodes},
                 {"n_attrs", net.n_attrs},
                 {"directed", net.directed},
                 {"horizon", horizon},
                 {"param_order", net.params.names()},
                 {"params", std::move(params)}};
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (doc.value("format_version", 0) != 1)
    throw std::runtime_error(path + ": unsupported checkpoint format version");
  Checkpoint ckpt;
  ckpt.config = config_from_json(doc.at("config"));
  ckpt.horizon = doc.at("horizon").get<int>();
  ckpt.net.n_nodes = doc.at("n_nodes").get<int>();
  ckpt.net.n_attrs = doc.at("n_attrs").get<int>();
  ckpt.net.directed = doc.at("directed").get<bool>();
  const auto& params = doc.at("params");
  for (const auto& name : doc.at("param_order")) {
    const std::string key = name.get<std::string>();
    ckpt.net.params.add(key, matrix_from_json(params.at(key)));
  }
  const Eigen::MatrixXd& h0 = ckpt.net.params.at("psi_mean.h0");
  if (h0.rows() != ckpt.net.n_nodes || h0.cols() != ckpt.net.n_attrs)
    throw std::runtime_error(path + ": parameter shapes disagree with the header fields");
  return ckpt;
}

}  // namespace dlaim
