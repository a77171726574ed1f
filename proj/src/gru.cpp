#include "dlaim/gru.hpp"

#include <stdexcept>

#include "dlaim/rng.hpp"

namespace dlaim {

GruParams GruParams::init(int hidden, int input, int sequences, std::mt19937_64& rng,
                          double init_range) {
  GruParams p;
  p.update_x = random_uniform_matrix(rng, hidden, input, -init_range, init_range);
  p.update_h = random_uniform_matrix(rng, hidden, hidden, -init_range, init_range);
  p.reset_x = random_uniform_matrix(rng, hidden, input, -init_range, init_range);
  p.reset_h = random_uniform_matrix(rng, hidden, hidden, -init_range, init_range);
  p.cand_x = random_uniform_matrix(rng, hidden, input, -init_range, init_range);
  p.cand_h = random_uniform_matrix(rng, hidden, hidden, -init_range, init_range);
  p.h0 = Eigen::MatrixXd::Zero(sequences, hidden);
  return p;
}

void register_gru(ParameterStore& store, const std::string& prefix, const GruParams& params) {
  store.add(prefix + ".update_x", params.update_x);
  store.add(prefix + ".update_h", params.update_h);
  store.add(prefix + ".reset_x", params.reset_x);
  store.add(prefix + ".reset_h", params.reset_h);
  store.add(prefix + ".cand_x", params.cand_x);
  store.add(prefix + ".cand_h", params.cand_h);
  store.add(prefix + ".h0", params.h0);
}

GruParams gru_from_store(const ParameterStore& store, const std::string& prefix) {
  GruParams p;
  p.update_x = store.at(prefix + ".update_x");
  p.update_h = store.at(prefix + ".update_h");
  p.reset_x = store.at(prefix + ".reset_x");
  p.reset_h = store.at(prefix + ".reset_h");
  p.cand_x = store.at(prefix + ".cand_x");
  p.cand_h = store.at(prefix + ".cand_h");
  p.h0 = store.at(prefix + ".h0");
  return p;
}

GruTensors stage_gru(Tape& tape, const ParameterStore& store, const std::string& prefix,
                     std::vector<std::pair<std::string, Tensor>>& named) {
  auto stage = [&](const std::string& suffix) {
    const std::string name = prefix + suffix;
    Tensor t = tape.leaf(store.at(name));
    named.emplace_back(name, t);
    return t;
  };
  GruTensors w;
  w.update_x = stage(".update_x");
  w.update_h = stage(".update_h");
  w.reset_x = stage(".reset_x");
  w.reset_h = stage(".reset_h");
  w.cand_x = stage(".cand_x");
  w.cand_h = stage(".cand_h");
  return w;
}

Tensor gru_step(Tape& tape, const GruTensors& w, Tensor h_prev, Tensor x) {
  Tensor update = tape.sigmoid(tape.add(tape.linear(x, w.update_x), tape.linear(h_prev, w.update_h)));
  Tensor reset = tape.sigmoid(tape.add(tape.linear(x, w.reset_x), tape.linear(h_prev, w.reset_h)));
  Tensor cand = tape.tanh(
      tape.add(tape.linear(x, w.cand_x), tape.mul(reset, tape.linear(h_prev, w.cand_h))));
  Tensor keep = tape.mul(update, h_prev);
  Tensor blend = tape.mul(tape.add_const(tape.scale(update, -1.0), 1.0), cand);
  return tape.add(keep, blend);
}

std::vector<Tensor> gru_unroll(Tape& tape, const GruTensors& w, Tensor h0,
                               const std::vector<Tensor>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("gru_unroll: need at least one step");
  std::vector<Tensor> hidden;
  hidden.reserve(inputs.size());
  Tensor h = h0;
  for (const Tensor& x : inputs) {
    h = gru_step(tape, w, h, x);
    hidden.push_back(h);
  }
  return hidden;
}

std::vector<Tensor> gru_unroll_zero_input(Tape& tape, const GruTensors& w, Tensor h0,
                                          int steps, int input_dim) {
  if (steps < 1) throw std::invalid_argument("gru_unroll_zero_input: steps must be >= 1");
  const int rows = static_cast<int>(tape.value(h0).rows());
  Tensor x = tape.zeros(rows, input_dim);
  std::vector<Tensor> inputs(static_cast<std::size_t>(steps), x);
  return gru_unroll(tape, w, h0, inputs);
}

}  // namespace dlaim
