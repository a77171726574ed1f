#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dlaim/autodiff.hpp"
#include "dlaim/optimizer.hpp"

namespace dlaim {

/// GRU weights by role. Each matrix is (hidden x in) for the input path or
/// (hidden x hidden) for the recurrent path. The cell has no bias vectors.
/// h0 holds one learnable initial hidden state per row (independent
/// sequences share the weights).
struct GruParams {
  Eigen::MatrixXd update_x, update_h;  // update gate
  Eigen::MatrixXd reset_x, reset_h;    // reset gate
  Eigen::MatrixXd cand_x, cand_h;      // candidate state
  Eigen::MatrixXd h0;                  // (sequences x hidden)

  int hidden_dim() const { return static_cast<int>(update_h.rows()); }
  int input_dim() const { return static_cast<int>(update_x.cols()); }

  /// Weights uniform in [-init_range, init_range]; h0 zeros.
  static GruParams init(int hidden, int input, int sequences, std::mt19937_64& rng,
                        double init_range = 0.1);
};

/// Tape handles for one GRU's weights.
struct GruTensors {
  Tensor update_x, update_h, reset_x, reset_h, cand_x, cand_h;
};

/// Registers the six weight matrices and h0 under `prefix`.<role> names.
void register_gru(ParameterStore& store, const std::string& prefix, const GruParams& params);
GruParams gru_from_store(const ParameterStore& store, const std::string& prefix);

/// Stages the weights of a registered GRU onto the tape, recording the
/// (name, tensor) pairs for gradient readback.
GruTensors stage_gru(Tape& tape, const ParameterStore& store, const std::string& prefix,
                     std::vector<std::pair<std::string, Tensor>>& named);

/// One GRU step. Rows of h_prev/x are independent sequences:
///   update = sigmoid(x Wux^T + h Wuh^T)
///   reset  = sigmoid(x Wrx^T + h Wrh^T)
///   cand   = tanh(x Wcx^T + reset .* (h Wch^T))
///   h_next = update .* h_prev + (1 - update) .* cand
Tensor gru_step(Tape& tape, const GruTensors& w, Tensor h_prev, Tensor x);

/// Unrolls `steps` GRU steps from h0, one input per step; returns the hidden
/// state after each step (h^(1..steps)).
std::vector<Tensor> gru_unroll(Tape& tape, const GruTensors& w, Tensor h0,
                               const std::vector<Tensor>& inputs);

/// Zero-input unroll (the inference network's configuration).
std::vector<Tensor> gru_unroll_zero_input(Tape& tape, const GruTensors& w, Tensor h0,
                                          int steps, int input_dim);

}  // namespace dlaim
