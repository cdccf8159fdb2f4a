#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "readrank/rng.hpp"

namespace readrank {

// Scalar-output scorer: input -> [tanh hidden layer] -> one real.
// Parameters live in one flat buffer laid out layer by layer as
// (row-major weights, bias).
class ScoringNetwork {
 public:
  ScoringNetwork() = default;
  ScoringNetwork(std::size_t inputs, std::size_t hidden);

  // Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static ScoringNetwork initialized(std::size_t inputs, std::size_t hidden, Rng& rng);

  double forward(std::span<const double> x) const;

  // Adds upstream * d(forward(x))/d(params) into `grad`.
  void accumulate_gradient(std::span<const double> x, double upstream,
                           std::span<double> grad) const;

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t layer_count() const { return hidden_ == 0 ? 1 : 2; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  struct LayerView {
    std::size_t in;
    std::size_t out;
    std::span<const double> weights;
    std::span<const double> bias;
  };
  LayerView layer(std::size_t index) const;
  void set_layer(std::size_t index, std::span<const double> weights,
                 std::span<const double> bias);

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> params_;
};

}  // namespace readrank
