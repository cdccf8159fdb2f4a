#include "readrank/network.hpp"

#include <algorithm>
#include <cmath>

#include "readrank/error.hpp"

namespace readrank {

ScoringNetwork::ScoringNetwork(std::size_t inputs, std::size_t hidden)
    : inputs_(inputs), hidden_(hidden) {
  const std::size_t n = hidden == 0 ? inputs + 1 : hidden * inputs + hidden + hidden + 1;
  params_.assign(n, 0.0);
}

ScoringNetwork ScoringNetwork::initialized(std::size_t inputs, std::size_t hidden,
                                           Rng& rng) {
  ScoringNetwork net(inputs, hidden);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const LayerView v = net.layer(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(v.in));
    const std::size_t offset = static_cast<std::size_t>(v.weights.data() - net.params_.data());
    const std::size_t count = v.weights.size() + v.bias.size();
    for (std::size_t k = 0; k < count; ++k) {
      net.params_[offset + k] = rng.uniform(-bound, bound);
    }
  }
  return net;
}

ScoringNetwork::LayerView ScoringNetwork::layer(std::size_t index) const {
  const double* p = params_.data();
  if (hidden_ == 0) {
    return {inputs_, 1, {p, inputs_}, {p + inputs_, 1}};
  }
  if (index == 0) {
    return {inputs_, hidden_, {p, hidden_ * inputs_}, {p + hidden_ * inputs_, hidden_}};
  }
  const double* q = p + hidden_ * inputs_ + hidden_;
  return {hidden_, 1, {q, hidden_}, {q + hidden_, 1}};
}

void ScoringNetwork::set_layer(std::size_t index, std::span<const double> weights,
                               std::span<const double> bias) {
  const LayerView v = layer(index);
  if (weights.size() != v.weights.size() || bias.size() != v.bias.size()) {
    throw Error(ErrorCode::kFormat, "layer " + std::to_string(index) + " shape mismatch");
  }
  const auto w_off = v.weights.data() - params_.data();
  const auto b_off = v.bias.data() - params_.data();
  std::copy(weights.begin(), weights.end(), params_.begin() + w_off);
  std::copy(bias.begin(), bias.end(), params_.begin() + b_off);
}

double ScoringNetwork::forward(std::span<const double> x) const {
  const double* p = params_.data();
  if (hidden_ == 0) {
    double s = p[inputs_];
    for (std::size_t k = 0; k < inputs_; ++k) s += p[k] * x[k];
    return s;
  }
  const double* w1 = p;
  const double* b1 = p + hidden_ * inputs_;
  const double* w2 = b1 + hidden_;
  double s = w2[hidden_];
  for (std::size_t j = 0; j < hidden_; ++j) {
    double a = b1[j];
    const double* row = w1 + j * inputs_;
    for (std::size_t k = 0; k < inputs_; ++k) a += row[k] * x[k];
    s += w2[j] * std::tanh(a);
  }
  return s;
}

void ScoringNetwork::accumulate_gradient(std::span<const double> x, double upstream,
                                         std::span<double> grad) const {
  const double* p = params_.data();
  double* g = grad.data();
  if (hidden_ == 0) {
    for (std::size_t k = 0; k < inputs_; ++k) g[k] += upstream * x[k];
    g[inputs_] += upstream;
    return;
  }
  const double* w1 = p;
  const double* b1 = p + hidden_ * inputs_;
  const double* w2 = b1 + hidden_;
  double* gw1 = g;
  double* gb1 = g + hidden_ * inputs_;
  double* gw2 = gb1 + hidden_;
  for (std::size_t j = 0; j < hidden_; ++j) {
    double a = b1[j];
    const double* row = w1 + j * inputs_;
    for (std::size_t k = 0; k < inputs_; ++k) a += row[k] * x[k];
    const double h = std::tanh(a);
    gw2[j] += upstream * h;
    const double da = upstream * w2[j] * (1.0 - h * h);
    gb1[j] += da;
    double* grow = gw1 + j * inputs_;
    for (std::size_t k = 0; k < inputs_; ++k) grow[k] += da * x[k];
  }
  gw2[hidden_] += upstream;
}

}  // namespace readrank
