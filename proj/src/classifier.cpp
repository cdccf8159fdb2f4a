#include "readrank/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "readrank/error.hpp"
#include "readrank/rng.hpp"

namespace readrank {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double FeatureClassifier::probability(std::span<const double> x) const {
  const std::vector<double> z = norm.apply(x);
  double s = bias;
  for (std::size_t k = 0; k < z.size(); ++k) s += weights[k] * z[k];
  return sigmoid(s);
}

FeatureClassifier train_classifier(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels,
                                   const ClassifierConfig& config) {
  if (rows.size() != labels.size() || rows.empty()) {
    throw Error(ErrorCode::kDegenerateData, "classifier needs labelled rows");
  }
  const bool all_same = std::all_of(labels.begin(), labels.end(),
                                    [&](int y) { return y == labels.front(); });
  if (all_same) throw Error(ErrorCode::kDegenerateData, "all labels are identical");

  FeatureClassifier model;
  model.norm = Standardizer::fit(rows);
  const std::size_t d = model.norm.dimension();
  std::vector<std::vector<double>> z;
  z.reserve(rows.size());
  for (const auto& r : rows) z.push_back(model.norm.apply(r));
  model.weights.assign(d, 0.0);

  Rng rng = Rng::substream(config.seed, "classifier");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = config.batch_size == 0 ? rows.size() : config.batch_size;
  std::vector<double> grad(d);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_bias = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const auto& x = z[order[b]];
        double s = model.bias;
        for (std::size_t k = 0; k < d; ++k) s += model.weights[k] * x[k];
        const double err = sigmoid(s) - labels[order[b]];
        for (std::size_t k = 0; k < d; ++k) grad[k] += err * x[k];
        grad_bias += err;
      }
      const double scale = config.learning_rate / static_cast<double>(stop - start);
      for (std::size_t k = 0; k < d; ++k) {
        model.weights[k] -= scale * grad[k] + config.learning_rate * config.l2 * model.weights[k];
      }
      model.bias -= scale * grad_bias;
    }
  }
  return model;
}

FeatureClassifier train_feature_classifier(const std::vector<ArticlePair>& train_pairs,
                                           const ClassifierConfig& config) {
  if (train_pairs.size() < 2) {
    throw Error(ErrorCode::kDegenerateData, "classifier needs at least 2 pairs");
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (const auto& p : train_pairs) {
    rows.push_back(featurize(p.easy).to_vector());
    labels.push_back(0);
    rows.push_back(featurize(p.hard).to_vector());
    labels.push_back(1);
  }
  return train_classifier(rows, labels, config);
}

double classify(const FeatureClassifier& model, const FeatureVector& x) {
  return model.probability(x.values);
}

Json classifier_to_json(const FeatureClassifier& model) {
  return Json{{"kind", "logistic"},
              {"feature_set", kFeatureSetVersion},
              {"norm_mean", model.norm.mean},
              {"norm_std", model.norm.std},
              {"weights", model.weights},
              {"bias", model.bias}};
}

FeatureClassifier classifier_from_json(const Json& j) {
  FeatureClassifier m;
  m.norm.mean = j.at("norm_mean").get<std::vector<double>>();
  m.norm.std = j.at("norm_std").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  if (m.norm.mean.size() != m.weights.size() || m.norm.std.size() != m.weights.size()) {
    throw Error(ErrorCode::kFormat, "classifier shapes disagree");
  }
  return m;
}

}  // namespace readrank
