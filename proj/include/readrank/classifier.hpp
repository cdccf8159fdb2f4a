#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "readrank/corpus.hpp"
#include "readrank/features.hpp"
#include "readrank/json.hpp"

namespace readrank {

struct ClassifierConfig {
  int epochs = 200;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
};

// Logistic model over standardized features; probability of "hard".
struct FeatureClassifier {
  Standardizer norm;
  std::vector<double> weights;
  double bias = 0.0;

  double probability(std::span<const double> x) const;
};

// labels: 1 = hard, 0 = easy. Errors: kDegenerateData if all labels agree.
FeatureClassifier train_classifier(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels,
                                   const ClassifierConfig& config = {});

// Each pair contributes one easy and one hard example.
FeatureClassifier train_feature_classifier(const std::vector<ArticlePair>& train_pairs,
                                           const ClassifierConfig& config = {});

double classify(const FeatureClassifier& model, const FeatureVector& x);

Json classifier_to_json(const FeatureClassifier& model);
FeatureClassifier classifier_from_json(const Json& j);

}  // namespace readrank
