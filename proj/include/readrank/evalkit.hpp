#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "readrank/corpus.hpp"
#include "readrank/json.hpp"

namespace readrank {

// Any function mapping a text to a difficulty score (higher = harder).
using Scorer = std::function<double(const ArticleText&)>;

struct PairRecord {
  std::string pair_id;
  double s_easy = 0.0;
  double s_hard = 0.0;
  bool correct = false;
};

struct EvalReport {
  std::string dataset;
  std::string scorer;
  std::size_t n_pairs = 0;
  double ranking_accuracy = 0.0;
  double bootstrap_std = 0.0;
  double ci_2sd = 0.0;
  std::size_t ties = 0;
  std::vector<PairRecord> per_pair;
};

// Correct iff score(easy) < score(hard); exact ties count as incorrect.
EvalReport ranking_accuracy(const Scorer& scorer, const std::vector<ArticlePair>& pairs);
EvalReport ranking_accuracy_from_scores(const std::vector<PairRecord>& scored);

struct TripleRecord {
  std::string id;
  ArticleText easy;
  ArticleText medium;
  ArticleText hard;
};

// Correct iff s_easy < s_medium < s_hard.
EvalReport triple_ranking_accuracy(const Scorer& scorer,
                                   const std::vector<TripleRecord>& triples);
bool triple_correct(double s_easy, double s_medium, double s_hard);

struct BootstrapResult {
  double std = 0.0;
  double ci_2sd = 0.0;
};

// Resamples n outcomes with replacement. Work is cut into fixed blocks,
// each drawing from its own (seed, block) substream, so the result does
// not depend on `threads`.
BootstrapResult bootstrap_ci(std::span<const bool> per_pair_correct,
                             std::size_t resamples = 10000, std::uint64_t seed = 0,
                             unsigned threads = 1);

void attach_bootstrap(EvalReport& report, std::size_t resamples, std::uint64_t seed,
                      unsigned threads = 1);

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, Student-t approximation
};

// Errors: kDegenerateData for n < 3, unequal lengths or a constant input.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

// Linear interpolation between order statistics, position (n - 1) * q.
double percentile(std::vector<double> values, double q);

struct DistributionReport {
  std::string language;
  std::size_t n = 0;
  double p2_5 = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double p97_5 = 0.0;
};

DistributionReport distribution_report(const std::vector<double>& scores,
                                       const std::string& language);

struct ThresholdAnalysis {
  double best_separating_score = 0.0;
  double balanced_accuracy = 0.0;
  double fkgl_at_threshold = 0.0;
  std::size_t texts_in_window = 0;
};

// labels: true = hard. Picks the threshold (score > t means hard) that
// maximizes balanced accuracy, then reports the median FKGL of texts whose
// score lies within 5% of the score IQR from it.
ThresholdAnalysis score_threshold_analysis(std::span<const double> scores,
                                           std::span<const double> fkgl_values,
                                           std::span<const bool> is_hard);

struct LatencySummary {
  std::size_t n = 0;
  double median_ms = 0.0;
  double p75_ms = 0.0;
  double p95_ms = 0.0;
};

LatencySummary latency_summary(const std::vector<double>& samples_ms);

Json report_to_json(const EvalReport& report);
Json distribution_to_json(const DistributionReport& report);
// Tab-separated: dataset, scorer, ra, ci_2sd, n, ties.
std::string summary_header();
std::string summary_row(const EvalReport& report);

}  // namespace readrank
