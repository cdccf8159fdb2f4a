#include "readrank/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "readrank/error.hpp"
#include "readrank/rng.hpp"

namespace readrank {
namespace {

constexpr std::size_t kBootstrapBlock = 1000;

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

EvalReport ranking_accuracy_from_scores(const std::vector<PairRecord>& scored) {
  EvalReport r;
  r.n_pairs = scored.size();
  r.per_pair = scored;
  std::size_t correct = 0;
  for (auto& rec : r.per_pair) {
    rec.correct = rec.s_easy < rec.s_hard;
    if (rec.s_easy == rec.s_hard) ++r.ties;
    if (rec.correct) ++correct;
  }
  r.ranking_accuracy =
      r.n_pairs == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.n_pairs);
  return r;
}

EvalReport ranking_accuracy(const Scorer& scorer, const std::vector<ArticlePair>& pairs) {
  std::vector<PairRecord> scored;
  scored.reserve(pairs.size());
  for (const auto& p : pairs) {
    scored.push_back({p.pair_id, scorer(p.easy), scorer(p.hard), false});
  }
  EvalReport r = ranking_accuracy_from_scores(scored);
  if (!pairs.empty()) r.dataset = pairs.front().dataset;
  return r;
}

bool triple_correct(double s_easy, double s_medium, double s_hard) {
  return s_easy < s_medium && s_medium < s_hard;
}

EvalReport triple_ranking_accuracy(const Scorer& scorer,
                                   const std::vector<TripleRecord>& triples) {
  EvalReport r;
  r.n_pairs = triples.size();
  std::size_t correct = 0;
  for (const auto& t : triples) {
    const double e = scorer(t.easy);
    const double m = scorer(t.medium);
    const double h = scorer(t.hard);
    const bool ok = triple_correct(e, m, h);
    if (e == m || m == h || e == h) ++r.ties;
    if (ok) ++correct;
    r.per_pair.push_back({t.id, e, h, ok});
  }
  r.ranking_accuracy =
      r.n_pairs == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.n_pairs);
  return r;
}

BootstrapResult bootstrap_ci(std::span<const bool> outcomes, std::size_t resamples,
                             std::uint64_t seed, unsigned threads) {
  if (resamples == 0 || outcomes.empty()) {
    throw Error(ErrorCode::kInvalidRequest, "bootstrap needs n >= 1 and resamples >= 1");
  }
  const std::size_t n = outcomes.size();
  std::vector<double> accuracies(resamples);
  const std::size_t blocks = (resamples + kBootstrapBlock - 1) / kBootstrapBlock;

  const auto run_block = [&](std::size_t b) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(b));
    const std::size_t stop = std::min(resamples, (b + 1) * kBootstrapBlock);
    for (std::size_t r = b * kBootstrapBlock; r < stop; ++r) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) hits += outcomes[rng.uniform_index(n)] ? 1 : 0;
      accuracies[r] = static_cast<double>(hits) / static_cast<double>(n);
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
      });
    }
  }

  const double mean =
      std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / static_cast<double>(resamples);
  double ss = 0.0;
  for (double a : accuracies) ss += (a - mean) * (a - mean);
  BootstrapResult out;
  out.std = std::sqrt(ss / static_cast<double>(resamples));
  out.ci_2sd = 2.0 * out.std;
  return out;
}

void attach_bootstrap(EvalReport& report, std::size_t resamples, std::uint64_t seed,
                      unsigned threads) {
  if (report.per_pair.empty() || resamples == 0) return;
  const std::size_t n = report.per_pair.size();
  auto flags = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) flags[i] = report.per_pair[i].correct;
  const BootstrapResult b =
      bootstrap_ci(std::span<const bool>(flags.get(), n), resamples, seed, threads);
  report.bootstrap_std = b.std;
  report.ci_2sd = b.ci_2sd;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDegenerateData, "spearman inputs differ in length");
  }
  if (x.size() < 3) throw Error(ErrorCode::kDegenerateData, "spearman needs n >= 3");
  if (constant(x) || constant(y)) {
    throw Error(ErrorCode::kDegenerateData, "spearman input is constant");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  SpearmanResult out;
  out.rho = std::clamp(pearson(rx, ry), -1.0, 1.0);
  const double df = static_cast<double>(x.size()) - 2.0;
  const double denom = 1.0 - out.rho * out.rho;
  if (denom <= 0.0) {
    out.p_value = 0.0;
  } else {
    const double t = std::abs(out.rho) * std::sqrt(df / denom);
    boost::math::students_t_distribution<double> dist(df);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidRequest, "percentile of empty list");
  std::sort(values.begin(), values.end());
  const double pos = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

DistributionReport distribution_report(const std::vector<double>& scores,
                                       const std::string& language) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidRequest, "no scores for " + language);
  DistributionReport d;
  d.language = language;
  d.n = scores.size();
  d.p2_5 = percentile(scores, 0.025);
  d.p25 = percentile(scores, 0.25);
  d.median = percentile(scores, 0.5);
  d.p75 = percentile(scores, 0.75);
  d.p97_5 = percentile(scores, 0.975);
  return d;
}

ThresholdAnalysis score_threshold_analysis(std::span<const double> scores,
                                           std::span<const double> fkgl_values,
                                           std::span<const bool> is_hard) {
  const std::size_t n = scores.size();
  if (fkgl_values.size() != n || is_hard.size() != n) {
    throw Error(ErrorCode::kInvalidRequest, "threshold analysis inputs differ in length");
  }
  const auto n_hard = static_cast<std::size_t>(std::count(is_hard.begin(), is_hard.end(), true));
  const std::size_t n_easy = n - n_hard;
  if (n_hard == 0 || n_easy == 0) {
    throw Error(ErrorCode::kDegenerateData, "threshold analysis needs both labels");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Sweep: everything at or below the threshold is predicted easy.
  ThresholdAnalysis out;
  double best = -1.0;
  std::size_t easy_below = 0;
  std::size_t hard_below = 0;
  const auto consider = [&](double t) {
    const double tnr = static_cast<double>(easy_below) / static_cast<double>(n_easy);
    const double tpr =
        static_cast<double>(n_hard - hard_below) / static_cast<double>(n_hard);
    const double bal = 0.5 * (tnr + tpr);
    if (bal > best) {
      best = bal;
      out.best_separating_score = t;
    }
  };
  consider(scores[idx.front()] - 1.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) {
      (is_hard[idx[j]] ? hard_below : easy_below) += 1;
      ++j;
    }
    const double t = j < n ? 0.5 * (scores[idx[i]] + scores[idx[j]]) : scores[idx[i]] + 1.0;
    consider(t);
    i = j;
  }
  out.balanced_accuracy = best;

  const std::vector<double> all(scores.begin(), scores.end());
  const double eps = 0.05 * (percentile(all, 0.75) - percentile(all, 0.25));
  std::vector<double> window;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(scores[i] - out.best_separating_score) <= eps) window.push_back(fkgl_values[i]);
  }
  out.texts_in_window = window.size();
  if (window.empty()) {
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(scores[i] - out.best_separating_score) <
          std::abs(scores[nearest] - out.best_separating_score)) {
        nearest = i;
      }
    }
    out.fkgl_at_threshold = fkgl_values[nearest];
  } else {
    out.fkgl_at_threshold = percentile(window, 0.5);
  }
  return out;
}

LatencySummary latency_summary(const std::vector<double>& samples_ms) {
  LatencySummary s;
  s.n = samples_ms.size();
  if (samples_ms.empty()) return s;
  s.median_ms = percentile(samples_ms, 0.5);
  s.p75_ms = percentile(samples_ms, 0.75);
  s.p95_ms = percentile(samples_ms, 0.95);
  return s;
}

Json report_to_json(const EvalReport& r) {
  Json per_pair = Json::array();
  for (const auto& p : r.per_pair) {
    per_pair.push_back(Json{{"pair_id", p.pair_id},
                            {"s_easy", p.s_easy},
                            {"s_hard", p.s_hard},
                            {"correct", p.correct}});
  }
  return Json{{"dataset", r.dataset},
              {"scorer", r.scorer},
              {"n_pairs", r.n_pairs},
              {"ranking_accuracy", r.ranking_accuracy},
              {"bootstrap_std", r.bootstrap_std},
              {"ci_2sd", r.ci_2sd},
              {"ties", r.ties},
              {"per_pair", per_pair}};
}

Json distribution_to_json(const DistributionReport& d) {
  return Json{{"language", d.language}, {"n", d.n},         {"p2_5", d.p2_5},
              {"p25", d.p25},           {"median", d.median}, {"p75", d.p75},
              {"p97_5", d.p97_5}};
}

std::string summary_header() { return "dataset\tscorer\tra\tci_2sd\tn\tties\n"; }

std::string summary_row(const EvalReport& r) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed << r.dataset << '\t' << r.scorer << '\t' << r.ranking_accuracy << '\t'
      << r.ci_2sd << '\t' << r.n_pairs << '\t' << r.ties << '\n';
  return out.str();
}

}  // namespace readrank
