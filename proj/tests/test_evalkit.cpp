#include <doctest.h>

#include <array>
#include <cmath>
#include <map>

#include "readrank/error.hpp"
#include "readrank/evalkit.hpp"
#include "readrank/rng.hpp"

using namespace readrank;

namespace {

ArticleText titled(const std::string& title) {
  ArticleText t;
  t.title = title;
  return t;
}

// Pairs whose scores are looked up by title.
struct ScoredFixture {
  std::vector<ArticlePair> pairs;
  std::map<std::string, double> scores;

  void add(double easy, double hard) {
    const std::string id = std::to_string(pairs.size());
    ArticlePair p;
    p.pair_id = id;
    p.dataset = "fixture";
    p.easy = titled("e" + id);
    p.hard = titled("h" + id);
    scores[p.easy.title] = easy;
    scores[p.hard.title] = hard;
    pairs.push_back(p);
  }

  Scorer scorer() const {
    return [this](const ArticleText& t) { return scores.at(t.title); };
  }
};

std::unique_ptr<bool[]> outcomes(std::size_t n, std::size_t correct) {
  auto out = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i < correct;
  return out;
}

}  // namespace

TEST_CASE("ranking accuracy counts strict orderings") {
  ScoredFixture f;
  for (int i = 0; i < 9; ++i) f.add(0.0, 1.0);
  f.add(1.0, 0.0);
  const auto r = ranking_accuracy(f.scorer(), f.pairs);
  CHECK(r.ranking_accuracy == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(r.n_pairs == 10);
  CHECK(r.ties == 0);
  CHECK(r.dataset == "fixture");
  CHECK(r.per_pair.size() == 10);
  CHECK(!r.per_pair[9].correct);
}

TEST_CASE("ties count as incorrect") {
  ScoredFixture f;
  for (int i = 0; i < 7; ++i) f.add(0.0, 1.0);
  const auto constant = [](const ArticleText&) { return 4.2; };
  const auto r = ranking_accuracy(constant, f.pairs);
  CHECK(r.ranking_accuracy == 0.0);
  CHECK(r.ties == 7);
}

TEST_CASE("property: RA is invariant under increasing transforms") {
  Rng rng(2);
  ScoredFixture f;
  for (int i = 0; i < 300; ++i) f.add(rng.normal(), rng.normal() + 0.5);
  const double base = ranking_accuracy(f.scorer(), f.pairs).ranking_accuracy;
  const Scorer s = f.scorer();
  CHECK(ranking_accuracy([&](const ArticleText& t) { return std::exp(s(t)); }, f.pairs)
            .ranking_accuracy == base);
  CHECK(ranking_accuracy([&](const ArticleText& t) { return 2.5 * s(t) + 10; }, f.pairs)
            .ranking_accuracy == base);
  CHECK(ranking_accuracy([&](const ArticleText& t) { return std::atan(s(t)); }, f.pairs)
            .ranking_accuracy == base);
}

TEST_CASE("triple ranking accuracy") {
  CHECK(triple_correct(1, 2, 3));
  CHECK(!triple_correct(1, 3, 2));
  CHECK(!triple_correct(1, 1, 2));

  // Hand-enumerated: rows marked + are strictly increasing (11 of 20).
  const std::array<std::array<double, 3>, 20> rows = {{
      {1, 2, 3},        // +
      {1, 3, 2},        //
      {2, 1, 3},        //
      {0, 0.5, 1},      // +
      {1, 1, 2},        //
      {3, 2, 1},        //
      {-1, 0, 1},       // +
      {0.1, 0.2, 0.3},  // +
      {5, 6, 7},        // +
      {2, 2, 2},        //
      {1, 2, 2},        //
      {0, 10, 5},       //
      {-3, -2, -1},     // +
      {4, 5, 6},        // +
      {7, 5, 6},        //
      {1, 5, 9},        // +
      {9, 5, 1},        //
      {0, 0.5, 1},      // +
      {0.5, 0.6, 0.7},  // +
      {2, 3, 4},        // +
  }};
  std::map<std::string, double> scores;
  std::vector<TripleRecord> triples;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string id = std::to_string(i);
    triples.push_back({id, titled("e" + id), titled("m" + id), titled("h" + id)});
    scores["e" + id] = rows[i][0];
    scores["m" + id] = rows[i][1];
    scores["h" + id] = rows[i][2];
  }
  const auto r = triple_ranking_accuracy([&](const ArticleText& t) { return scores.at(t.title); },
                                         triples);
  CHECK(r.ranking_accuracy == doctest::Approx(11.0 / 20.0).epsilon(1e-15));
}

TEST_CASE("bootstrap examples") {
  const auto all = outcomes(50, 50);
  const auto b0 = bootstrap_ci({all.get(), 50}, 1000, 3);
  CHECK(b0.std == 0.0);
  CHECK(b0.ci_2sd == 0.0);

  const auto o = outcomes(1000, 900);
  const auto b = bootstrap_ci({o.get(), 1000}, 10000, 0);
  const double binomial = std::sqrt(0.9 * 0.1 / 1000);
  MESSAGE("bootstrap std " << b.std << " vs binomial " << binomial);
  CHECK(std::abs(b.std - binomial) / binomial < 0.10);
  CHECK(b.ci_2sd == 2 * b.std);

  const auto again = bootstrap_ci({o.get(), 1000}, 10000, 0);
  CHECK(again.std == b.std);
  const auto threaded = bootstrap_ci({o.get(), 1000}, 10000, 0, 4);
  CHECK(threaded.std == b.std);
  CHECK(bootstrap_ci({o.get(), 1000}, 10000, 1).std != b.std);
}

TEST_CASE("property: bootstrap std approaches the binomial value") {
  for (const auto& [n, correct] : std::vector<std::pair<std::size_t, std::size_t>>{
           {500, 250}, {500, 400}, {800, 720}, {2000, 1300}}) {
    const auto o = outcomes(n, correct);
    const double p = static_cast<double>(correct) / n;
    const double binomial = std::sqrt(p * (1 - p) / n);
    const auto b = bootstrap_ci({o.get(), n}, 10000, n);
    CAPTURE(n);
    CHECK(std::abs(b.std - binomial) / binomial < 0.10);
  }
}

TEST_CASE("spearman examples") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(spearman(x, x).rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}).rho == doctest::Approx(-1.0).epsilon(1e-15));
  const auto r = spearman(x, std::vector<double>{1, 3, 2, 5, 4});
  CHECK(r.rho == doctest::Approx(0.8).epsilon(1e-12));
  // Two-sided t-approximation with df = 3.
  CHECK(r.p_value == doctest::Approx(0.104088038661828).epsilon(1e-9));

  const auto tied = spearman(std::vector<double>{1, 2, 2, 3, 4, 5, 6, 7},
                             std::vector<double>{2, 1, 3, 3, 5, 4, 8, 7});
  CHECK(tied.rho == doctest::Approx(0.8975903614457831).epsilon(1e-12));
  CHECK(tied.p_value == doctest::Approx(0.0024831006891330196).epsilon(1e-8));
}

TEST_CASE("spearman errors") {
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("property: spearman of x with itself and its negation") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x;
    const auto n = 3 + rng.uniform_index(50);
    for (std::uint64_t i = 0; i < n; ++i) x.push_back(std::round(rng.normal() * 3));
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(spearman(x, x).rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spearman(x, neg).rho == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("average ranks") {
  CHECK(average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("percentiles and distribution reports") {
  const auto d = distribution_report({1, 2, 3, 4, 5}, "en");
  CHECK(d.median == 3.0);
  CHECK(d.p25 == 2.0);
  CHECK(d.p75 == 4.0);
  CHECK(d.p2_5 == doctest::Approx(1.1));
  CHECK(d.p97_5 == doctest::Approx(4.9));

  const auto c = distribution_report({7, 7, 7}, "de");
  CHECK(c.p2_5 == 7.0);
  CHECK(c.p97_5 == 7.0);
  CHECK(c.median == 7.0);

  Rng rng(0);
  std::vector<double> normal;
  for (int i = 0; i < 10000; ++i) normal.push_back(rng.normal());
  CHECK(std::abs(distribution_report(normal, "xx").median) < 0.05);

  CHECK_THROWS_AS(distribution_report({}, "en"), Error);
  CHECK(percentile({4.0}, 0.3) == 4.0);
}

TEST_CASE("property: percentile monotonicity") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v;
    const auto n = 1 + rng.uniform_index(100);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(rng.normal() * 10);
    const auto d = distribution_report(v, "x");
    CHECK(d.p2_5 <= d.p25);
    CHECK(d.p25 <= d.median);
    CHECK(d.median <= d.p75);
    CHECK(d.p75 <= d.p97_5);
  }
}

TEST_CASE("score threshold analysis") {
  SUBCASE("perfectly separated scores") {
    const std::vector<double> scores = {-3, -2, -1.5, -0.2, 0.4, 1, 2.5};
    const std::vector<double> fk = {3, 4, 5, 6, 9, 11, 12};
    const auto hard = std::make_unique<bool[]>(7);
    for (int i = 4; i < 7; ++i) hard[i] = true;
    const auto t = score_threshold_analysis(scores, fk, {hard.get(), 7});
    CHECK(t.best_separating_score > -0.2);
    CHECK(t.best_separating_score < 0.4);
    CHECK(t.balanced_accuracy == 1.0);
  }
  SUBCASE("noisy scores around a known boundary") {
    // Labels follow the sign of the latent score minus 2.0; scores are
    // latent plus small noise, so the recovered boundary is near 2.0.
    Rng rng(3);
    std::vector<double> scores;
    std::vector<double> fk;
    std::vector<char> labels;
    for (int i = 0; i < 2000; ++i) {
      const double latent = rng.uniform(-2, 6);
      scores.push_back(latent + 0.05 * rng.normal());
      fk.push_back(9.0 + latent - 2.0);
      labels.push_back(latent > 2.0);
    }
    const auto hard = std::make_unique<bool[]>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) hard[i] = labels[i];
    const auto t = score_threshold_analysis(scores, fk, {hard.get(), labels.size()});
    CHECK(std::abs(t.best_separating_score - 2.0) <= 0.1);
    CHECK(t.texts_in_window > 0);
    CHECK(std::abs(t.fkgl_at_threshold - 9.0) < 0.5);
  }
  SUBCASE("one class is degenerate") {
    const std::vector<double> scores = {1, 2};
    const std::vector<double> fk = {1, 2};
    const bool hard[2] = {true, true};
    CHECK_THROWS_AS(score_threshold_analysis(scores, fk, hard), Error);
  }
}

TEST_CASE("latency summaries") {
  const auto one = latency_summary({12.5});
  CHECK(one.median_ms == 12.5);
  CHECK(one.p95_ms == 12.5);
  const auto same = latency_summary({3, 3, 3, 3});
  CHECK(same.p75_ms == same.median_ms);
  CHECK(same.p95_ms == same.median_ms);
}

TEST_CASE("report formats") {
  ScoredFixture f;
  f.add(0, 1);
  f.add(1, 1);
  auto r = ranking_accuracy(f.scorer(), f.pairs);
  r.scorer = "ns";
  const Json j = report_to_json(r);
  CHECK(j.dump().rfind(R"({"dataset":"fixture","scorer":"ns","n_pairs":2,"ranking_accuracy":0.5,)", 0) == 0);
  CHECK(j["per_pair"][1].dump() == R"({"pair_id":"1","s_easy":1.0,"s_hard":1.0,"correct":false})");
  CHECK(summary_header() == "dataset\tscorer\tra\tci_2sd\tn\tties\n");
  CHECK(summary_row(r) == "fixture\tns\t0.5000\t0.0000\t2\t1\n");
}
