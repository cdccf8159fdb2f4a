#include <doctest.h>

#include <cmath>
#include <numbers>

#include "readrank/error.hpp"
#include "readrank/evalkit.hpp"
#include "readrank/ranker.hpp"
#include "readrank/rng.hpp"
#include "readrank/synthetic.hpp"

using namespace readrank;

namespace {

double oracle_loss(double s1, double s2, int y, double m) {
  const double v = -y * (s1 - s2) + m;
  return v > 0 ? v : 0.0;
}

std::vector<RankedPairExample> random_examples(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<RankedPairExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    RankedPairExample ex;
    for (std::size_t k = 0; k < d; ++k) {
      ex.x_easy.push_back(rng.normal());
      ex.x_hard.push_back(rng.normal());
    }
    out.push_back(ex);
  }
  return out;
}

double total_loss(const ScoringNetwork& net, const std::vector<RankedPairExample>& ex,
                  double m) {
  double t = 0;
  for (const auto& e : ex) t += margin_ranking_loss(net.forward(e.x_hard), net.forward(e.x_easy), e.y, m);
  return t / ex.size();
}

double min_kink_distance(const ScoringNetwork& net, const std::vector<RankedPairExample>& ex,
                         double m) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : ex) {
    d = std::min(d, std::abs(-e.y * (net.forward(e.x_hard) - net.forward(e.x_easy)) + m));
  }
  return d;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

double angle_degrees(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::acos(std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

Scorer scorer_of(const ScorerModel& m) {
  return [&m](const ArticleText& t) { return score(m, t); };
}

}  // namespace

TEST_CASE("margin ranking loss examples") {
  CHECK(margin_ranking_loss(1.0, 0.0, +1, 0.5) == 0.0);
  CHECK(margin_ranking_loss(0.2, 0.2, +1, 0.5) == 0.5);
  CHECK(margin_ranking_loss(0.0, 1.0, +1, 0.5) == 1.5);
  CHECK(margin_ranking_loss(0.0, 1.0, -1, 0.5) == 0.0);
}

TEST_CASE("loss matches the formula on a grid") {
  for (double s1 = -3; s1 <= 3; s1 += 0.25) {
    for (double s2 = -3; s2 <= 3; s2 += 0.25) {
      for (int y : {-1, 1}) {
        for (double m : {0.0, 0.1, 0.5, 1.0, 2.0}) {
          CHECK(std::abs(margin_ranking_loss(s1, s2, y, m) - oracle_loss(s1, s2, y, m)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: loss nonnegative, zero iff ordered beyond margin, shift invariant") {
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const double s1 = rng.uniform(-5, 5);
    const double s2 = rng.uniform(-5, 5);
    const int y = rng.uniform_index(2) ? 1 : -1;
    const double m = rng.uniform(0, 2);
    const double l = margin_ranking_loss(s1, s2, y, m);
    CHECK(l >= 0.0);
    CHECK((l == 0.0) == (y * (s1 - s2) >= m));
    const double c = rng.uniform(-100, 100);
    CHECK(std::abs(margin_ranking_loss(s1 + c, s2 + c, y, m) - l) < 1e-9);
  }
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(10);
  for (std::size_t hidden : {0u, 4u, 16u}) {
    CAPTURE(hidden);
    int checked = 0;
    for (int trial = 0; trial < 10 && checked < 5; ++trial) {
      ScoringNetwork net = ScoringNetwork::initialized(14, hidden, rng);
      const auto ex = random_examples(rng, 24, 14);
      const double m = 0.5;
      const double h = 1e-6;
      if (min_kink_distance(net, ex, m) < 1e-3) continue;
      const auto analytic = batch_loss_and_gradient(net, ex, m);
      CHECK(std::abs(analytic.loss - total_loss(net, ex, m)) < 1e-12);
      double diff2 = 0.0;
      double a2 = 0.0;
      double fd2 = 0.0;
      for (std::size_t k = 0; k < net.parameter_count(); ++k) {
        const double saved = net.parameters()[k];
        net.parameters()[k] = saved + h;
        const double up = total_loss(net, ex, m);
        net.parameters()[k] = saved - h;
        const double down = total_loss(net, ex, m);
        net.parameters()[k] = saved;
        const double fd = (up - down) / (2 * h);
        const double a = analytic.gradient[k];
        diff2 += (a - fd) * (a - fd);
        a2 += a * a;
        fd2 += fd * fd;
      }
      const double rel = std::sqrt(diff2) / std::max(std::sqrt(a2), std::sqrt(fd2));
      CHECK(rel < 1e-4);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("hinge subgradient at the kink is zero") {
  ScoringNetwork net(1, 0);
  net.set_layer(0, std::vector<double>{1.0}, std::vector<double>{0.0});
  // s_hard - s_easy = 0.5 = m exactly.
  const std::vector<RankedPairExample> ex = {{{0.0}, {0.5}, +1}};
  const auto lg = batch_loss_and_gradient(net, ex, 0.5);
  CHECK(lg.loss == 0.0);
  CHECK(lg.gradient == std::vector<double>{0.0, 0.0});
}

TEST_CASE("hand-evaluated forward pass") {
  ScorerModel m;
  m.feature_names = {"a", "b"};
  m.norm.mean = {1.0, 2.0};
  m.norm.std = {2.0, 4.0};
  m.network = ScoringNetwork(2, 2);
  m.network.set_layer(0, std::vector<double>{0.5, -1.0, 1.0, 2.0}, std::vector<double>{0.1, -0.2});
  m.network.set_layer(1, std::vector<double>{1.5, -0.5}, std::vector<double>{0.25});
  // z = ((3-1)/2, (6-2)/4) = (1, 1); hidden pre-activations -0.4 and 2.8.
  const double expected = 1.5 * std::tanh(-0.4) - 0.5 * std::tanh(2.8) + 0.25;
  CHECK(std::abs(m.score_features(std::vector<double>{3.0, 6.0}) - expected) < 1e-15);
  CHECK(std::abs(expected - (-0.816240)) < 1e-5);
}

TEST_CASE("zero-weight model scores zero; sentence mode on one sentence matches document mode") {
  const auto pairs = synthetic_pairs(30, 1);
  TrainConfig c;
  c.epochs = 3;
  ScorerModel doc = train(pairs, c);
  ScorerModel zero = doc;
  for (double& p : zero.network.parameters()) p = 0.0;
  CHECK(score(zero, pairs[0].hard) == 0.0);

  ScorerModel sent = doc;
  sent.mode = ScorerMode::kSentence;
  const ArticleText one = make_article_text("x", "en", Source::kOther, "A single plain sentence here.");
  CHECK(score(sent, one) == score(doc, one));
}

TEST_CASE("property: duplicating every sentence leaves a sentence-mode score unchanged") {
  SyntheticOptions o;
  o.derived_share = 0.5;
  const auto pairs = synthetic_pairs(60, 3, o);
  TrainConfig c;
  c.mode = ScorerMode::kSentence;
  c.epochs = 5;
  const ScorerModel m = train(pairs, c);
  for (const auto& p : pairs) {
    ArticleText doubled = p.hard;
    doubled.sentences.insert(doubled.sentences.end(), p.hard.sentences.begin(),
                             p.hard.sentences.end());
    CHECK(score(m, doubled) == doctest::Approx(score(m, p.hard)).epsilon(1e-12));
  }
}

TEST_CASE("separable toy corpus is ranked perfectly after training") {
  const auto pairs = synthetic_pairs(300, 5);
  const auto split = split_train_test(pairs, 0.8, 5);
  for (ScorerMode mode : {ScorerMode::kDocument, ScorerMode::kSentence}) {
    TrainConfig c;
    c.mode = mode;
    c.seed = 5;
    SyntheticOptions o;
    o.derived_share = 0.5;
    const auto train_pairs = mode == ScorerMode::kSentence ? synthetic_pairs(300, 6, o) : split.train;
    const ScorerModel m = train(train_pairs, c);
    CAPTURE(mode_name(mode));
    CHECK(ranking_accuracy(scorer_of(m), split.test).ranking_accuracy == 1.0);
  }
}

TEST_CASE("training is deterministic given a seed") {
  const auto pairs = synthetic_pairs(120, 8);
  TrainConfig c;
  c.seed = 99;
  c.epochs = 8;
  const ScorerModel a = train(pairs, c);
  const ScorerModel b = train(pairs, c);
  CHECK(a.meta.loss_curve == b.meta.loss_curve);
  CHECK(a.meta.val_loss_curve == b.meta.val_loss_curve);
  CHECK(model_to_json(a).dump() == model_to_json(b).dump());
  c.seed = 100;
  CHECK(model_to_json(train(pairs, c)).dump() != model_to_json(a).dump());
}

TEST_CASE("checkpoint is the best validation epoch") {
  const auto pairs = synthetic_pairs(200, 9);
  TrainConfig c;
  c.epochs = 12;
  c.val_fraction = 0.1;
  const ScorerModel m = train(pairs, c);
  REQUIRE(m.meta.val_loss_curve.size() == 12);
  const auto best = std::min_element(m.meta.val_loss_curve.begin(), m.meta.val_loss_curve.end());
  CHECK(m.meta.best_epoch == 1 + (best - m.meta.val_loss_curve.begin()));
  CHECK(m.meta.n_val_examples == 20);
  CHECK(m.meta.n_train_examples == 180);
}

TEST_CASE("validation split is floored at one pair") {
  TrainConfig c;
  c.epochs = 2;
  const ScorerModel m = train(synthetic_pairs(10, 2), c);
  CHECK(m.meta.n_val_examples == 1);
}

TEST_CASE("learned direction agrees with the least-squares ranking direction") {
  // Known linear rule plus noise decides which of two random inputs is hard.
  Rng rng(31);
  const std::vector<double> w_true = {1.0, -0.5, 0.25, 0.0};
  std::vector<RankedPairExample> ex;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> a(4), b(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = rng.normal();
      b[k] = rng.normal();
    }
    double sa = 0.2 * rng.normal(), sb = 0.2 * rng.normal();
    for (int k = 0; k < 4; ++k) {
      sa += w_true[k] * a[k];
      sb += w_true[k] * b[k];
    }
    ex.push_back(sa > sb ? RankedPairExample{b, a, +1} : RankedPairExample{a, b, +1});
  }
  // Oracle: argmin_w sum_i (w . (x_hard - x_easy) - 1)^2.
  std::vector<std::vector<double>> ata(4, std::vector<double>(4, 0.0));
  std::vector<double> atb(4, 0.0);
  for (const auto& e : ex) {
    for (int r = 0; r < 4; ++r) {
      const double dr = e.x_hard[r] - e.x_easy[r];
      atb[r] += dr;
      for (int c = 0; c < 4; ++c) ata[r][c] += dr * (e.x_hard[c] - e.x_easy[c]);
    }
  }
  const auto w_ls = solve(ata, atb);

  TrainConfig c;
  c.hidden_units = 0;
  c.epochs = 60;
  const std::vector<RankedPairExample> val(ex.begin(), ex.begin() + 5);
  const std::vector<RankedPairExample> fit(ex.begin() + 5, ex.end());
  const ScorerModel m = train_on_examples(fit, val, c, {"f0", "f1", "f2", "f3"});
  std::vector<double> w_raw(4);
  const auto layer = m.network.layer(0);
  for (int k = 0; k < 4; ++k) w_raw[k] = layer.weights[k] / m.norm.std[k];

  MESSAGE("angle to least squares: " << angle_degrees(w_raw, w_ls)
          << " deg, least squares to true rule: " << angle_degrees(w_ls, w_true) << " deg");
  CHECK(angle_degrees(w_raw, w_ls) < 10.0);
}

TEST_CASE("identical sides are degenerate") {
  const std::vector<RankedPairExample> same = {{{1.0, 2.0}, {1.0, 2.0}, +1},
                                               {{3.0, 1.0}, {3.0, 1.0}, +1}};
  CHECK_THROWS_AS(train_on_examples(same, {}, TrainConfig{}, {"a", "b"}), Error);
  CHECK_THROWS_AS(train(synthetic_pairs(1, 1), TrainConfig{}), Error);
}

TEST_CASE("levenshtein oracle values") {
  CHECK(levenshtein(U"kitten", U"sitting") == 3);
  CHECK(std::abs(levenshtein_similarity("kitten", "sitting") - (1.0 - 3.0 / 7.0)) < 1e-15);
  CHECK(levenshtein_similarity("same", "same") == 1.0);
  CHECK(levenshtein_similarity("", "") == 1.0);
  CHECK(levenshtein_similarity("über", "uber") == 0.75);
}

TEST_CASE("sentence alignment") {
  const auto easy = make_article_text("e", "en", Source::kSimplewiki, "The cat sat. Dogs run fast. Zzz qqq.");
  const auto hard = make_article_text("h", "en", Source::kWikipedia,
                                      "The cat sat down. Dogs run very fast. Completely different words.");
  const auto al = align_sentences(easy, hard, 0.5);
  REQUIRE(al.size() == 2);
  CHECK(al[0].easy == "The cat sat.");
  CHECK(al[0].hard == "The cat sat down.");
  for (const auto& a : al) {
    CHECK(a.similarity >= 0.5);
    CHECK(a.similarity <= 1.0);
  }
  CHECK(align_sentences(easy, easy, 1.0).size() == 3);
  const auto disjoint = make_article_text("d", "en", Source::kOther, "Xy zw. Qr st.");
  CHECK(align_sentences(easy, disjoint, 1.0).empty());

  ArticlePair p;
  p.easy = easy;
  p.hard = hard;
  const auto set = build_sentence_training_set({p}, 0.5);
  CHECK(set.size() == 2);
  for (const auto& e : set) CHECK(e.y == +1);
}

TEST_CASE("model file round trip and validation") {
  TrainConfig c;
  c.epochs = 3;
  const ScorerModel m = train(synthetic_pairs(40, 4), c);
  const Json j = model_to_json(m);
  CHECK(j["format"] == "readrank-scorer");
  CHECK(j["mode"] == "document");
  CHECK(j["margin"] == 0.5);
  CHECK(j["feature_names"].size() == kNumFeatures);
  const ScorerModel back = model_from_json(j);
  const auto t = synthetic_pairs(3, 77)[0].hard;
  CHECK(score(back, t) == score(m, t));
  CHECK(model_to_json(back).dump() == j.dump());

  Json bad = j;
  bad["layers"][0]["weights"].erase(0);
  CHECK_THROWS_AS(model_from_json(bad), Error);
  Json bad_std = j;
  bad_std["norm_std"][0] = 0.0;
  CHECK_THROWS_AS(model_from_json(bad_std), Error);
  Json bad_names = j;
  bad_names["feature_names"].erase(0);
  CHECK_THROWS_AS(model_from_json(bad_names), Error);
}

TEST_CASE("property: ranking accuracy depends only on score order") {
  const auto pairs = synthetic_pairs(80, 14, SyntheticOptions{"x", 0.6, 0.4});
  TrainConfig c;
  c.epochs = 4;
  const ScorerModel m = train(pairs, c);
  const double base = ranking_accuracy(scorer_of(m), pairs).ranking_accuracy;
  const auto exp_scorer = [&](const ArticleText& t) { return std::exp(score(m, t)); };
  const auto affine = [&](const ArticleText& t) { return 3.0 * score(m, t) - 7.0; };
  CHECK(ranking_accuracy(exp_scorer, pairs).ranking_accuracy == base);
  CHECK(ranking_accuracy(affine, pairs).ranking_accuracy == base);
}
