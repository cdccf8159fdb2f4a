#include "readrank/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "readrank/error.hpp"
#include "readrank/io.hpp"
#include "readrank/rng.hpp"
#include "readrank/utf8.hpp"

namespace readrank {
namespace {

constexpr int kModelFormatVersion = 1;

struct Adam {
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  // Decoupled weight decay, as in AdamW.
  void step(std::span<double> params, std::span<const double> grad, double lr,
            double weight_decay) {
    ++t;
    const double c1 = 1.0 - std::pow(kBeta1, t);
    const double c2 = 1.0 - std::pow(kBeta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      params[k] -= lr * (m_hat / (std::sqrt(v_hat) + kEps) + weight_decay * params[k]);
    }
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  int t = 0;
};

double mean_loss(const ScoringNetwork& net, std::span<const RankedPairExample> examples,
                 double margin) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) {
    total += margin_ranking_loss(net.forward(ex.x_hard), net.forward(ex.x_easy), ex.y, margin);
  }
  return total / static_cast<double>(examples.size());
}

std::vector<RankedPairExample> normalized(const std::vector<RankedPairExample>& raw,
                                          const Standardizer& norm) {
  std::vector<RankedPairExample> out;
  out.reserve(raw.size());
  for (const auto& ex : raw) out.push_back({norm.apply(ex.x_easy), norm.apply(ex.x_hard), ex.y});
  return out;
}

std::vector<std::string> default_feature_names() {
  return {kFeatureNames.begin(), kFeatureNames.end()};
}

std::vector<RankedPairExample> document_examples(const std::vector<ArticlePair>& pairs) {
  std::vector<RankedPairExample> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({featurize(p.easy).to_vector(), featurize(p.hard).to_vector(), +1});
  }
  return out;
}

std::string model_version() {
  return std::string(READRANK_VERSION) + "+" + std::string(kFeatureSetVersion);
}

}  // namespace

double margin_ranking_loss(double s1, double s2, int y, double margin) {
  return std::max(0.0, -static_cast<double>(y) * (s1 - s2) + margin);
}

std::string_view mode_name(ScorerMode mode) {
  return mode == ScorerMode::kDocument ? "document" : "sentence";
}

ScorerMode parse_mode(std::string_view name) {
  if (name == "document") return ScorerMode::kDocument;
  if (name == "sentence") return ScorerMode::kSentence;
  throw Error(ErrorCode::kFormat, "unknown scorer mode '" + std::string(name) + "'");
}

std::size_t TrainConfig::resolved_hidden_units() const {
  if (hidden_units >= 0) return static_cast<std::size_t>(hidden_units);
  return mode == ScorerMode::kDocument ? 16 : 0;
}

double ScorerModel::score_features(std::span<const double> raw) const {
  const std::vector<double> z = norm.apply(raw);
  return network.forward(z);
}

LossAndGradient batch_loss_and_gradient(const ScoringNetwork& network,
                                        std::span<const RankedPairExample> examples,
                                        double margin) {
  LossAndGradient out;
  out.gradient.assign(network.parameter_count(), 0.0);
  if (examples.empty()) return out;
  const double inv = 1.0 / static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    // s1 = score of the side that must be higher when y = +1.
    const double s1 = network.forward(ex.x_hard);
    const double s2 = network.forward(ex.x_easy);
    const double slack = -ex.y * (s1 - s2) + margin;
    if (slack > 0.0) {
      out.loss += slack * inv;
      network.accumulate_gradient(ex.x_hard, -ex.y * inv, out.gradient);
      network.accumulate_gradient(ex.x_easy, ex.y * inv, out.gradient);
    }
  }
  return out;
}

ScorerModel train_on_examples(const std::vector<RankedPairExample>& train,
                              const std::vector<RankedPairExample>& val,
                              const TrainConfig& config,
                              std::vector<std::string> feature_names) {
  if (train.empty()) {
    throw Error(ErrorCode::kDegenerateData, "no training examples");
  }
  if (config.margin < 0.0) {
    throw Error(ErrorCode::kInvalidRequest, "margin must be non-negative");
  }
  const bool all_identical = std::all_of(train.begin(), train.end(), [](const auto& ex) {
    return ex.x_easy == ex.x_hard;
  });
  if (all_identical) {
    throw Error(ErrorCode::kDegenerateData,
                "every training pair has identical features on both sides");
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(2 * train.size());
  for (const auto& ex : train) {
    rows.push_back(ex.x_easy);
    rows.push_back(ex.x_hard);
  }
  ScorerModel model;
  model.mode = config.mode;
  model.feature_names = std::move(feature_names);
  model.norm = Standardizer::fit(rows);
  model.margin = config.margin;
  model.version = model_version();
  if (model.feature_names.size() != model.norm.dimension()) {
    throw Error(ErrorCode::kFormat, "feature names do not match example width");
  }

  const std::size_t hidden = config.resolved_hidden_units();
  Rng init_rng = Rng::substream(config.seed, "init");
  ScoringNetwork net = ScoringNetwork::initialized(model.norm.dimension(), hidden, init_rng);

  const auto train_z = normalized(train, model.norm);
  const auto val_z = normalized(val, model.norm);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  const std::size_t steps_per_epoch = (train_z.size() + batch - 1) / batch;
  const double total_steps =
      static_cast<double>(steps_per_epoch) * static_cast<double>(std::max(1, config.epochs));
  const double lr_max = config.learning_rate;
  const double lr_min = config.learning_rate * config.min_learning_rate_ratio;

  Adam adam(net.parameter_count());
  Rng shuffle_rng = Rng::substream(config.seed, "shuffle");
  std::vector<std::size_t> order(train_z.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<RankedPairExample> mb;
  mb.reserve(batch);

  TrainingMeta& meta = model.meta;
  meta.seed = config.seed;
  meta.epochs = config.epochs;
  meta.learning_rate = config.learning_rate;
  meta.weight_decay = config.weight_decay;
  meta.hidden_units = hidden;
  meta.batch_size = batch;
  meta.val_fraction = config.val_fraction;
  meta.n_train_examples = train.size();
  meta.n_val_examples = val.size();

  ScoringNetwork best = net;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      mb.clear();
      for (std::size_t i = start; i < stop; ++i) mb.push_back(train_z[order[i]]);
      const LossAndGradient lg = batch_loss_and_gradient(net, mb, config.margin);
      epoch_loss += lg.loss * static_cast<double>(mb.size());
      const double progress = static_cast<double>(step) / total_steps;
      const double lr =
          lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * progress));
      adam.step(net.parameters(), lg.gradient, lr, config.weight_decay);
      ++step;
    }
    meta.loss_curve.push_back(epoch_loss / static_cast<double>(train_z.size()));
    const double selection_loss = val_z.empty() ? mean_loss(net, train_z, config.margin)
                                                : mean_loss(net, val_z, config.margin);
    meta.val_loss_curve.push_back(selection_loss);
    if (selection_loss < best_loss) {
      best_loss = selection_loss;
      best = net;
      meta.best_epoch = epoch;
    }
  }
  model.network = std::move(best);
  return model;
}

ScorerModel train(const std::vector<ArticlePair>& train_pairs, const TrainConfig& config) {
  if (train_pairs.size() < 2) {
    throw Error(ErrorCode::kDegenerateData, "training needs at least 2 pairs");
  }
  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::substream(config.seed, "validation");
  rng.shuffle(order.begin(), order.end());
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(config.val_fraction * train_pairs.size())), 1,
      train_pairs.size() - 1);
  std::vector<bool> is_val(train_pairs.size(), false);
  for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;
  std::vector<ArticlePair> fit_pairs;
  std::vector<ArticlePair> val_pairs;
  for (std::size_t i = 0; i < train_pairs.size(); ++i) {
    (is_val[i] ? val_pairs : fit_pairs).push_back(train_pairs[i]);
  }

  std::vector<RankedPairExample> fit;
  std::vector<RankedPairExample> val;
  if (config.mode == ScorerMode::kDocument) {
    fit = document_examples(fit_pairs);
    val = document_examples(val_pairs);
  } else {
    fit = build_sentence_training_set(fit_pairs, config.sentence_threshold);
    val = build_sentence_training_set(val_pairs, config.sentence_threshold);
  }
  return train_on_examples(fit, val, config, default_feature_names());
}

ArticleText sentence_text(std::string_view sentence, std::string_view lang) {
  ArticleText a;
  a.lang = std::string(lang);
  a.text = std::string(sentence);
  a.sentences = {a.text};
  a.num_sentences = 1;
  a.num_chars = utf8::length(a.text);
  return a;
}

double score(const ScorerModel& model, const ArticleText& text) {
  if (model.mode == ScorerMode::kDocument) {
    return model.score_features(featurize(text).values);
  }
  double total = 0.0;
  std::size_t used = 0;
  for (const auto& s : text.sentences) {
    FeatureVector f;
    try {
      f = featurize(sentence_text(s, text.lang));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kEmptyText) continue;  // e.g. a lone "…"
      throw;
    }
    total += model.score_features(f.values);
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorCode::kEmptyText, "text '" + text.title + "' has no scorable sentences");
  }
  return total / static_cast<double>(used);
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  const std::u32string ua = utf8::decode(a);
  const std::u32string ub = utf8::decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

SentenceAlignment align_sentences(const ArticleText& easy, const ArticleText& hard,
                                  double threshold) {
  SentenceAlignment out;
  std::vector<bool> used(hard.sentences.size(), false);
  for (const auto& e : easy.sentences) {
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < hard.sentences.size(); ++j) {
      if (used[j]) continue;
      const double sim = levenshtein_similarity(e, hard.sentences[j]);
      if (sim > best) {
        best = sim;
        best_j = j;
      }
    }
    if (best >= threshold && best >= 0.0) {
      used[best_j] = true;
      out.push_back({e, hard.sentences[best_j], best});
    }
  }
  return out;
}

std::vector<RankedPairExample> build_sentence_training_set(
    const std::vector<ArticlePair>& train_pairs, double threshold) {
  std::vector<RankedPairExample> out;
  for (const auto& p : train_pairs) {
    for (const auto& a : align_sentences(p.easy, p.hard, threshold)) {
      try {
        out.push_back({featurize(sentence_text(a.easy, p.lang)).to_vector(),
                       featurize(sentence_text(a.hard, p.lang)).to_vector(), +1});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyText) throw;
      }
    }
  }
  return out;
}

Json model_to_json(const ScorerModel& model) {
  Json layers = Json::array();
  for (std::size_t l = 0; l < model.network.layer_count(); ++l) {
    const auto v = model.network.layer(l);
    const bool last = l + 1 == model.network.layer_count();
    layers.push_back(Json{{"in", v.in},
                          {"out", v.out},
                          {"activation", last ? "identity" : "tanh"},
                          {"weights", std::vector<double>(v.weights.begin(), v.weights.end())},
                          {"bias", std::vector<double>(v.bias.begin(), v.bias.end())}});
  }
  const TrainingMeta& m = model.meta;
  return Json{
      {"format", "readrank-scorer"},
      {"format_version", kModelFormatVersion},
      {"version", model.version},
      {"mode", mode_name(model.mode)},
      {"feature_set", kFeatureSetVersion},
      {"feature_names", model.feature_names},
      {"norm_mean", model.norm.mean},
      {"norm_std", model.norm.std},
      {"layers", layers},
      {"margin", model.margin},
      {"label_convention", "y=+1: first score must exceed second by margin; trained on (hard, easy, +1)"},
      {"training_meta",
       Json{{"seed", m.seed},
            {"epochs", m.epochs},
            {"learning_rate", m.learning_rate},
            {"weight_decay", m.weight_decay},
            {"hidden_units", m.hidden_units},
            {"batch_size", m.batch_size},
            {"val_fraction", m.val_fraction},
            {"n_train_examples", m.n_train_examples},
            {"n_val_examples", m.n_val_examples},
            {"best_epoch", m.best_epoch},
            {"loss_curve", m.loss_curve},
            {"val_loss_curve", m.val_loss_curve}}}};
}

ScorerModel model_from_json(const Json& j) {
  try {
    if (j.value("format", std::string()) != "readrank-scorer") {
      throw Error(ErrorCode::kFormat, "not a readrank scorer model");
    }
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported model format version");
    }
    ScorerModel model;
    model.version = j.at("version").get<std::string>();
    model.mode = parse_mode(j.at("mode").get<std::string>());
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.norm.mean = j.at("norm_mean").get<std::vector<double>>();
    model.norm.std = j.at("norm_std").get<std::vector<double>>();
    model.margin = j.at("margin").get<double>();
    const std::size_t d = model.feature_names.size();
    if (model.norm.mean.size() != d || model.norm.std.size() != d) {
      throw Error(ErrorCode::kFormat, "normalization stats do not match feature_names");
    }
    if (std::any_of(model.norm.std.begin(), model.norm.std.end(),
                    [](double s) { return !(s > 0.0); })) {
      throw Error(ErrorCode::kFormat, "norm_std must be positive");
    }
    if (model.feature_names != default_feature_names()) {
      throw Error(ErrorCode::kFormat, "model feature list differs from " +
                                          std::string(kFeatureSetVersion));
    }
    const Json& layers = j.at("layers");
    if (!layers.is_array() || layers.empty() || layers.size() > 2) {
      throw Error(ErrorCode::kFormat, "model needs one or two layers");
    }
    const std::size_t hidden = layers.size() == 2 ? layers[0].at("out").get<std::size_t>() : 0;
    model.network = ScoringNetwork(d, hidden);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto expect = model.network.layer(l);
      if (layers[l].at("in").get<std::size_t>() != expect.in ||
          layers[l].at("out").get<std::size_t>() != expect.out) {
        throw Error(ErrorCode::kFormat, "layer " + std::to_string(l) + " has inconsistent shape");
      }
      model.network.set_layer(l, layers[l].at("weights").get<std::vector<double>>(),
                              layers[l].at("bias").get<std::vector<double>>());
    }
    const Json& meta = j.at("training_meta");
    TrainingMeta& m = model.meta;
    m.seed = meta.value("seed", std::uint64_t{0});
    m.epochs = meta.value("epochs", 0);
    m.learning_rate = meta.value("learning_rate", 0.0);
    m.weight_decay = meta.value("weight_decay", 0.0);
    m.hidden_units = meta.value("hidden_units", hidden);
    m.batch_size = meta.value("batch_size", std::size_t{0});
    m.val_fraction = meta.value("val_fraction", 0.0);
    m.n_train_examples = meta.value("n_train_examples", std::size_t{0});
    m.n_val_examples = meta.value("n_val_examples", std::size_t{0});
    m.best_epoch = meta.value("best_epoch", 0);
    m.loss_curve = meta.value("loss_curve", std::vector<double>{});
    m.val_loss_curve = meta.value("val_loss_curve", std::vector<double>{});
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const ScorerModel& model) {
  io::write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

ScorerModel load_model(const std::string& path) {
  try {
    return model_from_json(Json::parse(io::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
}

}  // namespace readrank
