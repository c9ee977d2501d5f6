#include "v2m/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "v2m/decision_tree.hpp"
#include "v2m/errors.hpp"
#include "v2m/knn.hpp"
#include "v2m/linear_svm.hpp"
#include "v2m/logistic_regression.hpp"
#include "v2m/naive_bayes.hpp"
#include "v2m/random_forest.hpp"
#include "v2m/rng.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "models";

std::size_t distinct_class_count(const std::vector<PriorityLabel>& y) {
  std::set<PriorityLabel> seen(y.begin(), y.end());
  return seen.size();
}

std::unique_ptr<TrainedClassifier> fit_knn(const TrainView& view,
                                           const Hyperparams& hp) {
  return std::make_unique<KnnClassifier>(view.x, view.y, hp.knn.k);
}

std::unique_ptr<TrainedClassifier> fit_tree(const TrainView& view,
                                            const Hyperparams& hp) {
  TreeFitOptions options;
  options.max_depth = hp.tree.max_depth;
  options.min_leaf = hp.tree.min_leaf;
  std::vector<std::size_t> all(view.x.rows);
  std::iota(all.begin(), all.end(), 0);
  return std::make_unique<DecisionTreeClassifier>(
      build_tree(view.x, view.y, all, options), view.x.cols);
}

std::unique_ptr<TrainedClassifier> fit_forest(const TrainView& view,
                                              const Hyperparams& hp,
                                              std::uint64_t seed) {
  const std::size_t n = view.x.rows;
  std::vector<std::vector<TreeNode>> trees;
  trees.reserve(hp.forest.n_trees);
  for (std::size_t t = 0; t < hp.forest.n_trees; ++t) {
    Rng rng(derive_seed(seed, "forest/tree/" + std::to_string(t)));
    std::vector<std::size_t> sample(n);
    if (hp.forest.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) sample[i] = rng.index(n);
      std::sort(sample.begin(), sample.end());
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    TreeFitOptions options;
    options.max_depth = hp.tree.max_depth;
    options.min_leaf = hp.tree.min_leaf;
    if (hp.forest.feature_bagging) {
      options.features_per_split = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::lround(std::sqrt(static_cast<double>(view.x.cols)))));
      options.rng = &rng;
    }
    trees.push_back(build_tree(view.x, view.y, sample, options));
  }
  return std::make_unique<RandomForestClassifier>(std::move(trees), view.x.cols);
}

std::unique_ptr<TrainedClassifier> fit_logistic(const TrainView& view,
                                                const Hyperparams& hp) {
  if (distinct_class_count(view.y) < 2) {
    fail(Errc::SingleClassTrainingSet, kModule,
         "logistic regression needs at least two classes");
  }
  const std::size_t d = view.x.cols;
  Matrix weights(kNumClasses, d);
  std::vector<double> bias(kNumClasses, 0.0);
  std::vector<double> trace;
  trace.reserve(hp.logistic.epochs + 1);

  Matrix grad_w;
  std::vector<double> grad_b;
  for (std::size_t epoch = 0; epoch < hp.logistic.epochs; ++epoch) {
    const double loss = lr_loss_and_grad(view.x, view.y, weights, bias,
                                         hp.logistic.l2, &grad_w, &grad_b);
    trace.push_back(loss);
    for (std::size_t i = 0; i < weights.data.size(); ++i) {
      weights.data[i] -= hp.logistic.learning_rate * grad_w.data[i];
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      bias[c] -= hp.logistic.learning_rate * grad_b[c];
    }
  }
  trace.push_back(
      lr_loss_and_grad(view.x, view.y, weights, bias, hp.logistic.l2, nullptr, nullptr));
  return std::make_unique<LogisticRegressionClassifier>(
      std::move(weights), std::move(bias), std::move(trace));
}

std::unique_ptr<TrainedClassifier> fit_svm(const TrainView& view,
                                           const Hyperparams& hp) {
  if (distinct_class_count(view.y) < 2) {
    fail(Errc::SingleClassTrainingSet, kModule,
         "svm needs at least two classes");
  }
  const std::size_t d = view.x.cols;
  const double lambda =
      1.0 / (hp.svm.c * static_cast<double>(view.x.rows));
  Matrix weights(kNumClasses, d);
  std::vector<double> bias(kNumClasses, 0.0);

  std::vector<double> grad_w(d, 0.0);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    for (std::size_t epoch = 0; epoch < hp.svm.epochs; ++epoch) {
      double grad_b = 0.0;
      svm_loss_and_grad(view.x, view.y, static_cast<PriorityLabel>(c), w, b,
                        lambda, &grad_w, &grad_b);
      for (std::size_t j = 0; j < d; ++j) w[j] -= hp.svm.learning_rate * grad_w[j];
      b -= hp.svm.learning_rate * grad_b;
    }
    for (std::size_t j = 0; j < d; ++j) weights(c, j) = w[j];
    bias[c] = b;
  }
  return std::make_unique<LinearSvmClassifier>(std::move(weights), std::move(bias));
}

std::unique_ptr<TrainedClassifier> fit_bayes(const TrainView& view,
                                             const Hyperparams& hp) {
  const std::size_t n = view.x.rows;
  const std::size_t d = view.x.cols;
  Matrix means(kNumClasses, d);
  Matrix variances(kNumClasses, d);
  std::array<std::size_t, kNumClasses> counts{};

  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(view.y[i]);
    counts[c]++;
    for (std::size_t j = 0; j < d; ++j) means(c, j) += view.x(i, j);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) means(c, j) /= static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(view.y[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = view.x(i, j) - means(c, j);
      variances(c, j) += dev * dev;
    }
  }
  std::array<double, kNumClasses> log_priors{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) {
      log_priors[c] = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < d; ++j) variances(c, j) = hp.bayes.variance_floor;
      continue;
    }
    log_priors[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
      variances(c, j) = std::max(variances(c, j) / static_cast<double>(counts[c]),
                                 hp.bayes.variance_floor);
    }
  }
  return std::make_unique<NaiveBayesClassifier>(std::move(means), std::move(variances),
                                                log_priors);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::DecisionTree: return "DecisionTree";
    case ModelKind::RandomForest: return "RandomForest";
    case ModelKind::LogisticRegression: return "LogisticRegression";
    case ModelKind::KNearestNeighbors: return "KNearestNeighbors";
    case ModelKind::SupportVectorMachine: return "SupportVectorMachine";
    case ModelKind::NaiveBayes: return "NaiveBayes";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_string(std::string_view s) {
  for (ModelKind kind : kAllModelKinds) {
    if (to_string(kind) == s) return kind;
  }
  return std::nullopt;
}

void Hyperparams::validate(ModelKind kind) const {
  switch (kind) {
    case ModelKind::KNearestNeighbors:
      if (knn.k < 1) fail(Errc::InvalidHyperparameter, kModule, "knn.k must be >= 1");
      break;
    case ModelKind::DecisionTree:
      if (tree.max_depth < 1 || tree.min_leaf < 1) {
        fail(Errc::InvalidHyperparameter, kModule, "tree depth/min_leaf must be >= 1");
      }
      break;
    case ModelKind::RandomForest:
      if (forest.n_trees < 1) {
        fail(Errc::InvalidHyperparameter, kModule, "forest.n_trees must be >= 1");
      }
      if (tree.max_depth < 1 || tree.min_leaf < 1) {
        fail(Errc::InvalidHyperparameter, kModule, "tree depth/min_leaf must be >= 1");
      }
      break;
    case ModelKind::LogisticRegression:
      if (!(logistic.learning_rate > 0.0) || logistic.l2 < 0.0) {
        fail(Errc::InvalidHyperparameter, kModule, "bad logistic hyperparameters");
      }
      break;
    case ModelKind::SupportVectorMachine:
      if (!(svm.c > 0.0) || !(svm.learning_rate > 0.0)) {
        fail(Errc::InvalidHyperparameter, kModule, "bad svm hyperparameters");
      }
      break;
    case ModelKind::NaiveBayes:
      if (!(bayes.variance_floor > 0.0)) {
        fail(Errc::InvalidHyperparameter, kModule, "variance floor must be > 0");
      }
      break;
  }
}

PriorityLabel TrainedClassifier::predict(std::span<const double> x) const {
  if (x.size() != feature_dim()) {
    fail(Errc::DimensionMismatch, kModule,
         "input has " + std::to_string(x.size()) + " features, model expects " +
             std::to_string(feature_dim()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      fail(Errc::NonFiniteInput, kModule, "input contains a non-finite value");
    }
  }
  return do_predict(x);
}

TrainView make_train_view(const Dataset& train) {
  if (train.empty()) {
    fail(Errc::InvalidArgument, kModule, "training set is empty");
  }
  if (!train.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "training set must be fully labeled");
  }
  TrainView view;
  view.x = train.standardized_matrix();
  view.y.reserve(train.size());
  for (const auto& l : train.labels) view.y.push_back(*l);
  return view;
}

std::size_t argmax_score(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;  // ties keep the higher priority
  }
  return best;
}

std::unique_ptr<TrainedClassifier> fit_classifier(ModelKind kind,
                                                  const Dataset& train,
                                                  const Hyperparams& hp,
                                                  std::uint64_t seed) {
  hp.validate(kind);
  const TrainView view = make_train_view(train);
  switch (kind) {
    case ModelKind::KNearestNeighbors: return fit_knn(view, hp);
    case ModelKind::DecisionTree: return fit_tree(view, hp);
    case ModelKind::RandomForest: return fit_forest(view, hp, seed);
    case ModelKind::LogisticRegression: return fit_logistic(view, hp);
    case ModelKind::SupportVectorMachine: return fit_svm(view, hp);
    case ModelKind::NaiveBayes: return fit_bayes(view, hp);
  }
  fail(Errc::InvalidArgument, kModule, "unknown model kind");
}

MetricsReport evaluate(const TrainedClassifier& model, const Dataset& test) {
  if (test.empty()) {
    fail(Errc::EmptyTestSet, kModule, "test set is empty");
  }
  if (!test.fully_labeled()) {
    fail(Errc::InvalidArgument, kModule, "test set must be fully labeled");
  }
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion{};
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto truth = static_cast<std::size_t>(*test.labels[i]);
    const auto pred =
        static_cast<std::size_t>(model.predict(test.standardized_row(i)));
    confusion[truth][pred]++;
  }
  return metrics_from_confusion(confusion);
}

}  // namespace v2m
