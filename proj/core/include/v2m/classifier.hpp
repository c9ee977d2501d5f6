#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "v2m/metrics.hpp"
#include "v2m/types.hpp"

namespace v2m {

enum class ModelKind : std::uint8_t {
  DecisionTree = 0,
  RandomForest,
  LogisticRegression,
  KNearestNeighbors,
  SupportVectorMachine,
  NaiveBayes,
};

inline constexpr std::array<ModelKind, 6> kAllModelKinds = {
    ModelKind::DecisionTree,       ModelKind::RandomForest,
    ModelKind::LogisticRegression, ModelKind::KNearestNeighbors,
    ModelKind::SupportVectorMachine, ModelKind::NaiveBayes};

/// Tie order for surrogate selection when (accuracy, F1) compare equal.
inline constexpr std::array<ModelKind, 6> kSurrogatePreference = {
    ModelKind::KNearestNeighbors, ModelKind::SupportVectorMachine,
    ModelKind::LogisticRegression, ModelKind::RandomForest,
    ModelKind::DecisionTree, ModelKind::NaiveBayes};

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view s);

/// Hyperparameter record covering all six kinds; each fit reads only its own
/// section. Defaults are the project-wide reproducible baselines.
struct Hyperparams {
  struct Knn {
    std::size_t k = 5;
  } knn;
  struct Tree {
    std::size_t max_depth = 12;
    std::size_t min_leaf = 2;
  } tree;
  struct Forest {
    std::size_t n_trees = 50;
    bool bootstrap = true;
    bool feature_bagging = true;  // sqrt(d) features per split when on
  } forest;
  struct Logistic {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    double l2 = 1e-4;
  } logistic;
  struct Svm {
    double c = 1.0;
    double learning_rate = 0.1;
    std::size_t epochs = 500;
  } svm;
  struct Bayes {
    double variance_floor = 1e-9;
  } bayes;

  /// Throws Errc::InvalidHyperparameter on out-of-range values for `kind`.
  void validate(ModelKind kind) const;
};

/// Uniform predict interface over the six fitted model kinds. Fitted state is
/// immutable after training; predict is a pure function of (model, input).
class TrainedClassifier {
 public:
  virtual ~TrainedClassifier() = default;

  virtual ModelKind kind() const noexcept = 0;
  virtual std::size_t feature_dim() const noexcept = 0;

  /// Validates length and finiteness, then dispatches to the model.
  /// Errors: DimensionMismatch, NonFiniteInput.
  PriorityLabel predict(std::span<const double> x) const;

 private:
  virtual PriorityLabel do_predict(std::span<const double> x) const = 0;
};

/// Trains one classifier. The dataset must be labeled, nonempty and carry a
/// fitted normalizer (models operate on standardized features). Deterministic
/// for a fixed seed. Errors: SingleClassTrainingSet for LR/SVM,
/// InvalidHyperparameter.
std::unique_ptr<TrainedClassifier> fit_classifier(ModelKind kind,
                                                  const Dataset& train,
                                                  const Hyperparams& hp = {},
                                                  std::uint64_t seed = 0);

/// Pointwise predictions over a labeled test set. Errors: EmptyTestSet.
MetricsReport evaluate(const TrainedClassifier& model, const Dataset& test);

/// Training view shared by the model implementations: standardized features
/// plus dense labels.
struct TrainView {
  Matrix x;
  std::vector<PriorityLabel> y;
};
TrainView make_train_view(const Dataset& train);

/// Index of the best score with ties resolved toward higher priority
/// (scores are indexed by class, High first).
std::size_t argmax_score(std::span<const double> scores);

}  // namespace v2m
