#include "v2m/model_io.hpp"

#include <nlohmann/json.hpp>

#include "v2m/decision_tree.hpp"
#include "v2m/errors.hpp"
#include "v2m/knn.hpp"
#include "v2m/linear_svm.hpp"
#include "v2m/logistic_regression.hpp"
#include "v2m/naive_bayes.hpp"
#include "v2m/random_forest.hpp"

namespace v2m {

namespace {

constexpr std::string_view kModule = "models";
constexpr int kFormatVersion = 1;

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols) {
    fail(Errc::Io, kModule, "corrupt matrix in checkpoint");
  }
  return m;
}

json labels_to_json(const std::vector<PriorityLabel>& y) {
  json arr = json::array();
  for (auto l : y) arr.push_back(static_cast<int>(l));
  return arr;
}

std::vector<PriorityLabel> labels_from_json(const json& j) {
  std::vector<PriorityLabel> y;
  y.reserve(j.size());
  for (const auto& v : j) {
    const int raw = v.get<int>();
    if (raw < 0 || raw >= static_cast<int>(kNumClasses)) {
      fail(Errc::Io, kModule, "corrupt label in checkpoint");
    }
    y.push_back(static_cast<PriorityLabel>(raw));
  }
  return y;
}

json tree_to_json(const std::vector<TreeNode>& nodes) {
  json arr = json::array();
  for (const auto& n : nodes) {
    arr.push_back(json{{"leaf", n.is_leaf},
                       {"label", static_cast<int>(n.leaf_label)},
                       {"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
  }
  return arr;
}

std::vector<TreeNode> tree_from_json(const json& j) {
  std::vector<TreeNode> nodes;
  nodes.reserve(j.size());
  for (const auto& v : j) {
    TreeNode n;
    n.is_leaf = v.at("leaf").get<bool>();
    n.leaf_label = static_cast<PriorityLabel>(v.at("label").get<int>());
    n.feature = v.at("feature").get<std::size_t>();
    n.threshold = v.at("threshold").get<double>();
    n.left = v.at("left").get<std::int32_t>();
    n.right = v.at("right").get<std::int32_t>();
    nodes.push_back(n);
  }
  return nodes;
}

}  // namespace

std::string serialize_classifier(const TrainedClassifier& model) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = to_string(model.kind());
  j["feature_dim"] = model.feature_dim();

  switch (model.kind()) {
    case ModelKind::KNearestNeighbors: {
      const auto& m = static_cast<const KnnClassifier&>(model);
      j["k"] = m.k();
      j["train_x"] = matrix_to_json(m.train_x());
      j["train_y"] = labels_to_json(m.train_y());
      break;
    }
    case ModelKind::DecisionTree: {
      const auto& m = static_cast<const DecisionTreeClassifier&>(model);
      j["nodes"] = tree_to_json(m.nodes());
      break;
    }
    case ModelKind::RandomForest: {
      const auto& m = static_cast<const RandomForestClassifier&>(model);
      json trees = json::array();
      for (const auto& t : m.trees()) trees.push_back(tree_to_json(t));
      j["trees"] = trees;
      break;
    }
    case ModelKind::LogisticRegression: {
      const auto& m = static_cast<const LogisticRegressionClassifier&>(model);
      j["weights"] = matrix_to_json(m.weights());
      j["bias"] = m.bias();
      break;
    }
    case ModelKind::SupportVectorMachine: {
      const auto& m = static_cast<const LinearSvmClassifier&>(model);
      j["weights"] = matrix_to_json(m.weights());
      j["bias"] = m.bias();
      break;
    }
    case ModelKind::NaiveBayes: {
      const auto& m = static_cast<const NaiveBayesClassifier&>(model);
      j["means"] = matrix_to_json(m.means());
      j["variances"] = matrix_to_json(m.variances());
      j["log_priors"] = m.log_priors();
      break;
    }
  }
  return j.dump(2) + "\n";
}

std::unique_ptr<TrainedClassifier> deserialize_classifier(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::Io, kModule, std::string("bad checkpoint: ") + e.what());
  }
  if (j.value("format_version", 0) != kFormatVersion) {
    fail(Errc::Io, kModule, "unsupported checkpoint version");
  }
  const auto kind = model_kind_from_string(j.value("kind", ""));
  if (!kind) fail(Errc::Io, kModule, "unknown model kind in checkpoint");

  switch (*kind) {
    case ModelKind::KNearestNeighbors:
      return std::make_unique<KnnClassifier>(matrix_from_json(j.at("train_x")),
                                             labels_from_json(j.at("train_y")),
                                             j.at("k").get<std::size_t>());
    case ModelKind::DecisionTree:
      return std::make_unique<DecisionTreeClassifier>(
          tree_from_json(j.at("nodes")), j.at("feature_dim").get<std::size_t>());
    case ModelKind::RandomForest: {
      std::vector<std::vector<TreeNode>> trees;
      for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
      return std::make_unique<RandomForestClassifier>(
          std::move(trees), j.at("feature_dim").get<std::size_t>());
    }
    case ModelKind::LogisticRegression:
      return std::make_unique<LogisticRegressionClassifier>(
          matrix_from_json(j.at("weights")), j.at("bias").get<std::vector<double>>(),
          std::vector<double>{});
    case ModelKind::SupportVectorMachine:
      return std::make_unique<LinearSvmClassifier>(
          matrix_from_json(j.at("weights")), j.at("bias").get<std::vector<double>>());
    case ModelKind::NaiveBayes:
      return std::make_unique<NaiveBayesClassifier>(
          matrix_from_json(j.at("means")), matrix_from_json(j.at("variances")),
          j.at("log_priors").get<std::array<double, kNumClasses>>());
  }
  fail(Errc::Io, kModule, "unknown model kind in checkpoint");
}

}  // namespace v2m
