#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbkit/feature_map.hpp"
#include "rbkit/losses.hpp"
#include "rbkit/task.hpp"

namespace rbkit {

enum class Regularizer { L2, L1 };

const char* to_string(Regularizer reg);
Regularizer regularizer_from_string(const std::string& name);

/// Linear model over the columns of a feature map.
struct Model {
  std::vector<double> w;
  double lambda = 0.0;
  LossSpec loss;
  Regularizer regularizer = Regularizer::L2;
};

/// z_i . w for each row. Throws std::invalid_argument on dimension mismatch.
std::vector<double> decision_scores(const Model& model, const SparseMatrix& z);

/// Raw scores for raw points: transforms `x` and takes sparse dot products.
std::vector<double> predict(const Model& model, const FeatureMap& map, const RowMatrix& x);

/// Turns per-head scores into outputs: the raw score for regression, +1/-1 by
/// sign for binary (0 goes to -1, the first class), and the argmax head for
/// multiclass with ties to the lowest class index.
std::vector<double> decide(Task task, std::span<const std::vector<double>> head_scores);

/// A feature map with one head (regression, binary) or one head per class
/// trained one-vs-rest (multiclass).
struct Predictor {
  Task task = Task::Regression;
  FeatureMap features;
  std::vector<Model> heads;
  std::vector<double> class_labels;  // original label of each class index

  /// Regression: scores. Binary: +1/-1. Multiclass: class index.
  std::vector<double> predict(const RowMatrix& x) const;

  /// Same as predict() but binary/multiclass outputs mapped to the labels
  /// found in the training file.
  std::vector<double> predict_original_labels(const RowMatrix& x) const;

  nlohmann::json to_json() const;
  static Predictor from_json(const nlohmann::json& j);
};

void save_predictor(const Predictor& predictor, const std::filesystem::path& path);
Predictor load_predictor(const std::filesystem::path& path);

}  // namespace rbkit
