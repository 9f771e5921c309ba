#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbkit/dense.hpp"
#include "rbkit/task.hpp"

namespace rbkit {

/// Dense samples with labels. Binary labels are stored as -1/+1 and
/// multiclass labels as 0..C-1; `class_labels` keeps the file's original
/// label for each class index.
struct Dataset {
  RowMatrix x;
  std::vector<double> y;
  Task task = Task::Regression;
  std::vector<double> class_labels;

  std::size_t size() const { return x.rows(); }
  std::size_t dim() const { return x.cols(); }
  std::size_t num_classes() const { return class_labels.size(); }

  Dataset subset(std::size_t first, std::size_t count) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LoadOptions {
  std::optional<std::size_t> dim_hint;
  /// Inferred when absent: two distinct integer labels -> Binary, more
  /// integer labels (at most 1000 classes) -> Multiclass, else Regression.
  std::optional<Task> task;
  /// Class labels of an already-loaded training set; test labels are mapped
  /// onto these indices instead of being re-derived.
  std::vector<double> class_labels;
};

/// Reads `<label> <idx>:<val> ...` lines with 1-based indices. Blank lines and
/// `#` comments are skipped. Files ending in .gz are decompressed.
Dataset load_libsvm(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_libsvm(std::istream& in, const LoadOptions& options = {});

/// Writes the dataset back in LIBSVM format with original labels, omitting zeros.
void save_libsvm(const Dataset& data, std::ostream& out);
void save_libsvm(const Dataset& data, const std::filesystem::path& path);

/// Per-dimension affine map fit on training data: x' = (x - min) / range.
/// Dimensions with zero range map to 0.
struct ScalingParams {
  std::vector<double> min;
  std::vector<double> range;

  RowMatrix apply(const RowMatrix& x) const;
};

ScalingParams fit_min_max(const RowMatrix& x);

struct ScaledPair {
  Dataset train;
  Dataset test;
  ScalingParams params;
};

/// Min-max scaling to [0, 1] fit on `train`, applied unclipped to both sets.
ScaledPair scale_features(const Dataset& train, const Dataset& test);

}  // namespace rbkit
