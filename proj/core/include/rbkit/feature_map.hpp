#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "rbkit/baselines.hpp"
#include "rbkit/rb_features.hpp"
#include "rbkit/sparse_matrix.hpp"

namespace rbkit {

enum class Method { RB, RF, Nystrom, ExactKernel };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

/// Any fitted feature map, producing a SparseMatrix for the solvers. Dense
/// maps store every entry so that the solvers see one matrix type.
class FeatureMap {
 public:
  using Variant = std::variant<RbTransform, RfTransform, NystromTransform>;

  explicit FeatureMap(Variant map) : map_(std::move(map)) {}

  /// Fits `method` (not ExactKernel) with `size` grids / features / landmarks.
  static FeatureMap fit(Method method, const RowMatrix& x, const KernelSpec& spec,
                        std::size_t size, Rng& rng);

  Method method() const;
  std::size_t num_features() const;
  const KernelSpec& spec() const;

  SparseMatrix features(const RowMatrix& x) const;

  /// Bytes the method needs to hold `z`: the CSR arrays for RB, a dense
  /// N x R array for the Fourier and Nystrom maps.
  std::size_t storage_bytes(const SparseMatrix& z) const;

  const Variant& get() const { return map_; }

  nlohmann::json to_json() const;
  static FeatureMap from_json(const nlohmann::json& j);

 private:
  Variant map_;
};

void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace rbkit
