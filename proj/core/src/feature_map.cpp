#include "rbkit/feature_map.hpp"

#include <fstream>
#include <stdexcept>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace rbkit {

const char* to_string(Method method) {
  switch (method) {
    case Method::RB:
      return "rb";
    case Method::RF:
      return "rf";
    case Method::Nystrom:
      return "nystrom";
    case Method::ExactKernel:
      return "exact";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "rb") return Method::RB;
  if (name == "rf") return Method::RF;
  if (name == "nystrom") return Method::Nystrom;
  if (name == "exact") return Method::ExactKernel;
  throw std::invalid_argument("unknown method: " + name + " (expected rb, rf, nystrom, exact)");
}

FeatureMap FeatureMap::fit(Method method, const RowMatrix& x, const KernelSpec& spec,
                           std::size_t size, Rng& rng) {
  switch (method) {
    case Method::RB:
      return FeatureMap(RbTransform::fit(x, spec, size, rng));
    case Method::RF:
      return FeatureMap(RfTransform::fit(spec, size, rng));
    case Method::Nystrom:
      return FeatureMap(NystromTransform::fit(x, spec, size, rng));
    case Method::ExactKernel:
      break;
  }
  throw std::invalid_argument("FeatureMap::fit: exact kernel has no feature map");
}

Method FeatureMap::method() const {
  switch (map_.index()) {
    case 0:
      return Method::RB;
    case 1:
      return Method::RF;
    default:
      return Method::Nystrom;
  }
}

std::size_t FeatureMap::num_features() const {
  return std::visit([](const auto& m) { return m.num_features(); }, map_);
}

const KernelSpec& FeatureMap::spec() const {
  return std::visit([](const auto& m) -> const KernelSpec& { return m.spec(); }, map_);
}

SparseMatrix FeatureMap::features(const RowMatrix& x) const {
  return std::visit(
      [&](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, RbTransform>) {
          return m.transform(x);
        } else {
          return SparseMatrix::from_dense(m.transform(x));
        }
      },
      map_);
}

std::size_t FeatureMap::storage_bytes(const SparseMatrix& z) const {
  if (method() == Method::RB) return z.byte_size();
  return z.rows() * z.cols() * sizeof(double);
}

nlohmann::json FeatureMap::to_json() const {
  return std::visit([](const auto& m) { return m.to_json(); }, map_);
}

FeatureMap FeatureMap::from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "rb") return FeatureMap(RbTransform::from_json(j));
  if (type == "rf") return FeatureMap(RfTransform::from_json(j));
  if (type == "nystrom") return FeatureMap(NystromTransform::from_json(j));
  throw std::invalid_argument("FeatureMap::from_json: unknown type " + type);
}

void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace rbkit
