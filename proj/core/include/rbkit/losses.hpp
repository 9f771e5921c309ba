#pragma once

#include <string>

namespace rbkit {

enum class LossKind { Square, Logistic, SquaredHinge };

/// Smooth loss L(z, y) on a response z. beta bounds |L'(z1,y) - L'(z2,y)| / |z1 - z2|.
///
///   Square        0.5 (z - y)^2                beta = 1
///   Logistic      log(1 + exp(-y z))           beta = 1/4, y in {-1, +1}
///   SquaredHinge  0.5 max(0, 1 - y z)^2        beta = 1,   y in {-1, +1}
struct LossSpec {
  LossKind kind = LossKind::Square;

  double beta() const;
  double value(double z, double y) const;
  double derivative(double z, double y) const;
};

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

}  // namespace rbkit
