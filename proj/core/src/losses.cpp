#include "rbkit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbkit {

double LossSpec::beta() const {
  switch (kind) {
    case LossKind::Square:
      return 1.0;
    case LossKind::Logistic:
      return 0.25;
    case LossKind::SquaredHinge:
      return 1.0;
  }
  return 1.0;
}

double LossSpec::value(double z, double y) const {
  switch (kind) {
    case LossKind::Square: {
      const double r = z - y;
      return 0.5 * r * r;
    }
    case LossKind::Logistic: {
      const double m = -y * z;
      // softplus(m) without overflow
      return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    case LossKind::SquaredHinge: {
      const double slack = std::max(0.0, 1.0 - y * z);
      return 0.5 * slack * slack;
    }
  }
  return 0.0;
}

double LossSpec::derivative(double z, double y) const {
  switch (kind) {
    case LossKind::Square:
      return z - y;
    case LossKind::Logistic: {
      const double m = y * z;
      // -y * sigmoid(-m)
      if (m >= 0.0) {
        const double e = std::exp(-m);
        return -y * e / (1.0 + e);
      }
      return -y / (1.0 + std::exp(m));
    }
    case LossKind::SquaredHinge:
      return -y * std::max(0.0, 1.0 - y * z);
  }
  return 0.0;
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Square:
      return "square";
    case LossKind::Logistic:
      return "logistic";
    case LossKind::SquaredHinge:
      return "squared-hinge";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "square") return LossKind::Square;
  if (name == "logistic") return LossKind::Logistic;
  if (name == "squared-hinge") return LossKind::SquaredHinge;
  throw std::invalid_argument("unknown loss: " + name +
                              " (expected square, logistic, squared-hinge)");
}

}  // namespace rbkit
