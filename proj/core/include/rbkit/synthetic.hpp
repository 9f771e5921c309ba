#pragma once

#include <cstddef>
#include <cstdint>

#include "rbkit/data_io.hpp"

namespace rbkit {

struct SyntheticSplit {
  Dataset train;
  Dataset test;
};

/// Regression data: inputs uniform on [0,1]^dim, targets one joint draw of a
/// zero-mean Gaussian process with Laplacian covariance (width kernel_sigma)
/// plus N(0, noise_std^2) noise. Train and test share the draw.
SyntheticSplit make_gp_regression(std::size_t n_train, std::size_t n_test, std::size_t dim,
                                  double kernel_sigma, double noise_std, std::uint64_t seed);

/// Binary classification: each class is a mixture of `blobs_per_class`
/// isotropic Gaussian blobs (std `spread`) with centers uniform on [0,1]^dim.
SyntheticSplit make_mixture_classification(std::size_t n_train, std::size_t n_test,
                                           std::size_t dim, std::size_t blobs_per_class,
                                           double spread, std::uint64_t seed);

}  // namespace rbkit
