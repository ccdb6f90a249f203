#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

#include "zeno/errors.hpp"

namespace zeno {

/// J_0(x) .. J_{n_max}(x) for x >= 0 by Miller's backward recurrence
///   J_{n-1}(x) = (2n/x) J_n(x) - J_{n+1}(x),
/// started well above max(n_max, x) and normalized with
///   J_0^2 + 2 sum_{n>=1} J_n^2 = 1,
/// with the overall sign fixed by J_0 + 2 sum_{n>=1} J_{2n} = 1.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bessel_j_sequence(Scalar x, Eigen::Index n_max) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(x >= Scalar(0))) throw InvalidArgument("bessel_j_sequence: argument must be non-negative");
  if (n_max < 0) throw InvalidArgument("bessel_j_sequence: order must be non-negative");

  Vec out = Vec::Zero(n_max + 1);
  if (x == Scalar(0)) {
    out(0) = Scalar(1);
    return out;
  }

  // Start order: far enough beyond the turning point n = x that the
  // arbitrary starting values have decayed below double resolution.
  const auto turning = static_cast<Eigen::Index>(std::ceil(x));
  Eigen::Index start = std::max(n_max, turning) + 40 + static_cast<Eigen::Index>(6 * std::sqrt(x + 1));
  start += start % 2;

  Vec j = Vec::Zero(start + 2);
  j(start + 1) = Scalar(0);
  j(start) = Scalar(1);
  // Keeps every value small enough that the sum of squares stays finite.
  const Scalar rescale_at = Scalar(1e100);
  for (Eigen::Index n = start; n >= 1; --n) {
    j(n - 1) = Scalar(2 * n) / x * j(n) - j(n + 1);
    if (std::abs(j(n - 1)) > rescale_at) {
      j.segment(n - 1, start - n + 2) /= rescale_at;
    }
  }

  Scalar squares = j(0) * j(0);
  Scalar even_sum = j(0);
  for (Eigen::Index n = 1; n <= start; ++n) {
    squares += Scalar(2) * j(n) * j(n);
    if (n % 2 == 0) even_sum += Scalar(2) * j(n);
  }
  Scalar scale = Scalar(1) / std::sqrt(squares);
  if (even_sum < Scalar(0)) scale = -scale;

  out = j.head(n_max + 1) * scale;
  return out;
}

}  // namespace zeno
