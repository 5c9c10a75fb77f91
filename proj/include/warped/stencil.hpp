#pragma once

#include <array>

#include <Eigen/Core>

#include "warped/grid.hpp"

namespace warped {

/// Fornberg's recursion: weights for derivatives 0..2 at `x0` from `nodes`.
template <typename Scalar, int N>
std::array<std::array<Scalar, N>, 3> fornberg_weights(Scalar x0,
                                                      const std::array<Scalar, N>& nodes) {
  std::array<std::array<Scalar, N>, 3> c{};
  Scalar c1 = 1;
  Scalar c4 = nodes[0] - x0;
  c[0][0] = 1;
  for (int i = 1; i < N; ++i) {
    const int mn = i < 2 ? i : 2;
    Scalar c2 = 1;
    const Scalar c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const Scalar c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// First and second derivative stencils on a radial grid.
///
/// Interior nodes use the three-point formulas (exact on quadratics, second
/// order on uniform spacing). End nodes use one-sided second-order stencils:
/// three points for f', four points for f''.
class DerivativeStencil {
 public:
  explicit DerivativeStencil(const RadialGrid& grid);

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> first(
      const Eigen::MatrixBase<Derived>& f) const {
    return apply(first_, f);
  }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> second(
      const Eigen::MatrixBase<Derived>& f) const {
    return apply(second_, f);
  }

  Eigen::Index size() const noexcept { return offset_.size(); }

 private:
  // Four weights per node starting at node offset_[i]; unused weights are zero.
  using Weights = Eigen::Matrix<double, Eigen::Dynamic, 4>;

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply(
      const Weights& w, const Eigen::MatrixBase<Derived>& f) const {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = offset_.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index o = offset_[i];
      Scalar acc(0);
      for (int k = 0; k < 4 && o + k < n; ++k) {
        if (w(i, k) != 0.0) acc += w(i, k) * f(o + k);
      }
      out[i] = acc;
    }
    return out;
  }

  Eigen::VectorXi offset_;
  Weights first_;
  Weights second_;
};

}  // namespace warped
