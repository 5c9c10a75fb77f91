#include "warped/stencil.hpp"

#include <stdexcept>

namespace warped {

DerivativeStencil::DerivativeStencil(const RadialGrid& grid) {
  const Eigen::Index n = grid.size();
  if (n < 4) throw std::invalid_argument("DerivativeStencil needs at least four nodes");
  const Eigen::VectorXd& x = grid.nodes();
  offset_.resize(n);
  first_ = Weights::Zero(n, 4);
  second_ = Weights::Zero(n, 4);

  auto fill_end = [&](Eigen::Index row, Eigen::Index start) {
    offset_[row] = static_cast<int>(start);
    const std::array<double, 4> nodes = {x[start], x[start + 1], x[start + 2], x[start + 3]};
    const std::array<double, 3> nodes3 = row == start
                                             ? std::array<double, 3>{x[start], x[start + 1], x[start + 2]}
                                             : std::array<double, 3>{x[start + 1], x[start + 2], x[start + 3]};
    const auto w4 = fornberg_weights<double, 4>(x[row], nodes);
    const auto w3 = fornberg_weights<double, 3>(x[row], nodes3);
    for (int k = 0; k < 4; ++k) second_(row, k) = w4[2][k];
    const int shift = row == start ? 0 : 1;
    for (int k = 0; k < 3; ++k) first_(row, k + shift) = w3[1][k];
  };
  fill_end(0, 0);
  fill_end(n - 1, n - 4);

  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    offset_[i] = static_cast<int>(i - 1);
    const std::array<double, 3> nodes = {x[i - 1], x[i], x[i + 1]};
    const auto w = fornberg_weights<double, 3>(x[i], nodes);
    for (int k = 0; k < 3; ++k) {
      first_(i, k) = w[1][k];
      second_(i, k) = w[2][k];
    }
  }
}

}  // namespace warped
