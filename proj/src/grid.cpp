#include "warped/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warped {

RadialGrid::RadialGrid(Eigen::VectorXd nodes, Spacing spacing)
    : nodes_(std::move(nodes)), spacing_(spacing) {
  if (nodes_.size() < 3) {
    throw std::invalid_argument("RadialGrid needs at least three nodes");
  }
  if (!(nodes_[0] >= 0.0) || !nodes_.allFinite()) {
    throw std::invalid_argument("RadialGrid nodes must be finite and >= 0");
  }
  for (Eigen::Index i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("RadialGrid nodes must strictly increase");
    }
  }
  if (spacing_ == Spacing::geometric && !(nodes_[0] > 0.0)) {
    throw std::invalid_argument("geometric RadialGrid needs r_0 > 0");
  }
}

RadialGrid RadialGrid::uniform(double first, double last, Eigen::Index count) {
  if (count < 3) throw std::invalid_argument("RadialGrid needs at least three nodes");
  Eigen::VectorXd nodes = Eigen::VectorXd::LinSpaced(count, first, last);
  nodes[count - 1] = last;
  return RadialGrid(std::move(nodes), Spacing::uniform);
}

RadialGrid RadialGrid::geometric(double first, double last, Eigen::Index count) {
  if (!(first > 0.0)) throw std::invalid_argument("geometric RadialGrid needs r_0 > 0");
  if (count < 3) throw std::invalid_argument("RadialGrid needs at least three nodes");
  Eigen::VectorXd nodes =
      Eigen::VectorXd::LinSpaced(count, std::log(first), std::log(last)).array().exp();
  nodes[0] = first;
  nodes[count - 1] = last;
  return RadialGrid(std::move(nodes), Spacing::geometric);
}

RadialGrid RadialGrid::from_nodes(Eigen::VectorXd nodes) {
  return RadialGrid(std::move(nodes), Spacing::irregular);
}

Eigen::Index RadialGrid::panel_of(double r) const {
  const double* begin = nodes_.data();
  const double* end = begin + nodes_.size();
  auto it = std::upper_bound(begin, end, r);
  Eigen::Index i = static_cast<Eigen::Index>(it - begin) - 1;
  return std::clamp<Eigen::Index>(i, 0, nodes_.size() - 2);
}

}  // namespace warped
