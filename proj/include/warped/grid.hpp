#pragma once

#include <Eigen/Core>

namespace warped {

enum class Spacing { uniform, geometric, irregular };

/// Strictly increasing radial nodes r_0 < ... < r_N with N >= 2 and r_0 >= 0.
class RadialGrid {
 public:
  static RadialGrid uniform(double first, double last, Eigen::Index count);
  /// Geometric spacing needs first > 0.
  static RadialGrid geometric(double first, double last, Eigen::Index count);
  static RadialGrid from_nodes(Eigen::VectorXd nodes);

  const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
  Eigen::Index size() const noexcept { return nodes_.size(); }
  double operator[](Eigen::Index i) const { return nodes_[i]; }
  double front() const { return nodes_[0]; }
  double back() const { return nodes_[nodes_.size() - 1]; }
  Spacing spacing() const noexcept { return spacing_; }

  /// Index i with nodes[i] <= r <= nodes[i+1], clamped to the end panels.
  Eigen::Index panel_of(double r) const;

 private:
  RadialGrid(Eigen::VectorXd nodes, Spacing spacing);

  Eigen::VectorXd nodes_;
  Spacing spacing_;
};

}  // namespace warped
