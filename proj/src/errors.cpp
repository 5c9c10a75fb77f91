#include "warped/errors.hpp"

#include <fmt/format.h>

namespace warped {

ConjugatePointError::ConjugatePointError(double radius)
    : std::runtime_error(fmt::format(
          "conjugate point: warp function vanishes at r* = {:.10g}", radius)),
      radius_(radius) {}

QuadratureError::QuadratureError(const std::string& what, double a, double b)
    : std::runtime_error(
          fmt::format("{} (worst interval [{:.6g}, {:.6g}])", what, a, b)),
      lower_(a),
      upper_(b) {}

}  // namespace warped
