#pragma once

#include <span>
#include <vector>

namespace sqa {

// Fritsch-Carlson monotone cubic Hermite interpolant through (x_i, y_i) with
// strictly increasing x. Constant extrapolation outside the knots.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  bool empty() const noexcept { return x_.empty(); }

 private:
  std::vector<double> x_, y_, slope_;
};

}  // namespace sqa
