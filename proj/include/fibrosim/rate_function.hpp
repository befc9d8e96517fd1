#pragma once

#include <utility>
#include <vector>

#include "fibrosim/errors.hpp"

namespace fibrosim {

enum class RateFamily {
    Affine,      // a + b*s
    Saturating,  // a*s / (b + s), b > 0
    Tabulated    // piecewise-linear interpolation of (s, value) samples
};

/// Scalar rate law on [0, 1] with a declared Lipschitz constant and
/// monotonicity direction. Growth laws must vanish at 0 and be
/// nondecreasing; production laws must be nonincreasing (checked by
/// validate_params, not enforced here).
class RateFunction {
  public:
    RateFunction() = default;  // identity map: affine(0, 1)

    static RateFunction affine(double a, double b);
    static RateFunction saturating(double a, double b);
    static RateFunction tabulated(std::vector<std::pair<double, double>> samples);

    double operator()(double s) const;
    double lipschitz() const { return lipschitz_; }
    /// +1 nondecreasing, -1 nonincreasing, 0 neither.
    int monotonicity() const { return monotonicity_; }
    RateFamily family() const { return family_; }
    double coef_a() const { return a_; }
    double coef_b() const { return b_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  private:
    RateFamily family_ = RateFamily::Affine;
    double a_ = 0.0, b_ = 1.0;
    std::vector<std::pair<double, double>> samples_;
    double lipschitz_ = 1.0;
    int monotonicity_ = 1;
};

}  // namespace fibrosim
