#pragma once

#include "fibrosim/errors.hpp"

namespace fibrosim {

enum class MollifierShape {
    PiecewiseLinear,  // linear ramp on [0, width]
    Smoothstep        // C^1 cubic ramp on [0, width]
};

/// Lipschitz ramp replacing a sharp on/off switch: 0 below 0, 1 above width,
/// nondecreasing in between.
struct Mollifier {
    double width = 0.1;
    MollifierShape shape = MollifierShape::PiecewiseLinear;

    double operator()(double s) const;

    /// Unique s in (0, width) with H(s) = y. Requires y strictly in (0, 1);
    /// outside that the preimage is not a single point.
    double inverse(double y) const;

    double lipschitz() const;

    Mollifier smoothed() const { return {width, MollifierShape::Smoothstep}; }
};

}  // namespace fibrosim
