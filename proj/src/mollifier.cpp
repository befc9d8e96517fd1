#include "fibrosim/mollifier.hpp"

#include <cmath>

namespace fibrosim {

double Mollifier::operator()(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= width) return 1.0;
    const double t = s / width;
    switch (shape) {
        case MollifierShape::PiecewiseLinear:
            return t;
        case MollifierShape::Smoothstep:
            return t * t * (3.0 - 2.0 * t);
    }
    return t;
}

double Mollifier::inverse(double y) const {
    if (!(y > 0.0 && y < 1.0))
        throw DomainError("mollifier inverse requires a value strictly in (0, 1)");
    if (shape == MollifierShape::PiecewiseLinear) return width * y;
    // Invert t^2 (3 - 2 t) = y by bisection + Newton polish.
    double lo = 0.0, hi = 1.0, t = 0.5;
    for (int i = 0; i < 80; ++i) {
        t = 0.5 * (lo + hi);
        const double f = t * t * (3.0 - 2.0 * t) - y;
        (f < 0.0 ? lo : hi) = t;
    }
    for (int i = 0; i < 3; ++i) {
        const double f = t * t * (3.0 - 2.0 * t) - y;
        const double df = 6.0 * t * (1.0 - t);
        if (df > 0.0) t -= f / df;
    }
    return width * t;
}

double Mollifier::lipschitz() const {
    switch (shape) {
        case MollifierShape::PiecewiseLinear:
            return 1.0 / width;
        case MollifierShape::Smoothstep:
            return 1.5 / width;  // max of 6t(1-t)/width at t = 1/2
    }
    return 1.0 / width;
}

}  // namespace fibrosim
