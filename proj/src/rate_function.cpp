#include "fibrosim/rate_function.hpp"

#include <algorithm>
#include <cmath>

namespace fibrosim {

RateFunction RateFunction::affine(double a, double b) {
    RateFunction f;
    f.family_ = RateFamily::Affine;
    f.a_ = a;
    f.b_ = b;
    f.lipschitz_ = std::abs(b);
    f.monotonicity_ = b > 0.0 ? 1 : (b < 0.0 ? -1 : 1);
    return f;
}

RateFunction RateFunction::saturating(double a, double b) {
    if (b <= 0.0) throw DomainError("saturating rate requires half-saturation b > 0");
    RateFunction f;
    f.family_ = RateFamily::Saturating;
    f.a_ = a;
    f.b_ = b;
    f.lipschitz_ = std::abs(a) / b;  // slope at s = 0
    f.monotonicity_ = a >= 0.0 ? 1 : -1;
    return f;
}

RateFunction RateFunction::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw DomainError("tabulated rate needs at least two samples");
    std::sort(samples.begin(), samples.end());
    RateFunction f;
    f.family_ = RateFamily::Tabulated;
    // Lipschitz constant estimated as the maximum interpolation slope.
    double lip = 0.0;
    bool up = true, down = true;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double ds = samples[i].first - samples[i - 1].first;
        const double dy = samples[i].second - samples[i - 1].second;
        if (ds <= 0.0) throw DomainError("tabulated rate requires strictly increasing abscissae");
        lip = std::max(lip, std::abs(dy / ds));
        if (dy > 0.0) down = false;
        if (dy < 0.0) up = false;
    }
    f.lipschitz_ = lip;
    f.monotonicity_ = up ? 1 : (down ? -1 : 0);
    f.samples_ = std::move(samples);
    return f;
}

double RateFunction::operator()(double s) const {
    switch (family_) {
        case RateFamily::Affine:
            return a_ + b_ * s;
        case RateFamily::Saturating:
            return a_ * s / (b_ + s);
        case RateFamily::Tabulated: {
            if (s <= samples_.front().first) return samples_.front().second;
            if (s >= samples_.back().first) return samples_.back().second;
            auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                                       [](double x, const auto& p) { return x < p.first; });
            const auto& [s1, y1] = *it;
            const auto& [s0, y0] = *(it - 1);
            return y0 + (y1 - y0) * (s - s0) / (s1 - s0);
        }
    }
    return 0.0;
}

}  // namespace fibrosim
