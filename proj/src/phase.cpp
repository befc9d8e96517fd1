#include "fibrosim/phase.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "fibrosim/equilibria.hpp"
#include "fibrosim/ode.hpp"

namespace fibrosim {

namespace {

double axis_rate(Population a, double phi_M, const ModelParams& p) {
    return growth_rate_at(a, phi_M, phi_M, p);
}

double axis_slope(Population a, double phi_M, const ModelParams& p) {
    const double h = 1e-6;
    return (axis_rate(a, std::min(phi_M + h, 1.0), p) -
            axis_rate(a, std::max(phi_M - h, 0.0), p)) /
           (std::min(phi_M + h, 1.0) - std::max(phi_M - h, 0.0));
}

}  // namespace

GammaRoots gamma_roots(Population a, const ModelParams& p) {
    GammaRoots out;
    const int n = 10000;
    std::vector<double> roots;
    double prev = axis_rate(a, 0.0, p);
    for (int i = 1; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const double v = axis_rate(a, s, p);
        if ((prev < 0.0) != (v < 0.0) || v == 0.0) {
            double lo = (i - 1.0) / n, hi = s, flo = prev;
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = axis_rate(a, mid, p);
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = v;
    }
    for (double r : roots) {
        const double slope = axis_slope(a, r, p);
        if (slope > 0.0 && !out.lower) {
            out.lower = r;
            out.slope_lower = slope;
        }
        if (slope < 0.0) {
            out.upper = r;  // keep the largest
            out.slope_upper = slope;
        }
    }
    return out;
}

void BasinBoundary::write_csv(std::ostream& os) const {
    os << "phi_M,phi_alpha\n";
    for (const auto& pt : curve) os << fmt::format("{:.17g},{:.17g}\n", pt[0], pt[1]);
}

BasinBoundary basin_boundary(Population a, BoundaryAnchor anchor, const ModelParams& p) {
    const GammaRoots roots = gamma_roots(a, p);
    const std::optional<double> start =
        anchor == BoundaryAnchor::Lower ? roots.lower : roots.upper;
    if (!start)
        throw NonexistenceError(fmt::format("basin boundary: the {} root of Gamma does not exist",
                                            anchor == BoundaryAnchor::Lower ? "lower" : "upper"));

    const CellKinetics& k = p.kinetics(a);
    auto denom = [&](double phi_M) {
        return k.matrix_production(phi_M) - k.matrix_degradation * phi_M;
    };
    auto slope = [&](double phi_M, double phi_a) {
        return growth_rate_at(a, phi_M, phi_M + phi_a, p) / denom(phi_M);
    };

    BasinBoundary b;
    b.pop = a;
    b.anchor = anchor;
    b.curve.push_back({*start, 0.0});

    // March away from the matrix-balance root so the curve traces the
    // trajectory that lands exactly on the anchor.
    const double dir = anchor == BoundaryAnchor::Lower ? -1.0 : 1.0;
    double x = *start + dir * 1e-6;  // start just off the removable 0/0
    double y = 0.0;
    const double h_base = 1e-3;
    b.termination = BoundaryTermination::LeftUnitBox;
    while (true) {
        const double d = denom(x);
        if (std::abs(d) < 1e-4) {
            b.termination = BoundaryTermination::DenominatorSingular;
            break;
        }
        if (y > 1.0 || y + x >= 1.0) {
            b.termination = BoundaryTermination::ReachedCeiling;
            break;
        }
        if (x <= 0.0 || x >= 1.0) {
            b.termination = BoundaryTermination::LeftUnitBox;
            break;
        }
        b.curve.push_back({x, y});

        // Step limited so phi_alpha moves by at most 5e-3.
        double h = h_base;
        const double s0 = slope(x, y);
        if (std::abs(s0) > 1e-12) h = std::min(h, 5e-3 / std::abs(s0));
        h = std::min({h, x, 1.0 - x});
        h = std::max(h, 1e-9) * dir;

        const double k1 = s0;
        const double k2 = slope(x + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = slope(x + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = slope(x + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += h;
        if (y < 0.0) y = 0.0;
    }
    return b;
}

char attractor_code(AttractorTag t) {
    switch (t) {
        case AttractorTag::Extinction: return 'E';
        case AttractorTag::Nontrivial: return 'N';
        case AttractorTag::Undecided: return 'U';
    }
    return '?';
}

AttractorTag classify_initial(const VolumeState& s, const ModelParams& p, double t_max,
                              double dt) {
    if (s.phi_T > 0.0 && s.phi_H > 0.0)
        throw DomainError("classify_initial expects at most one living population");
    const Population a = s.phi_T > 0.0 ? Population::Tumor : Population::Healthy;
    if (s.phi(a) < 1e-6) return AttractorTag::Extinction;

    std::optional<VolumeState> target;
    try {
        target = nontrivial_equilibrium(a, p).location;
    } catch (const Error&) {
        // no nontrivial attractor for these parameters
    }

    VolumeState y = s;
    std::int64_t clamped = 0;
    const auto n_steps = static_cast<std::int64_t>(std::ceil(t_max / dt));
    auto near_target = [&](const VolumeState& v) {
        return target && std::abs(v.phi_T - target->phi_T) < 1e-4 &&
               std::abs(v.phi_H - target->phi_H) < 1e-4 &&
               std::abs(v.phi_M - target->phi_M) < 1e-4;
    };
    for (std::int64_t i = 0; i < n_steps; ++i) {
        const auto k1 = rhs(y, p);
        VolumeState s2{y.phi_T + 0.5 * dt * k1[0], y.phi_H + 0.5 * dt * k1[1],
                       y.phi_M + 0.5 * dt * k1[2]};
        const auto k2 = rhs(s2, p);
        VolumeState s3{y.phi_T + 0.5 * dt * k2[0], y.phi_H + 0.5 * dt * k2[1],
                       y.phi_M + 0.5 * dt * k2[2]};
        const auto k3 = rhs(s3, p);
        VolumeState s4{y.phi_T + dt * k3[0], y.phi_H + dt * k3[1], y.phi_M + dt * k3[2]};
        const auto k4 = rhs(s4, p);
        y.phi_T += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y.phi_H += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        y.phi_M += dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
        for (double* c : {&y.phi_T, &y.phi_H, &y.phi_M})
            if (*c < 0.0 && *c > -1e-12) *c = 0.0, ++clamped;

        if (y.phi(a) < 1e-6) return AttractorTag::Extinction;
        if (near_target(y)) return AttractorTag::Nontrivial;
        const auto f = rhs(y, p);
        if (std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) < 1e-8)
            return near_target(y) ? AttractorTag::Nontrivial : AttractorTag::Undecided;
    }
    return AttractorTag::Undecided;
}

void BasinMap::write_csv(std::ostream& os) const {
    os << "phi_M,phi_alpha,tag\n";
    for (const auto& pt : points)
        os << fmt::format("{:.17g},{:.17g},{}\n", pt.phi_M, pt.phi_alpha,
                          attractor_code(pt.tag));
}

BasinMap sweep_grid(Population a, const ModelParams& p, int n, double t_max) {
    if (n < 2) throw DomainError("sweep_grid requires n >= 2");
    BasinMap map;
    map.pop = a;
    map.n = n;
    for (int i = 0; i < n; ++i) {
        const double phi_M = static_cast<double>(i) / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double phi_a = static_cast<double>(j) / (n - 1);
            if (phi_M + phi_a > 1.0 + 1e-12) break;
            VolumeState s;
            s.phi_M = phi_M;
            s.phi(a) = phi_a;
            map.points.push_back({phi_M, phi_a, classify_initial(s, p, t_max)});
        }
    }
    return map;
}

}  // namespace fibrosim
