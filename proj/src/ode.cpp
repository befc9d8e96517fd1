#include "fibrosim/ode.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <ostream>

namespace fibrosim {

namespace {

constexpr double kClampBand = 1e-12;
constexpr double kBlowupBand = 1e-6;

VolumeState clamp_state(VolumeState s, std::int64_t& clamped) {
    for (double* c : {&s.phi_T, &s.phi_H, &s.phi_M}) {
        if (*c < 0.0) {
            if (*c < -kClampBand)
                continue;  // left to the blow-up check
            *c = 0.0;
            ++clamped;
        }
    }
    return s;
}

void check_bounds(const VolumeState& s, double t) {
    for (double c : {s.phi_T, s.phi_H, s.phi_M}) {
        if (!(c >= -kBlowupBand && c <= 1.0 + kBlowupBand))
            throw InstabilityError(
                fmt::format("state component {} outside [-1e-6, 1+1e-6] at t = {}; "
                            "reduce the time step",
                            c, t));
    }
}

}  // namespace

VolumeState Trajectory::sample(double t) const {
    if (times.empty()) throw DomainError("empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::lower_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double t1 = times[i], t0 = times[i - 1];
    const double w = (t - t0) / (t1 - t0);
    const VolumeState &a = states[i - 1], &b = states[i];
    return {a.phi_T + w * (b.phi_T - a.phi_T), a.phi_H + w * (b.phi_H - a.phi_H),
            a.phi_M + w * (b.phi_M - a.phi_M)};
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,phi_T,phi_H,phi_M,psi\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        const VolumeState& s = states[i];
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", times[i], s.phi_T, s.phi_H,
                          s.phi_M, s.psi());
    }
}

std::array<double, 3> rhs(const VolumeState& s, const ModelParams& p) {
    return {growth_rate(Population::Tumor, s, p) * s.phi_T,
            growth_rate(Population::Healthy, s, p) * s.phi_H, matrix_rate(s, p)};
}

Trajectory integrate_rk(const VolumeState& initial, const ModelParams& p, double t_end, double dt,
                        int record_stride) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw DomainError("integrate_rk requires dt, t_end > 0");
    if (!initial.admissible()) throw DomainError("integrate_rk requires an admissible initial state");
    if (record_stride < 1) record_stride = 1;

    Trajectory traj;
    traj.meta.method = "rk4";
    traj.meta.dt = dt;
    const std::int64_t n_steps = static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-12));
    traj.times.reserve(static_cast<std::size_t>(n_steps / record_stride) + 2);
    traj.states.reserve(traj.times.capacity());

    VolumeState y = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(y);

    auto advance = [&](const VolumeState& s, double h) {
        const auto k1 = rhs(s, p);
        VolumeState s2{s.phi_T + 0.5 * h * k1[0], s.phi_H + 0.5 * h * k1[1],
                       s.phi_M + 0.5 * h * k1[2]};
        const auto k2 = rhs(s2, p);
        VolumeState s3{s.phi_T + 0.5 * h * k2[0], s.phi_H + 0.5 * h * k2[1],
                       s.phi_M + 0.5 * h * k2[2]};
        const auto k3 = rhs(s3, p);
        VolumeState s4{s.phi_T + h * k3[0], s.phi_H + h * k3[1], s.phi_M + h * k3[2]};
        const auto k4 = rhs(s4, p);
        return VolumeState{s.phi_T + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                           s.phi_H + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
                           s.phi_M + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])};
    };

    double t = 0.0;
    for (std::int64_t i = 0; i < n_steps; ++i) {
        const double h = std::min(dt, t_end - t);
        y = clamp_state(advance(y, h), traj.meta.clamped);
        t = (i + 1 < n_steps) ? t + h : t_end;
        check_bounds(y, t);
        if ((i + 1) % record_stride == 0 || i + 1 == n_steps) {
            traj.times.push_back(t);
            traj.states.push_back(y);
        }
    }
    traj.meta.iterations = n_steps;
    return traj;
}

double picard_lambda(const ModelParams& p) {
    double m = 0.0;
    for (Population a : {Population::Tumor, Population::Healthy}) {
        const CellKinetics& k = p.kinetics(a);
        m = std::max(m, k.apoptosis + k.anoikis);
    }
    m = std::max(m, p.tumor.matrix_degradation + p.healthy.matrix_degradation);
    double free_rate = 0.0;
    for (Population a : {Population::Tumor, Population::Healthy}) {
        const CellKinetics& k = p.kinetics(a);
        free_rate += k.growth(1.0) * k.crowding_switch.lipschitz() +
                     k.matrix_production(0.0) * p.matrix_switch.lipschitz();
    }
    m = std::max(m, free_rate);
    return 1.05 * m + 0.1;
}

double picard_lipschitz(const ModelParams& p) {
    double c = 0.0;
    for (Population a : {Population::Tumor, Population::Healthy}) {
        const CellKinetics& k = p.kinetics(a);
        const double bound = k.growth(1.0) + k.apoptosis + k.anoikis;
        const double lip = k.growth.lipschitz() + k.growth(1.0) * k.crowding_switch.lipschitz() +
                           k.anoikis * p.matrix_switch.lipschitz();
        c += bound + lip;
        const double bound_m = k.matrix_production(0.0) + k.matrix_degradation;
        const double lip_m = k.matrix_production.lipschitz() +
                             k.matrix_production(0.0) * p.matrix_switch.lipschitz() +
                             k.matrix_degradation;
        c += bound_m + lip_m;
    }
    return 2.0 * c;
}

namespace {

using Aug = std::array<double, 4>;

Aug augmented_rhs(const Aug& u, const ModelParams& p) {
    const VolumeState s{u[0], u[1], u[2]};
    const auto f = rhs(s, p);
    return {f[0], f[1], f[2], -(f[0] + f[1] + f[2])};
}

}  // namespace

Trajectory integrate_picard(const VolumeState& initial, const ModelParams& p, double t_end,
                            const PicardOptions& opt) {
    if (!(t_end > 0.0)) throw DomainError("integrate_picard requires t_end > 0");
    if (!initial.admissible() || initial.free_space() < -1e-12)
        throw DomainError("integrate_picard requires an admissible initial state");

    const double lambda = picard_lambda(p);
    const double c_lip = picard_lipschitz(p);
    const int n = opt.quadrature_n;

    // Window bounded by the contraction requirement W (C + lambda) < 1 and by
    // the trapezoid drift of the exponential weight, which must keep the
    // augmented sum within 1e-8 of its exact value at the window end.
    double window =
        std::min(0.3 / (c_lip + lambda), 0.017 * std::pow(n / 64.0, 2.0 / 3.0) / lambda);
    if (opt.window > 0.0) {
        if (opt.window * (c_lip + lambda) >= 1.0)
            throw NonContractionError(
                fmt::format("window {} gives contraction factor {} >= 1", opt.window,
                            opt.window * (c_lip + lambda)));
        window = opt.window;
    }

    Trajectory traj;
    traj.meta.method = "picard";
    traj.meta.dt = window;
    traj.meta.lambda = lambda;
    traj.times.push_back(0.0);
    traj.states.push_back(initial);

    std::vector<Aug> psi(n + 1), g(n + 1), integrand(n + 1);
    VolumeState state = initial;
    double t = 0.0;
    while (t < t_end - 1e-12) {
        const double w = std::min(window, t_end - t);
        const double h = w / n;

        const Aug phi0{state.phi_T, state.phi_H, state.phi_M,
                       std::max(state.free_space(), 0.0)};
        for (int j = 0; j <= n; ++j) {
            const double e = std::exp(lambda * h * j);
            for (int c = 0; c < 4; ++c) psi[j][c] = phi0[c] * e;
        }

        bool converged = false;
        for (int it = 0; it < opt.max_iterations; ++it) {
            for (int j = 0; j <= n; ++j) {
                const double tau = h * j;
                const double down = std::exp(-lambda * tau), up = std::exp(lambda * tau);
                Aug phi;
                for (int c = 0; c < 4; ++c) phi[c] = psi[j][c] * down;
                const Aug f = augmented_rhs(phi, p);
                for (int c = 0; c < 4; ++c) integrand[j][c] = up * f[c] + lambda * psi[j][c];
            }
            g[0] = phi0;
            for (int j = 1; j <= n; ++j)
                for (int c = 0; c < 4; ++c)
                    g[j][c] = g[j - 1][c] + 0.5 * h * (integrand[j - 1][c] + integrand[j][c]);

            double change = 0.0;
            for (int j = 0; j <= n; ++j) {
                double d = 0.0;
                for (int c = 0; c < 4; ++c) d += std::abs(g[j][c] - psi[j][c]);
                change = std::max(change, d);
            }
            psi.swap(g);
            ++traj.meta.iterations;
            if (change < opt.tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ConvergenceError(fmt::format(
                "picard window starting at t = {} did not converge in {} sweeps", t,
                opt.max_iterations));

        const double down_end = std::exp(-lambda * w);
        Aug phi_end;
        double sum = 0.0;
        for (int c = 0; c < 4; ++c) {
            phi_end[c] = psi[n][c] * down_end;
            sum += phi_end[c];
        }
        traj.meta.max_sum_drift = std::max(traj.meta.max_sum_drift, std::abs(sum - 1.0));

        state = clamp_state(VolumeState{phi_end[0], phi_end[1], phi_end[2]}, traj.meta.clamped);
        t += w;
        check_bounds(state, t);
        traj.times.push_back(t);
        traj.states.push_back(state);
    }
    return traj;
}

DependenceReport continuous_dependence_check(const VolumeState& a, const VolumeState& b,
                                             const ModelParams& p, double t_end, double dt) {
    DependenceReport r;
    r.initial_distance = std::abs(a.phi_T - b.phi_T) + std::abs(a.phi_H - b.phi_H) +
                         std::abs(a.phi_M - b.phi_M);
    const Trajectory ta = integrate_rk(a, p, t_end, dt);
    const Trajectory tb = integrate_rk(b, p, t_end, dt);

    double sup = 0.0;
    for (std::size_t i = 0; i < ta.times.size(); ++i) {
        const VolumeState sa = ta.states[i];
        const VolumeState sb = tb.sample(ta.times[i]);
        sup = std::max(sup, std::abs(sa.phi_T - sb.phi_T) + std::abs(sa.phi_H - sb.phi_H) +
                                std::abs(sa.phi_M - sb.phi_M));
    }
    const double rate = picard_lipschitz(p) + picard_lambda(p);
    const double expo = rate * t_end;
    r.bound = expo > 700.0 ? std::numeric_limits<double>::infinity()
                           : (1.0 + rate * t_end * std::exp(expo)) * 2.0;
    if (r.initial_distance == 0.0) {
        r.observed_ratio = sup == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.passed = sup == 0.0;
    } else {
        r.observed_ratio = sup / r.initial_distance;
        r.passed = r.observed_ratio <= r.bound;
    }
    return r;
}

}  // namespace fibrosim
