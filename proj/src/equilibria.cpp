#include "fibrosim/equilibria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>

#include "fibrosim/ode.hpp"
#include "nlohmann/json.hpp"

namespace fibrosim {

std::string to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::TrivialFamily: return "trivial-family";
        case EquilibriumKind::Physiological: return "physiological";
        case EquilibriumKind::Pathological: return "pathological";
    }
    return "?";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "?";
}

std::string EquilibriumReport::to_json() const {
    nlohmann::json j;
    j["location"] = {{"phi_T", location.phi_T}, {"phi_H", location.phi_H},
                     {"phi_M", location.phi_M}};
    j["kind"] = to_string(kind);
    j["jacobian"] = jacobian;
    auto eig = nlohmann::json::array();
    for (const auto& e : eigenvalues) eig.push_back({{"re", e.real()}, {"im", e.imag()}});
    j["eigenvalues"] = eig;
    j["verdict"] = to_string(verdict);
    if (restricted_verdict) j["restricted_verdict"] = to_string(*restricted_verdict);
    j["residual"] = residual;
    j["kink_flag"] = kink_flag;
    if (!notes.empty()) j["notes"] = notes;
    return j.dump(2);
}

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

MatrixRootResult find_matrix_root(Population a, const ModelParams& p) {
    const CellKinetics& k = p.kinetics(a);
    const double hi = k.crowding_threshold;
    if (!(hi > 0.0)) throw NonexistenceError("matrix root: psi_alpha must be positive");
    auto f = [&](double s) { return k.matrix_production(s) - k.matrix_degradation * s; };

    MatrixRootResult r;
    if (k.matrix_production(0.0) <= 1e-14) {
        // mu vanishes at 0 (hence everywhere relevant, mu being nonincreasing):
        // only the boundary zero of mu - nu s remains.
        r.degenerate_zero = true;
        r.root = 0.0;
        return r;
    }
    const int n = 1000;
    double prev = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double s = hi * i / n;
        const double v = f(s);
        if ((prev < 0.0) != (v < 0.0) || v == 0.0) {
            ++r.sign_changes;
            r.all_roots.push_back(bisect(f, hi * (i - 1) / n, s));
        }
        prev = v;
    }
    if (r.all_roots.empty()) {
        if (std::abs(f(0.0)) <= 1e-14) {
            r.root = 0.0;
            r.degenerate_zero = true;
            return r;
        }
        throw NonexistenceError(fmt::format(
            "matrix balance mu - nu s has no sign change on [0, {}]", hi));
    }
    r.root = r.all_roots.front();
    return r;
}

Matrix3 jacobian(const VolumeState& s, const ModelParams& p, const JacobianOptions& opt,
                 bool* kink_flag) {
    if (kink_flag) {
        *kink_flag = false;
        // Ramp corners of the piecewise-linear switches near the evaluation point.
        auto near_kink = [](double arg, double eps) {
            return std::abs(arg) < 1e-6 || std::abs(arg - eps) < 1e-6;
        };
        const double psi = s.psi();
        for (Population a : {Population::Tumor, Population::Healthy}) {
            const CellKinetics& k = p.kinetics(a);
            if (k.crowding_switch.shape == MollifierShape::PiecewiseLinear &&
                near_kink(k.crowding_threshold - psi, k.crowding_switch.width))
                *kink_flag = true;
            if (p.matrix_switch.shape == MollifierShape::PiecewiseLinear &&
                near_kink(k.adhesion_threshold - s.phi_M, p.matrix_switch.width))
                *kink_flag = true;
        }
        if (p.matrix_switch.shape == MollifierShape::PiecewiseLinear &&
            near_kink(p.matrix_crowding_threshold - psi, p.matrix_switch.width))
            *kink_flag = true;
    }

    const ModelParams q = opt.smooth_switches ? p.with_smooth_switches() : p;
    Matrix3 j{};
    const double h = opt.step;
    for (int col = 0; col < 3; ++col) {
        VolumeState up = s, dn = s;
        double* cu = col == 0 ? &up.phi_T : col == 1 ? &up.phi_H : &up.phi_M;
        double* cd = col == 0 ? &dn.phi_T : col == 1 ? &dn.phi_H : &dn.phi_M;
        *cu += h;
        *cd -= h;
        const auto fu = rhs(up, q);
        const auto fd = rhs(dn, q);
        for (int row = 0; row < 3; ++row) j[row][col] = (fu[row] - fd[row]) / (2.0 * h);
    }
    return j;
}

std::array<std::complex<double>, 3> eigenvalues3(const Matrix3& m) {
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = m[r][c];
    Eigen::EigenSolver<Eigen::Matrix3d> solver(a, false);
    std::array<std::complex<double>, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = solver.eigenvalues()(i);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    return out;
}

Stability classify_stability(const std::array<std::complex<double>, 3>& eig, double tol) {
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& e : eig) max_re = std::max(max_re, e.real());
    if (max_re < -tol) return Stability::Stable;
    if (max_re > tol) return Stability::Unstable;
    return Stability::Marginal;
}

namespace {

Stability block_stability(const Matrix3& j, int r0, int r1, double tol = 1e-6) {
    Eigen::Matrix2d a;
    a << j[r0][r0], j[r0][r1], j[r1][r0], j[r1][r1];
    Eigen::EigenSolver<Eigen::Matrix2d> solver(a, false);
    const double max_re =
        std::max(solver.eigenvalues()(0).real(), solver.eigenvalues()(1).real());
    if (max_re < -tol) return Stability::Stable;
    if (max_re > tol) return Stability::Unstable;
    return Stability::Marginal;
}

EquilibriumReport finish_report(VolumeState loc, EquilibriumKind kind, const ModelParams& p) {
    EquilibriumReport rep;
    rep.location = loc;
    rep.kind = kind;
    const auto f = rhs(loc, p);
    rep.residual = std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]);
    rep.jacobian = jacobian(loc, p, {}, &rep.kink_flag);
    rep.eigenvalues = eigenvalues3(rep.jacobian);
    rep.verdict = classify_stability(rep.eigenvalues);
    switch (kind) {
        case EquilibriumKind::Physiological:
            rep.restricted_verdict = block_stability(rep.jacobian, 1, 2);
            break;
        case EquilibriumKind::Pathological:
            rep.restricted_verdict = block_stability(rep.jacobian, 0, 2);
            break;
        case EquilibriumKind::TrivialFamily:
            rep.restricted_verdict = block_stability(rep.jacobian, 0, 1);
            break;
    }
    return rep;
}

}  // namespace

EquilibriumReport nontrivial_equilibrium(Population a, const ModelParams& p) {
    const CellKinetics& k = p.kinetics(a);
    const MatrixRootResult root = find_matrix_root(a, p);
    if (root.degenerate_zero)
        throw NonexistenceError("nontrivial equilibrium: matrix balance only vanishes at 0");
    const double m = root.root;

    const double growth = k.growth(m);
    if (growth == 0.0)
        throw DomainError("nontrivial equilibrium: gamma vanishes at the matrix root");
    const double arg =
        (k.apoptosis + k.anoikis * p.matrix_switch(k.adhesion_threshold - m)) / growth;
    if (!(arg > 0.0 && arg < 1.0))
        throw NonexistenceError(fmt::format(
            "nontrivial equilibrium does not exist: switch inverse argument {} outside (0, 1)",
            arg));
    const double phi_a = k.crowding_threshold - m - k.crowding_switch.inverse(arg);
    if (!(phi_a > 0.0))
        throw NonexistenceError(fmt::format(
            "nontrivial equilibrium does not exist: nonpositive cell fraction {}", phi_a));

    // The closed form assumes the matrix deposition switch is fully open at
    // the equilibrium: psi_M = 1 and occupancy at least 2 eps_M below it.
    const double eta = 2.0 * p.matrix_switch.width;
    std::string notes;
    if (std::abs(p.matrix_crowding_threshold - 1.0) > 1e-12)
        throw NonexistenceError("nontrivial equilibrium closed form requires psi_M = 1");
    if (phi_a + m > 1.0 - eta)
        throw NonexistenceError(fmt::format(
            "nontrivial equilibrium: occupancy {} violates phi_alpha + phi_M <= 1 - {}",
            phi_a + m, eta));

    VolumeState loc;
    loc.phi_M = m;
    loc.phi(a) = phi_a;
    const EquilibriumKind kind =
        a == Population::Healthy ? EquilibriumKind::Physiological : EquilibriumKind::Pathological;
    EquilibriumReport rep = finish_report(loc, kind, p);
    if (root.sign_changes > 1)
        rep.notes = fmt::format("matrix balance has {} sign changes; using the smallest root",
                                root.sign_changes);
    if (rep.residual >= 1e-10)
        throw ConvergenceError(
            fmt::format("equilibrium residual {} exceeds 1e-10", rep.residual));
    return rep;
}

EquilibriumReport trivial_equilibrium(double phi_M, const ModelParams& p) {
    if (!(phi_M >= 0.0 && phi_M <= 1.0))
        throw DomainError("trivial equilibrium requires phi_M in [0, 1]");
    EquilibriumReport rep = finish_report({0.0, 0.0, phi_M}, EquilibriumKind::TrivialFamily, p);
    rep.notes = "line of equilibria: structural zero eigenvalue along phi_M; "
                "restricted verdict is the transverse (phi_T, phi_H) block";
    return rep;
}

MixedScanReport mixed_equilibrium_scan(const ModelParams& p, int grid_n, double threshold) {
    if (grid_n < 2) throw DomainError("mixed_equilibrium_scan requires grid_n >= 2");
    MixedScanReport r;
    r.min_max_rate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        const double phi_T = static_cast<double>(i) / (grid_n - 1);
        if (phi_T < 0.01) continue;
        for (int j = 0; j < grid_n; ++j) {
            const double phi_H = static_cast<double>(j) / (grid_n - 1);
            if (phi_H < 0.01) continue;
            for (int l = 0; l < grid_n; ++l) {
                const double phi_M = static_cast<double>(l) / (grid_n - 1);
                const VolumeState s{phi_T, phi_H, phi_M};
                if (s.psi() > 1.0) break;
                const double v = std::max(std::abs(growth_rate(Population::Tumor, s, p)),
                                          std::abs(growth_rate(Population::Healthy, s, p)));
                if (v < r.min_max_rate) {
                    r.min_max_rate = v;
                    r.at = s;
                }
            }
        }
    }
    r.pass = r.min_max_rate > threshold;
    return r;
}

}  // namespace fibrosim
