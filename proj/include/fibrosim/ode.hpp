#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fibrosim/model.hpp"

namespace fibrosim {

/// Time-indexed solution of the homogeneous system.
struct Trajectory {
    std::vector<double> times;        // strictly increasing, starting at 0
    std::vector<VolumeState> states;  // same length as times

    struct Meta {
        std::string method;       // "rk4" or "picard"
        double dt = 0.0;          // rk step, or picard window length
        double lambda = 0.0;      // picard shift, 0 for rk
        std::int64_t iterations = 0;  // total picard sweeps, or rk steps
        std::int64_t clamped = 0;     // components clamped from tiny undershoot
        double max_sum_drift = 0.0;   // picard: worst |sum(Phi) - 1| at a node
    } meta;

    const VolumeState& back() const { return states.back(); }
    /// Piecewise-linear sample at time t (t clipped to the covered range).
    VolumeState sample(double t) const;
    /// CSV rows "t,phi_T,phi_H,phi_M,psi" with a header line.
    void write_csv(std::ostream& os) const;
};

/// Right-hand side of the homogeneous system:
/// (Gamma_T phi_T, Gamma_H phi_H, Gamma_M).
std::array<double, 3> rhs(const VolumeState& s, const ModelParams& p);

/// Classical fixed-step RK4. Components dipping below zero by at most 1e-12
/// are clamped (and counted); anything leaving [-1e-6, 1 + 1e-6] raises
/// InstabilityError.
Trajectory integrate_rk(const VolumeState& initial, const ModelParams& p, double t_end, double dt,
                        int record_stride = 1);

struct PicardOptions {
    double window = 0.0;   // 0: choose automatically from the contraction bound
    double tol = 1e-10;    // sup-norm stopping tolerance per window
    int quadrature_n = 64;  // trapezoid subintervals per window
    int max_iterations = 200;
};

/// Contraction-mapping integrator on the augmented 4-component system
/// (state plus free space), used as an independent oracle for the RK path.
/// Iterates the shifted mild form on short windows and restarts from each
/// window end.
Trajectory integrate_picard(const VolumeState& initial, const ModelParams& p, double t_end,
                            const PicardOptions& opt = {});

/// Exponential shift making the mild-form operator positivity preserving:
/// strictly larger than max over
///   delta_a + delta'_a,  nu_T + nu_H,
///   sum_a (gamma_a(1) Lip(H_a) + mu_a(0) Lip(H_M)).
double picard_lambda(const ModelParams& p);

/// Computable over-estimate C of the 1-norm Lipschitz constant of the
/// integrand operator, from declared Lipschitz constants: with
///   B_a   = gamma_a(1) + delta_a + delta'_a
///   L_a   = Lip(gamma_a) + gamma_a(1) Lip(H_a) + delta'_a Lip(H_M)
///   B_M,a = mu_a(0) + nu_a
///   L_M,a = Lip(mu_a) + mu_a(0) Lip(H_M) + nu_a
/// C = 2 * (sum_a (B_a + L_a) + sum_a (B_M,a + L_M,a)); the factor 2 covers
/// the dependent free-space component.
double picard_lipschitz(const ModelParams& p);

struct DependenceReport {
    double initial_distance = 0.0;  // 1-norm gap of the initial data
    double observed_ratio = 0.0;    // sup_t |phi_2 - phi_1|_1 / initial_distance
    double bound = 0.0;             // [1 + (C+lambda) t e^{(C+lambda) t}] * 2
    bool passed = false;
};

/// Integrates both initial data and compares the observed separation with
/// the explicit a-priori bound.
DependenceReport continuous_dependence_check(const VolumeState& a, const VolumeState& b,
                                             const ModelParams& p, double t_end,
                                             double dt = 1e-3);

}  // namespace fibrosim
