#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fibrosim/model.hpp"

namespace fibrosim {

enum class EquilibriumKind { TrivialFamily, Physiological, Pathological };
enum class Stability { Stable, Unstable, Marginal };

std::string to_string(EquilibriumKind k);
std::string to_string(Stability s);

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct EquilibriumReport {
    VolumeState location;
    EquilibriumKind kind = EquilibriumKind::TrivialFamily;
    Matrix3 jacobian{};
    std::array<std::complex<double>, 3> eigenvalues{};
    Stability verdict = Stability::Marginal;
    /// Verdict restricted to the invariant manifold of the absent population
    /// (for the trivial family: the transverse (phi_T, phi_H) block).
    std::optional<Stability> restricted_verdict;
    double residual = 0.0;  // |rhs|_1 at the location
    bool kink_flag = false;  // a switch argument sat within 1e-6 of a ramp kink
    std::string notes;

    std::string to_json() const;
};

struct MatrixRootResult {
    double root = 0.0;           // smallest zero of mu(s) - nu s on [0, psi_alpha]
    std::vector<double> all_roots;
    int sign_changes = 0;
    bool degenerate_zero = false;  // only the boundary zero at s = 0 exists
};

/// Root of the matrix balance mu_a(s) - nu_a s on [0, psi_a], located by a
/// 1000-interval scan plus bisection. Multiple sign changes are all reported;
/// the smallest is used. Throws NonexistenceError when no zero exists.
MatrixRootResult find_matrix_root(Population a, const ModelParams& p);

struct JacobianOptions {
    double step = 1e-7;
    /// Replace piecewise-linear switches by their C^1 variant before
    /// differencing; the ramp corners otherwise poison central differences.
    bool smooth_switches = true;
};

/// Central finite-difference Jacobian of rhs. Sets *kink_flag when a switch
/// argument of the original (unsmoothed) parameters lies within 1e-6 of a
/// ramp corner, in which case the columns are effectively one-sided there.
Matrix3 jacobian(const VolumeState& s, const ModelParams& p, const JacobianOptions& opt = {},
                 bool* kink_flag = nullptr);

std::array<std::complex<double>, 3> eigenvalues3(const Matrix3& m);

Stability classify_stability(const std::array<std::complex<double>, 3>& eig, double tol = 1e-6);

/// Single-population equilibrium: phi_M at the matrix-balance root, the
/// living fraction from inverting the crowding switch. Physiological for
/// a = Healthy, pathological for a = Tumor. Throws NonexistenceError (with
/// the reason) when the construction leaves the admissible region.
EquilibriumReport nontrivial_equilibrium(Population a, const ModelParams& p);

/// Report for a point (0, 0, phi_M) on the line of cell-free equilibria.
EquilibriumReport trivial_equilibrium(double phi_M, const ModelParams& p);

struct MixedScanReport {
    double min_max_rate = 0.0;  // min over the lattice of max(|Gamma_T|, |Gamma_H|)
    VolumeState at;
    bool pass = false;          // bounded away from zero: no interior equilibrium candidates
};

/// Scans a grid_n^3 lattice of states with phi_T, phi_H >= 0.01 and psi <= 1
/// for simultaneous zeros of the two cell growth rates.
MixedScanReport mixed_equilibrium_scan(const ModelParams& p, int grid_n, double threshold = 1e-3);

}  // namespace fibrosim
