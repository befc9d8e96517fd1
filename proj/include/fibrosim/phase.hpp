#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fibrosim/model.hpp"

namespace fibrosim {

struct GammaRoots {
    /// Smaller zero of Gamma_a(phi_M) on the cell-free axis, slope > 0 there
    /// (anoikis edge of the extinction basin). Absent when the rate never
    /// rises through zero.
    std::optional<double> lower;
    /// Larger zero, slope < 0 there (over-dense-matrix edge).
    std::optional<double> upper;
    double slope_lower = 0.0;
    double slope_upper = 0.0;
};

/// Zeros of Gamma_a(phi_M) with phi_T = phi_H = 0, by dense scan (1e4
/// intervals) plus bisection; slopes from central differences.
GammaRoots gamma_roots(Population a, const ModelParams& p);

enum class BoundaryAnchor { Lower, Upper };
enum class BoundaryTermination { ReachedCeiling, DenominatorSingular, LeftUnitBox };

struct BasinBoundary {
    Population pop = Population::Healthy;
    BoundaryAnchor anchor = BoundaryAnchor::Lower;
    /// (phi_M, phi_alpha) points ordered along the curve, starting at
    /// (anchor root, 0).
    std::vector<std::array<double, 2>> curve;
    BoundaryTermination termination = BoundaryTermination::LeftUnitBox;

    void write_csv(std::ostream& os) const;
};

/// Integrates the phase-plane slope equation
///   d phi_a / d phi_M = Gamma_a / (mu_a(phi_M) - nu_a phi_M)
/// from the chosen root of Gamma_a outward, away from the matrix-balance
/// root M_a: decreasing phi_M from the lower anchor (the curve walls off the
/// sparse-matrix corner), increasing phi_M from the upper anchor (the
/// over-dense corner). Stops at the balance singularity, the occupancy
/// ceiling, or the edge of the unit box.
BasinBoundary basin_boundary(Population a, BoundaryAnchor anchor, const ModelParams& p);

enum class AttractorTag { Extinction, Nontrivial, Undecided };

char attractor_code(AttractorTag t);

/// Forward-integrates a single-population initial state and reports where it
/// lands: extinction (living fraction below 1e-6), the nontrivial equilibrium
/// (within 1e-4), or undecided by t_max.
AttractorTag classify_initial(const VolumeState& s, const ModelParams& p, double t_max = 500.0,
                              double dt = 0.01);

struct BasinPoint {
    double phi_M = 0.0;
    double phi_alpha = 0.0;
    AttractorTag tag = AttractorTag::Undecided;
};

struct BasinMap {
    Population pop = Population::Healthy;
    int n = 0;
    std::vector<BasinPoint> points;

    void write_csv(std::ostream& os) const;
};

/// Classifies an n x n lattice over (phi_M, phi_alpha) in [0,1]^2 with
/// phi_alpha + phi_M <= 1.
BasinMap sweep_grid(Population a, const ModelParams& p, int n, double t_max = 500.0);

}  // namespace fibrosim
