#pragma once

#include <string>
#include <vector>

#include "fibrosim/mollifier.hpp"
#include "fibrosim/rate_function.hpp"

namespace fibrosim {

enum class Population { Tumor, Healthy };

inline char population_code(Population p) { return p == Population::Tumor ? 'T' : 'H'; }

/// Volume ratios of the three constituents at one point/instant.
/// Admissible states have every component in [0, 1] and total occupancy
/// psi = phi_T + phi_H + phi_M <= 1 (the remainder is free space).
struct VolumeState {
    double phi_T = 0.0;
    double phi_H = 0.0;
    double phi_M = 0.0;

    double psi() const { return phi_T + phi_H + phi_M; }
    double free_space() const { return 1.0 - psi(); }
    double cells() const { return phi_T + phi_H; }

    double phi(Population p) const { return p == Population::Tumor ? phi_T : phi_H; }
    double& phi(Population p) { return p == Population::Tumor ? phi_T : phi_H; }

    bool admissible(double tol = 1e-9) const {
        return phi_T >= -tol && phi_H >= -tol && phi_M >= -tol && psi() <= 1.0 + tol;
    }
};

/// Kinetic constants of one cell population.
struct CellKinetics {
    RateFunction growth;            // gamma: net growth rate vs matrix content
    double apoptosis = 0.1;         // delta
    double anoikis = 0.4;           // delta': extra death when adhesion sites are scarce
    double crowding_threshold = 0.8;   // psi_alpha: occupancy above which growth shuts off
    double adhesion_threshold = 0.2;   // m_alpha: matrix content below which anoikis starts
    Mollifier crowding_switch{0.1};    // eps_alpha
    RateFunction matrix_production;    // mu: matrix deposition rate vs matrix content
    double matrix_degradation = 1.5;   // nu_alpha = nu * tau * pi_alpha
};

/// Full parameter set of the homogeneous model.
struct ModelParams {
    CellKinetics tumor;
    CellKinetics healthy;
    double matrix_crowding_threshold = 1.0;  // psi_M
    Mollifier matrix_switch{0.05};           // eps_M, shared by anoikis and deposition switches
    double enzyme_halflife = 1.0;            // tau
    double enzyme_production_T = 1.0;        // pi_T
    double enzyme_production_H = 1.0;        // pi_H
    double enzyme_degradation = 1.5;         // nu (raw); nu_alpha = nu * tau * pi_alpha

    const CellKinetics& kinetics(Population p) const {
        return p == Population::Tumor ? tumor : healthy;
    }
    CellKinetics& kinetics(Population p) { return p == Population::Tumor ? tumor : healthy; }

    /// Default set: linear growth gamma(s) = s, deposition mu(s) = 0.5 (1 - s),
    /// tumor cells distinguished by weaker anoikis and a higher crowding
    /// threshold.
    static ModelParams defaults();

    /// Same parameters with every switch replaced by its C^1 variant.
    ModelParams with_smooth_switches() const;
};

/// Net duplication/death rate of one population:
///   Gamma_a = gamma_a(phi_M) H_a(psi_a - psi) - delta_a - delta'_a H_M(m_a - phi_M)
double growth_rate(Population a, const VolumeState& s, const ModelParams& p);

/// Gamma_a as a function of (phi_M, psi) alone; the rate depends on the
/// state only through these two quantities.
double growth_rate_at(Population a, double phi_M, double psi, const ModelParams& p);

/// Net matrix remodeling rate:
///   Gamma_M = sum_a (mu_a(phi_M) H_M(psi_M - psi) - nu_a phi_M) phi_a
double matrix_rate(const VolumeState& s, const ModelParams& p);

/// Quasi-steady enzyme level tau * (pi_T phi_T + pi_H phi_H).
double enzyme_concentration(const VolumeState& s, const ModelParams& p);

struct Violation {
    std::string clause;  // short machine-checkable label, e.g. "delta > 0"
    std::string detail;
};

/// Checks every structural requirement on the parameter set, by direct
/// inspection plus dense sampling on [0, 1]. Returns all violations found.
std::vector<Violation> validate_params(const ModelParams& p, int sample_n = 1000);

struct OrderingReport {
    bool strictly_positive = false;  // Gamma_T - Gamma_H > 0 on the whole lattice
    double min_margin = 0.0;
    double at_phi_M = 0.0;
    double at_psi = 0.0;
};

/// Evaluates Gamma_T - Gamma_H on a grid_n x grid_n lattice over
/// [0,1] x [0,1] in (phi_M, psi).
OrderingReport check_gamma_ordering(const ModelParams& p, int grid_n);

}  // namespace fibrosim
