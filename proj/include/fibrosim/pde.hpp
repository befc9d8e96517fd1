#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fibrosim/model.hpp"

namespace fibrosim {

struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 8;

    double dx() const { return (x_max - x_min) / n_cells; }
    double center(int i) const { return x_min + (i + 0.5) * dx(); }
};

/// Cell-centered volume ratios on a uniform 1D grid.
struct FieldState {
    Grid1D grid;
    std::vector<double> phi_T, phi_H, phi_M;
    double time = 0.0;

    explicit FieldState(Grid1D g = {})
        : grid(g),
          phi_T(static_cast<std::size_t>(g.n_cells), 0.0),
          phi_H(static_cast<std::size_t>(g.n_cells), 0.0),
          phi_M(static_cast<std::size_t>(g.n_cells), 0.0) {}

    int size() const { return grid.n_cells; }
    VolumeState cell(int i) const {
        const auto u = static_cast<std::size_t>(i);
        return {phi_T[u], phi_H[u], phi_M[u]};
    }
    std::vector<double>& field(Population a) {
        return a == Population::Tumor ? phi_T : phi_H;
    }
    const std::vector<double>& field(Population a) const {
        return a == Population::Tumor ? phi_T : phi_H;
    }
    double mass(Population a) const;

    /// CSV rows "x,phi_T,phi_H,phi_M" with a header line.
    void write_csv(std::ostream& os) const;
};

/// Mechanics of the cellular phase: pressure law and motility/attachment
/// constants. Cells are stress-free up to the packing ratio and respond
/// linearly beyond it.
struct ConstitutiveLaw {
    double stiffness = 1.0;       // pressure slope beyond packing
    double packing_ratio = 0.6;   // total cell fraction at which stress starts
    double motility_T = 1.0;      // K_alpha reduced to a scalar
    double motility_H = 1.0;
    double stress_threshold_T = 0.0;  // sigma_alpha: minimum stress gradient to detach
    double stress_threshold_H = 0.0;

    double pressure(double phi) const {
        const double excess = phi - packing_ratio;
        return excess > 0.0 ? stiffness * excess : 0.0;
    }
    double motility(Population a) const {
        return a == Population::Tumor ? motility_T : motility_H;
    }
    double stress_threshold(Population a) const {
        return a == Population::Tumor ? stress_threshold_T : stress_threshold_H;
    }
};

/// Upwind face flux of one population at interior face i (between cells
/// i-1 and i), i in [1, n-1]; boundary faces carry zero flux. Positive
/// values move mass to the right.
double cell_flux(const FieldState& f, const ConstitutiveLaw& law, Population a, int face);

/// Largest explicit step for the current fields (diffusive limit with
/// safety factor 0.4).
double stable_dt(const FieldState& f, const ConstitutiveLaw& law);

/// One explicit step: finite-volume transport plus reaction for the cells,
/// pointwise matrix kinetics, zero-flux boundaries. Throws CflError when dt
/// exceeds stable_dt.
FieldState step(const FieldState& f, const ModelParams& p, const ConstitutiveLaw& law, double dt);

/// Repeated stepping with the stability-limited dt recomputed each frame;
/// emits the initial state and every stride-th step plus the final one.
std::vector<FieldState> simulate(const FieldState& initial, const ModelParams& p,
                                 const ConstitutiveLaw& law, double t_end, int stride = 100);

struct WaveSpeedFit {
    double speed = 0.0;
    double r_squared = 1.0;
    std::vector<double> times;
    std::vector<double> positions;
};

/// Tracks the right-most level crossing of one population per frame and fits
/// position against time by least squares.
WaveSpeedFit wave_speed(const std::vector<FieldState>& frames, Population a, double level);

/// Healthy tissue at its nontrivial equilibrium with a tumor seed occupying
/// the leftmost fraction of the domain.
FieldState invasion_initial(const ModelParams& p, const Grid1D& grid, double seed_level = 0.05,
                            double seed_fraction = 0.05);

/// Manifest describing a frame sequence (times, grid, parameters) as JSON.
std::string frames_manifest(const std::vector<FieldState>& frames, const ModelParams& p,
                            const ConstitutiveLaw& law);

}  // namespace fibrosim
