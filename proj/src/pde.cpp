#include "fibrosim/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "fibrosim/equilibria.hpp"
#include "fibrosim/ode.hpp"
#include "nlohmann/json.hpp"

namespace fibrosim {

double FieldState::mass(Population a) const {
    double m = 0.0;
    for (double v : field(a)) m += v;
    return m * grid.dx();
}

void FieldState::write_csv(std::ostream& os) const {
    os << "x,phi_T,phi_H,phi_M\n";
    for (int i = 0; i < size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", grid.center(i), phi_T[u], phi_H[u],
                          phi_M[u]);
    }
}

double cell_flux(const FieldState& f, const ConstitutiveLaw& law, Population a, int face) {
    if (face <= 0 || face >= f.size()) return 0.0;  // closed-tissue boundaries
    const auto r = static_cast<std::size_t>(face);
    const auto l = r - 1;
    const double phi_l = f.phi_T[l] + f.phi_H[l];
    const double phi_r = f.phi_T[r] + f.phi_H[r];
    const double g = (phi_r * law.pressure(phi_r) - phi_l * law.pressure(phi_l)) / f.grid.dx();
    if (std::abs(g) < 1e-14) return 0.0;

    // Cells drift down the pressure gradient; the donor cell is upwind.
    const auto up = g > 0.0 ? r : l;
    const double phi_up = f.phi_T[up] + f.phi_H[up];
    const double phi_a_up = f.field(a)[up];
    if (phi_up < 1e-12 || phi_a_up < 1e-12) return 0.0;
    const double speed_factor =
        std::max(phi_a_up / phi_up - law.stress_threshold(a) / std::abs(g), 0.0);
    return -phi_a_up * speed_factor * law.motility(a) * g;
}

double stable_dt(const FieldState& f, const ConstitutiveLaw& law) {
    double slope = 0.0;  // max d(phi Sigma)/d phi over the current fields
    for (int i = 0; i < f.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double phi = f.phi_T[u] + f.phi_H[u];
        if (phi > law.packing_ratio)
            slope = std::max(slope, law.stiffness * (2.0 * phi - law.packing_ratio));
    }
    const double k_max = std::max(law.motility_T, law.motility_H);
    const double dx = f.grid.dx();
    return 0.4 * dx * dx / (k_max * slope + 1e-12);
}

FieldState step(const FieldState& f, const ModelParams& p, const ConstitutiveLaw& law,
                double dt) {
    if (f.size() < 8) throw DomainError("grid must have at least 8 cells");
    const double limit = stable_dt(f, law);
    if (dt > limit)
        throw CflError(fmt::format("dt = {} exceeds the stability limit {}", dt, limit));

    FieldState out = f;
    out.time = f.time + dt;
    const double dx = f.grid.dx();
    const int n = f.size();

    for (Population a : {Population::Tumor, Population::Healthy}) {
        const std::vector<double>& src = f.field(a);
        std::vector<double>& dst = out.field(a);
        double flux_left = 0.0;
        for (int i = 0; i < n; ++i) {
            const double flux_right = cell_flux(f, law, a, i + 1);
            const double transport = -(flux_right - flux_left) / dx;
            const double reaction = growth_rate(a, f.cell(i), p) * src[static_cast<std::size_t>(i)];
            dst[static_cast<std::size_t>(i)] += dt * (transport + reaction);
            flux_left = flux_right;
        }
    }
    for (int i = 0; i < n; ++i)
        out.phi_M[static_cast<std::size_t>(i)] += dt * matrix_rate(f.cell(i), p);

    for (std::vector<double>* v : {&out.phi_T, &out.phi_H, &out.phi_M})
        for (double& c : *v)
            if (c < 0.0 && c > -1e-12) c = 0.0;
    return out;
}

std::vector<FieldState> simulate(const FieldState& initial, const ModelParams& p,
                                 const ConstitutiveLaw& law, double t_end, int stride) {
    if (stride < 1) stride = 1;
    std::vector<FieldState> frames;
    frames.push_back(initial);
    FieldState current = initial;
    long n = 0;
    while (current.time < t_end - 1e-12) {
        const double dt = std::min(stable_dt(current, law), t_end - current.time);
        current = step(current, p, law, dt);
        if (++n % stride == 0) frames.push_back(current);
    }
    if (frames.back().time < current.time) frames.push_back(current);
    return frames;
}

WaveSpeedFit wave_speed(const std::vector<FieldState>& frames, Population a, double level) {
    if (frames.size() < 3) throw DomainError("wave_speed needs at least 3 frames");
    WaveSpeedFit fit;
    for (const FieldState& f : frames) {
        const std::vector<double>& v = f.field(a);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        if (!(level > *lo && level < *hi))
            throw DomainError(fmt::format(
                "level {} outside the field range [{}, {}] at t = {}", level, *lo, *hi, f.time));
        // right-most crossing, interpolated between cell centers
        double x = f.grid.center(0);
        for (int i = f.size() - 2; i >= 0; --i) {
            const double a0 = v[static_cast<std::size_t>(i)] - level;
            const double a1 = v[static_cast<std::size_t>(i) + 1] - level;
            if (a0 == 0.0 || (a0 > 0.0) != (a1 > 0.0)) {
                const double w = a0 / (a0 - a1);
                x = f.grid.center(i) + w * f.grid.dx();
                break;
            }
        }
        fit.times.push_back(f.time);
        fit.positions.push_back(x);
    }

    const auto n = static_cast<double>(fit.times.size());
    double st = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < fit.times.size(); ++i) st += fit.times[i], sx += fit.positions[i];
    const double mt = st / n, mx = sx / n;
    double stt = 0.0, stx = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < fit.times.size(); ++i) {
        const double dt = fit.times[i] - mt, dx = fit.positions[i] - mx;
        stt += dt * dt;
        stx += dt * dx;
        sxx += dx * dx;
    }
    fit.speed = stt > 0.0 ? stx / stt : 0.0;
    const double ss_res = sxx - (stt > 0.0 ? stx * stx / stt : 0.0);
    fit.r_squared = sxx > 1e-300 ? 1.0 - ss_res / sxx : 1.0;
    return fit;
}

FieldState invasion_initial(const ModelParams& p, const Grid1D& grid, double seed_level,
                            double seed_fraction) {
    const VolumeState eq = nontrivial_equilibrium(Population::Healthy, p).location;
    FieldState f(grid);
    const double seed_edge = grid.x_min + seed_fraction * (grid.x_max - grid.x_min);
    for (int i = 0; i < f.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        f.phi_H[u] = eq.phi_H;
        f.phi_M[u] = eq.phi_M;
        if (grid.center(i) < seed_edge) f.phi_T[u] = seed_level;
    }
    return f;
}

std::string frames_manifest(const std::vector<FieldState>& frames, const ModelParams& p,
                            const ConstitutiveLaw& law) {
    nlohmann::json j;
    if (!frames.empty()) {
        j["grid"] = {{"x_min", frames.front().grid.x_min},
                     {"x_max", frames.front().grid.x_max},
                     {"n_cells", frames.front().grid.n_cells}};
        auto times = nlohmann::json::array();
        for (const auto& f : frames) times.push_back(f.time);
        j["times"] = times;
    }
    j["law"] = {{"stiffness", law.stiffness},
                {"packing_ratio", law.packing_ratio},
                {"motility_T", law.motility_T},
                {"motility_H", law.motility_H},
                {"stress_threshold_T", law.stress_threshold_T},
                {"stress_threshold_H", law.stress_threshold_H}};
    j["params"] = {{"delta_T", p.tumor.apoptosis},
                   {"delta_H", p.healthy.apoptosis},
                   {"delta_prime_T", p.tumor.anoikis},
                   {"delta_prime_H", p.healthy.anoikis},
                   {"psi_T", p.tumor.crowding_threshold},
                   {"psi_H", p.healthy.crowding_threshold},
                   {"psi_M", p.matrix_crowding_threshold},
                   {"m_T", p.tumor.adhesion_threshold},
                   {"m_H", p.healthy.adhesion_threshold},
                   {"eps_T", p.tumor.crowding_switch.width},
                   {"eps_H", p.healthy.crowding_switch.width},
                   {"eps_M", p.matrix_switch.width},
                   {"nu_T", p.tumor.matrix_degradation},
                   {"nu_H", p.healthy.matrix_degradation}};
    return j.dump(2);
}

}  // namespace fibrosim
