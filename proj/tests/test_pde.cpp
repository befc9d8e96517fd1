#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fibrosim/ode.hpp"
#include "fibrosim/pde.hpp"

using namespace fibrosim;

namespace {

FieldState uniform_state(const Grid1D& g, const VolumeState& v) {
    FieldState f(g);
    for (int i = 0; i < f.size(); ++i) {
        f.phi_T[static_cast<std::size_t>(i)] = v.phi_T;
        f.phi_H[static_cast<std::size_t>(i)] = v.phi_H;
        f.phi_M[static_cast<std::size_t>(i)] = v.phi_M;
    }
    return f;
}

}  // namespace

TEST_SUITE("fluxes") {
    TEST_CASE("uniform fields carry no flux") {
        const FieldState f = uniform_state({0.0, 10.0, 32}, {0.3, 0.4, 0.1});
        const ConstitutiveLaw law;
        for (int face = 0; face <= f.size(); ++face)
            CHECK(cell_flux(f, law, Population::Tumor, face) == 0.0);
    }

    TEST_CASE("boundary faces are closed") {
        FieldState f = uniform_state({0.0, 10.0, 32}, {0.0, 0.5, 0.1});
        f.phi_H[5] = 0.9;
        const ConstitutiveLaw law;
        CHECK(cell_flux(f, law, Population::Healthy, 0) == 0.0);
        CHECK(cell_flux(f, law, Population::Healthy, f.size()) == 0.0);
        CHECK(cell_flux(f, law, Population::Healthy, 5) != 0.0);
    }

    TEST_CASE("single population moves down the pressure gradient") {
        FieldState f(Grid1D{0.0, 8.0, 8});
        for (int i = 0; i < 8; ++i)
            f.phi_T[static_cast<std::size_t>(i)] = 0.9 - 0.05 * i;  // denser on the left
        ConstitutiveLaw law;
        law.packing_ratio = 0.6;
        const double flux = cell_flux(f, law, Population::Tumor, 4);
        CHECK(flux > 0.0);  // mass flows rightward, toward lower pressure
    }

    TEST_CASE("raising the stress threshold never increases the flux") {
        FieldState f(Grid1D{0.0, 8.0, 8});
        for (int i = 0; i < 8; ++i)
            f.phi_T[static_cast<std::size_t>(i)] = 0.9 - 0.05 * i;
        ConstitutiveLaw lo, hi;
        lo.stress_threshold_T = 0.0;
        hi.stress_threshold_T = 0.05;
        for (int face = 1; face < f.size(); ++face)
            CHECK(std::abs(cell_flux(f, hi, Population::Tumor, face)) <=
                  std::abs(cell_flux(f, lo, Population::Tumor, face)) + 1e-15);
    }
}

TEST_SUITE("stepping") {
    TEST_CASE("uniform fields follow the homogeneous system") {
        const ModelParams p = ModelParams::defaults();
        const VolumeState v{0.1, 0.5, 0.25};
        const FieldState f = uniform_state({0.0, 10.0, 16}, v);
        const ConstitutiveLaw law;
        const double dt = 0.5 * stable_dt(f, law);
        const FieldState g = step(f, p, law, dt);
        const auto r = rhs(v, p);
        for (int i = 0; i < g.size(); ++i) {
            const auto u = static_cast<std::size_t>(i);
            CHECK(std::abs(g.phi_T[u] - (v.phi_T + dt * r[0])) < 1e-8);
            CHECK(std::abs(g.phi_H[u] - (v.phi_H + dt * r[1])) < 1e-8);
            CHECK(std::abs(g.phi_M[u] - (v.phi_M + dt * r[2])) < 1e-8);
        }
    }

    TEST_CASE("all-zero cells are stationary") {
        const FieldState f = uniform_state({0.0, 10.0, 16}, {0.0, 0.0, 0.3});
        const FieldState g = step(f, ModelParams::defaults(), {}, 1e-3);
        for (int i = 0; i < g.size(); ++i) {
            const auto u = static_cast<std::size_t>(i);
            CHECK(g.phi_T[u] == 0.0);
            CHECK(g.phi_H[u] == 0.0);
            CHECK(g.phi_M[u] == doctest::Approx(0.3).epsilon(1e-14));
        }
    }

    TEST_CASE("oversized step raises") {
        FieldState f = uniform_state({0.0, 10.0, 64}, {0.5, 0.4, 0.05});
        f.phi_T[3] = 0.05;  // nonuniform so transport is active
        const ConstitutiveLaw law;
        CHECK_THROWS_AS(step(f, ModelParams::defaults(), law, 10.0 * stable_dt(f, law)),
                        CflError);
    }

    TEST_CASE("tiny grids are rejected") {
        const FieldState f = uniform_state({0.0, 1.0, 4}, {0.1, 0.1, 0.1});
        CHECK_THROWS_AS(step(f, ModelParams::defaults(), {}, 1e-6), DomainError);
    }

    TEST_CASE("discrete mass balance") {
        const ModelParams p = ModelParams::defaults();
        FieldState f = invasion_initial(p, {0.0, 30.0, 100});
        ConstitutiveLaw law;
        law.packing_ratio = 0.45;
        const double dt = stable_dt(f, law);
        const FieldState g = step(f, p, law, dt);
        for (Population a : {Population::Tumor, Population::Healthy}) {
            double reaction = 0.0;
            for (int i = 0; i < f.size(); ++i)
                reaction += growth_rate(a, f.cell(i), p) *
                            f.field(a)[static_cast<std::size_t>(i)] * f.grid.dx();
            const double gained = (g.mass(a) - f.mass(a)) / dt;
            CHECK(std::abs(gained - reaction) < 1e-8);
        }
    }
}

TEST_SUITE("wave speed") {
    TEST_CASE("synthetic shifted fronts") {
        const Grid1D grid{0.0, 60.0, 300};
        const double c = 0.7;
        std::vector<FieldState> frames;
        for (int k = 0; k < 6; ++k) {
            FieldState f(grid);
            f.time = 2.0 * k;
            for (int i = 0; i < f.size(); ++i)
                f.phi_T[static_cast<std::size_t>(i)] =
                    0.5 / (1.0 + std::exp(grid.center(i) - 10.0 - c * f.time));
            frames.push_back(f);
        }
        const WaveSpeedFit fit = wave_speed(frames, Population::Tumor, 0.25);
        CHECK(fit.speed == doctest::Approx(c).epsilon(1e-3));
        CHECK(fit.r_squared > 0.9999);
    }

    TEST_CASE("stationary frames have zero speed") {
        const Grid1D grid{0.0, 60.0, 300};
        std::vector<FieldState> frames;
        for (int k = 0; k < 4; ++k) {
            FieldState f(grid);
            f.time = k;
            for (int i = 0; i < f.size(); ++i)
                f.phi_T[static_cast<std::size_t>(i)] =
                    0.5 / (1.0 + std::exp(grid.center(i) - 10.0));
            frames.push_back(f);
        }
        CHECK(wave_speed(frames, Population::Tumor, 0.25).speed ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("level outside the field range raises") {
        const Grid1D grid{0.0, 10.0, 16};
        std::vector<FieldState> frames(3, FieldState(grid));
        CHECK_THROWS_AS(wave_speed(frames, Population::Tumor, 0.25), DomainError);
    }
}

TEST_SUITE("invasion setup") {
    TEST_CASE("seed occupies the left edge of equilibrium tissue") {
        const ModelParams p = ModelParams::defaults();
        const FieldState f = invasion_initial(p, {0.0, 60.0, 200});
        CHECK(f.phi_T[0] == doctest::Approx(0.05));
        CHECK(f.phi_T[150] == 0.0);
        CHECK(f.phi_H[150] == doctest::Approx(0.51).epsilon(1e-9));
        CHECK(f.phi_M[150] == doctest::Approx(0.25).epsilon(1e-9));
        // leftmost 5% of 200 cells
        CHECK(f.phi_T[9] == doctest::Approx(0.05));
        CHECK(f.phi_T[10] == 0.0);
    }

    TEST_CASE("csv and manifest formats") {
        const FieldState f = uniform_state({0.0, 1.0, 8}, {0.1, 0.2, 0.3});
        std::ostringstream os;
        f.write_csv(os);
        CHECK(os.str().substr(0, 20) == "x,phi_T,phi_H,phi_M\n");
        const std::string manifest = frames_manifest({f}, ModelParams::defaults(), {});
        CHECK(manifest.find("\"times\"") != std::string::npos);
        CHECK(manifest.find("\"packing_ratio\"") != std::string::npos);
    }
}
