#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fibrosim/phase.hpp"

using namespace fibrosim;

TEST_SUITE("gamma roots") {
    TEST_CASE("default healthy roots match the closed forms") {
        const GammaRoots r = gamma_roots(Population::Healthy, ModelParams::defaults());
        REQUIRE(r.lower.has_value());
        REQUIRE(r.upper.has_value());
        // 9 phi_M - 1.7 = 0 inside the anoikis ramp
        CHECK(*r.lower == doctest::Approx(17.0 / 90.0).epsilon(1e-6));
        // phi_M (0.8 - phi_M) = 0.01 inside the crowding ramp
        CHECK(*r.upper == doctest::Approx((0.8 + std::sqrt(0.6)) / 2.0).epsilon(1e-6));
        CHECK(r.slope_lower > 0.0);
        CHECK(r.slope_upper < 0.0);
        CHECK(*r.lower <= *r.upper);
    }

    TEST_CASE("strong apoptosis removes both roots") {
        ModelParams p = ModelParams::defaults();
        p.healthy.apoptosis = 2.0;  // Gamma_H < 0 on the whole axis
        const GammaRoots r = gamma_roots(Population::Healthy, p);
        CHECK_FALSE(r.lower.has_value());
        CHECK_FALSE(r.upper.has_value());
    }

    TEST_CASE("weak death rates push the lower root toward zero") {
        ModelParams p = ModelParams::defaults();
        p.healthy.apoptosis = 1e-4;
        p.healthy.anoikis = 1e-4;
        const GammaRoots r = gamma_roots(Population::Healthy, p);
        REQUIRE(r.lower.has_value());
        CHECK(*r.lower < 1e-3);
    }
}

TEST_SUITE("basin boundary") {
    TEST_CASE("lower boundary starts at the anchor") {
        const BasinBoundary b =
            basin_boundary(Population::Healthy, BoundaryAnchor::Lower, ModelParams::defaults());
        REQUIRE(b.curve.size() > 2);
        CHECK(b.curve.front()[0] == doctest::Approx(17.0 / 90.0).epsilon(1e-6));
        CHECK(b.curve.front()[1] == 0.0);
        for (const auto& pt : b.curve) {
            CHECK(pt[0] >= 0.0);
            CHECK(pt[0] <= 1.0);
            CHECK(pt[1] >= 0.0);
            CHECK(pt[1] <= 1.0);
        }
    }

    TEST_CASE("upper boundary marches toward the saturation edge") {
        const BasinBoundary b =
            basin_boundary(Population::Healthy, BoundaryAnchor::Upper, ModelParams::defaults());
        REQUIRE(b.curve.size() > 2);
        CHECK(b.curve.front()[0] == doctest::Approx((0.8 + std::sqrt(0.6)) / 2.0).epsilon(1e-6));
        CHECK(b.curve.back()[0] > b.curve.front()[0]);
    }

    TEST_CASE("missing anchor raises") {
        ModelParams p = ModelParams::defaults();
        p.healthy.apoptosis = 2.0;
        CHECK_THROWS_AS(basin_boundary(Population::Healthy, BoundaryAnchor::Lower, p),
                        NonexistenceError);
    }

    TEST_CASE("csv export") {
        const BasinBoundary b =
            basin_boundary(Population::Healthy, BoundaryAnchor::Lower, ModelParams::defaults());
        std::ostringstream os;
        b.write_csv(os);
        CHECK(os.str().substr(0, 16) == "phi_M,phi_alpha\n");
    }
}

TEST_SUITE("classification") {
    TEST_CASE("corner fates") {
        const ModelParams p = ModelParams::defaults();
        CHECK(classify_initial({0.0, 0.05, 0.02}, p) == AttractorTag::Extinction);
        CHECK(classify_initial({0.0, 0.51, 0.25}, p) == AttractorTag::Nontrivial);
        CHECK(classify_initial({0.0, 0.3, 0.3}, p) == AttractorTag::Nontrivial);
    }

    TEST_CASE("two living populations are rejected") {
        CHECK_THROWS_AS(classify_initial({0.1, 0.1, 0.1}, ModelParams::defaults()),
                        DomainError);
    }

    TEST_CASE("cell-free states are extinct immediately") {
        CHECK(classify_initial({0.0, 0.0, 0.5}, ModelParams::defaults()) ==
              AttractorTag::Extinction);
    }
}

TEST_SUITE("sweep") {
    TEST_CASE("tiny grid") {
        const BasinMap m = sweep_grid(Population::Healthy, ModelParams::defaults(), 2, 50.0);
        CHECK(m.points.size() == 3);  // (0,0), (0,1), (1,0)
    }

    TEST_CASE("cell-free row is extinct") {
        const BasinMap m = sweep_grid(Population::Healthy, ModelParams::defaults(), 5, 50.0);
        for (const auto& pt : m.points)
            if (pt.phi_alpha == 0.0) CHECK(pt.tag == AttractorTag::Extinction);
    }

    TEST_CASE("csv export") {
        const BasinMap m = sweep_grid(Population::Healthy, ModelParams::defaults(), 2, 10.0);
        std::ostringstream os;
        m.write_csv(os);
        CHECK(os.str().substr(0, 20) == "phi_M,phi_alpha,tag\n");
    }
}
