#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "fibrosim/model.hpp"

using namespace fibrosim;

TEST_SUITE("mollifier") {
    TEST_CASE("linear ramp values") {
        Mollifier h{0.1};
        CHECK(h(-0.5) == 0.0);
        CHECK(h(0.05) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(h(0.2) == 1.0);
        CHECK(h(0.0) == 0.0);
        CHECK(h(0.1) == 1.0);
    }

    TEST_CASE("linear inverse") {
        CHECK(Mollifier{0.1}.inverse(0.4) == doctest::Approx(0.04).epsilon(1e-14));
        CHECK(Mollifier{0.2}.inverse(0.5) == doctest::Approx(0.1).epsilon(1e-14));
        CHECK_THROWS_AS(Mollifier{0.1}.inverse(1.0), DomainError);
        CHECK_THROWS_AS(Mollifier{0.1}.inverse(0.0), DomainError);
        CHECK_THROWS_AS(Mollifier{0.1}.inverse(-0.3), DomainError);
    }

    TEST_CASE("inverse is a right inverse on (0, eps)") {
        for (Mollifier h : {Mollifier{0.1}, Mollifier{0.05, MollifierShape::Smoothstep}}) {
            for (int i = 1; i < 100; ++i) {
                const double s = h.width * i / 100.0;
                CHECK(h.inverse(h(s)) == doctest::Approx(s).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("smoothstep shape") {
        Mollifier h{0.1, MollifierShape::Smoothstep};
        CHECK(h(-1.0) == 0.0);
        CHECK(h(0.05) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(h(0.1) == 1.0);
        CHECK(h.lipschitz() == doctest::Approx(1.5 / 0.1));
        // nondecreasing and within [0, 1]
        double prev = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double v = h(-0.05 + 0.2 * i / 200.0);
            CHECK(v >= prev - 1e-15);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }

    TEST_CASE("shifted ramp bound") {
        // H(s - beta) <= Lip(H) |s| for beta >= 0
        for (Mollifier h : {Mollifier{0.1}, Mollifier{0.1, MollifierShape::Smoothstep}}) {
            for (double beta : {0.0, 0.01, 0.3}) {
                for (int i = 0; i <= 100; ++i) {
                    const double s = -0.5 + 1.5 * i / 100.0;
                    CHECK(h(s - beta) <= h.lipschitz() * std::abs(s) + 1e-12);
                }
            }
        }
    }
}

TEST_SUITE("rate functions") {
    TEST_CASE("affine") {
        const RateFunction f = RateFunction::affine(0.5, -0.5);
        CHECK(f(0.0) == 0.5);
        CHECK(f(1.0) == 0.0);
        CHECK(f.lipschitz() == 0.5);
        CHECK(f.monotonicity() == -1);
    }

    TEST_CASE("saturating") {
        const RateFunction f = RateFunction::saturating(2.0, 0.5);
        CHECK(f(0.0) == 0.0);
        CHECK(f(0.5) == doctest::Approx(1.0));
        CHECK(f.monotonicity() == 1);
        CHECK_THROWS_AS(RateFunction::saturating(1.0, 0.0), DomainError);
    }

    TEST_CASE("tabulated") {
        const RateFunction f = RateFunction::tabulated({{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}});
        CHECK(f(0.25) == doctest::Approx(0.5));
        CHECK(f(2.0) == 1.0);
        CHECK(f.lipschitz() == doctest::Approx(2.0));
        CHECK(f.monotonicity() == 1);
        CHECK_THROWS_AS(RateFunction::tabulated({{0.0, 1.0}}), DomainError);
    }
}

TEST_SUITE("model rates") {
    TEST_CASE("growth rate hand values") {
        const ModelParams p = ModelParams::defaults();
        // gamma_H(0) = 0 and the anoikis switch saturated: -0.1 - 0.4
        CHECK(growth_rate(Population::Healthy, {0.0, 0.3, 0.0}, p) ==
              doctest::Approx(-0.5).epsilon(1e-14));
        // worked equilibrium
        CHECK(growth_rate(Population::Healthy, {0.0, 0.51, 0.25}, p) ==
              doctest::Approx(0.0).epsilon(1e-14));
        // phi_M = 0 kills the growth term for any state
        const VolumeState s{0.2, 0.1, 0.0};
        CHECK(growth_rate(Population::Tumor, s, p) ==
              doctest::Approx(-0.1 - 0.2 * p.matrix_switch(0.2)).epsilon(1e-14));
    }

    TEST_CASE("growth rate is nonincreasing in psi") {
        const ModelParams p = ModelParams::defaults();
        for (int i = 0; i <= 20; ++i) {
            const double phi_M = i / 20.0;
            double prev = growth_rate_at(Population::Healthy, phi_M, 0.0, p);
            for (int j = 1; j <= 50; ++j) {
                const double v = growth_rate_at(Population::Healthy, phi_M, j / 50.0, p);
                CHECK(v <= prev + 1e-12);
                prev = v;
            }
        }
    }

    TEST_CASE("matrix rate hand values") {
        const ModelParams p = ModelParams::defaults();
        CHECK(matrix_rate({0.0, 0.0, 0.7}, p) == 0.0);
        CHECK(matrix_rate({0.0, 0.51, 0.25}, p) == doctest::Approx(0.0).epsilon(1e-14));
        // at psi = 1 the deposition gate H(psi_M - psi) = H(0) closes, leaving
        // pure degradation: (0 - 1.5 * 0.5) * 0.5
        CHECK(matrix_rate({0.0, 0.5, 0.5}, p) == doctest::Approx(-0.375).epsilon(1e-14));
        CHECK(matrix_rate({0.0, 0.5, 0.4}, p) ==
              doctest::Approx(0.5 * (0.3 - 0.6)).epsilon(1e-14));
    }

    TEST_CASE("enzyme concentration") {
        ModelParams p = ModelParams::defaults();
        p.enzyme_halflife = 2.0;
        p.enzyme_production_T = 0.5;
        p.enzyme_production_H = 0.1;
        CHECK(enzyme_concentration({0.0, 0.0, 0.3}, p) == 0.0);
        CHECK(enzyme_concentration({0.2, 0.3, 0.1}, p) == doctest::Approx(0.26).epsilon(1e-14));
        CHECK(enzyme_concentration({0.4, 0.6, 0.0}, p) ==
              doctest::Approx(2.0 * enzyme_concentration({0.2, 0.3, 0.0}, p)).epsilon(1e-14));
    }
}

namespace {

bool has_clause(const std::vector<Violation>& v, const std::string& clause) {
    return std::any_of(v.begin(), v.end(),
                       [&](const Violation& x) { return x.clause == clause; });
}

}  // namespace

TEST_SUITE("validation") {
    TEST_CASE("defaults pass") {
        CHECK(validate_params(ModelParams::defaults()).empty());
    }

    TEST_CASE("zero apoptosis is rejected") {
        ModelParams p = ModelParams::defaults();
        p.healthy.apoptosis = 0.0;
        CHECK(has_clause(validate_params(p), "delta > 0"));
    }

    TEST_CASE("constant overproduction is rejected") {
        ModelParams p = ModelParams::defaults();
        p.healthy.matrix_production = RateFunction::affine(2.0, 0.0);
        CHECK(has_clause(validate_params(p), "mu(psi_alpha) < nu_alpha * psi_alpha"));
    }

    TEST_CASE("raw/effective degradation mismatch is rejected") {
        ModelParams p = ModelParams::defaults();
        p.tumor.matrix_degradation = 0.7;
        CHECK(has_clause(validate_params(p), "nu_alpha = nu * tau * pi_alpha"));
    }
}

TEST_SUITE("gamma ordering") {
    TEST_CASE("identical kinetics give zero margin") {
        ModelParams p = ModelParams::defaults();
        p.tumor = p.healthy;
        const OrderingReport r = check_gamma_ordering(p, 21);
        CHECK_FALSE(r.strictly_positive);
        CHECK(r.min_margin == 0.0);
    }

    TEST_CASE("defaults dominate but saturate on plateaus") {
        const OrderingReport r = check_gamma_ordering(ModelParams::defaults(), 41);
        // Gamma_T - Gamma_H >= 0 everywhere, equal where both switch terms
        // sit on the same plateau (e.g. phi_M >= 0.2, psi <= 0.7), so the
        // strict verdict is false with margin exactly zero.
        CHECK(r.min_margin == 0.0);
        CHECK_FALSE(r.strictly_positive);
        // but strictly positive wherever the anoikis switch is active
        const ModelParams p = ModelParams::defaults();
        CHECK(growth_rate_at(Population::Tumor, 0.0, 0.3, p) -
                  growth_rate_at(Population::Healthy, 0.0, 0.3, p) ==
              doctest::Approx(0.2).epsilon(1e-14));
    }

    TEST_CASE("lower adhesion threshold also dominates") {
        ModelParams p = ModelParams::defaults();
        p.tumor = p.healthy;
        p.tumor.adhesion_threshold = 0.1;
        const OrderingReport r = check_gamma_ordering(p, 41);
        CHECK(r.min_margin >= 0.0);
    }
}
