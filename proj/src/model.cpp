#include "fibrosim/model.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace fibrosim {

ModelParams ModelParams::defaults() {
    ModelParams p;
    CellKinetics base;
    base.growth = RateFunction::affine(0.0, 1.0);            // gamma(s) = s
    base.matrix_production = RateFunction::affine(0.5, -0.5);  // mu(s) = 0.5 (1 - s)
    base.apoptosis = 0.1;
    base.adhesion_threshold = 0.2;
    base.matrix_degradation = 1.5;

    p.healthy = base;
    p.healthy.anoikis = 0.4;
    p.healthy.crowding_threshold = 0.8;
    p.healthy.crowding_switch = Mollifier{0.1};

    p.tumor = base;
    p.tumor.anoikis = 0.2;
    p.tumor.crowding_threshold = 0.85;
    p.tumor.crowding_switch = Mollifier{0.1};

    p.matrix_crowding_threshold = 1.0;
    p.matrix_switch = Mollifier{0.05};
    p.enzyme_halflife = 1.0;
    p.enzyme_production_T = 1.0;
    p.enzyme_production_H = 1.0;
    p.enzyme_degradation = 1.5;
    return p;
}

ModelParams ModelParams::with_smooth_switches() const {
    ModelParams p = *this;
    p.tumor.crowding_switch = p.tumor.crowding_switch.smoothed();
    p.healthy.crowding_switch = p.healthy.crowding_switch.smoothed();
    p.matrix_switch = p.matrix_switch.smoothed();
    return p;
}

double growth_rate_at(Population a, double phi_M, double psi, const ModelParams& p) {
    const CellKinetics& k = p.kinetics(a);
    return k.growth(phi_M) * k.crowding_switch(k.crowding_threshold - psi) - k.apoptosis -
           k.anoikis * p.matrix_switch(k.adhesion_threshold - phi_M);
}

double growth_rate(Population a, const VolumeState& s, const ModelParams& p) {
    return growth_rate_at(a, s.phi_M, s.psi(), p);
}

double matrix_rate(const VolumeState& s, const ModelParams& p) {
    const double gate = p.matrix_switch(p.matrix_crowding_threshold - s.psi());
    double rate = 0.0;
    for (Population a : {Population::Tumor, Population::Healthy}) {
        const CellKinetics& k = p.kinetics(a);
        rate += (k.matrix_production(s.phi_M) * gate - k.matrix_degradation * s.phi_M) * s.phi(a);
    }
    return rate;
}

double enzyme_concentration(const VolumeState& s, const ModelParams& p) {
    return p.enzyme_halflife * (p.enzyme_production_T * s.phi_T + p.enzyme_production_H * s.phi_H);
}

namespace {

void check_kinetics(Population a, const CellKinetics& k, const ModelParams& p, int n,
                    std::vector<Violation>& out) {
    const std::string who(1, population_code(a));
    auto add = [&](const std::string& clause, const std::string& detail) {
        out.push_back({clause, "kinetics_" + who + ": " + detail});
    };

    if (!(k.apoptosis > 0.0)) add("delta > 0", fmt::format("delta = {}", k.apoptosis));
    if (!(k.anoikis > 0.0)) add("delta_prime > 0", fmt::format("delta_prime = {}", k.anoikis));
    if (!(k.matrix_degradation > 0.0)) add("nu > 0", fmt::format("nu = {}", k.matrix_degradation));
    if (!(k.crowding_threshold >= 0.0 && k.crowding_threshold <= 1.0))
        add("0 <= psi_alpha <= 1", fmt::format("psi_alpha = {}", k.crowding_threshold));
    if (!(k.adhesion_threshold >= 0.0 && k.adhesion_threshold <= 1.0))
        add("0 <= m_alpha <= 1", fmt::format("m_alpha = {}", k.adhesion_threshold));
    if (!(k.crowding_switch.width > 0.0))
        add("eps_alpha > 0", fmt::format("eps_alpha = {}", k.crowding_switch.width));

    if (std::abs(k.growth(0.0)) > 1e-12)
        add("gamma(0) = 0", fmt::format("gamma(0) = {}", k.growth(0.0)));
    if (k.growth.monotonicity() < 1) add("gamma nondecreasing", "declared monotonicity is not +1");
    if (k.matrix_production.monotonicity() > -1 &&
        k.matrix_production.lipschitz() > 0.0)  // constant mu is vacuously nonincreasing
        add("mu nonincreasing", "declared monotonicity is not -1");

    // Dense sampling of the pointwise bounds.
    const double lip_g = k.growth.lipschitz();
    double prev_g = k.growth(0.0), prev_m = k.matrix_production(0.0);
    const double g1 = k.growth(1.0);
    const double m0 = k.matrix_production(0.0), m1 = k.matrix_production(1.0);
    bool g_neg = false, g_lip = false, g_mono = false, m_neg = false, m_mono = false,
         m_bounds = false;
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const double g = k.growth(s);
        const double m = k.matrix_production(s);
        if (g < -1e-12) g_neg = true;
        if (g > lip_g * s + 1e-9 || g > g1 + 1e-9) g_lip = true;
        if (i > 0 && g < prev_g - 1e-12) g_mono = true;
        if (m < -1e-12) m_neg = true;
        if (i > 0 && m > prev_m + 1e-12) m_mono = true;
        if (m > m0 + 1e-9 || m < m1 - 1e-9) m_bounds = true;
        prev_g = g;
        prev_m = m;
    }
    if (g_neg) add("gamma nonnegative", "gamma(s) < 0 at a sampled point");
    if (g_lip) add("gamma growth bound", "gamma(s) exceeds Lip(gamma) s or gamma(1)");
    if (g_mono) add("gamma nondecreasing", "gamma decreases between sampled points");
    if (m_neg) add("mu nonnegative", "mu(s) < 0 at a sampled point");
    if (m_mono) add("mu nonincreasing", "mu increases between sampled points");
    if (m_bounds) add("mu bounds", "mu(s) leaves [mu(1), mu(0)] at a sampled point");

    // Deposition must lose to degradation at the crowding threshold, otherwise
    // the matrix balance has no root below psi_alpha.
    const double ps = k.crowding_threshold;
    if (ps > 0.0 && !(k.matrix_production(ps) < k.matrix_degradation * ps))
        add("mu(psi_alpha) < nu_alpha * psi_alpha",
            fmt::format("mu({}) = {} vs nu_alpha * psi_alpha = {}", ps, k.matrix_production(ps),
                        k.matrix_degradation * ps));
}

void check_mollifier(const std::string& name, const Mollifier& h, int n,
                     std::vector<Violation>& out) {
    if (!(h.width > 0.0)) {
        out.push_back({"eps > 0", name + fmt::format(": width = {}", h.width)});
        return;
    }
    const double lip = h.lipschitz();
    double prev = h(-1.0);
    bool range = false, mono = false, bound = false;
    for (int i = 0; i <= n; ++i) {
        const double s = -1.0 + 3.0 * i / n;  // cover both plateaus
        const double v = h(s);
        if (v < -1e-12 || v > 1.0 + 1e-12) range = true;
        if (v < prev - 1e-12) mono = true;
        // H(s - beta) <= Lip |s| for beta >= 0; beta = 0 is the binding case.
        if (v > lip * std::abs(s) + 1e-9) bound = true;
        prev = v;
    }
    if (range) out.push_back({"0 <= H <= 1", name + ": value outside [0, 1]"});
    if (mono) out.push_back({"H nondecreasing", name + ": decreases between samples"});
    if (bound) out.push_back({"H Lipschitz bound", name + ": H(s) > Lip(H) |s|"});
}

}  // namespace

std::vector<Violation> validate_params(const ModelParams& p, int sample_n) {
    std::vector<Violation> out;
    check_kinetics(Population::Tumor, p.tumor, p, sample_n, out);
    check_kinetics(Population::Healthy, p.healthy, p, sample_n, out);
    if (!(p.matrix_crowding_threshold >= 0.0 && p.matrix_crowding_threshold <= 1.0))
        out.push_back({"0 <= psi_M <= 1", fmt::format("psi_M = {}", p.matrix_crowding_threshold)});
    check_mollifier("matrix_switch", p.matrix_switch, sample_n, out);
    check_mollifier("crowding_switch_T", p.tumor.crowding_switch, sample_n, out);
    check_mollifier("crowding_switch_H", p.healthy.crowding_switch, sample_n, out);
    if (!(p.enzyme_halflife > 0.0))
        out.push_back({"tau > 0", fmt::format("tau = {}", p.enzyme_halflife)});
    if (!(p.enzyme_production_T > 0.0 && p.enzyme_production_H > 0.0))
        out.push_back({"pi_alpha > 0", "enzyme production rates must be positive"});
    if (!(p.enzyme_degradation > 0.0))
        out.push_back({"nu_raw > 0", fmt::format("nu = {}", p.enzyme_degradation)});
    // Effective degradation rates must match the raw enzyme parameters.
    const double nu_T = p.enzyme_degradation * p.enzyme_halflife * p.enzyme_production_T;
    const double nu_H = p.enzyme_degradation * p.enzyme_halflife * p.enzyme_production_H;
    if (std::abs(nu_T - p.tumor.matrix_degradation) > 1e-9 ||
        std::abs(nu_H - p.healthy.matrix_degradation) > 1e-9)
        out.push_back({"nu_alpha = nu * tau * pi_alpha",
                       fmt::format("effective ({}, {}) vs raw product ({}, {})",
                                   p.tumor.matrix_degradation, p.healthy.matrix_degradation, nu_T,
                                   nu_H)});
    return out;
}

OrderingReport check_gamma_ordering(const ModelParams& p, int grid_n) {
    if (grid_n < 2) throw DomainError("check_gamma_ordering requires grid_n >= 2");
    OrderingReport r;
    r.min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        const double phi_M = static_cast<double>(i) / (grid_n - 1);
        for (int j = 0; j < grid_n; ++j) {
            const double psi = static_cast<double>(j) / (grid_n - 1);
            const double margin = growth_rate_at(Population::Tumor, phi_M, psi, p) -
                                  growth_rate_at(Population::Healthy, phi_M, psi, p);
            if (margin < r.min_margin) {
                r.min_margin = margin;
                r.at_phi_M = phi_M;
                r.at_psi = psi;
            }
        }
    }
    r.strictly_positive = r.min_margin > 0.0;
    return r;
}

}  // namespace fibrosim
