#include "fibrosim/config.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <sstream>

#include "fibrosim/equilibria.hpp"
#include "fibrosim/ode.hpp"
#include "fibrosim/phase.hpp"
#include "nlohmann/json.hpp"

namespace fibrosim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& value, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ParseError(fmt::format("key '{}': '{}' is not a number", key, value));
    }
    if (trim(value.substr(pos)) != "")
        throw ParseError(fmt::format("key '{}': trailing characters in '{}'", key, value));
    return v;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, std::string>& out) {
    for (const auto& [k, v] : j.items()) {
        const std::string key = prefix.empty() ? k : prefix + "." + k;
        if (v.is_object()) {
            flatten_json(v, key, out);
        } else if (v.is_string()) {
            out[key] = v.get<std::string>();
        } else {
            out[key] = v.dump();
        }
    }
}

RateFunction rebuild_rate(const RateFunction& f, RateFamily family, double a, double b) {
    switch (family) {
        case RateFamily::Affine:
            return RateFunction::affine(a, b);
        case RateFamily::Saturating:
            return RateFunction::saturating(a, b);
        case RateFamily::Tabulated:
            return f;  // tables are not expressible in the flat format
    }
    return f;
}

void sync_effective_degradation(ModelParams& p) {
    p.tumor.matrix_degradation =
        p.enzyme_degradation * p.enzyme_halflife * p.enzyme_production_T;
    p.healthy.matrix_degradation =
        p.enzyme_degradation * p.enzyme_halflife * p.enzyme_production_H;
}

}  // namespace

std::map<std::string, std::string> read_flat_config(std::istream& is) {
    std::stringstream buffer;
    buffer << is.rdbuf();
    const std::string text = buffer.str();

    std::map<std::string, std::string> out;
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON configuration: ") + e.what());
        }
        flatten_json(j, "", out);
        return out;
    }

    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(fmt::format("expected 'key = value', got '{}'", line), line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (out.contains(key))
            throw ParseError(fmt::format("duplicate key '{}'", key), line_no);
        out[key] = value;
    }
    return out;
}

void apply_param_key(ModelParams& p, const std::string& key, const std::string& value) {
    auto num = [&] { return parse_number(value, key); };

    if (key == "mollifier.shape") {
        MollifierShape shape;
        if (value == "linear")
            shape = MollifierShape::PiecewiseLinear;
        else if (value == "smooth")
            shape = MollifierShape::Smoothstep;
        else
            throw ParseError(fmt::format("mollifier.shape: unknown shape '{}'", value));
        p.tumor.crowding_switch.shape = shape;
        p.healthy.crowding_switch.shape = shape;
        p.matrix_switch.shape = shape;
        return;
    }
    if (key == "psi_M") { p.matrix_crowding_threshold = num(); return; }
    if (key == "eps_M") { p.matrix_switch.width = num(); return; }
    if (key == "tau") { p.enzyme_halflife = num(); sync_effective_degradation(p); return; }
    if (key == "nu") { p.enzyme_degradation = num(); sync_effective_degradation(p); return; }
    if (key == "pi_T") { p.enzyme_production_T = num(); sync_effective_degradation(p); return; }
    if (key == "pi_H") { p.enzyme_production_H = num(); sync_effective_degradation(p); return; }

    CellKinetics* k = nullptr;
    double* production = nullptr;
    std::string rest;
    if (key.starts_with("kinetics_T.")) {
        k = &p.tumor;
        production = &p.enzyme_production_T;
        rest = key.substr(11);
    } else if (key.starts_with("kinetics_H.")) {
        k = &p.healthy;
        production = &p.enzyme_production_H;
        rest = key.substr(11);
    } else {
        throw ParseError(fmt::format("unknown parameter key '{}'", key));
    }

    if (rest == "delta") { k->apoptosis = num(); return; }
    if (rest == "delta_prime") { k->anoikis = num(); return; }
    if (rest == "psi") { k->crowding_threshold = num(); return; }
    if (rest == "m") { k->adhesion_threshold = num(); return; }
    if (rest == "eps") { k->crowding_switch.width = num(); return; }
    if (rest == "nu") {
        // effective rate given directly: keep the enzyme closure consistent
        k->matrix_degradation = num();
        const double denom = p.enzyme_degradation * p.enzyme_halflife;
        if (denom > 0.0) *production = k->matrix_degradation / denom;
        return;
    }

    RateFunction* f = nullptr;
    std::string field;
    if (rest.starts_with("gamma.")) {
        f = &k->growth;
        field = rest.substr(6);
    } else if (rest.starts_with("mu.")) {
        f = &k->matrix_production;
        field = rest.substr(3);
    } else {
        throw ParseError(fmt::format("unknown parameter key '{}'", key));
    }
    if (field == "family") {
        RateFamily fam;
        if (value == "affine")
            fam = RateFamily::Affine;
        else if (value == "saturating")
            fam = RateFamily::Saturating;
        else
            throw ParseError(fmt::format("key '{}': unknown family '{}'", key, value));
        *f = rebuild_rate(*f, fam, f->coef_a(), f->coef_b());
        return;
    }
    if (field == "a") { *f = rebuild_rate(*f, f->family(), num(), f->coef_b()); return; }
    if (field == "b") { *f = rebuild_rate(*f, f->family(), f->coef_a(), num()); return; }
    throw ParseError(fmt::format("unknown parameter key '{}'", key));
}

std::string write_params_config(const ModelParams& p) {
    std::ostringstream os;
    auto shape_name = [](MollifierShape s) {
        return s == MollifierShape::PiecewiseLinear ? "linear" : "smooth";
    };
    auto family_name = [](RateFamily f) {
        return f == RateFamily::Affine ? "affine" : "saturating";
    };
    os << fmt::format("mollifier.shape = {}\n", shape_name(p.matrix_switch.shape));
    os << fmt::format("tau = {:.17g}\n", p.enzyme_halflife);
    os << fmt::format("nu = {:.17g}\n", p.enzyme_degradation);
    os << fmt::format("pi_T = {:.17g}\n", p.enzyme_production_T);
    os << fmt::format("pi_H = {:.17g}\n", p.enzyme_production_H);
    os << fmt::format("psi_M = {:.17g}\n", p.matrix_crowding_threshold);
    os << fmt::format("eps_M = {:.17g}\n", p.matrix_switch.width);
    for (Population a : {Population::Tumor, Population::Healthy}) {
        const CellKinetics& k = p.kinetics(a);
        const std::string pre = std::string("kinetics_") + population_code(a) + ".";
        os << fmt::format("{}gamma.family = {}\n", pre, family_name(k.growth.family()));
        os << fmt::format("{}gamma.a = {:.17g}\n", pre, k.growth.coef_a());
        os << fmt::format("{}gamma.b = {:.17g}\n", pre, k.growth.coef_b());
        os << fmt::format("{}mu.family = {}\n", pre, family_name(k.matrix_production.family()));
        os << fmt::format("{}mu.a = {:.17g}\n", pre, k.matrix_production.coef_a());
        os << fmt::format("{}mu.b = {:.17g}\n", pre, k.matrix_production.coef_b());
        os << fmt::format("{}delta = {:.17g}\n", pre, k.apoptosis);
        os << fmt::format("{}delta_prime = {:.17g}\n", pre, k.anoikis);
        os << fmt::format("{}psi = {:.17g}\n", pre, k.crowding_threshold);
        os << fmt::format("{}m = {:.17g}\n", pre, k.adhesion_threshold);
        os << fmt::format("{}eps = {:.17g}\n", pre, k.crowding_switch.width);
        os << fmt::format("{}nu = {:.17g}\n", pre, k.matrix_degradation);
    }
    return os.str();
}

ModelParams params_from_config(const std::map<std::string, std::string>& kv) {
    ModelParams p = ModelParams::defaults();
    for (const auto& [key, value] : kv) {
        if (key.starts_with("scenario.")) continue;
        apply_param_key(p, key, value);
    }
    return p;
}

std::string to_string(RunKind k) {
    switch (k) {
        case RunKind::Ode: return "ode";
        case RunKind::Picard: return "picard";
        case RunKind::Equilibria: return "equilibria";
        case RunKind::Portrait: return "portrait";
        case RunKind::Pde: return "pde";
        case RunKind::Sweep: return "sweep";
        case RunKind::Validate: return "validate";
    }
    return "?";
}

namespace {

RunKind run_kind_from(const std::string& v) {
    if (v == "ode") return RunKind::Ode;
    if (v == "picard") return RunKind::Picard;
    if (v == "equilibria") return RunKind::Equilibria;
    if (v == "portrait") return RunKind::Portrait;
    if (v == "pde") return RunKind::Pde;
    if (v == "sweep") return RunKind::Sweep;
    if (v == "validate") return RunKind::Validate;
    throw ParseError(fmt::format("unknown run kind '{}'", v));
}

void apply_scenario_key(Scenario& s, const std::string& field, const std::string& value) {
    auto num = [&] { return parse_number(value, field); };
    if (field == "run") { s.run = run_kind_from(value); return; }
    if (field == "t_end") { s.t_end = num(); return; }
    if (field == "dt") { s.dt = num(); return; }
    if (field == "tol") { s.picard_tol = num(); return; }
    if (field == "t_max") { s.t_max = num(); return; }
    if (field == "grid_n") { s.grid_n = static_cast<int>(num()); return; }
    if (field == "stride") { s.stride = static_cast<int>(num()); return; }
    if (field == "level") { s.level = num(); return; }
    if (field == "alpha") {
        if (value == "T") s.alpha = Population::Tumor;
        else if (value == "H") s.alpha = Population::Healthy;
        else throw ParseError(fmt::format("alpha must be T or H, got '{}'", value));
        return;
    }
    if (field == "initial.phi_T") { s.initial.phi_T = num(); return; }
    if (field == "initial.phi_H") { s.initial.phi_H = num(); return; }
    if (field == "initial.phi_M") { s.initial.phi_M = num(); return; }
    if (field == "out") { s.out_dir = value; return; }
    if (field == "pde.x_min") { s.grid.x_min = num(); return; }
    if (field == "pde.x_max") { s.grid.x_max = num(); return; }
    if (field == "pde.n_cells") { s.grid.n_cells = static_cast<int>(num()); return; }
    if (field == "law.stiffness") { s.law.stiffness = num(); return; }
    if (field == "law.packing_ratio") { s.law.packing_ratio = num(); return; }
    if (field == "law.motility_T") { s.law.motility_T = num(); return; }
    if (field == "law.motility_H") { s.law.motility_H = num(); return; }
    if (field == "law.stress_threshold_T") { s.law.stress_threshold_T = num(); return; }
    if (field == "law.stress_threshold_H") { s.law.stress_threshold_H = num(); return; }
    if (field == "seed_level") { s.seed_level = num(); return; }
    if (field == "seed_fraction") { s.seed_fraction = num(); return; }
    if (field.starts_with("param.")) { apply_param_key(s.params, field.substr(6), value); return; }
    throw ParseError(fmt::format("unknown scenario field '{}'", field));
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "physiological") {
        // healthy cells seeded without any matrix
        s.run = RunKind::Ode;
        s.initial = {0.0, 0.3, 0.0};
        s.t_end = 200.0;
        return s;
    }
    if (name == "fibrotic") {
        // healthy equilibrium perturbed by a small tumor fraction
        s.run = RunKind::Ode;
        const VolumeState eq = nontrivial_equilibrium(Population::Healthy, s.params).location;
        s.initial = {0.01, eq.phi_H, eq.phi_M};
        s.t_end = 500.0;
        return s;
    }
    if (name == "invasion") {
        s.run = RunKind::Pde;
        s.t_end = 150.0;
        s.grid = {0.0, 60.0, 400};
        s.law.packing_ratio = 0.45;
        s.level = 0.25;
        return s;
    }
    throw ParseError(fmt::format("unknown preset '{}'", name));
}

std::vector<Scenario> parse_config(std::istream& is) {
    const auto kv = read_flat_config(is);
    const ModelParams base = params_from_config(kv);

    std::map<std::string, std::map<std::string, std::string>> blocks;
    for (const auto& [key, value] : kv) {
        if (!key.starts_with("scenario.")) continue;
        const std::string rest = key.substr(9);
        const std::size_t dot = rest.find('.');
        if (dot == std::string::npos)
            throw ParseError(fmt::format("scenario key '{}' lacks a field", key));
        blocks[rest.substr(0, dot)][rest.substr(dot + 1)] = value;
    }

    std::vector<Scenario> out;
    for (const auto& [name, fields] : blocks) {
        Scenario s;
        s.name = name;
        s.params = base;
        for (const auto& [field, value] : fields) apply_scenario_key(s, field, value);
        const auto violations = validate_params(s.params);
        if (!violations.empty()) {
            std::string msg = fmt::format("scenario '{}' parameters invalid:", name);
            for (const auto& v : violations) msg += " [" + v.clause + "]";
            throw ParseError(msg);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Scenario> parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError(fmt::format("cannot open config file '{}'", path));
    return parse_config(is);
}

std::string write_scenario_config(const Scenario& s) {
    std::ostringstream os;
    const std::string pre = "scenario." + s.name + ".";
    os << pre << "run = " << to_string(s.run) << "\n";
    os << fmt::format("{}t_end = {:.17g}\n", pre, s.t_end);
    os << fmt::format("{}dt = {:.17g}\n", pre, s.dt);
    os << fmt::format("{}tol = {:.17g}\n", pre, s.picard_tol);
    os << fmt::format("{}t_max = {:.17g}\n", pre, s.t_max);
    os << fmt::format("{}grid_n = {}\n", pre, s.grid_n);
    os << fmt::format("{}stride = {}\n", pre, s.stride);
    os << fmt::format("{}level = {:.17g}\n", pre, s.level);
    os << fmt::format("{}alpha = {}\n", pre, population_code(s.alpha));
    os << fmt::format("{}initial.phi_T = {:.17g}\n", pre, s.initial.phi_T);
    os << fmt::format("{}initial.phi_H = {:.17g}\n", pre, s.initial.phi_H);
    os << fmt::format("{}initial.phi_M = {:.17g}\n", pre, s.initial.phi_M);
    if (!s.out_dir.empty()) os << pre << "out = " << s.out_dir << "\n";
    os << fmt::format("{}pde.x_min = {:.17g}\n", pre, s.grid.x_min);
    os << fmt::format("{}pde.x_max = {:.17g}\n", pre, s.grid.x_max);
    os << fmt::format("{}pde.n_cells = {}\n", pre, s.grid.n_cells);
    os << fmt::format("{}law.stiffness = {:.17g}\n", pre, s.law.stiffness);
    os << fmt::format("{}law.packing_ratio = {:.17g}\n", pre, s.law.packing_ratio);
    os << fmt::format("{}law.motility_T = {:.17g}\n", pre, s.law.motility_T);
    os << fmt::format("{}law.motility_H = {:.17g}\n", pre, s.law.motility_H);
    os << fmt::format("{}law.stress_threshold_T = {:.17g}\n", pre, s.law.stress_threshold_T);
    os << fmt::format("{}law.stress_threshold_H = {:.17g}\n", pre, s.law.stress_threshold_H);
    os << fmt::format("{}seed_level = {:.17g}\n", pre, s.seed_level);
    os << fmt::format("{}seed_fraction = {:.17g}\n", pre, s.seed_fraction);
    // Parameters are global in files; scenario-local overrides go under param.*
    return os.str();
}

namespace {

std::filesystem::path resolve_out_dir(const Scenario& s) {
    if (!s.out_dir.empty()) return s.out_dir;
    if (const char* env = std::getenv("FIBROSIM_OUT"); env && *env) return env;
    return ".";
}

std::string state_summary(const VolumeState& v) {
    return fmt::format("phi_T = {:.17g}, phi_H = {:.17g}, phi_M = {:.17g}", v.phi_T, v.phi_H,
                       v.phi_M);
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s) {
    ScenarioResult res;
    const std::filesystem::path dir = resolve_out_dir(s);
    std::filesystem::create_directories(dir);
    auto artifact = [&](const std::string& suffix) {
        const auto path = dir / (s.name + "_" + suffix);
        res.artifacts.push_back(path.string());
        return path;
    };
    auto write_file = [&](const std::string& suffix, const auto& writer) {
        std::ofstream os(artifact(suffix));
        writer(os);
    };

    switch (s.run) {
        case RunKind::Ode: {
            const Trajectory t = integrate_rk(s.initial, s.params, s.t_end, s.dt, 100);
            write_file("trajectory.csv", [&](std::ostream& os) { t.write_csv(os); });
            res.summary = fmt::format("final state at t = {:.17g}: {}", s.t_end,
                                      state_summary(t.back()));
            break;
        }
        case RunKind::Picard: {
            PicardOptions opt;
            opt.tol = s.picard_tol;
            const Trajectory t = integrate_picard(s.initial, s.params, s.t_end, opt);
            write_file("trajectory.csv", [&](std::ostream& os) { t.write_csv(os); });
            res.summary = fmt::format(
                "final state at t = {:.17g}: {} (lambda = {:.17g}, sum drift = {:.3g})", s.t_end,
                state_summary(t.back()), t.meta.lambda, t.meta.max_sum_drift);
            break;
        }
        case RunKind::Equilibria: {
            const EquilibriumReport rep = nontrivial_equilibrium(s.alpha, s.params);
            write_file(fmt::format("equilibrium_{}.json", population_code(s.alpha)),
                       [&](std::ostream& os) { os << rep.to_json() << "\n"; });
            res.summary = fmt::format(
                "{} equilibrium: phi_M = {:.17g}, phi_{} = {:.17g}; full system {}, "
                "restricted manifold {}",
                to_string(rep.kind), rep.location.phi_M, population_code(s.alpha),
                rep.location.phi(s.alpha), to_string(rep.verdict),
                rep.restricted_verdict ? to_string(*rep.restricted_verdict) : "-");
            break;
        }
        case RunKind::Portrait: {
            const GammaRoots roots = gamma_roots(s.alpha, s.params);
            std::string parts;
            if (roots.lower) {
                const BasinBoundary b = basin_boundary(s.alpha, BoundaryAnchor::Lower, s.params);
                write_file("boundary_lower.csv", [&](std::ostream& os) { b.write_csv(os); });
                parts += fmt::format("lower root {:.17g}; ", *roots.lower);
            }
            if (roots.upper) {
                const BasinBoundary b = basin_boundary(s.alpha, BoundaryAnchor::Upper, s.params);
                write_file("boundary_upper.csv", [&](std::ostream& os) { b.write_csv(os); });
                parts += fmt::format("upper root {:.17g}; ", *roots.upper);
            }
            if (parts.empty()) parts = "no cell-free growth roots; ";
            res.summary = fmt::format("portrait for population {}: {}", population_code(s.alpha),
                                      parts);
            break;
        }
        case RunKind::Sweep: {
            const BasinMap map = sweep_grid(s.alpha, s.params, s.grid_n, s.t_max);
            write_file("basin_map.csv", [&](std::ostream& os) { map.write_csv(os); });
            int ext = 0, nontriv = 0, und = 0;
            for (const auto& pt : map.points) {
                if (pt.tag == AttractorTag::Extinction) ++ext;
                else if (pt.tag == AttractorTag::Nontrivial) ++nontriv;
                else ++und;
            }
            res.summary = fmt::format("basin sweep {}x{}: {} extinction, {} nontrivial, "
                                      "{} undecided",
                                      s.grid_n, s.grid_n, ext, nontriv, und);
            break;
        }
        case RunKind::Pde: {
            const FieldState init =
                invasion_initial(s.params, s.grid, s.seed_level, s.seed_fraction);
            const auto frames = simulate(init, s.params, s.law, s.t_end, s.stride);
            for (std::size_t i = 0; i < frames.size(); ++i)
                write_file(fmt::format("frame_{:04d}.csv", i),
                           [&](std::ostream& os) { frames[i].write_csv(os); });
            write_file("manifest.json", [&](std::ostream& os) {
                os << frames_manifest(frames, s.params, s.law) << "\n";
            });
            std::string wave = "no wave fit";
            try {
                const auto fit = wave_speed(frames, Population::Tumor, s.level);
                wave = fmt::format("front speed {:.17g} (R^2 = {:.6g})", fit.speed,
                                   fit.r_squared);
            } catch (const Error&) {
            }
            res.summary = fmt::format("{} frames on {} cells; {}", frames.size(),
                                      s.grid.n_cells, wave);
            break;
        }
        case RunKind::Validate: {
            const auto violations = validate_params(s.params);
            if (violations.empty()) {
                res.summary = "parameters satisfy all structural assumptions";
            } else {
                std::string msg = fmt::format("{} violation(s):", violations.size());
                for (const auto& v : violations)
                    msg += fmt::format(" [{}] {};", v.clause, v.detail);
                res.summary = msg;
                res.status = 1;
            }
            break;
        }
    }
    return res;
}

}  // namespace fibrosim
