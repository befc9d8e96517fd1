#include <cstdio>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fibrosim/config.hpp"
#include "fibrosim/errors.hpp"

namespace {

using namespace fibrosim;

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string alpha = "H";
    std::vector<std::string> params;
    double t_end = 0.0, dt = 0.0, tol = 0.0, t_max = 0.0, level = 0.0;
    int grid_n = 0, stride = 0;
    std::vector<double> initial;
    bool parallel = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Scenario configuration file");
    cmd->add_option("--preset", f.preset,
                    "Built-in setup: P0, physiological, fibrotic, invasion");
    cmd->add_option("--out", f.out_dir, "Output directory (default: FIBROSIM_OUT or .)");
    cmd->add_option("--param", f.params, "Parameter override key=value (repeatable)");
    cmd->add_option("--t-end", f.t_end, "Final time");
    cmd->add_option("--dt", f.dt, "Time step");
    cmd->add_option("--tol", f.tol, "Iteration tolerance");
    cmd->add_option("--t-max", f.t_max, "Classification horizon");
    cmd->add_option("--level", f.level, "Front-tracking level");
    cmd->add_option("--grid-n", f.grid_n, "Lattice resolution");
    cmd->add_option("--stride", f.stride, "Frame recording stride");
    cmd->add_option("--alpha", f.alpha, "Population (T or H)")
        ->check(CLI::IsMember({"T", "H"}));
    cmd->add_option("--initial", f.initial, "Initial state phi_T phi_H phi_M")
        ->expected(3);
    cmd->add_flag("--parallel", f.parallel, "Run config scenarios concurrently");
}

void apply_flags(Scenario& s, const CLI::App* cmd, const CommonFlags& f) {
    if (cmd->count("--out")) s.out_dir = f.out_dir;
    if (cmd->count("--t-end")) s.t_end = f.t_end;
    if (cmd->count("--dt")) s.dt = f.dt;
    if (cmd->count("--tol")) s.picard_tol = f.tol;
    if (cmd->count("--t-max")) s.t_max = f.t_max;
    if (cmd->count("--level")) s.level = f.level;
    if (cmd->count("--grid-n")) {
        s.grid_n = f.grid_n;
        if (s.run == RunKind::Pde) s.grid.n_cells = f.grid_n;
    }
    if (cmd->count("--stride")) s.stride = f.stride;
    if (cmd->count("--alpha"))
        s.alpha = f.alpha == "T" ? Population::Tumor : Population::Healthy;
    if (cmd->count("--initial"))
        s.initial = {f.initial[0], f.initial[1], f.initial[2]};
    for (const std::string& kv : f.params) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ParseError("--param expects key=value, got '" + kv + "'");
        apply_param_key(s.params, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

std::vector<Scenario> assemble(RunKind kind, const CLI::App* cmd, const CommonFlags& f) {
    std::vector<Scenario> out;
    if (!f.config_path.empty()) {
        for (Scenario& s : parse_config_file(f.config_path))
            if (s.run == kind) out.push_back(std::move(s));
    } else {
        Scenario s;
        if (!f.preset.empty() && f.preset != "P0") s = preset_scenario(f.preset);
        s.run = kind;
        if (s.name == "scenario") s.name = to_string(kind);
        out.push_back(std::move(s));
    }
    for (Scenario& s : out) apply_flags(s, cmd, f);
    return out;
}

int run_all(const std::vector<Scenario>& scenarios, bool parallel) {
    int status = 0;
    auto run_one = [](const Scenario& s) { return run_scenario(s); };
    std::vector<std::future<ScenarioResult>> futures;
    for (const Scenario& s : scenarios)
        futures.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                                     run_one, std::cref(s)));
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        try {
            const ScenarioResult r = futures[i].get();
            std::cout << scenarios[i].name << ": " << r.summary << "\n";
            if (r.status != 0) status = r.status;
        } catch (const Error& e) {
            std::cerr << "error: scenario '" << scenarios[i].name << "': " << e.what() << "\n";
            status = 1;
        }
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiphase tumor growth and tissue fibrosis simulator"};
    app.require_subcommand(1);

    struct Entry {
        RunKind kind;
        CLI::App* cmd;
        CommonFlags flags;
    };
    std::vector<Entry> entries;
    entries.push_back({RunKind::Ode,
                       app.add_subcommand("ode", "Integrate the homogeneous system (RK4)"), {}});
    entries.push_back({RunKind::Picard,
                       app.add_subcommand("picard", "Integrate by contraction mapping"), {}});
    entries.push_back({RunKind::Equilibria,
                       app.add_subcommand("equilibria", "Locate and classify equilibria"), {}});
    entries.push_back({RunKind::Portrait,
                       app.add_subcommand("portrait", "Cell-free growth roots and basin "
                                                      "boundaries"), {}});
    entries.push_back({RunKind::Pde, app.add_subcommand("pde", "1D spatial invasion run"), {}});
    entries.push_back({RunKind::Sweep,
                       app.add_subcommand("sweep", "Classify a lattice of initial states"), {}});
    entries.push_back({RunKind::Validate,
                       app.add_subcommand("validate", "Check structural parameter "
                                                      "assumptions"), {}});
    for (Entry& e : entries) add_common_flags(e.cmd, e.flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        for (Entry& e : entries)
            if (e.cmd->parsed())
                return run_all(assemble(e.kind, e.cmd, e.flags), e.flags.parallel);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
