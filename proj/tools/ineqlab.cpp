// Command-line front end: region maps, Rayleigh-quotient verification,
// scheme runs, and refinement sweeps. Every verb reads a flat key=value
// config (file plus positional overrides), writes CSV reports with a
// config-echo comment, and emits self-contained SVG plots where a picture
// helps. Outputs are byte-identical for identical config and seed.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ineqlab/ineqlab.hpp"

namespace {

using namespace ineqlab;

constexpr double kPi = 3.14159265358979323846;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string preset;
    long long seed = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config_path, "key=value config file");
    sub->add_option("--out", a.out_dir, "output directory (default: out)");
    sub->add_option("--seed", a.seed, "random seed (required here or in the config)");
    sub->add_option("--preset", a.preset, "parameter preset: thin-film | qdd | custom");
    sub->add_option("overrides", a.overrides, "key=value overrides applied after the file");
}

KeyValueConfig assemble_config(const CLI::App* sub, const CommonArgs& a) {
    KeyValueConfig cfg;
    if (!a.config_path.empty()) cfg = KeyValueConfig::from_file(a.config_path);
    for (const auto& ov : a.overrides) cfg.apply_override(ov);
    if (sub->count("--seed")) cfg.entries["seed"] = std::to_string(a.seed);
    if (sub->count("--out")) cfg.entries["out"] = a.out_dir;
    if (sub->count("--preset")) cfg.entries["preset"] = a.preset;
    if (!cfg.has("seed"))
        throw DomainError("config: a seed is required (--seed N or seed=N)");
    const std::string preset = cfg.get_string("preset", "custom");
    if (preset != "thin-film" && preset != "thin_film" && preset != "qdd" &&
        preset != "custom" && !preset.empty())
        throw DomainError("unknown preset: " + preset);
    return cfg;
}

std::string output_dir(const KeyValueConfig& cfg) {
    std::string dir = cfg.get_string("out", "out");
    std::filesystem::create_directories(dir);
    return dir;
}

std::string join(const std::string& dir, const std::string& name) {
    return dir + "/" + name;
}

// ---------------------------------------------------------------- regions

int cmd_regions(const KeyValueConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const int dim = cfg.get_int("dim", 2);
    const double beta = cfg.get_double("beta", 1.0);
    const double a_lo = cfg.get_double("alpha_min", 0.05);
    const double a_hi = cfg.get_double("alpha_max", 1.6);
    const double g_lo = cfg.get_double("gamma_min", 0.0);
    const double g_hi = cfg.get_double("gamma_max", 1.6);
    const int na = cfg.get_int("alpha_count", 64);
    const int ng = cfg.get_int("gamma_count", 64);
    if (dim < 1) throw DomainError("regions: dim must be >= 1");
    if (na < 2 || ng < 2) throw DomainError("regions: alpha_count and gamma_count must be >= 2");
    if (!(a_lo < a_hi) || !(g_lo < g_hi))
        throw DomainError("regions: parameter ranges must be increasing");

    Csv table;
    table.config_echo = "regions " + cfg.echo();
    table.columns = {"alpha", "beta", "gamma", "dim", "certified", "rule", "constant", "eta"};
    std::vector<double> heat(static_cast<std::size_t>(na) * ng,
                             std::numeric_limits<double>::quiet_NaN());
    for (int iy = 0; iy < ng; ++iy) {
        const double gamma = g_lo + (g_hi - g_lo) * iy / (ng - 1);
        for (int ix = 0; ix < na; ++ix) {
            const double alpha = a_lo + (a_hi - a_lo) * ix / (na - 1);
            ExponentTriple t{alpha, beta, gamma, dim};
            RegionVerdict v = best_region(t);
            table.add_row({sci(alpha), sci(beta), sci(gamma), std::to_string(dim),
                           v.certified ? "1" : "0", rule_name(v.rule),
                           v.constant ? sci(*v.constant) : "nan",
                           v.eta ? sci(*v.eta) : "nan"});
            if (v.certified && v.constant)
                heat[static_cast<std::size_t>(iy) * na + ix] = *v.constant;
        }
    }
    write_csv(table, join(dir, "regions.csv"));
    write_svg_heatmap(join(dir, "regions.svg"), "certified constants (beta fixed)",
                      "alpha", "gamma", na, ng, heat, a_lo, a_hi, g_lo, g_hi);
    return 0;
}

// ----------------------------------------------------------------- verify

int cmd_verify(const KeyValueConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const int dim = cfg.get_int("dim", 1);
    const int points = cfg.get_int("points", 257);
    const int restarts = cfg.get_int("restarts", 20);
    const int budget = cfg.get_int("iterations", 500);
    const int threads = cfg.get_int("threads", 1);
    const auto seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));
    if (dim != 1 && dim != 2) throw DomainError("verify: dim must be 1 or 2");
    const Grid grid = dim == 1 ? make_grid_1d(points) : make_grid_2d(points, points);

    std::vector<ExponentTriple> triples;
    if (cfg.has("alpha") || cfg.has("beta") || cfg.has("gamma")) {
        triples.push_back({cfg.get_double("alpha", 1.0), cfg.get_double("beta", 1.0),
                           cfg.get_double("gamma", 1.0), dim});
    } else {
        triples = {{1.0, 1.0, 1.0, dim},
                   {0.5, 1.0, 0.5, dim},
                   {1.0, 1.0, 0.9, dim},
                   {1.5, 1.0, 1.25, dim},
                   {1.4, 1.0, 1.3, dim}};
    }

    Csv table;
    table.config_echo = "verify " + cfg.echo();
    table.columns = {"alpha", "beta", "gamma", "dim", "points", "restarts",
                     "iterations", "ratio_min", "samples", "c_certified", "margin"};
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const ExponentTriple& t = triples[i];
        RayleighReport rep =
            minimize_ratio(t, grid, budget, restarts, mix_seed(seed, 1000 + i), threads);
        table.add_row({sci(t.alpha), sci(t.beta), sci(t.gamma), std::to_string(dim),
                       std::to_string(points), std::to_string(restarts),
                       std::to_string(budget), sci(rep.ratio_min),
                       std::to_string(rep.samples),
                       rep.c_certified ? sci(*rep.c_certified) : "nan",
                       rep.margin ? sci(*rep.margin) : "nan"});
    }
    write_csv(table, join(dir, "verify.csv"));
    return 0;
}

// ------------------------------------------------------------------ solve

SchemeParams scheme_params_from(const KeyValueConfig& cfg, int dim) {
    const std::string preset = cfg.get_string("preset", "custom");
    const double tau = cfg.get_double("tau", 1e-3);
    SchemeParams p;
    if (preset == "thin-film" || preset == "thin_film") {
        p = SchemeParams::thin_film(cfg.get_double("n", 1.0), tau);
        const double n_hi = 1.0 + SchemeParams::sigma(dim) / 4.0;
        if (!(p.n > 0.5 && p.n < n_hi))
            throw DomainError("thin-film preset: n must lie in (1/2, 1 + sigma/4)");
    } else if (preset == "qdd") {
        p = SchemeParams::quantum_drift_diffusion(tau);
    } else if (preset == "custom" || preset.empty()) {
        p.alpha = cfg.get_double("alpha", 1.0);
        p.n = cfg.get_double("n", 1.0);
        p.tau = tau;
        const std::string variant =
            cfg.get_string("variant", p.alpha < 1.0 ? "alpha-lt-1" : "general");
        if (variant == "alpha-lt-1" || variant == "alpha_lt_1")
            p.variant = SchemeVariant::alpha_lt_1;
        else if (variant == "general")
            p.variant = SchemeVariant::general;
        else
            throw DomainError("solve: unknown variant " + variant);
    } else {
        throw DomainError("unknown preset: " + preset);
    }
    p.epsilon = cfg.get_double("epsilon", p.epsilon);
    p.p = cfg.get_double("p", p.p);
    p.newton.tol = cfg.get_double("newton_tol", p.newton.tol);
    p.newton.max_iter = cfg.get_int("newton_max_iter", p.newton.max_iter);
    p.validate(dim);
    return p;
}

Grid grid_from(const KeyValueConfig& cfg, int dim) {
    if (dim == 1) return make_grid_1d(cfg.get_int("points", 257));
    return make_grid_2d(cfg.get_int("nx", 65), cfg.get_int("ny", 65));
}

Field initial_datum(const KeyValueConfig& cfg, const Grid& grid) {
    const std::string kind = cfg.get_string("u0", "cosine");
    const double value = cfg.get_double("u0_value", 1.0);
    const double amp = cfg.get_double("u0_amp", 0.5);
    if (kind == "constant") return make_field(grid, value);
    if (kind == "cosine") {
        if (grid.dim == 1)
            return make_field(grid, [&](double x, double) { return value + amp * std::cos(kPi * x); });
        return make_field(grid, [&](double x, double y) {
            return value + amp * std::cos(kPi * x) * std::cos(kPi * y);
        });
    }
    if (kind == "random") {
        SplitMix64 rng(static_cast<std::uint64_t>(cfg.get_long("seed", 0)));
        return sample_positive_field(grid, rng, cfg.get_int("u0_modes", 8), amp);
    }
    throw DomainError("u0 must be one of constant | cosine | random");
}

SpaceTimeTest cosine_window_test(double T, int dim) {
    SpaceTimeTest xi;
    if (dim == 1) {
        xi.value = [T](double x, double, double t) { return (T - t) * std::cos(kPi * x); };
        xi.dt = [](double x, double, double) { return -std::cos(kPi * x); };
    } else {
        xi.value = [T](double x, double y, double t) {
            return (T - t) * std::cos(kPi * x) * std::cos(kPi * y);
        };
        xi.dt = [](double x, double y, double) {
            return -std::cos(kPi * x) * std::cos(kPi * y);
        };
    }
    return xi;
}

int cmd_solve(const KeyValueConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const int dim = cfg.get_int("dim", 1);
    if (dim != 1 && dim != 2) throw DomainError("solve: dim must be 1 or 2");
    const int steps = cfg.get_int("steps", 64);
    const SchemeParams params = scheme_params_from(cfg, dim);
    const Grid grid = grid_from(cfg, dim);
    const Field u0 = initial_datum(cfg, grid);
    const std::string echo = "solve " + cfg.echo();

    Trajectory traj = run(u0, params, steps);
    EntropyReport rep = entropy_dissipation_report(traj);

    Csv tr;
    tr.config_echo = echo;
    tr.columns = {"step", "time", "entropy", "mass", "min_density",
                  "dissipation_step", "dissipation_cum", "newton_iters", "residual_norm"};
    for (std::size_t k = 0; k < rep.time.size(); ++k) {
        const bool initial = k == 0;
        const StepState* st = initial ? nullptr : &traj.states[k - 1];
        tr.add_row({std::to_string(k), sci(rep.time[k]), sci(rep.entropy[k]),
                    sci(rep.mass[k]), sci(rep.min_density[k]),
                    sci(rep.dissipation_step[k]), sci(rep.dissipation_cum[k]),
                    std::to_string(initial ? 0 : st->newton_iters),
                    sci(initial ? 0.0 : st->residual_norm)});
    }
    write_csv(tr, join(dir, "trajectory.csv"));

    Csv est;
    est.config_echo = echo;
    est.columns = {"step", "time", "diss_cum", "midpoint_diss_cum",
                   "pressure_grad_alpha_cum", "pressure_grad_eps_cum",
                   "grad_alpha_cum", "grad_eps_cum", "max_entropy"};
    for (std::size_t k = 0; k < rep.time.size(); ++k) {
        est.add_row({std::to_string(k), sci(rep.time[k]), sci(rep.estimate_cum[0][k]),
                     sci(rep.estimate_cum[1][k]), sci(rep.estimate_cum[2][k]),
                     sci(rep.estimate_cum[3][k]), sci(rep.estimate_cum[4][k]),
                     sci(rep.estimate_cum[5][k]), sci(rep.max_entropy)});
    }
    write_csv(est, join(dir, "report.csv"));

    Csv weak;
    weak.config_echo = echo;
    weak.columns = {"tau", "h", "steps", "weak_residual", "mass_identity_residual"};
    if (traj.steps() > 0) {
        const double T = params.tau * traj.steps();
        weak.add_row({sci(params.tau), sci(grid.spacing(0)), std::to_string(traj.steps()),
                      sci(weak_form_residual(traj, cosine_window_test(T, dim))),
                      sci(mass_identity_residual(traj))});
    }
    write_csv(weak, join(dir, "weak_residual.csv"));

    Csv prof;
    prof.config_echo = echo;
    const Field& fin = traj.steps() > 0 ? traj.states.back().rho : traj.u0;
    if (dim == 1) {
        prof.columns = {"x", "initial", "final"};
        for (int i = 0; i < grid.points[0]; ++i)
            prof.add_row({sci(grid.coord(i, 0)), sci(u0.values[i]), sci(fin.values[i])});
    } else {
        prof.columns = {"x", "y", "initial", "final"};
        for (int iy = 0; iy < grid.points[1]; ++iy)
            for (int ix = 0; ix < grid.points[0]; ++ix)
                prof.add_row({sci(grid.coord(ix, 0)), sci(grid.coord(iy, 1)),
                              sci(u0.values[grid.index(ix, iy)]),
                              sci(fin.values[grid.index(ix, iy)])});
    }
    write_csv(prof, join(dir, "profiles.csv"));

    auto timeseries = [&](const std::string& file, const std::string& title,
                          const std::vector<double>& y) {
        Series s;
        s.name = title;
        s.x = rep.time;
        s.y = y;
        write_svg_lines(join(dir, file), title + " over time", "t", title, {s});
    };
    timeseries("mass.svg", "mass", rep.mass);
    timeseries("entropy.svg", "entropy", rep.entropy);
    timeseries("min_density.svg", "min density", rep.min_density);

    {
        Series s0, s1;
        s0.name = "initial";
        s1.name = "final";
        if (dim == 1) {
            for (int i = 0; i < grid.points[0]; ++i) {
                s0.x.push_back(grid.coord(i, 0));
                s0.y.push_back(u0.values[i]);
                s1.x.push_back(grid.coord(i, 0));
                s1.y.push_back(fin.values[i]);
            }
        } else {
            const int iy = grid.points[1] / 2;
            for (int ix = 0; ix < grid.points[0]; ++ix) {
                s0.x.push_back(grid.coord(ix, 0));
                s0.y.push_back(u0.values[grid.index(ix, iy)]);
                s1.x.push_back(grid.coord(ix, 0));
                s1.y.push_back(fin.values[grid.index(ix, iy)]);
            }
        }
        const char* title = dim == 1 ? "density profile" : "density profile (midline)";
        write_svg_lines(join(dir, "profile.svg"), title, "x", "u", {s0, s1});
    }

    if (traj.failed) {
        std::fprintf(stderr, "solver failure: %s\n", traj.failure_note.c_str());
        return 3;
    }
    if (traj.tau_warning)
        std::fprintf(stderr, "warning: tau >= 0.1 is outside the scheme's comfort zone\n");
    return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepRow {
    double tau = 0.0;
    double h = 0.0;
    int points = 0;
    int steps = 0;
    double value = 0.0;
};

int cmd_sweep(const KeyValueConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const std::string study = cfg.get_string("study", "mass_drift");
    const int levels = cfg.get_int("levels", 3);
    const int workers = std::max(1, cfg.get_int("workers", 1));
    const double tau0 = cfg.get_double("tau", 2e-3);
    const int points0 = cfg.get_int("points", 65);
    const int steps0 = cfg.get_int("steps", 16);
    if (levels < 2) throw DomainError("sweep: levels must be >= 2");
    if (study != "mass_drift" && study != "weak_form" && study != "constant_drift")
        throw DomainError("sweep: study must be mass_drift | weak_form | constant_drift");

    // Validate shared parameters once up front so a bad config fails before
    // any worker starts.
    scheme_params_from(cfg, 1);

    auto run_level = [&](int level) -> SweepRow {
        SweepRow row;
        row.tau = tau0 / std::pow(2.0, level);
        KeyValueConfig local = cfg;
        local.entries["tau"] = sci(row.tau);
        SchemeParams p = scheme_params_from(local, 1);
        if (study == "constant_drift") {
            row.points = points0;
            row.steps = 1;
            const Grid g = make_grid_1d(row.points);
            row.h = g.spacing(0);
            const double value = cfg.get_double("u0_value", 2.0);
            Trajectory traj = run(make_field(g, value), p, 1);
            if (traj.failed) throw SolverError("sweep level " + std::to_string(level) +
                                               ": " + traj.failure_note);
            double dev = 0.0;
            for (double v : traj.states.back().rho.values)
                dev = std::max(dev, std::abs(v - value));
            row.value = dev;
            return row;
        }
        row.points = study == "weak_form" ? (points0 - 1) * (1 << level) + 1 : points0;
        row.steps = steps0 * (1 << level);
        const Grid g = make_grid_1d(row.points);
        row.h = g.spacing(0);
        KeyValueConfig datum = cfg;
        if (!cfg.has("u0")) datum.entries["u0"] = "cosine";
        Trajectory traj = run(initial_datum(datum, g), p, row.steps);
        if (traj.failed) throw SolverError("sweep level " + std::to_string(level) +
                                           ": " + traj.failure_note);
        if (study == "weak_form") {
            row.value = weak_form_residual(traj, cosine_window_test(p.tau * row.steps, 1));
            return row;
        }
        const double mass0 = integrate(traj.u0);
        double avg = 0.0;
        for (const StepState& st : traj.states) avg += p.tau * integrate(st.rho);
        row.value = std::abs(avg / (p.tau * row.steps) - mass0);
        return row;
    };

    std::vector<SweepRow> rows(levels);
    std::vector<std::exception_ptr> errors(levels);
    const int pool = std::min(workers, levels);
    std::vector<std::thread> team;
    team.reserve(pool);
    for (int w = 0; w < pool; ++w)
        team.emplace_back([&, w] {
            for (int level = w; level < levels; level += pool) {
                try {
                    rows[level] = run_level(level);
                } catch (...) {
                    errors[level] = std::current_exception();
                }
            }
        });
    for (auto& t : team) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    Csv table;
    table.config_echo = "sweep " + cfg.echo();
    table.columns = {"level", "tau", "h", "points", "steps", study, "ratio_to_previous"};
    for (int level = 0; level < levels; ++level) {
        const SweepRow& r = rows[level];
        const double ratio = level == 0 ? std::numeric_limits<double>::quiet_NaN()
                                        : rows[level - 1].value / std::max(r.value, 1e-300);
        table.add_row({std::to_string(level), sci(r.tau), sci(r.h),
                       std::to_string(r.points), std::to_string(r.steps),
                       sci(r.value), sci(ratio)});
    }
    write_csv(table, join(dir, "sweep.csv"));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for fourth-order diffusion inequalities and schemes"};
    app.require_subcommand(1);
    CommonArgs regions_args, verify_args, solve_args, sweep_args;
    CLI::App* regions = app.add_subcommand("regions", "map certified inequality constants");
    CLI::App* verify = app.add_subcommand("verify", "stress-test constants by Rayleigh minimization");
    CLI::App* solve = app.add_subcommand("solve", "run the time-discretized scheme");
    CLI::App* sweep = app.add_subcommand("sweep", "refinement studies over tau and h");
    add_common(regions, regions_args);
    add_common(verify, verify_args);
    add_common(solve, solve_args);
    add_common(sweep, sweep_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (regions->parsed()) return cmd_regions(assemble_config(regions, regions_args));
        if (verify->parsed()) return cmd_verify(assemble_config(verify, verify_args));
        if (solve->parsed()) return cmd_solve(assemble_config(solve, solve_args));
        return cmd_sweep(assemble_config(sweep, sweep_args));
    } catch (const DomainError& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const PositivityError& e) {
        std::fprintf(stderr, "invalid input data: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return 3;
    }
}
