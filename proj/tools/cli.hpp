#pragma once

// Command-line front end. Every subcommand writes its CSV files and a
// manifest.json into --out (default ./rcp-out) and a short summary to `out`.
// Exit codes: 0 success, 1 invalid input, 2 numerical failure or failed checks.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcp/acceptance.hpp"
#include "rcp/convergence.hpp"
#include "rcp/fluid_sim.hpp"
#include "rcp/hopf.hpp"
#include "rcp/io/csv.hpp"
#include "rcp/linear_stability.hpp"
#include "rcp/packet_sim.hpp"
#include "rcp/parallel.hpp"

#ifndef RCP_VERSION
#define RCP_VERSION "0.0.0"
#endif

namespace rcp::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct RunContext {
    std::string subcommand;
    fs::path out_dir;
    ordered_json params = ordered_json::object();
    std::vector<std::string> outputs;

    std::ofstream open(const std::string& name) {
        fs::create_directories(out_dir);
        const fs::path p = out_dir / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw ConfigError("out", "cannot write " + p.string());
        outputs.push_back(p.string());
        return f;
    }

    void write_manifest(double seconds) const {
        fs::create_directories(out_dir);
        ordered_json m;
        m["subcommand"] = subcommand;
        m["parameters"] = params;
        m["outputs"] = outputs;
        m["tool_version"] = RCP_VERSION;
        m["wall_clock_seconds"] = seconds;
        std::ofstream f(out_dir / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
    }
};

struct ModelFlags {
    double a = 1.0, beta = 0.0, C = 1.0, tau = 1.0, kappa = 1.0;

    void bind(CLI::App* app, bool with_kappa = true) {
        app->add_option("--a", a, "rate-mismatch gain (> 0)")->capture_default_str();
        app->add_option("--beta", beta, "queue gain (>= 0)")->capture_default_str();
        app->add_option("--C", C, "link capacity, packets per unit time")->capture_default_str();
        app->add_option("--tau", tau, "round-trip time")->capture_default_str();
        if (with_kappa) app->add_option("--kappa", kappa, "bifurcation parameter")->capture_default_str();
    }

    [[nodiscard]] ValidatedParams validated() const { return validate_params({a, beta, C, tau, kappa}); }

    void record(ordered_json& j) const {
        j["a"] = a;
        j["beta"] = beta;
        j["C"] = C;
        j["tau"] = tau;
        j["kappa"] = kappa;
    }
};

inline std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw DomainError("points", "must be >= 1");
    if (!(lo <= hi)) throw DomainError("range", "min must not exceed max");
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return v;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability, convergence and Hopf analysis of the RCP fluid model"};
    app.set_version_flag("--version", RCP_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_dir = "rcp-out";
    std::string seed;
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "accepted for compatibility; all models are deterministic");

    RunContext ctx;
    std::function<void()> action;

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate the nonlinear fluid model");
    ModelFlags sim_m;
    sim_m.bind(sim);
    double R0 = 1.1, q0 = 0.0, horizon = 200.0, cap = 0.0, tail = 0.2;
    int steps = 20;
    bool clamp = false;
    sim->add_option("--R0", R0, "constant history of R on [-tau, 0]")->capture_default_str();
    sim->add_option("--q0", q0, "queue at t = 0")->capture_default_str();
    sim->add_option("--horizon", horizon, "end time")->capture_default_str();
    sim->add_option("--steps-per-delay", steps, "grid points per delay")->capture_default_str();
    sim->add_option("--cap", cap, "divergence threshold on |R| (default 1e6 C)");
    sim->add_option("--tail", tail, "tail fraction for the verdict")->capture_default_str();
    sim->add_flag("--clamp-queue", clamp, "keep q >= 0");
    sim->callback([&] {
        action = [&] {
            const auto p = sim_m.validated();
            SimConfig cfg{horizon, steps, clamp, {}};
            if (cap != 0.0) cfg.blowup_cap = cap;
            const Trajectory tr = simulate(p, {R0, q0}, cfg);
            sim_m.record(ctx.params);
            ctx.params["R0"] = R0;
            ctx.params["q0"] = q0;
            ctx.params["horizon"] = horizon;
            ctx.params["steps_per_delay"] = steps;
            ctx.params["clamp_queue"] = clamp;
            ctx.params["blowup_cap"] = cfg.blowup_cap.value_or(1e6 * p.C());
            {
                auto f = ctx.open("trajectory.csv");
                io::write_trajectory(f, tr);
            }
            if (tr.times.back() > p.tau()) {
                auto f = ctx.open("phase.csv");
                io::write_phase_portrait(f, phase_portrait(tr, p.tau()));
            }
            out << "points=" << tr.size() << "\ndiverged=" << (tr.diverged ? "true" : "false") << '\n';
            if (tr.divergence_time) out << "divergence_time=" << io::format_double(*tr.divergence_time) << '\n';
            try {
                const auto v = analyze_trajectory(tr, equilibrium(p), tail);
                out << "verdict=" << to_string(v.kind) << "\namplitude=" << io::format_double(v.amplitude) << '\n';
            } catch (const InconclusiveError&) {
                out << "verdict=inconclusive\n";
            }
        };
    });

    // stability-chart
    auto* chart = app.add_subcommand("stability-chart", "beta on the stability boundary over a grid of a");
    double a_min = 0.05, a_max = 1.5;
    int points = 60;
    chart->add_option("--a-min", a_min)->capture_default_str();
    chart->add_option("--a-max", a_max)->capture_default_str();
    chart->add_option("--points", points)->capture_default_str();
    chart->callback([&] {
        action = [&] {
            const auto as = linspace(a_min, a_max, points);
            const auto bs = parallel_map(as.size(), [&](std::size_t i) { return stability_boundary_beta(as[i]); });
            ctx.params["a_min"] = a_min;
            ctx.params["a_max"] = a_max;
            ctx.params["points"] = points;
            auto f = ctx.open("stability_chart.csv");
            io::CsvWriter w(f, {"a", "beta_boundary"});
            for (std::size_t i = 0; i < as.size(); ++i) w.cell(as[i]).cell(bs[i]).end_row();
            out << "rows=" << as.size() << '\n';
        };
    });

    // spectrum
    auto* spec = app.add_subcommand("spectrum", "rightmost characteristic roots");
    ModelFlags spec_m;
    spec_m.bind(spec);
    int n_roots = 6;
    spec->add_option("--roots", n_roots, "number of roots")->capture_default_str();
    spec->callback([&] {
        action = [&] {
            const Spectrum s = rightmost_roots(spec_m.validated(), n_roots);
            spec_m.record(ctx.params);
            ctx.params["roots"] = n_roots;
            ctx.params["nodes_used"] = s.nodes_used;
            {
                auto f = ctx.open("spectrum.csv");
                io::write_spectrum(f, s);
            }
            out << "method=" << to_string(s.method) << "\nnodes=" << s.nodes_used
                << "\nrightmost=" << io::format_double(s.rightmost().real()) << ','
                << io::format_double(s.rightmost().imag())
                << "\nstable=" << (is_locally_stable(spec_m.validated()) ? "true" : "false") << '\n';
        };
    });

    // roc
    auto* roc = app.add_subcommand("roc", "rate of convergence, single point or sweep over a or beta");
    ModelFlags roc_m;
    roc_m.bind(roc);
    std::string sweep = "none";
    double lo = 0.05, hi = 1.5;
    int roc_points = 30;
    roc->add_option("--sweep", sweep, "none | a | beta")->check(CLI::IsMember({"none", "a", "beta"}))->capture_default_str();
    roc->add_option("--min", lo, "sweep start")->capture_default_str();
    roc->add_option("--max", hi, "sweep end")->capture_default_str();
    roc->add_option("--points", roc_points)->capture_default_str();
    roc->callback([&] {
        action = [&] {
            roc_m.record(ctx.params);
            ctx.params["sweep"] = sweep;
            auto eval = [&](double a, double beta) {
                if (beta == 0.0 && roc_m.kappa == 1.0) return decay_rate_no_queue(a, roc_m.tau);
                return decay_rate_with_queue(validate_params({a, beta, roc_m.C, roc_m.tau, roc_m.kappa}));
            };
            std::vector<double> grid{sweep == "beta" ? roc_m.beta : roc_m.a};
            if (sweep != "none") {
                grid = linspace(lo, hi, roc_points);
                ctx.params["min"] = lo;
                ctx.params["max"] = hi;
                ctx.params["points"] = roc_points;
            }
            const auto reports = parallel_map(grid.size(), [&](std::size_t i) {
                return sweep == "beta" ? eval(roc_m.a, grid[i]) : eval(grid[i], roc_m.beta);
            });
            auto f = ctx.open("roc.csv");
            const bool by_beta = sweep == "beta";
            io::CsvWriter w(f, {by_beta ? "beta" : "a", "sigma", "branch", "regime"});
            for (std::size_t i = 0; i < grid.size(); ++i) {
                w.cell(grid[i]).cell(reports[i].sigma).cell(to_string(reports[i].binding_branch))
                    .cell(to_string(reports[i].regime)).end_row();
            }
            if (grid.size() == 1) {
                out << "sigma=" << io::format_double(reports[0].sigma) << "\nbranch=" << to_string(reports[0].binding_branch)
                    << "\nregime=" << to_string(reports[0].regime) << '\n';
            } else {
                out << "rows=" << grid.size() << '\n';
            }
        };
    });

    // hopf
    auto* hopf = app.add_subcommand("hopf", "Hopf criticality report, or a sweep over Theta");
    ModelFlags hopf_m;
    hopf_m.bind(hopf, false);
    hopf_m.beta = 0.518;
    hopf_m.a = 0.75;
    bool theta_sweep = false;
    double th_min = 0.2, th_max = 1.55;
    int th_points = 50;
    hopf->add_flag("--theta-sweep", theta_sweep, "sweep Theta instead of a single (a, beta)");
    hopf->add_option("--theta-min", th_min)->capture_default_str();
    hopf->add_option("--theta-max", th_max)->capture_default_str();
    hopf->add_option("--points", th_points)->capture_default_str();
    hopf->callback([&] {
        action = [&] {
            if (theta_sweep) {
                const auto grid = linspace(th_min, th_max, th_points);
                ctx.params["theta_min"] = th_min;
                ctx.params["theta_max"] = th_max;
                ctx.params["points"] = th_points;
                ctx.params["C"] = hopf_m.C;
                ctx.params["tau"] = hopf_m.tau;
                auto f = ctx.open("hopf_sweep.csv");
                io::CsvWriter w(f, {"theta", "mu2", "beta2", "classification"});
                for (double T : grid) {
                    const double re = lyapunov_c1(T, hopf_m.C, hopf_m.tau).real();
                    const double mu2 = -re / alpha_prime(T, 1.0, hopf_m.tau);
                    w.cell(T).cell(mu2).cell(2.0 * re)
                        .cell(to_string(mu2 < 0.0 ? HopfType::sub_critical : HopfType::super_critical)).end_row();
                }
                out << "rows=" << grid.size() << "\ntheta_h=" << io::format_double(theta_threshold()) << '\n';
                return;
            }
            const HopfReport r = hopf_report(hopf_m.a, hopf_m.beta, hopf_m.C, hopf_m.tau);
            ctx.params["a"] = hopf_m.a;
            ctx.params["beta"] = hopf_m.beta;
            ctx.params["C"] = hopf_m.C;
            ctx.params["tau"] = hopf_m.tau;
            std::ostringstream rep;
            auto kv = [&](const char* k, double v) { rep << k << '=' << io::format_double(v) << '\n'; };
            auto kvc = [&](const std::string& k, cplx v) {
                kv((k + "_re").c_str(), v.real());
                kv((k + "_im").c_str(), v.imag());
            };
            kv("kappa_c", r.kappa_c);
            kv("omega0", r.omega0);
            kv("Theta", r.Theta);
            kvc("c1", r.c1);
            kv("alpha_prime", r.alpha_prime);
            kv("crossing_speed", r.crossing_speed);
            kv("mu2", r.mu2);
            kv("beta2", r.beta2);
            rep << "classification=" << to_string(r.classification) << '\n';
            const auto& im = r.intermediates;
            kvc("Omega", im.Omega);
            kvc("q02", im.q02);
            kvc("g20", im.g20);
            kvc("g11", im.g11);
            kvc("g02", im.g02);
            kvc("g21", im.g21);
            kvc("e1", im.e[0]);
            kvc("e2", im.e[1]);
            kvc("f1", im.f[0]);
            kvc("f2", im.f[1]);
            kvc("A1", im.A1);
            kvc("A2", im.A2);
            {
                auto f = ctx.open("hopf_report.txt");
                f << rep.str();
            }
            out << rep.str();
        };
    });

    // amplitude
    auto* amp = app.add_subcommand("amplitude", "rate-only limit-cycle amplitude: formula and simulation");
    double amp_a = numerics::pi / 2, amp_C = 1.0, amp_tau = 1.0, amp_horizon = 3000.0;
    std::vector<double> offsets{0.01, 0.02, 0.04};
    amp->add_option("--a", amp_a, "rate-mismatch gain")->capture_default_str();
    amp->add_option("--C", amp_C)->capture_default_str();
    amp->add_option("--tau", amp_tau)->capture_default_str();
    amp->add_option("--offsets", offsets, "kappa - kappa_c values")->delimiter(',')->capture_default_str();
    amp->add_option("--horizon", amp_horizon, "simulation end time")->capture_default_str();
    amp->callback([&] {
        action = [&] {
            const double kc = hopf_kappa_c(amp_a, 0.0);
            ctx.params["a"] = amp_a;
            ctx.params["C"] = amp_C;
            ctx.params["tau"] = amp_tau;
            ctx.params["kappa_c"] = kc;
            ctx.params["offsets"] = offsets;
            ctx.params["horizon"] = amp_horizon;
            struct Row {
                double predicted, simulated;
            };
            const auto rows = parallel_map(offsets.size(), [&](std::size_t i) {
                const double d = offsets[i];
                const double pred = amplitude_no_queue(kc + d, kc, amp_C);
                const auto p = validate_params({amp_a, 0.0, amp_C, amp_tau, kc + d});
                const auto tr = simulate(p, {amp_C + pred, 0.0}, {amp_horizon, 20, false, {}});
                const auto v = analyze_trajectory(tr, equilibrium(p), 0.1);
                return Row{pred, v.kind == Verdict::sustained_oscillation ? v.amplitude : NAN};
            });
            auto f = ctx.open("amplitude.csv");
            io::CsvWriter w(f, {"offset", "predicted", "simulated"});
            for (std::size_t i = 0; i < rows.size(); ++i) {
                w.cell(offsets[i]).cell(rows[i].predicted).cell(rows[i].simulated).end_row();
            }
            out << "rows=" << rows.size() << '\n';
        };
    });

    // packet-sim
    auto* pkt = app.add_subcommand("packet-sim", "slotted packet-level simulation from a key=value config");
    std::string config;
    double pkt_tail = 0.25;
    pkt->add_option("--config", config, "scenario file")->required();
    pkt->add_option("--tail", pkt_tail, "tail fraction for queue statistics")->capture_default_str();
    pkt->callback([&] {
        action = [&] {
            const PacketSimConfig c = load_packet_config(config);
            ctx.params["config"] = config;
            ctx.params["num_flows"] = c.num_flows;
            ctx.params["C"] = c.C;
            ctx.params["tau"] = c.tau;
            ctx.params["a"] = c.a;
            ctx.params["beta"] = c.beta;
            ctx.params["update_interval"] = c.update_interval_or_default();
            ctx.params["slot"] = c.slot;
            ctx.params["horizon"] = c.horizon;
            ctx.params["initial_rate"] = c.initial_rate_or_default();
            if (c.max_queue) ctx.params["max_queue"] = *c.max_queue;
            const PacketTrace tr = run_packet_sim(c);
            {
                auto f = ctx.open("packet_trace.csv");
                io::write_packet_trace(f, tr);
            }
            try {
                const auto s = queue_stats(tr, pkt_tail);
                out << "mean_queue=" << io::format_double(s.mean) << "\namplitude=" << io::format_double(s.amplitude)
                    << "\noscillating=" << (s.oscillating ? "true" : "false") << '\n';
            } catch (const InconclusiveError&) {
                out << "oscillating=inconclusive\n";
            }
        };
    });

    // repro
    auto* repro = app.add_subcommand("repro", "run every reproduction check");
    repro->callback([&] {
        action = [&] {
            const auto results = acceptance::run_acceptance();
            auto f = ctx.open("repro.csv");
            io::CsvWriter w(f, {"id", "passed", "detail"});
            int failed = 0;
            for (const auto& r : results) {
                out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << "\n        " << r.detail << '\n';
                w.cell(static_cast<double>(r.id)).cell(r.passed ? "true" : "false").cell('"' + r.detail + '"').end_row();
                failed += !r.passed;
            }
            ctx.params["failed"] = failed;
            if (failed) throw InternalError(std::to_string(failed) + " reproduction check(s) failed");
        };
    });

    const auto t0 = std::chrono::steady_clock::now();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // help and version requests exit 0, usage errors exit 1
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }
    const auto chosen = app.get_subcommands();
    ctx.subcommand = chosen.empty() ? "" : chosen.front()->get_name();
    ctx.out_dir = out_dir;
    auto finish = [&] {
        ctx.write_manifest(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    };
    try {
        action();
        finish();
        return 0;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        finish();
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace rcp::cli
