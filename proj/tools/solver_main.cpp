// ============================================================================
// solver_main.cpp — command-line driver
//
// Subcommands:
//   run        single (case, grid, dt, method) configuration
//   converge   convergence study over a grid/dt ladder, CSV output
//   compare    Galerkin vs ASGS side-by-side table
//   selftest   fast property suite
//   dump-mesh  plain-text mesh dump
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
// ============================================================================

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "nsadr/config.hpp"
#include "nsadr/mms.hpp"
#include "nsadr/selftest.hpp"
#include "nsadr/study.hpp"
#include "nsadr/time_stepper.hpp"

namespace {

struct CliOverrides {
    std::string config_file;
    std::vector<std::string> pairs;  // key=value overrides, applied in order
};

void add_common_options(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config_file, "key=value config file");
    cmd->add_option("--set", ov.pairs, "extra key=value overrides")
        ->take_all();

    auto opt = [cmd, &ov](const std::string& flag, const std::string& key,
                          const std::string& help) {
        cmd->add_option_function<std::string>(
               flag,
               [&ov, key](const std::string& v) { ov.pairs.push_back(key + "=" + v); },
               help)
            ->expected(1);
    };
    opt("--case", "case", "case key: I-a, I-b, I-c, II-a, II-b");
    opt("--grids", "grids", "comma-separated grid sizes (doubling)");
    opt("--dts", "dts", "comma-separated time steps, paired with grids");
    opt("--theta", "time.theta", "0 (Crank-Nicolson) or 1 (backward Euler)");
    opt("--T", "time.T", "final time");
    opt("--methods", "methods", "comma-separated subset of galerkin,asgs");
    opt("--c1", "stab.c1", "stabilization constant c1");
    opt("--c2", "stab.c2", "stabilization constant c2");
    opt("--c3", "stab.c3", "stabilization constant c3");
    opt("--subscale", "stab.subscale_mode", "quasistatic or dynamic");
    opt("--tau-scale", "stab.tau_scale", "uniform tau scaling");
    opt("--truncation", "stab.truncation", "subscale history truncation (0 = closed form)");
    opt("--solver", "solver.method", "direct-lu or bicgstab-ilu");
    opt("--tol", "solver.tol", "iterative solver tolerance");
    opt("--max-iters", "solver.max_iters", "iterative solver iteration cap");
    opt("--pressure-fix", "solver.pressure_fix", "pin-node or mean-shift");
    opt("--picard", "picard_iters", "extra Picard sweeps per step");
    opt("--est-advection", "estimator.advection", "discrete or exact");
    opt("--jobs", "jobs", "concurrent study cells");
    opt("--out", "out", "CSV output path");
}

nsadr::StudyConfig build_config(const CliOverrides& ov) {
    nsadr::StudyConfig cfg;
    if (!ov.config_file.empty())
        cfg = nsadr::parse_config_file(ov.config_file);
    for (const auto& pair : ov.pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw nsadr::ConfigError("override must be key=value: " + pair);
        nsadr::apply_override(cfg, pair.substr(0, eq), pair.substr(eq + 1));
    }
    return cfg;
}

int emit_report(const nsadr::ConvergenceReport& report) {
    nsadr::print_table(report, std::cout);
    if (!report.config.out_path.empty()) {
        std::ofstream out(report.config.out_path);
        if (!out) {
            std::cerr << "error: cannot write " << report.config.out_path << "\n";
            return 2;
        }
        nsadr::write_csv(report, out);
        std::cout << "wrote " << report.config.out_path << "\n";
    } else {
        nsadr::write_csv(report, std::cout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stabilized finite element solver for coupled incompressible "
                 "flow and solute transport on the unit square"};
    app.require_subcommand(1);

    CliOverrides run_ov, conv_ov, cmp_ov;
    int run_grid = 10;
    double run_dt = 0.1;
    std::string run_method = "asgs";
    bool run_estimate = false, conv_estimate = false, cmp_estimate = false;

    auto* cmd_run = app.add_subcommand("run", "single configuration");
    add_common_options(cmd_run, run_ov);
    cmd_run->add_option("--grid", run_grid, "grid subdivisions per side");
    cmd_run->add_option("--dt", run_dt, "time step");
    cmd_run->add_option("--method", run_method, "galerkin or asgs");
    cmd_run->add_flag("--estimate", run_estimate, "report the residual indicator");

    auto* cmd_conv = app.add_subcommand("converge", "convergence study");
    add_common_options(cmd_conv, conv_ov);
    cmd_conv->add_flag("--estimate", conv_estimate,
                       "emit the per-level residual indicator eta");

    auto* cmd_cmp = app.add_subcommand("compare", "Galerkin vs ASGS study");
    add_common_options(cmd_cmp, cmp_ov);
    cmd_cmp->add_flag("--estimate", cmp_estimate,
                      "emit the per-level residual indicator eta");

    auto* cmd_self = app.add_subcommand("selftest", "fast property suite");

    int mesh_n = 4;
    std::string mesh_out;
    auto* cmd_mesh = app.add_subcommand("dump-mesh", "plain-text mesh dump");
    cmd_mesh->add_option("--n", mesh_n, "subdivisions per side");
    cmd_mesh->add_option("--out", mesh_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_self->parsed())
            return nsadr::run_selftest(std::cout) ? 0 : 3;

        if (cmd_mesh->parsed()) {
            const auto mesh = nsadr::build_unit_square_mesh(mesh_n);
            if (mesh_out.empty()) {
                nsadr::dump_mesh(mesh, std::cout);
            } else {
                std::ofstream out(mesh_out);
                if (!out) {
                    std::cerr << "error: cannot write " << mesh_out << "\n";
                    return 2;
                }
                nsadr::dump_mesh(mesh, out);
            }
            return 0;
        }

        if (cmd_run->parsed()) {
            nsadr::StudyConfig cfg = build_config(run_ov);
            cfg.grids = {run_grid};
            cfg.dts = {run_dt};
            cfg.methods = {nsadr::parse_method(run_method)};
            cfg.estimate = run_estimate;
            const auto report = nsadr::run_study(cfg);
            const auto& row = report.rows.front();
            std::cout << "case " << cfg.case_key << " "
                      << nsadr::method_name(row.method) << " " << row.n_div << "x"
                      << row.n_div << " dt=" << row.dt << " theta=" << cfg.theta
                      << "\n"
                      << "  total error   " << row.total_error << "\n"
                      << "  |e_u|_V~      " << row.detail.tilde_v_u() << "\n"
                      << "  |e_p|_L2(L2)  " << row.detail.l2l2_p() << "\n"
                      << "  |e_c|_V~      " << row.detail.tilde_v_c() << "\n";
            if (cfg.estimate) std::cout << "  eta           " << row.eta << "\n";
            std::cout << "  walltime_s    " << row.walltime_s << "\n";
            return 0;
        }

        if (cmd_conv->parsed()) {
            nsadr::StudyConfig cfg = build_config(conv_ov);
            if (conv_estimate) cfg.estimate = true;
            return emit_report(nsadr::run_study(cfg));
        }

        if (cmd_cmp->parsed()) {
            nsadr::StudyConfig cfg = build_config(cmp_ov);
            cfg.methods = {nsadr::Method::Galerkin, nsadr::Method::ASGS};
            if (cmp_estimate) cfg.estimate = true;
            return emit_report(nsadr::run_study(cfg));
        }
    } catch (const nsadr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nsadr::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
