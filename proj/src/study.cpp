#include "nsadr/study.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <thread>

#include "nsadr/mms.hpp"
#include "nsadr/time_stepper.hpp"

namespace nsadr {

namespace {

StudyRow run_cell(const StudyConfig& cfg, Method method, int n_div, double dt) {
    const auto t0 = std::chrono::steady_clock::now();

    const CaseSetup cs = make_case(cfg.case_key);
    const StructuredTriMesh mesh = build_unit_square_mesh(n_div);
    const QuadratureRule& quad = default_quadrature();

    RunOptions opts;
    opts.scheme = SchemeConfig::make(cfg.theta, dt, cfg.T);
    opts.method = method;
    opts.stab = cfg.stab;
    opts.solver = cfg.solver;
    opts.picard_iters = cfg.picard_iters;
    opts.with_norms = true;
    opts.with_estimator = cfg.estimate;
    opts.estimator_advection = cfg.estimator_advection;
    opts.pin_value = [](double t) { return mms::pressure(0.0, 0.0, t); };

    const RunResult res = run(mesh, quad, cs, Forcing::manufactured(cs), opts);

    StudyRow row;
    row.method = method;
    row.n_div = n_div;
    row.dt = dt;
    row.total_error = res.errors.total();
    row.detail = res.errors;
    if (cfg.estimate) row.eta = res.eta;
    row.walltime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (!std::isfinite(row.total_error))
        throw NumericalError("non-finite total error");
    return row;
}

}  // namespace

ConvergenceReport run_study(const StudyConfig& cfg) {
    validate(cfg);

    struct Cell {
        Method method;
        int n_div;
        double dt;
    };
    std::vector<Cell> cells;
    for (Method m : cfg.methods)
        for (size_t i = 0; i < cfg.grids.size(); ++i)
            cells.push_back({m, cfg.grids[i], cfg.dts[i]});

    ConvergenceReport report;
    report.config = cfg;
    report.rows.resize(cells.size());
    std::vector<std::string> failures(cells.size());

    const int jobs = std::max(1, std::min<int>(cfg.jobs, (int)cells.size()));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            try {
                report.rows[i] =
                    run_cell(cfg, cells[i].method, cells[i].n_div, cells[i].dt);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (size_t i = 0; i < cells.size(); ++i) {
        if (!failures[i].empty())
            throw NumericalError("case " + cfg.case_key + ", method " +
                                 method_name(cells[i].method) + ", grid " +
                                 std::to_string(cells[i].n_div) + "x" +
                                 std::to_string(cells[i].n_div) + ", dt " +
                                 std::to_string(cells[i].dt) + ": " + failures[i]);
    }

    // Rates within each method across successive grids.
    const size_t L = cfg.grids.size();
    for (size_t m = 0; m < cfg.methods.size(); ++m)
        for (size_t i = 1; i < L; ++i) {
            StudyRow& fine = report.rows[m * L + i];
            const StudyRow& coarse = report.rows[m * L + i - 1];
            fine.roc = rate_of_convergence(coarse.total_error, fine.total_error);
        }

    return report;
}

namespace {

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

void write_csv(const ConvergenceReport& report, std::ostream& out) {
    out << "case,method,theta,n_div,dt,total_error,roc,eta,walltime_s\n";
    for (const auto& row : report.rows) {
        out << report.config.case_key << ',' << method_name(row.method) << ','
            << fmt(report.config.theta, "%.0f") << ',' << row.n_div << ','
            << fmt(row.dt, "%.10g") << ',' << fmt(row.total_error, "%.10g") << ',';
        if (std::isfinite(row.roc)) out << fmt(row.roc, "%.6g");
        out << ',';
        if (std::isfinite(row.eta)) out << fmt(row.eta, "%.10g");
        out << ',' << fmt(row.walltime_s, "%.3f") << '\n';
    }
}

void print_table(const ConvergenceReport& report, std::ostream& out) {
    const auto& cfg = report.config;
    const size_t L = cfg.grids.size();

    out << "case " << cfg.case_key << ", theta = " << cfg.theta
        << ", T = " << cfg.T << "\n";
    out << std::left << std::setw(10) << "dt" << std::setw(12) << "grid";
    for (Method m : cfg.methods)
        out << std::setw(14) << (method_name(m) + " err") << std::setw(10)
            << "RoC";
    if (cfg.estimate) out << std::setw(12) << "eta(asgs)";
    out << "\n";

    for (size_t i = 0; i < L; ++i) {
        out << std::left << std::setw(10) << cfg.dts[i] << std::setw(12)
            << (std::to_string(cfg.grids[i]) + "x" + std::to_string(cfg.grids[i]));
        for (size_t m = 0; m < cfg.methods.size(); ++m) {
            const StudyRow& row = report.rows[m * L + i];
            out << std::setw(14) << fmt(row.total_error, "%.6g");
            out << std::setw(10)
                << (std::isfinite(row.roc) ? fmt(row.roc, "%.4f") : "");
        }
        if (cfg.estimate) {
            // report the last method's indicator (single-method studies aside)
            const StudyRow& row = report.rows[(cfg.methods.size() - 1) * L + i];
            out << std::setw(12)
                << (std::isfinite(row.eta) ? fmt(row.eta, "%.4g") : "");
        }
        out << "\n";
    }
}

}  // namespace nsadr
