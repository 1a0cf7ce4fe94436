#pragma once

// Experiment orchestration and CSV emission. Two experiment families:
//   alpha sweep     one row per (gap, threshold, split, user) with analytic
//                   outage triple and the Monte Carlo cancellation outage
//                   plus its confidence interval;
//   robust sweep    one row per (gap, threshold) with the robust split
//                   factor from each source and the fallback flags.
// Output is plain UTF-8 CSV with '.' decimals; reruns with the same
// configuration produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "irsnoma/config.hpp"
#include "irsnoma/splitopt.hpp"

namespace irsnoma {

/// Weaken user 2 by gap_db relative to user 1, holding everything else.
inline Scenario apply_pathloss_gap(Scenario scenario, double gap_db) {
    scenario.ue[1].pathloss_db = scenario.ue[0].pathloss_db - gap_db;
    scenario.validate();
    return scenario;
}

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string fmt_int(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
    return buf;
}

// Gaps to iterate; an empty configured list means "run the scenario as is"
// and report its own pathloss difference in the gap column.
struct GapPlan {
    std::vector<double> gaps;
    bool derive = false;
};

inline GapPlan plan_gaps(const ExperimentSpec& spec) {
    if (!spec.pathloss_gap_db.empty()) {
        return {spec.pathloss_gap_db, true};
    }
    return {{spec.scenario.ue[0].pathloss_db - spec.scenario.ue[1].pathloss_db}, false};
}

} // namespace detail

constexpr const char* kAlphaSweepHeader =
    "gap_db,epsilon_db,alpha,n1,ue,p_sinr_analytic,p_snr_analytic,p_ic_analytic,"
    "p_ic_mc,ci_low,ci_high,trials,seed";

constexpr const char* kRobustSweepHeader =
    "gap_db,epsilon_db,alpha_robust_analytic,alpha_robust_mc,fallback_analytic,"
    "fallback_mc,max_ic_outage";

/// Outage vs split factor for every (gap, threshold); row order is gaps in
/// list order, thresholds in list order, n1 ascending, user 1 then 2.
inline void run_alpha_sweep(const ExperimentSpec& spec, std::ostream& out) {
    spec.validate();
    if (spec.sweep_kind != SweepKind::alpha_sweep) {
        throw std::invalid_argument("run_alpha_sweep: spec.sweep_kind is not alpha_sweep");
    }
    const auto plan = detail::plan_gaps(spec);
    out << kAlphaSweepHeader << '\n';
    for (const double gap : plan.gaps) {
        const Scenario scenario =
            plan.derive ? apply_pathloss_gap(spec.scenario, gap) : spec.scenario;
        const std::vector<Split> grid = alpha_grid(scenario.n_elements);
        for (const double eps_db : spec.epsilon_db) {
            const double eps = db_to_linear(eps_db);
            std::vector<std::array<UeOutage, 2>> analytic;
            if (spec.use_analytic) {
                analytic.reserve(grid.size());
                for (const Split& split : grid) {
                    analytic.push_back(evaluate_outage(scenario, split, eps));
                }
            }
            std::vector<std::array<UeMcOutage, 2>> mc;
            if (spec.use_montecarlo) {
                mc = estimate_outage_sweep(scenario, grid, eps, spec.trials, spec.seed);
            }
            for (std::size_t s = 0; s < grid.size(); ++s) {
                for (std::size_t u = 0; u < 2; ++u) {
                    out << detail::fmt_num(gap) << ',' << detail::fmt_num(eps_db) << ','
                        << detail::fmt_num(grid[s].alpha) << ',' << grid[s].n1 << ','
                        << (u + 1) << ',';
                    if (spec.use_analytic) {
                        const UeOutage& a = analytic[s][u];
                        out << detail::fmt_num(a.p_sinr.value()) << ','
                            << detail::fmt_num(a.p_snr.value()) << ','
                            << detail::fmt_num(a.p_ic.value()) << ',';
                    } else {
                        out << ",,,";
                    }
                    if (spec.use_montecarlo) {
                        const McEstimate& e = mc[s][u].ic;
                        out << detail::fmt_num(e.p_hat.value()) << ','
                            << detail::fmt_num(e.ci_low.value()) << ','
                            << detail::fmt_num(e.ci_high.value()) << ',';
                    } else {
                        out << ",,,";
                    }
                    out << detail::fmt_int(spec.trials) << ',' << detail::fmt_int(spec.seed)
                        << '\n';
                }
            }
        }
    }
    if (!out) {
        throw std::runtime_error("run_alpha_sweep: write failed");
    }
}

/// Robust split factor vs threshold for every gap. The reported
/// max_ic_outage comes from the analytic selection when that source is
/// enabled, otherwise from the Monte Carlo one.
inline void run_robust_sweep(const ExperimentSpec& spec, std::ostream& out) {
    spec.validate();
    if (spec.sweep_kind != SweepKind::robust_vs_threshold) {
        throw std::invalid_argument("run_robust_sweep: spec.sweep_kind is not robust_vs_threshold");
    }
    const auto plan = detail::plan_gaps(spec);
    out << kRobustSweepHeader << '\n';
    McRunOptions mc_opts;
    mc_opts.trials = spec.trials;
    mc_opts.seed = spec.seed;
    for (const double gap : plan.gaps) {
        const Scenario scenario =
            plan.derive ? apply_pathloss_gap(spec.scenario, gap) : spec.scenario;
        for (const double eps_db : spec.epsilon_db) {
            out << detail::fmt_num(gap) << ',' << detail::fmt_num(eps_db) << ',';
            std::string max_ic;
            if (spec.use_analytic) {
                const RobustChoice c = robust_alpha(scenario, eps_db, spec.lambda, Source::analytic);
                out << detail::fmt_num(c.alpha);
                max_ic = detail::fmt_num(c.max_ic_outage.value());
                out << ',';
                if (spec.use_montecarlo) {
                    const RobustChoice m =
                        robust_alpha(scenario, eps_db, spec.lambda, Source::montecarlo, mc_opts);
                    out << detail::fmt_num(m.alpha) << ',' << (c.fallback_applied ? 1 : 0) << ','
                        << (m.fallback_applied ? 1 : 0) << ',';
                } else {
                    out << ',' << (c.fallback_applied ? 1 : 0) << ",,";
                }
            } else {
                const RobustChoice m =
                    robust_alpha(scenario, eps_db, spec.lambda, Source::montecarlo, mc_opts);
                max_ic = detail::fmt_num(m.max_ic_outage.value());
                out << ',' << detail::fmt_num(m.alpha) << ",," << (m.fallback_applied ? 1 : 0)
                    << ',';
            }
            out << max_ic << '\n';
        }
    }
    if (!out) {
        throw std::runtime_error("run_robust_sweep: write failed");
    }
}

namespace detail {

inline void run_to_file(const ExperimentSpec& spec, const std::string& path,
                        void (*runner)(const ExperimentSpec&, std::ostream&)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    runner(spec, out);
    out.flush();
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

} // namespace detail

inline void run_alpha_sweep(const ExperimentSpec& spec, const std::string& path) {
    detail::run_to_file(spec, path, &run_alpha_sweep);
}

inline void run_robust_sweep(const ExperimentSpec& spec, const std::string& path) {
    detail::run_to_file(spec, path, &run_robust_sweep);
}

} // namespace irsnoma
