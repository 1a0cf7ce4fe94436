#pragma once

// Sweep of the element split factor and min-max robust selection. The
// robust rule minimizes the worse of the two users' cancellation outages
// over the full n1 = 0..N grid; if even at that minimizer the weak user's
// outage reaches the limiting threshold lambda, the whole surface is handed
// to the strong user (alpha = 1).

#include <span>
#include <stdexcept>
#include <vector>

#include "irsnoma/analytic.hpp"
#include "irsnoma/model.hpp"
#include "irsnoma/simulator.hpp"

namespace irsnoma {

enum class Source { analytic, montecarlo };

/// Trials/seed/workers for Monte Carlo evaluation of a sweep.
struct McRunOptions {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    int workers = 0;
};

struct SweepRow {
    Split split;
    double epsilon_db = 0.0;
    UeOutage ue1;
    UeOutage ue2;
    Source source = Source::analytic;
};

struct RobustChoice {
    double alpha = 1.0;
    int n1 = 0;
    Probability max_ic_outage;
    bool fallback_applied = false;
};

/// The user with the smaller pathloss-times-power product is the weak one;
/// on an exact tie user 2 is designated weak.
inline int weak_ue(const Scenario& scenario) {
    const double s1 = scenario.ue_pathloss_linear(1) * scenario.ue_power_mw(1);
    const double s2 = scenario.ue_pathloss_linear(2) * scenario.ue_power_mw(2);
    return s1 < s2 ? 1 : 2;
}

/// One row per split in alpha_grid(N), ascending n1.
inline std::vector<SweepRow> sweep(const Scenario& scenario, double epsilon_db, Source source,
                                   const McRunOptions& mc = {}) {
    scenario.validate();
    const double epsilon = db_to_linear(epsilon_db);
    const std::vector<Split> grid = alpha_grid(scenario.n_elements);
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    if (source == Source::analytic) {
        for (const Split& split : grid) {
            const auto outage = evaluate_outage(scenario, split, epsilon);
            rows.push_back(SweepRow{split, epsilon_db, outage[0], outage[1], source});
        }
    } else {
        const auto estimates =
            estimate_outage_sweep(scenario, grid, epsilon, mc.trials, mc.seed, mc.workers);
        for (std::size_t s = 0; s < grid.size(); ++s) {
            UeOutage ue1{estimates[s][0].sinr.p_hat, estimates[s][0].snr.p_hat,
                         estimates[s][0].ic.p_hat};
            UeOutage ue2{estimates[s][1].sinr.p_hat, estimates[s][1].snr.p_hat,
                         estimates[s][1].ic.p_hat};
            rows.push_back(SweepRow{grid[s], epsilon_db, ue1, ue2, source});
        }
    }
    return rows;
}

/// Min-max selection over completed sweep rows (ascending n1; the last row
/// is the alpha = 1 operating point). Ties go to the larger alpha. The
/// limiting threshold is tested at the minimizer: if the weak user's
/// cancellation outage there is lambda or worse, alpha = 1 is returned with
/// the fallback flag set and the outage reported at that operating point.
inline RobustChoice robust_from_rows(std::span<const SweepRow> rows, int weak_ue_index,
                                     double lambda) {
    if (rows.empty()) {
        throw std::invalid_argument("robust_from_rows: empty sweep");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::domain_error("robust_from_rows: lambda must lie in [0,1]");
    }
    if (weak_ue_index != 1 && weak_ue_index != 2) {
        throw std::invalid_argument("robust_from_rows: weak_ue_index must be 1 or 2");
    }
    std::size_t best = 0;
    double best_obj = 2.0;
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const double p1 = rows[s].ue1.p_ic.value();
        const double p2 = rows[s].ue2.p_ic.value();
        const double obj = p1 > p2 ? p1 : p2;
        if (obj <= best_obj) {
            best_obj = obj;
            best = s;
        }
    }
    const SweepRow& min_row = rows[best];
    const double weak_ic =
        (weak_ue_index == 1 ? min_row.ue1 : min_row.ue2).p_ic.value();
    RobustChoice choice;
    if (weak_ic >= lambda) {
        const SweepRow& last = rows[rows.size() - 1];
        choice.alpha = 1.0;
        choice.n1 = last.split.n1;
        const double p1 = last.ue1.p_ic.value();
        const double p2 = last.ue2.p_ic.value();
        choice.max_ic_outage = Probability(p1 > p2 ? p1 : p2);
        choice.fallback_applied = true;
    } else {
        choice.alpha = min_row.split.alpha;
        choice.n1 = min_row.split.n1;
        choice.max_ic_outage = Probability(best_obj);
        choice.fallback_applied = false;
    }
    return choice;
}

/// Sweep then select.
inline RobustChoice robust_alpha(const Scenario& scenario, double epsilon_db, double lambda,
                                 Source source, const McRunOptions& mc = {}) {
    const std::vector<SweepRow> rows = sweep(scenario, epsilon_db, source, mc);
    return robust_from_rows(rows, weak_ue(scenario), lambda);
}

} // namespace irsnoma
