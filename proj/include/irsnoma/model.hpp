#pragma once

// Domain types shared by the analytic engine and the Monte Carlo simulator:
// scenario configuration, element splits, moment pairs and Gamma parameters.
// All dB/dBm quantities are converted to linear units exactly once, at this
// boundary; everything downstream works in linear milliwatts.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsnoma {

/// 10^(x/10). dBm in, milliwatts out; dB pathloss in, linear gain out.
inline double db_to_linear(double x_db) {
    if (!std::isfinite(x_db)) {
        throw std::domain_error("db_to_linear: input must be finite");
    }
    return std::pow(10.0, x_db / 10.0);
}

/// Nakagami-m magnitude fading on one link. Spread is fixed to 1; the
/// pathloss carries all scale.
struct LinkFading {
    double m = 1.0;

    LinkFading() = default;
    explicit LinkFading(double shape) : m(shape) {
        if (!(std::isfinite(shape) && shape >= 0.5)) {
            throw std::domain_error("LinkFading: Nakagami m must be >= 0.5");
        }
    }
};

struct UeConfig {
    LinkFading fading;
    double pathloss_db = 0.0;
    double tx_power_dbm = 0.0;
};

struct BsLink {
    LinkFading fading;
    double pathloss_db = 0.0;
};

/// Full physical configuration of the two-user uplink through the surface.
struct Scenario {
    int n_elements = 1;
    BsLink bs_link;
    std::array<UeConfig, 2> ue;
    double noise_power_dbm = 0.0;

    void validate() const {
        if (n_elements < 1) {
            throw std::invalid_argument("Scenario: n_elements must be >= 1");
        }
        if (!(std::isfinite(bs_link.pathloss_db) && bs_link.pathloss_db <= 0.0)) {
            throw std::invalid_argument("Scenario: bs_link.pathloss_db must be <= 0");
        }
        if (!(bs_link.fading.m >= 0.5)) {
            throw std::invalid_argument("Scenario: bs_link.m must be >= 0.5");
        }
        for (int i = 0; i < 2; ++i) {
            const auto& u = ue[static_cast<std::size_t>(i)];
            const std::string tag = "Scenario: ue[" + std::to_string(i) + "].";
            if (!(u.fading.m >= 0.5)) {
                throw std::invalid_argument(tag + "m must be >= 0.5");
            }
            if (!(std::isfinite(u.pathloss_db) && u.pathloss_db <= 0.0)) {
                throw std::invalid_argument(tag + "pathloss_db must be <= 0");
            }
            if (!std::isfinite(u.tx_power_dbm)) {
                throw std::invalid_argument(tag + "tx_power_dbm must be finite");
            }
        }
        if (!std::isfinite(noise_power_dbm)) {
            throw std::invalid_argument("Scenario: noise_power_dbm must be finite");
        }
    }

    double bs_pathloss_linear() const { return db_to_linear(bs_link.pathloss_db); }
    /// ue is 1 or 2.
    double ue_pathloss_linear(int ue_index) const {
        return db_to_linear(ue[static_cast<std::size_t>(ue_index - 1)].pathloss_db);
    }
    double ue_power_mw(int ue_index) const {
        return db_to_linear(ue[static_cast<std::size_t>(ue_index - 1)].tx_power_dbm);
    }
    double noise_mw() const { return db_to_linear(noise_power_dbm); }
};

/// Allocation of the N surface elements between the two users.
struct Split {
    int n1 = 0;
    int n2 = 0;
    double alpha = 0.0;
};

inline Split split_from_n1(int n1, int n) {
    if (n < 1 || n1 < 0 || n1 > n) {
        throw std::domain_error("split_from_n1: require 0 <= n1 <= n, n >= 1");
    }
    return Split{n1, n - n1, static_cast<double>(n1) / static_cast<double>(n)};
}

/// n1 = ceil(alpha * n), with a tiny slack so that alpha values that are
/// exact grid fractions i/n do not round up to i+1.
inline Split split_from_alpha(double alpha, int n) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("split_from_alpha: alpha must lie in [0,1]");
    }
    if (n < 1) {
        throw std::domain_error("split_from_alpha: n must be >= 1");
    }
    const double scaled = alpha * static_cast<double>(n);
    const double slack = 1e-9 * (scaled > 1.0 ? scaled : 1.0);
    int n1 = static_cast<int>(std::ceil(scaled - slack));
    if (n1 < 0) n1 = 0;
    if (n1 > n) n1 = n;
    return split_from_n1(n1, n);
}

/// The N+1 splits with n1 = 0, 1, ..., N in ascending order.
inline std::vector<Split> alpha_grid(int n) {
    if (n < 1) {
        throw std::domain_error("alpha_grid: n must be >= 1");
    }
    std::vector<Split> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (int n1 = 0; n1 <= n; ++n1) {
        grid.push_back(split_from_n1(n1, n));
    }
    return grid;
}

/// First and second raw moments of a non-negative random quantity.
struct MomentPair {
    double first = 0.0;
    double second = 0.0;

    MomentPair() = default;
    MomentPair(double first_moment, double second_moment)
        : first(first_moment), second(second_moment) {
        if (!(std::isfinite(first) && std::isfinite(second)) || first < 0.0 ||
            second < first * first) {
            throw std::domain_error("MomentPair: need finite moments with second >= first^2");
        }
    }
};

/// Shape/scale pair of a Gamma power distribution.
struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;

    GammaParams() = default;
    GammaParams(double shape_k, double scale_theta) : shape(shape_k), scale(scale_theta) {
        if (!(std::isfinite(shape) && shape > 0.0 && std::isfinite(scale) && scale > 0.0)) {
            throw std::domain_error("GammaParams: shape and scale must be positive");
        }
    }

    double mean() const { return shape * scale; }
    double second_moment() const { return shape * (shape + 1.0) * scale * scale; }
};

} // namespace irsnoma
