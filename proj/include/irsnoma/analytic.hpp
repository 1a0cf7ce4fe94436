#pragma once

// Gamma-approximation pipeline for the split-surface uplink: mean of the
// per-element composite channel, statistics of the coherently and randomly
// combined sums, channel-power moments, moment matching and the three
// outage expressions (SINR, post-cancellation SNR, and their combination
// under parallel interference cancellation).

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "irsnoma/model.hpp"
#include "irsnoma/specfun.hpp"

namespace irsnoma {

/// Gamma(k, theta) matched to the first two raw moments.
/// k = mu^2 / (mu2 - mu^2), theta = (mu2 - mu^2) / mu.
inline GammaParams match_gamma(const MomentPair& moments) {
    const double mu = moments.first;
    const double var = moments.second - mu * mu;
    if (!(var > 0.0) || !(mu > 0.0)) {
        throw std::domain_error("match_gamma: degenerate distribution (variance <= 0)");
    }
    return GammaParams(mu * mu / var, var / mu);
}

/// Scaling property: if Y ~ Gamma(k, theta) then c*Y ~ Gamma(k, c*theta).
inline GammaParams scale_gamma(const GammaParams& params, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::domain_error("scale_gamma: factor must be positive");
    }
    return GammaParams(params.shape, c * params.scale);
}

/// Mean of the product of two independent unit-spread Nakagami magnitudes.
/// Strictly increasing in each shape and confined to (0, 1).
inline double product_nakagami_mean(const LinkFading& link1, const LinkFading& link2) {
    const double m1 = link1.m;
    const double m2 = link2.m;
    if (!(m1 >= 0.5 && m2 >= 0.5)) {
        throw std::domain_error("product_nakagami_mean: Nakagami m must be >= 0.5");
    }
    return std::exp(log_gamma(m1 + 0.5) + log_gamma(m2 + 0.5) - log_gamma(m1) -
                    log_gamma(m2) - 0.5 * std::log(m1 * m2));
}

/// Gamma parameters of the coherently combined sum of n_i element products:
/// shape = n_i mu^2 / (1 - mu^2), scale = (1 - mu^2) / mu.
/// n_i = 0 has no coherent part; nullopt marks the zero-mass sum.
///
/// mu within 1e-9 of 1 is rejected: the shape diverges there and the
/// approximation has left its sensible regime.
inline std::optional<GammaParams> coherent_sum_params(int n_i, double mu_i) {
    if (n_i < 0) {
        throw std::domain_error("coherent_sum_params: n_i must be >= 0");
    }
    if (!(mu_i > 0.0 && mu_i < 1.0)) {
        throw std::domain_error("coherent_sum_params: mu must lie in (0,1)");
    }
    if (mu_i > 1.0 - 1e-9) {
        throw std::domain_error("coherent_sum_params: mu too close to 1 (near-deterministic channel)");
    }
    if (n_i == 0) return std::nullopt;
    const double mu_sq = mu_i * mu_i;
    return GammaParams(static_cast<double>(n_i) * mu_sq / (1.0 - mu_sq), (1.0 - mu_sq) / mu_i);
}

/// Raw moment E[Y^p] = Gamma(k+p) theta^p / Gamma(k), evaluated in log space.
inline double gamma_raw_moment(const GammaParams& params, int p) {
    if (p < 1 || p > 4) {
        throw std::domain_error("gamma_raw_moment: p must be in {1,2,3,4}");
    }
    return std::exp(log_gamma(params.shape + static_cast<double>(p)) - log_gamma(params.shape) +
                    static_cast<double>(p) * std::log(params.scale));
}

/// Raw moment of the magnitude of the randomly combined sum of n_random
/// element products, modelled as CN(0, n_random): Gamma(1 + p/2) n^(p/2).
inline double rayleigh_part_moment(int n_random, int p) {
    if (n_random < 0) {
        throw std::domain_error("rayleigh_part_moment: n_random must be >= 0");
    }
    if (p != 2 && p != 4) {
        throw std::domain_error("rayleigh_part_moment: p must be 2 or 4");
    }
    if (n_random == 0) return 0.0;
    const double n = static_cast<double>(n_random);
    return p == 2 ? n : 2.0 * n * n; // Gamma(2) = 1, Gamma(3) = 2
}

/// First two raw moments of the channel power Z_i under the given split.
/// The cross term couples the second moments of the two sums; a vanished
/// sum (n_i = 0 or n_i = N) contributes exactly zero.
inline MomentPair channel_power_moments(const Scenario& scenario, int ue_index, const Split& split) {
    scenario.validate();
    if (ue_index != 1 && ue_index != 2) {
        throw std::domain_error("channel_power_moments: ue_index must be 1 or 2");
    }
    if (split.n1 < 0 || split.n1 > scenario.n_elements || split.n1 + split.n2 != scenario.n_elements) {
        throw std::domain_error("channel_power_moments: split does not match scenario");
    }
    const int n_own = ue_index == 1 ? split.n1 : split.n2;
    const int n_other = scenario.n_elements - n_own;
    const double mu = product_nakagami_mean(scenario.bs_link.fading,
                                            scenario.ue[static_cast<std::size_t>(ue_index - 1)].fading);
    const auto coherent = coherent_sum_params(n_own, mu);
    const double m2c = coherent ? gamma_raw_moment(*coherent, 2) : 0.0;
    const double m4c = coherent ? gamma_raw_moment(*coherent, 4) : 0.0;
    const double m2r = rayleigh_part_moment(n_other, 2);
    const double m4r = rayleigh_part_moment(n_other, 4);
    const double ll = scenario.bs_pathloss_linear() * scenario.ue_pathloss_linear(ue_index);
    return MomentPair(ll * (m2c + m2r), ll * ll * (m4c + m4r + 4.0 * m2c * m2r));
}

/// Gamma fit of the received power Z_i P_i: moment-match Z_i, then scale by
/// the linear transmit power.
inline GammaParams received_power_params(const Scenario& scenario, int ue_index, const Split& split) {
    return scale_gamma(match_gamma(channel_power_moments(scenario, ue_index, split)),
                       scenario.ue_power_mw(ue_index));
}

/// Parameters of the interference-plus-noise Gamma surrogate and the signal,
/// as used inside the SINR outage expression. Scales are power-scaled.
struct HatParams {
    double k_i = 1.0;
    double theta_i = 1.0;
    double k_j = 1.0;
    double theta_j = 1.0;
};

/// k_hat_j / theta_hat_j absorb the noise into the interferer's Gamma while
/// preserving mean (k_j theta_j + P_w) and variance; the signal passes
/// through unchanged.
inline HatParams hat_params(const GammaParams& p_i, const GammaParams& p_j, double noise_mw) {
    if (!(noise_mw > 0.0)) {
        throw std::domain_error("hat_params: noise power must be positive");
    }
    const double mean_j = p_j.shape * p_j.scale;
    const double denom = mean_j + noise_mw;
    HatParams h;
    h.k_i = p_i.shape;
    h.theta_i = p_i.scale;
    h.k_j = denom * denom / (p_j.shape * p_j.scale * p_j.scale);
    h.theta_j = p_j.shape * p_j.scale * p_j.scale / denom;
    return h;
}

/// P{ Z_i P_i / (Z_j P_j + P_w) <= eps } under the Gamma approximation:
/// I(eps theta_hat_j / (theta_hat_i + eps theta_hat_j); k_hat_i, k_hat_j).
/// Both parameter sets must already be scaled by their transmit powers;
/// eps is linear.
inline Probability sinr_outage(const GammaParams& p_i, const GammaParams& p_j, double noise_mw,
                               double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::domain_error("sinr_outage: epsilon must be positive");
    }
    const HatParams h = hat_params(p_i, p_j, noise_mw);
    const double et = epsilon * h.theta_j;
    return reg_inc_beta(et / (h.theta_i + et), h.k_i, h.k_j);
}

/// P{ Z_i P_i / P_w <= eps }: the Gamma CDF of the received power at eps P_w.
inline Probability snr_outage(const GammaParams& p_i, double noise_mw, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::domain_error("snr_outage: epsilon must be positive");
    }
    if (!(noise_mw > 0.0)) {
        throw std::domain_error("snr_outage: noise power must be positive");
    }
    return reg_lower_gamma(p_i.shape, epsilon * noise_mw / p_i.scale);
}

/// Outage under parallel interference cancellation:
/// 1 - min(succ_i + succ_j * succ_snr_i, succ_snr_i), clamped to [0,1].
/// A user succeeds either directly or after the partner's signal has been
/// removed, but never without clearing the noise-only threshold.
inline Probability ic_outage(Probability p_out_i, Probability p_out_j, Probability p_out_snr_i) {
    if (p_out_snr_i.value() > p_out_i.value()) {
        throw std::domain_error("ic_outage: SNR outage exceeds SINR outage (inconsistent inputs)");
    }
    // Evaluated in outage space: 1 - (succ_i + succ_j succ_snr_i) equals
    // p_i - succ_j succ_snr_i, and the min over success paths becomes a max
    // here. This keeps p_snr <= p_ic <= p_sinr exact even for tail
    // probabilities far below machine epsilon.
    const double succ_j = 1.0 - p_out_j.value();
    const double succ_snr_i = 1.0 - p_out_snr_i.value();
    const double direct = p_out_i.value() - succ_j * succ_snr_i;
    return Probability::clamped(direct > p_out_snr_i.value() ? direct : p_out_snr_i.value());
}

/// Per-user outage triple from the analytic path.
struct UeOutage {
    Probability p_sinr;
    Probability p_snr;
    Probability p_ic;
};

/// Full analytic evaluation for both users at one split and linear
/// threshold. The interferer of each user is the other user.
///
/// The SINR and SNR expressions are evaluated independently; where the SINR
/// approximation falls below the (more reliable) noise-only CDF, the pair is
/// reconciled by raising p_sinr to p_snr so that the ordering
/// p_snr <= p_ic <= p_sinr always holds.
inline std::array<UeOutage, 2> evaluate_outage(const Scenario& scenario, const Split& split,
                                               double epsilon) {
    const double noise = scenario.noise_mw();
    const std::array<GammaParams, 2> power = {received_power_params(scenario, 1, split),
                                              received_power_params(scenario, 2, split)};
    std::array<double, 2> sinr{};
    std::array<double, 2> snr{};
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        sinr[i] = sinr_outage(power[static_cast<std::size_t>(i)], power[static_cast<std::size_t>(j)],
                              noise, epsilon)
                      .value();
        snr[i] = snr_outage(power[static_cast<std::size_t>(i)], noise, epsilon).value();
        if (sinr[i] < snr[i]) sinr[i] = snr[i];
    }
    std::array<UeOutage, 2> out{};
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        UeOutage& u = out[static_cast<std::size_t>(i)];
        u.p_sinr = Probability(sinr[i]);
        u.p_snr = Probability(snr[i]);
        u.p_ic = ic_outage(u.p_sinr, Probability(sinr[j]), u.p_snr);
    }
    return out;
}

} // namespace irsnoma
