#pragma once

// Monte Carlo ground truth for the split-surface uplink. Each trial draws
// one channel realization (per-element Nakagami magnitudes, uniform phases),
// applies the phase configuration of the owning user on every element, and
// measures both users' channel powers with that shared phase vector. Outage
// events are counted exactly; noise is never sampled because the outage
// events depend on the channel powers only.
//
// Trials are independent. Trial t always uses the stream derived from
// (seed, t), and partial results are merged in fixed chunk order, so the
// output is bit-identical for any worker count.

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "irsnoma/model.hpp"
#include "irsnoma/rng.hpp"
#include "irsnoma/specfun.hpp"

namespace irsnoma {

/// One drawn set of small-scale fading coefficients.
struct ChannelRealization {
    std::vector<std::complex<double>> bs;
    std::array<std::vector<std::complex<double>>, 2> ue;
};

/// Per-trial link measurements and the parallel-cancellation outcome.
struct TrialOutcome {
    std::array<double, 2> sinr{};
    std::array<double, 2> snr{};
    std::array<bool, 2> ic_success{};
};

/// Empirical outage estimate with a 95% confidence interval.
struct McEstimate {
    Probability p_hat;
    Probability ci_low;
    Probability ci_high;
    std::uint64_t trials = 0;
};

struct UeMcOutage {
    McEstimate sinr;
    McEstimate snr;
    McEstimate ic;
};

/// Empirical first/second raw moments of a channel power, with the standard
/// errors of both estimates.
struct SampleMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    double se_mean = 0.0;
    double se_second_moment = 0.0;
    std::uint64_t trials = 0;
};

inline double sample_nakagami(const LinkFading& link, Rng& rng) {
    if (!(link.m >= 0.5)) {
        throw std::domain_error("sample_nakagami: Nakagami m must be >= 0.5");
    }
    return rng.nakagami(link.m);
}

/// Worker count: explicit request > 0 wins, then IRSNOMA_WORKERS, then the
/// hardware. Results never depend on this value.
inline int resolve_worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("IRSNOMA_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 4096) {
            return static_cast<int>(v);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kChunkTrials = 8192;

// Scenario constants in linear units, precomputed once per run.
struct LinearScenario {
    int n = 0;
    double m_bs = 1.0;
    std::array<double, 2> m_ue{};
    std::array<double, 2> ll{};   // bs pathloss * ue pathloss
    std::array<double, 2> p_mw{}; // transmit powers
    double noise_mw = 0.0;

    explicit LinearScenario(const Scenario& s)
        : n(s.n_elements),
          m_bs(s.bs_link.fading.m),
          m_ue{s.ue[0].fading.m, s.ue[1].fading.m},
          ll{s.bs_pathloss_linear() * s.ue_pathloss_linear(1),
             s.bs_pathloss_linear() * s.ue_pathloss_linear(2)},
          p_mw{s.ue_power_mw(1), s.ue_power_mw(2)},
          noise_mw(s.noise_mw()) {}
};

// Drawn polar components of one realization plus running sums that let the
// composite of every split be read off in O(1):
//   user 1 composite at n1 = pref_a1[n1] + suf_b1[n1]
//   user 2 composite at n1 = suf_a2[n1] + pref_b2[n1]
// where a-terms are the phase-aligned magnitudes and b-terms carry the
// residual phase offset between the two users' links.
struct TrialWorkspace {
    std::vector<double> g, th_bs, a1, th1, a2, th2;
    std::vector<double> b1_re, b1_im, a2_term;
    std::vector<double> pref_a1, suf_a2;
    std::vector<double> suf_b1_re, suf_b1_im, pref_b2_re, pref_b2_im;

    explicit TrialWorkspace(int n) {
        const auto sn = static_cast<std::size_t>(n);
        for (auto* v : {&g, &th_bs, &a1, &th1, &a2, &th2, &b1_re, &b1_im, &a2_term}) {
            v->resize(sn);
        }
        for (auto* v : {&pref_a1, &suf_a2, &suf_b1_re, &suf_b1_im, &pref_b2_re, &pref_b2_im}) {
            v->resize(sn + 1);
        }
    }
};

inline void draw_trial(const LinearScenario& sc, Rng& rng, TrialWorkspace& ws) {
    const int n = sc.n;
    for (int i = 0; i < n; ++i) ws.g[static_cast<std::size_t>(i)] = rng.nakagami(sc.m_bs);
    for (int i = 0; i < n; ++i) ws.th_bs[static_cast<std::size_t>(i)] = kTwoPi * rng.uniform01();
    for (int i = 0; i < n; ++i) ws.a1[static_cast<std::size_t>(i)] = rng.nakagami(sc.m_ue[0]);
    for (int i = 0; i < n; ++i) ws.th1[static_cast<std::size_t>(i)] = kTwoPi * rng.uniform01();
    for (int i = 0; i < n; ++i) ws.a2[static_cast<std::size_t>(i)] = rng.nakagami(sc.m_ue[1]);
    for (int i = 0; i < n; ++i) ws.th2[static_cast<std::size_t>(i)] = kTwoPi * rng.uniform01();

    ws.pref_a1[0] = 0.0;
    ws.pref_b2_re[0] = 0.0;
    ws.pref_b2_im[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double prod1 = ws.g[k] * ws.a1[k];
        const double prod2 = ws.g[k] * ws.a2[k];
        // The surface phase always cancels the serving user's composite
        // phase; for the other user only the offset between the two
        // user-side phases survives.
        const double d = ws.th1[k] - ws.th2[k];
        const double cd = std::cos(d);
        const double sd = std::sin(d);
        ws.b1_re[k] = prod1 * cd;
        ws.b1_im[k] = prod1 * sd;
        ws.a2_term[k] = prod2;
        ws.pref_a1[k + 1] = ws.pref_a1[k] + prod1;
        ws.pref_b2_re[k + 1] = ws.pref_b2_re[k] + prod2 * cd;
        ws.pref_b2_im[k + 1] = ws.pref_b2_im[k] - prod2 * sd;
    }
    const auto sn = static_cast<std::size_t>(n);
    ws.suf_b1_re[sn] = 0.0;
    ws.suf_b1_im[sn] = 0.0;
    ws.suf_a2[sn] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        ws.suf_b1_re[k] = ws.suf_b1_re[k + 1] + ws.b1_re[k];
        ws.suf_b1_im[k] = ws.suf_b1_im[k + 1] + ws.b1_im[k];
        ws.suf_a2[k] = ws.suf_a2[k + 1] + ws.a2_term[k];
    }
}

inline std::array<double, 2> measure(const LinearScenario& sc, const TrialWorkspace& ws, int n1) {
    const auto k = static_cast<std::size_t>(n1);
    const double re1 = ws.pref_a1[k] + ws.suf_b1_re[k];
    const double im1 = ws.suf_b1_im[k];
    const double re2 = ws.suf_a2[k] + ws.pref_b2_re[k];
    const double im2 = ws.pref_b2_im[k];
    return {sc.ll[0] * (re1 * re1 + im1 * im1), sc.ll[1] * (re2 * re2 + im2 * im2)};
}

// Fixed-size chunks processed in any order by any number of workers; the
// caller folds the chunk results in index order.
template <typename ChunkResult, typename ChunkFn>
std::vector<ChunkResult> run_chunked(std::uint64_t trials, int workers, const ChunkFn& fn) {
    const std::uint64_t n_chunks = (trials + kChunkTrials - 1) / kChunkTrials;
    std::vector<ChunkResult> results(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::uint64_t idx = next.fetch_add(1, std::memory_order_relaxed);
            if (idx >= n_chunks) return;
            const std::uint64_t first = idx * kChunkTrials;
            const std::uint64_t last = first + kChunkTrials < trials ? first + kChunkTrials : trials;
            try {
                results[idx] = fn(first, last);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    int n_workers = resolve_worker_count(workers);
    if (static_cast<std::uint64_t>(n_workers) > n_chunks) {
        n_workers = static_cast<int>(n_chunks);
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers > 1 ? n_workers - 1 : 0));
    for (int i = 1; i < n_workers; ++i) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

struct OutageCounts {
    std::array<std::uint64_t, 2> sinr{};
    std::array<std::uint64_t, 2> snr{};
    std::array<std::uint64_t, 2> ic{};
};

struct MomentSums {
    std::array<double, 2> z{};
    std::array<double, 2> z2{};
    std::array<double, 2> z4{};
};

inline void validate_run(const Scenario& scenario, std::span<const Split> splits,
                         std::uint64_t trials) {
    scenario.validate();
    if (trials < 1) {
        throw std::invalid_argument("monte carlo: trials must be >= 1");
    }
    if (splits.empty()) {
        throw std::invalid_argument("monte carlo: need at least one split");
    }
    for (const Split& s : splits) {
        if (s.n1 < 0 || s.n1 > scenario.n_elements || s.n1 + s.n2 != scenario.n_elements) {
            throw std::invalid_argument("monte carlo: split does not match scenario");
        }
    }
}

} // namespace detail

/// Draw one realization. Magnitudes are Nakagami(m, 1), phases uniform.
inline ChannelRealization draw_realization(const Scenario& scenario, Rng& rng) {
    scenario.validate();
    const detail::LinearScenario sc(scenario);
    detail::TrialWorkspace ws(sc.n);
    detail::draw_trial(sc, rng, ws);
    ChannelRealization r;
    const auto sn = static_cast<std::size_t>(sc.n);
    r.bs.resize(sn);
    r.ue[0].resize(sn);
    r.ue[1].resize(sn);
    for (std::size_t i = 0; i < sn; ++i) {
        r.bs[i] = std::polar(ws.g[i], ws.th_bs[i]);
        r.ue[0][i] = std::polar(ws.a1[i], ws.th1[i]);
        r.ue[1][i] = std::polar(ws.a2[i], ws.th2[i]);
    }
    return r;
}

/// Draw one realization and measure both users' channel powers under the
/// given split. Elements [0, n1) serve user 1, the rest user 2; both powers
/// use the same phase vector, so each user's unowned elements combine with
/// the phases chosen for the other user.
inline std::array<double, 2> realize_and_measure(const Scenario& scenario, const Split& split,
                                                 Rng& rng) {
    scenario.validate();
    if (split.n1 < 0 || split.n1 > scenario.n_elements || split.n1 + split.n2 != scenario.n_elements) {
        throw std::invalid_argument("realize_and_measure: split does not match scenario");
    }
    const detail::LinearScenario sc(scenario);
    detail::TrialWorkspace ws(sc.n);
    detail::draw_trial(sc, rng, ws);
    return detail::measure(sc, ws, split.n1);
}

/// Reference route: apply the per-element phase configuration explicitly to
/// a materialized realization. Used to cross-check the fused measurement.
inline std::array<double, 2> measure_realization(const ChannelRealization& realization,
                                                 const Scenario& scenario, const Split& split) {
    const int n = scenario.n_elements;
    if (static_cast<int>(realization.bs.size()) != n) {
        throw std::invalid_argument("measure_realization: realization size mismatch");
    }
    std::complex<double> comp1{0.0, 0.0};
    std::complex<double> comp2{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const int owner = i < split.n1 ? 0 : 1;
        const double phi = -std::arg(realization.bs[k] * realization.ue[static_cast<std::size_t>(owner)][k]);
        const std::complex<double> shift = std::polar(1.0, phi);
        comp1 += shift * realization.bs[k] * realization.ue[0][k];
        comp2 += shift * realization.bs[k] * realization.ue[1][k];
    }
    const double ll1 = scenario.bs_pathloss_linear() * scenario.ue_pathloss_linear(1);
    const double ll2 = scenario.bs_pathloss_linear() * scenario.ue_pathloss_linear(2);
    return {ll1 * std::norm(comp1), ll2 * std::norm(comp2)};
}

/// Exact per-trial events. A user is decoded in the first iteration if its
/// SINR clears the threshold; otherwise it can still be decoded in the
/// second iteration, against noise only, provided the partner cleared its
/// own threshold and was cancelled.
inline TrialOutcome trial_outcome(double z1, double z2, const Scenario& scenario, double epsilon) {
    if (!(z1 >= 0.0 && z2 >= 0.0)) {
        throw std::domain_error("trial_outcome: channel powers must be non-negative");
    }
    if (!(epsilon > 0.0)) {
        throw std::domain_error("trial_outcome: epsilon must be positive");
    }
    const double s1 = z1 * scenario.ue_power_mw(1);
    const double s2 = z2 * scenario.ue_power_mw(2);
    const double pw = scenario.noise_mw();
    TrialOutcome t;
    t.sinr = {s1 / (s2 + pw), s2 / (s1 + pw)};
    t.snr = {s1 / pw, s2 / pw};
    t.ic_success = {t.sinr[0] > epsilon || (t.sinr[1] > epsilon && t.snr[0] > epsilon),
                    t.sinr[1] > epsilon || (t.sinr[0] > epsilon && t.snr[1] > epsilon)};
    return t;
}

namespace detail {

inline McEstimate make_estimate(std::uint64_t count, std::uint64_t trials) {
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(count) / n;
    McEstimate e;
    e.p_hat = Probability(p);
    e.trials = trials;
    if (count < 10) {
        // Too few events for the normal approximation: exact binomial
        // (Clopper-Pearson) bounds via beta quantiles.
        const double c = static_cast<double>(count);
        const double lo = count == 0 ? 0.0 : reg_inc_beta_inv(0.025, c, n - c + 1.0);
        const double hi = count == trials ? 1.0 : reg_inc_beta_inv(0.975, c + 1.0, n - c);
        e.ci_low = Probability::clamped(lo < p ? lo : p);
        e.ci_high = Probability::clamped(hi > p ? hi : p);
    } else {
        const double half = 1.96 * std::sqrt(p * (1.0 - p) / n);
        e.ci_low = Probability::clamped(p - half);
        e.ci_high = Probability::clamped(p + half);
    }
    return e;
}

} // namespace detail

/// Empirical outage for every requested split, all measured on the same
/// per-trial realizations. Equivalent to calling estimate_outage per split
/// with the same seed, at a fraction of the cost.
inline std::vector<std::array<UeMcOutage, 2>> estimate_outage_sweep(
    const Scenario& scenario, std::span<const Split> splits, double epsilon, std::uint64_t trials,
    std::uint64_t seed, int workers = 0) {
    detail::validate_run(scenario, splits, trials);
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("estimate_outage_sweep: epsilon must be positive");
    }
    const detail::LinearScenario sc(scenario);
    const std::size_t n_splits = splits.size();

    using ChunkResult = std::vector<detail::OutageCounts>;
    auto chunks = detail::run_chunked<ChunkResult>(
        trials, workers, [&](std::uint64_t first, std::uint64_t last) {
            ChunkResult counts(n_splits);
            detail::TrialWorkspace ws(sc.n);
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng = Rng::for_trial(seed, t);
                detail::draw_trial(sc, rng, ws);
                for (std::size_t s = 0; s < n_splits; ++s) {
                    const auto z = detail::measure(sc, ws, splits[s].n1);
                    const double s1 = z[0] * sc.p_mw[0];
                    const double s2 = z[1] * sc.p_mw[1];
                    const double sinr1 = s1 / (s2 + sc.noise_mw);
                    const double sinr2 = s2 / (s1 + sc.noise_mw);
                    const double snr1 = s1 / sc.noise_mw;
                    const double snr2 = s2 / sc.noise_mw;
                    detail::OutageCounts& c = counts[s];
                    c.sinr[0] += sinr1 <= epsilon;
                    c.sinr[1] += sinr2 <= epsilon;
                    c.snr[0] += snr1 <= epsilon;
                    c.snr[1] += snr2 <= epsilon;
                    c.ic[0] += !(sinr1 > epsilon || (sinr2 > epsilon && snr1 > epsilon));
                    c.ic[1] += !(sinr2 > epsilon || (sinr1 > epsilon && snr2 > epsilon));
                }
            }
            return counts;
        });

    std::vector<detail::OutageCounts> total(n_splits);
    for (const auto& chunk : chunks) {
        for (std::size_t s = 0; s < n_splits; ++s) {
            for (int u = 0; u < 2; ++u) {
                const auto su = static_cast<std::size_t>(u);
                total[s].sinr[su] += chunk[s].sinr[su];
                total[s].snr[su] += chunk[s].snr[su];
                total[s].ic[su] += chunk[s].ic[su];
            }
        }
    }
    std::vector<std::array<UeMcOutage, 2>> out(n_splits);
    for (std::size_t s = 0; s < n_splits; ++s) {
        for (std::size_t u = 0; u < 2; ++u) {
            out[s][u].sinr = detail::make_estimate(total[s].sinr[u], trials);
            out[s][u].snr = detail::make_estimate(total[s].snr[u], trials);
            out[s][u].ic = detail::make_estimate(total[s].ic[u], trials);
        }
    }
    return out;
}

/// Empirical outage for one split. Deterministic in (scenario, split,
/// epsilon, trials, seed) regardless of the worker count.
inline std::array<UeMcOutage, 2> estimate_outage(const Scenario& scenario, const Split& split,
                                                 double epsilon, std::uint64_t trials,
                                                 std::uint64_t seed, int workers = 0) {
    const std::array<Split, 1> one{split};
    return estimate_outage_sweep(scenario, one, epsilon, trials, seed, workers)[0];
}

/// Sample first/second raw moments of both users' channel powers at every
/// requested split, from shared per-trial realizations.
inline std::vector<std::array<SampleMoments, 2>> sample_channel_power_moments_sweep(
    const Scenario& scenario, std::span<const Split> splits, std::uint64_t trials,
    std::uint64_t seed, int workers = 0) {
    detail::validate_run(scenario, splits, trials);
    const detail::LinearScenario sc(scenario);
    const std::size_t n_splits = splits.size();

    using ChunkResult = std::vector<detail::MomentSums>;
    auto chunks = detail::run_chunked<ChunkResult>(
        trials, workers, [&](std::uint64_t first, std::uint64_t last) {
            ChunkResult sums(n_splits);
            detail::TrialWorkspace ws(sc.n);
            for (std::uint64_t t = first; t < last; ++t) {
                Rng rng = Rng::for_trial(seed, t);
                detail::draw_trial(sc, rng, ws);
                for (std::size_t s = 0; s < n_splits; ++s) {
                    const auto z = detail::measure(sc, ws, splits[s].n1);
                    for (std::size_t u = 0; u < 2; ++u) {
                        const double zz = z[u] * z[u];
                        sums[s].z[u] += z[u];
                        sums[s].z2[u] += zz;
                        sums[s].z4[u] += zz * zz;
                    }
                }
            }
            return sums;
        });

    std::vector<detail::MomentSums> total(n_splits);
    for (const auto& chunk : chunks) { // fixed fold order keeps sums reproducible
        for (std::size_t s = 0; s < n_splits; ++s) {
            for (std::size_t u = 0; u < 2; ++u) {
                total[s].z[u] += chunk[s].z[u];
                total[s].z2[u] += chunk[s].z2[u];
                total[s].z4[u] += chunk[s].z4[u];
            }
        }
    }
    const double n = static_cast<double>(trials);
    std::vector<std::array<SampleMoments, 2>> out(n_splits);
    for (std::size_t s = 0; s < n_splits; ++s) {
        for (std::size_t u = 0; u < 2; ++u) {
            SampleMoments& m = out[s][u];
            m.mean = total[s].z[u] / n;
            m.second_moment = total[s].z2[u] / n;
            const double m4 = total[s].z4[u] / n;
            const double var_z = m.second_moment - m.mean * m.mean;
            const double var_z2 = m4 - m.second_moment * m.second_moment;
            m.se_mean = std::sqrt((var_z > 0.0 ? var_z : 0.0) / n);
            m.se_second_moment = std::sqrt((var_z2 > 0.0 ? var_z2 : 0.0) / n);
            m.trials = trials;
        }
    }
    return out;
}

inline std::array<SampleMoments, 2> sample_channel_power_moments(const Scenario& scenario,
                                                                 const Split& split,
                                                                 std::uint64_t trials,
                                                                 std::uint64_t seed,
                                                                 int workers = 0) {
    const std::array<Split, 1> one{split};
    return sample_channel_power_moments_sweep(scenario, one, trials, seed, workers)[0];
}

/// Raw per-trial channel powers (z1, z2), trial t at index t.
inline std::vector<std::array<double, 2>> sample_channel_powers(const Scenario& scenario,
                                                                const Split& split,
                                                                std::uint64_t trials,
                                                                std::uint64_t seed,
                                                                int workers = 0) {
    const std::array<Split, 1> one{split};
    detail::validate_run(scenario, one, trials);
    const detail::LinearScenario sc(scenario);
    std::vector<std::array<double, 2>> out(trials);
    detail::run_chunked<int>(trials, workers, [&](std::uint64_t first, std::uint64_t last) {
        detail::TrialWorkspace ws(sc.n);
        for (std::uint64_t t = first; t < last; ++t) {
            Rng rng = Rng::for_trial(seed, t);
            detail::draw_trial(sc, rng, ws);
            out[t] = detail::measure(sc, ws, split.n1);
        }
        return 0;
    });
    return out;
}

} // namespace irsnoma
