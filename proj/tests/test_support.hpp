#pragma once

// Shared fixtures for the unit and acceptance suites: seeded random instances,
// a brute-force segment-law oracle (independent of the library's visitation
// and sampling code paths), and the enumeration of small deterministic
// environments. No test framework dependencies here.

#include <cstdint>
#include <map>
#include <vector>

#include "eudrl/eudrl.hpp"

namespace testsup {

using eudrl::BaseMdp;
using eudrl::CommandExtension;
using eudrl::GoalMap;
using eudrl::Policy;
using eudrl::Segment;

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Random environment with |S| in 2..max_states, |A| in 1..max_actions,
// N in 1..max_N, surjective goal map, Dirichlet kernel rows and commands.
inline CommandExtension random_ce(std::uint64_t seed, int max_states = 4, int max_actions = 3,
                                  int max_n = 3) {
    auto rng = eudrl::make_rng(seed, 0xce);
    const int S = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_states - 1));
    const int A = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_actions));
    const int N = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n));
    const int G = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(S));
    BaseMdp base = eudrl::random_mdp(S, A, rng());

    GoalMap gm;
    gm.n_goals = G;
    gm.rho.resize(S);
    std::vector<int> order(S);
    for (int s = 0; s < S; ++s) order[s] = s;
    for (int s = S - 1; s > 0; --s)
        std::swap(order[s], order[rng() % static_cast<std::uint64_t>(s + 1)]);
    for (int k = 0; k < S; ++k)
        gm.rho[order[k]] = k < G ? k : static_cast<int>(rng() % static_cast<std::uint64_t>(G));

    std::vector<double> command(static_cast<std::size_t>(S) * (N + 1) * G, 0.0);
    for (int s = 0; s < S; ++s) {
        std::vector<double> row(static_cast<std::size_t>(N) * G);
        eudrl::dirichlet_row(row, rng);
        for (int h = 1; h <= N; ++h)
            for (int g = 0; g < G; ++g)
                command[static_cast<std::size_t>((s * (N + 1) + h)) * G + g] =
                    row[static_cast<std::size_t>(h - 1) * G + g];
    }
    return eudrl::build_ce(std::move(base), std::move(gm), N, std::move(command));
}

inline Policy random_policy(const CommandExtension& ce, std::uint64_t seed) {
    auto rng = eudrl::make_rng(seed, 0x9909);
    Policy pi = eudrl::make_policy_like(ce);
    for (int s = 0; s < ce.n_states(); ++s)
        for (int h = 1; h <= ce.max_horizon; ++h)
            for (int g = 0; g < ce.n_goals(); ++g) eudrl::dirichlet_row(pi.row(s, h, g), rng);
    return pi;
}

// ---- brute-force segment-law oracle ----------------------------------------
//
// Enumerates every trajectory prefix by direct probability products over the
// initial masses, policy rows, and kernel rows, then accumulates each valid
// window (start t, length l <= remaining horizon, t + l <= N) of each
// trajectory with the trajectory's probability. Normalizing the accumulator
// gives the stationary segment law the rejection sampler must reproduce.

using SegmentKey = std::vector<int>;  // {l, s0, h0, g0, a0, s1, a1, s2, ...}

inline SegmentKey segment_key(const Segment& seg) {
    SegmentKey key{seg.length, seg.s0, seg.h0, seg.g0};
    for (int i = 0; i < seg.length; ++i) {
        key.push_back(seg.actions[i]);
        key.push_back(seg.states[i]);
    }
    return key;
}

namespace detail {
inline void extend(const CommandExtension& ce, const Policy& pi, std::vector<int>& states,
                   std::vector<int>& actions, int h0, int g0, double prob,
                   std::map<SegmentKey, double>& acc) {
    const int t = static_cast<int>(actions.size());
    if (t == h0) {
        for (int w0 = 0; w0 < h0; ++w0)
            for (int l = 1; w0 + l <= ce.max_horizon && l <= h0 - w0; ++l) {
                SegmentKey key{l, states[w0], h0 - w0, g0};
                for (int i = 0; i < l; ++i) {
                    key.push_back(actions[w0 + i]);
                    key.push_back(states[w0 + i + 1]);
                }
                acc[key] += prob;
            }
        return;
    }
    for (int a = 0; a < ce.n_actions(); ++a) {
        const double pa = pi.prob(states[t], h0 - t, g0, a);
        if (pa == 0.0) continue;
        for (int s2 = 0; s2 < ce.n_states(); ++s2) {
            const double ps = ce.base.transition(states[t], a, s2);
            if (ps == 0.0) continue;
            states.push_back(s2);
            actions.push_back(a);
            extend(ce, pi, states, actions, h0, g0, prob * pa * ps, acc);
            states.pop_back();
            actions.pop_back();
        }
    }
}
}  // namespace detail

inline std::map<SegmentKey, double> brute_force_segment_law(const CommandExtension& ce,
                                                            const Policy& pi) {
    std::map<SegmentKey, double> acc;
    for (int s0 = 0; s0 < ce.n_states(); ++s0)
        for (int h0 = 1; h0 <= ce.max_horizon; ++h0)
            for (int g0 = 0; g0 < ce.n_goals(); ++g0) {
                const double m = ce.initial_mass(s0, h0, g0);
                if (m == 0.0) continue;
                std::vector<int> states{s0}, actions;
                detail::extend(ce, pi, states, actions, h0, g0, m, acc);
            }
    double total = 0.0;
    for (const auto& [key, w] : acc) total += w;
    for (auto& [key, w] : acc) w /= total;
    return acc;
}

inline double total_variation(const std::map<SegmentKey, double>& oracle,
                              const std::map<SegmentKey, std::uint64_t>& counts,
                              std::uint64_t n) {
    double tv = 0.0;
    for (const auto& [key, p] : oracle) {
        const auto it = counts.find(key);
        const double phat =
            it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
        tv += std::abs(p - phat);
    }
    for (const auto& [key, c] : counts)
        if (!oracle.count(key)) tv += static_cast<double>(c) / static_cast<double>(n);
    return 0.5 * tv;
}

// ---- fixed small environments ----------------------------------------------

// Two states, two actions, N = 2, mixed horizons; the distribution-equivalence
// reference environment.
inline CommandExtension mixed_horizon_ce() {
    BaseMdp base;
    base.n_states = 2;
    base.n_actions = 2;
    base.p = {0.7, 0.3, 0.2, 0.8, 0.5, 0.5, 0.9, 0.1};
    base.mu0 = {0.6, 0.4};
    GoalMap gm{2, {0, 1}};
    std::vector<double> command = {
        0.0, 0.0, 0.2, 0.3, 0.4, 0.1,  // s=0: h=0 zero, h=1 (0.2,0.3), h=2 (0.4,0.1)
        0.0, 0.0, 0.25, 0.25, 0.25, 0.25,
    };
    return eudrl::build_ce(std::move(base), std::move(gm), 2, std::move(command));
}

inline Policy mixed_horizon_policy(const CommandExtension& ce) {
    Policy pi = eudrl::make_policy_like(ce);
    const double rows[2][2][2][2] = {
        // [s][h-1][g][a]
        {{{0.3, 0.7}, {0.6, 0.4}}, {{0.5, 0.5}, {0.8, 0.2}}},
        {{{0.4, 0.6}, {0.7, 0.3}}, {{0.2, 0.8}, {0.55, 0.45}}},
    };
    for (int s = 0; s < 2; ++s)
        for (int h = 1; h <= 2; ++h)
            for (int g = 0; g < 2; ++g)
                for (int a = 0; a < 2; ++a) pi.row(s, h, g)[a] = rows[s][h - 1][g][a];
    return pi;
}

// Concentrated variants keeping the sampled-law support narrow enough for
// tight TV thresholds at 1e5 samples.
inline CommandExtension peaked_ce_n3() {
    BaseMdp base;
    base.n_states = 2;
    base.n_actions = 2;
    base.p = {0.95, 0.05, 0.1, 0.9, 0.05, 0.95, 0.85, 0.15};
    base.mu0 = {1.0, 0.0};
    GoalMap gm{2, {0, 1}};
    std::vector<double> command(static_cast<std::size_t>(2) * 4 * 2, 0.0);
    auto set = [&](int s, int h, int g, double v) {
        command[static_cast<std::size_t>((s * 4 + h)) * 2 + g] = v;
    };
    set(0, 1, 0, 0.35);
    set(0, 1, 1, 0.25);
    set(0, 2, 0, 0.2);
    set(0, 2, 1, 0.1);
    set(0, 3, 0, 0.06);
    set(0, 3, 1, 0.04);
    set(1, 1, 0, 0.5);
    set(1, 1, 1, 0.5);
    return eudrl::build_ce(std::move(base), std::move(gm), 3, std::move(command));
}

inline Policy peaked_policy(const CommandExtension& ce, double lead = 0.9) {
    Policy pi = eudrl::make_policy_like(ce);
    const double rest = (1.0 - lead) / (ce.n_actions() - 1 > 0 ? ce.n_actions() - 1 : 1);
    for (int s = 0; s < ce.n_states(); ++s)
        for (int h = 1; h <= ce.max_horizon; ++h)
            for (int g = 0; g < ce.n_goals(); ++g) {
                auto row = pi.row(s, h, g);
                for (int a = 0; a < ce.n_actions(); ++a) row[a] = rest;
                row[(s + h + g) % ce.n_actions()] = ce.n_actions() > 1 ? lead : 1.0;
            }
    return pi;
}

inline CommandExtension peaked_ce_3s() {
    BaseMdp base;
    base.n_states = 3;
    base.n_actions = 2;
    base.p = {
        0.9, 0.05, 0.05, 0.1, 0.85, 0.05,  // s=0
        0.05, 0.9, 0.05, 0.8, 0.1, 0.1,    // s=1
        0.05, 0.05, 0.9, 0.1, 0.1, 0.8,    // s=2
    };
    base.mu0 = {0.9, 0.1, 0.0};
    GoalMap gm{2, {0, 0, 1}};
    std::vector<double> command(static_cast<std::size_t>(3) * 3 * 2, 0.0);
    auto set = [&](int s, int h, int g, double v) {
        command[static_cast<std::size_t>((s * 3 + h)) * 2 + g] = v;
    };
    for (int s = 0; s < 3; ++s) {
        set(s, 1, 0, 0.4);
        set(s, 1, 1, 0.3);
        set(s, 2, 0, 0.2);
        set(s, 2, 1, 0.1);
    }
    return eudrl::build_ce(std::move(base), std::move(gm), 2, std::move(command));
}

// ---- deterministic-environment enumeration ---------------------------------
//
// All deterministic kernels x all surjective goal maps for |S| <= max_states,
// |A| <= max_actions, N <= max_n, with uniform mu0 and uniform commands over
// horizons 1..N and goals. Only environments whose optimal value is 1 at every
// reachable command are returned: those are the ones relabeling iteration must
// solve exactly.
inline std::vector<CommandExtension> enumerate_solvable_deterministic_ces(int max_states = 3,
                                                                          int max_actions = 2,
                                                                          int max_n = 2) {
    std::vector<CommandExtension> out;
    for (int S = 1; S <= max_states; ++S)
        for (int A = 1; A <= max_actions; ++A)
            for (int N = 1; N <= max_n; ++N) {
                const int cells = S * A;
                long kernels = 1;
                for (int i = 0; i < cells; ++i) kernels *= S;
                for (long k = 0; k < kernels; ++k) {
                    BaseMdp base;
                    base.n_states = S;
                    base.n_actions = A;
                    base.p.assign(static_cast<std::size_t>(S) * A * S, 0.0);
                    long rem = k;
                    for (int s = 0; s < S; ++s)
                        for (int a = 0; a < A; ++a) {
                            base.transition(s, a, static_cast<int>(rem % S)) = 1.0;
                            rem /= S;
                        }
                    base.mu0.assign(S, 1.0 / S);
                    for (int G = 1; G <= S; ++G) {
                        long maps = 1;
                        for (int i = 0; i < S; ++i) maps *= G;
                        for (long m = 0; m < maps; ++m) {
                            GoalMap gm;
                            gm.n_goals = G;
                            gm.rho.resize(S);
                            long mm = m;
                            std::vector<bool> hit(G, false);
                            for (int s = 0; s < S; ++s) {
                                gm.rho[s] = static_cast<int>(mm % G);
                                hit[gm.rho[s]] = true;
                                mm /= G;
                            }
                            bool surjective = true;
                            for (bool b : hit) surjective = surjective && b;
                            if (!surjective) continue;
                            std::vector<double> command(
                                static_cast<std::size_t>(S) * (N + 1) * G, 0.0);
                            const double u = 1.0 / (N * G);
                            for (int s = 0; s < S; ++s)
                                for (int h = 1; h <= N; ++h)
                                    for (int g = 0; g < G; ++g)
                                        command[static_cast<std::size_t>((s * (N + 1) + h)) * G +
                                                g] = u;
                            CommandExtension ce =
                                eudrl::build_ce(base, std::move(gm), N, std::move(command));
                            const auto opt = eudrl::optimal(ce);
                            bool solvable = true;
                            for (int idx : eudrl::metric_state_set(ce))
                                solvable = solvable && opt.values.v[idx] == 1.0;
                            if (solvable) out.push_back(std::move(ce));
                        }
                    }
                }
            }
    return out;
}

}  // namespace testsup
