#pragma once

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "eudrl/dp.hpp"
#include "eudrl/iteration.hpp"

namespace eudrl {

// Divergence certificate for a state with two goals whose horizon-1 optimal
// action sets are disjoint. At horizon 1 the goal-marginal action value is
// policy-independent (one-step landing mass), so the certificate depends only
// on the kernel. delta is the tightest bound with Q_g(a) >= (1 - delta) max_a'
// Q_g(a') for both goals; when delta < 1 the refit can never concentrate on
// either goal's argmax set, so iterates stay boundedly far from every optimal
// policy.
struct LemmaCertificate {
    int s = 0;
    int g0 = 0;
    int g1 = 0;
    std::vector<int> m0;  // argmax actions for g0
    std::vector<int> m1;  // argmax actions for g1
    double delta = 0.0;
    bool applicable = false;  // delta < 1
};

inline std::vector<LemmaCertificate> check_lemma(const CommandExtension& ce) {
    const int S = ce.n_states(), A = ce.n_actions(), G = ce.n_goals();
    std::vector<LemmaCertificate> certs;
    std::vector<double> q(static_cast<std::size_t>(G) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        std::fill(q.begin(), q.end(), 0.0);
        for (int a = 0; a < A; ++a)
            for (int s2 = 0; s2 < S; ++s2)
                q[static_cast<std::size_t>(ce.goal_map.rho[s2]) * A + a] +=
                    ce.base.transition(s, a, s2);
        auto q_at = [&](int g, int a) { return q[static_cast<std::size_t>(g) * A + a]; };
        for (int g0 = 0; g0 < G; ++g0)
            for (int g1 = g0 + 1; g1 < G; ++g1) {
                double max0 = 0.0, max1 = 0.0, min0 = 1.0, min1 = 1.0;
                for (int a = 0; a < A; ++a) {
                    max0 = std::max(max0, q_at(g0, a));
                    max1 = std::max(max1, q_at(g1, a));
                    min0 = std::min(min0, q_at(g0, a));
                    min1 = std::min(min1, q_at(g1, a));
                }
                if (max0 <= 0.0 || max1 <= 0.0) continue;  // goal unreachable at horizon 1
                LemmaCertificate cert{s, g0, g1, {}, {}, 0.0, false};
                for (int a = 0; a < A; ++a) {
                    if (q_at(g0, a) >= max0 - kArgmaxTol) cert.m0.push_back(a);
                    if (q_at(g1, a) >= max1 - kArgmaxTol) cert.m1.push_back(a);
                }
                bool disjoint = true;
                for (int a0 : cert.m0)
                    for (int a1 : cert.m1)
                        if (a0 == a1) disjoint = false;
                if (!disjoint) continue;
                cert.delta = std::max(1.0 - min0 / max0, 1.0 - min1 / max1);
                cert.applicable = cert.delta < 1.0;
                certs.push_back(std::move(cert));
            }
    }
    return certs;
}

// Transient extended states reachable from the initial distribution when every
// action has positive probability: the closure of the initial command support
// under (s,h,g) -> (s',h-1,g) for p_T(s'|s,a) > 0, intersected with h >= 1.
// Returned as ascending transient indices; this is the state set every
// distance metric below is evaluated on.
inline std::vector<int> metric_state_set(const CommandExtension& ce) {
    const int S = ce.n_states(), A = ce.n_actions(), G = ce.n_goals(), N = ce.max_horizon;
    std::vector<std::uint8_t> in(static_cast<std::size_t>(ce.transient_count()), 0);
    std::deque<CeState> frontier;
    for (int s = 0; s < S; ++s)
        for (int h = 1; h <= N; ++h)
            for (int g = 0; g < G; ++g)
                if (ce.initial_mass(s, h, g) > 0.0) {
                    in[ce.transient_index(s, h, g)] = 1;
                    frontier.push_back({s, h, g});
                }
    while (!frontier.empty()) {
        const CeState cur = frontier.front();
        frontier.pop_front();
        if (cur.h < 2) continue;  // successors are absorbing
        for (int s2 = 0; s2 < S; ++s2) {
            bool reachable = false;
            for (int a = 0; a < A && !reachable; ++a)
                reachable = ce.base.transition(cur.s, a, s2) > 0.0;
            if (!reachable) continue;
            const int idx = ce.transient_index(s2, cur.h - 1, cur.g);
            if (!in[idx]) {
                in[idx] = 1;
                frontier.push_back({s2, cur.h - 1, cur.g});
            }
        }
    }
    std::vector<int> set;
    for (int i = 0; i < ce.transient_count(); ++i)
        if (in[i]) set.push_back(i);
    return set;
}

// Deterministic reference optimum: the lowest-index action of each argmax set.
inline Policy reference_optimal_policy(const CommandExtension& ce, const OptimalTables& opt) {
    Policy pi = make_policy_like(ce);
    for (int s = 0; s < ce.n_states(); ++s)
        for (int h = 1; h <= ce.max_horizon; ++h)
            for (int g = 0; g < ce.n_goals(); ++g)
                pi.row(s, h, g)[opt.argmax_at(ce, s, h, g).front()] = 1.0;
    return pi;
}

inline Policy reference_optimal_policy(const CommandExtension& ce) {
    return reference_optimal_policy(ce, optimal(ce));
}

// Root-mean-square state-value error over the given transient indices
// (unweighted mean).
inline double rmsve(const ValueTables& values, const ValueTables& reference,
                    const std::vector<int>& state_set) {
    if (state_set.empty()) throw std::invalid_argument("rmsve: empty state set");
    double acc = 0.0;
    for (int idx : state_set) {
        const double d = values.v[idx] - reference.v[idx];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(state_set.size()));
}

// Variant weighting the squared errors by a normalized nonnegative weight per
// state-set entry (e.g. the initial command distribution).
inline double weighted_rmsve(const ValueTables& values, const ValueTables& reference,
                             const std::vector<int>& state_set,
                             const std::vector<double>& weights) {
    if (state_set.empty()) throw std::invalid_argument("weighted_rmsve: empty state set");
    if (weights.size() != state_set.size())
        throw std::invalid_argument("weighted_rmsve: one weight per state required");
    double acc = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < state_set.size(); ++k) {
        const double d = values.v[state_set[k]] - reference.v[state_set[k]];
        acc += weights[k] * d * d;
        mass += weights[k];
    }
    if (mass <= 0.0) throw std::invalid_argument("weighted_rmsve: weights sum to zero");
    return std::sqrt(acc / mass);
}

// Max-norm policy distance over the given transient indices.
inline double sup_dist(const Policy& pi, const Policy& reference,
                       const std::vector<int>& state_set) {
    if (state_set.empty()) throw std::invalid_argument("sup_dist: empty state set");
    double sup = 0.0;
    for (int idx : state_set)
        for (int a = 0; a < pi.n_actions; ++a) {
            const std::size_t k = static_cast<std::size_t>(idx) * pi.n_actions + a;
            sup = std::max(sup, std::abs(pi.probs[k] - reference.probs[k]));
        }
    return sup;
}

struct MetricsRow {
    int n = 0;
    double rmsve = 0.0;
    double sup_dist = 0.0;
    double j = 0.0;
};

// Precomputed reference data for per-iteration metrics.
struct MetricsContext {
    OptimalTables star;
    Policy pi_star;
    std::vector<int> state_set;

    static MetricsContext build(const CommandExtension& ce) {
        MetricsContext ctx;
        ctx.star = optimal(ce);
        ctx.pi_star = reference_optimal_policy(ce, ctx.star);
        ctx.state_set = metric_state_set(ce);
        return ctx;
    }

    MetricsRow row(const CommandExtension& ce, int n, const Policy& pi) const {
        const ValueTables values = evaluate(ce, pi);
        return {n, rmsve(values, star.values, state_set), sup_dist(pi, pi_star, state_set),
                j_objective(ce, values)};
    }
};

inline std::vector<MetricsRow> run_with_metrics(const CommandExtension& ce, const Policy& pi0,
                                                const RunParams& params,
                                                const MetricsContext& ctx) {
    std::vector<MetricsRow> rows;
    rows.reserve(static_cast<std::size_t>(params.iterations) + 1);
    run(ce, pi0, params,
        [&](int n, const Policy& pi) { rows.push_back(ctx.row(ce, n, pi)); });
    return rows;
}

inline std::vector<MetricsRow> run_with_metrics(const CommandExtension& ce, const Policy& pi0,
                                                const RunParams& params) {
    return run_with_metrics(ce, pi0, params, MetricsContext::build(ce));
}

}  // namespace eudrl
