#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "eudrl/policy.hpp"

namespace eudrl {

// Tie tolerance for argmax sets in optimal planning.
inline constexpr double kArgmaxTol = 1e-12;

// State/action values over transient extended states, indexed like Policy
// rows. In a goal-conditioned extension the value of (s, h, g) is exactly the
// probability of landing on a state realizing g after h more steps, so every
// entry lies in [0, 1].
struct ValueTables {
    int n_states = 0;
    int max_horizon = 0;
    int n_goals = 0;
    int n_actions = 0;
    std::vector<double> v;  // [s][h-1][g]
    std::vector<double> q;  // [s][h-1][g][a]

    std::size_t vidx(int s, int h, int g) const {
        return static_cast<std::size_t>((s * max_horizon + (h - 1)) * n_goals + g);
    }
    double v_at(int s, int h, int g) const { return v[vidx(s, h, g)]; }
    double& v_at(int s, int h, int g) { return v[vidx(s, h, g)]; }
    double q_at(int s, int h, int g, int a) const { return q[vidx(s, h, g) * n_actions + a]; }
    double& q_at(int s, int h, int g, int a) { return q[vidx(s, h, g) * n_actions + a]; }
};

inline ValueTables make_value_tables(const CommandExtension& ce) {
    ValueTables t;
    t.n_states = ce.n_states();
    t.max_horizon = ce.max_horizon;
    t.n_goals = ce.n_goals();
    t.n_actions = ce.n_actions();
    t.v.assign(static_cast<std::size_t>(ce.transient_count()), 0.0);
    t.q.assign(static_cast<std::size_t>(ce.transient_count()) * ce.n_actions(), 0.0);
    return t;
}

namespace detail {
// Per-goal landing mass after the last step: on h = 1 the action value is the
// one-step probability of hitting rho^{-1}(g), independent of the policy.
inline void q_backup(const CommandExtension& ce, const ValueTables& t, int s, int h, int g,
                     std::vector<double>& out) {
    const int A = ce.n_actions();
    const int S = ce.n_states();
    out.assign(A, 0.0);
    if (h == 1) {
        for (int a = 0; a < A; ++a) {
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                if (ce.goal_map.rho[s2] == g) acc += ce.base.transition(s, a, s2);
            out[a] = acc;
        }
    } else {
        for (int a = 0; a < A; ++a) {
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                acc += ce.base.transition(s, a, s2) * t.v_at(s2, h - 1, g);
            out[a] = acc;
        }
    }
}
}  // namespace detail

// Policy evaluation by backward induction over the horizon.
inline ValueTables evaluate(const CommandExtension& ce, const Policy& pi) {
    ValueTables t = make_value_tables(ce);
    std::vector<double> qrow;
    for (int h = 1; h <= ce.max_horizon; ++h)
        for (int s = 0; s < ce.n_states(); ++s)
            for (int g = 0; g < ce.n_goals(); ++g) {
                detail::q_backup(ce, t, s, h, g, qrow);
                double v = 0.0;
                for (int a = 0; a < ce.n_actions(); ++a) {
                    t.q_at(s, h, g, a) = qrow[a];
                    v += pi.prob(s, h, g, a) * qrow[a];
                }
                t.v_at(s, h, g) = v;
            }
    return t;
}

// Optimal values plus the per-state argmax action sets (ties within
// kArgmaxTol, indices ascending).
struct OptimalTables {
    ValueTables values;
    std::vector<std::vector<int>> argmax;  // by transient index

    const std::vector<int>& argmax_at(const CommandExtension& ce, int s, int h, int g) const {
        return argmax[ce.transient_index(s, h, g)];
    }
};

inline OptimalTables optimal(const CommandExtension& ce) {
    OptimalTables opt;
    opt.values = make_value_tables(ce);
    opt.argmax.resize(static_cast<std::size_t>(ce.transient_count()));
    std::vector<double> qrow;
    for (int h = 1; h <= ce.max_horizon; ++h)
        for (int s = 0; s < ce.n_states(); ++s)
            for (int g = 0; g < ce.n_goals(); ++g) {
                detail::q_backup(ce, opt.values, s, h, g, qrow);
                double best = 0.0;
                for (int a = 0; a < ce.n_actions(); ++a) {
                    opt.values.q_at(s, h, g, a) = qrow[a];
                    best = std::max(best, qrow[a]);
                }
                opt.values.v_at(s, h, g) = best;
                auto& ties = opt.argmax[ce.transient_index(s, h, g)];
                for (int a = 0; a < ce.n_actions(); ++a)
                    if (qrow[a] >= best - kArgmaxTol) ties.push_back(a);
            }
    return opt;
}

// Landing distribution over goals, `steps` transitions after taking
// first_action in `start`: the first transition uses first_action, subsequent
// actions are drawn from the policy conditioned on the start's command
// counting down (horizon start.h - i at step i, goal start.g throughout).
// Requires 1 <= steps <= start.h.
inline std::vector<double> goal_reach_all(const CommandExtension& ce, const Policy& pi,
                                          const CeState& start, int first_action, int steps) {
    if (!start.transient() || start.h > ce.max_horizon)
        throw std::invalid_argument("goal_reach: start must be transient with h <= N");
    if (steps < 1 || steps > start.h)
        throw std::invalid_argument("goal_reach: steps must satisfy 1 <= steps <= start h");
    const int S = ce.n_states();
    const int A = ce.n_actions();
    std::vector<double> dist(S, 0.0), next(S, 0.0);
    for (int s2 = 0; s2 < S; ++s2) dist[s2] = ce.base.transition(start.s, first_action, s2);
    for (int i = 1; i < steps; ++i) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < S; ++s) {
            if (dist[s] == 0.0) continue;
            for (int a = 0; a < A; ++a) {
                const double w = dist[s] * pi.prob(s, start.h - i, start.g, a);
                if (w == 0.0) continue;
                for (int s2 = 0; s2 < S; ++s2) next[s2] += w * ce.base.transition(s, a, s2);
            }
        }
        dist.swap(next);
    }
    std::vector<double> by_goal(ce.n_goals(), 0.0);
    for (int s = 0; s < S; ++s) by_goal[ce.goal_map.rho[s]] += dist[s];
    return by_goal;
}

inline double goal_reach(const CommandExtension& ce, const Policy& pi, const CeState& start,
                         int first_action, int steps, int target_goal) {
    return goal_reach_all(ce, pi, start, first_action, steps)[target_goal];
}

// Expected return of the extension under pi: initial mass times state value.
inline double j_objective(const CommandExtension& ce, const ValueTables& values) {
    double j = 0.0;
    for (int s = 0; s < ce.n_states(); ++s)
        for (int h = 1; h <= ce.max_horizon; ++h)
            for (int g = 0; g < ce.n_goals(); ++g) {
                const double m = ce.initial_mass(s, h, g);
                if (m > 0.0) j += m * values.v_at(s, h, g);
            }
    return j;
}

inline double j_objective(const CommandExtension& ce, const Policy& pi) {
    return j_objective(ce, evaluate(ce, pi));
}

}  // namespace eudrl
