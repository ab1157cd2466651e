#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "eudrl/mdp.hpp"

namespace eudrl {

// Surjective labeling of states by goals; rho[s] is the goal state s realizes.
struct GoalMap {
    int n_goals = 0;
    std::vector<int> rho;
};

// Extended state (s, h, g): base state, remaining horizon, intended goal.
// Absorbing exactly when h == 0.
struct CeState {
    int s = 0;
    int h = 0;
    int g = 0;
    bool transient() const { return h >= 1; }
    bool operator==(const CeState&) const = default;
};

// Goal-conditioned episodic extension of a base MDP. An episode starts at
// (s0, h0, g0) with s0 ~ mu0 and (h0, g0) ~ initial_command[s0]; the horizon
// counts down by one per step while the base state follows p_T and the goal
// component stays fixed. Reaching h == 0 absorbs; unit reward is paid on the
// absorbing transition iff the landing state realizes the intended goal.
//
// initial_command is [state][horizon][goal] with horizon indexed 0..N; the
// h = 0 slice must be all zeros (episodes of length zero are not allowed).
struct CommandExtension {
    BaseMdp base;
    GoalMap goal_map;
    int max_horizon = 0;  // N
    std::vector<double> initial_command;

    int n_states() const { return base.n_states; }
    int n_actions() const { return base.n_actions; }
    int n_goals() const { return goal_map.n_goals; }

    double initial_command_at(int s, int h, int g) const {
        return initial_command[static_cast<std::size_t>((s * (max_horizon + 1) + h)) * n_goals() +
                               g];
    }
    // Initial-state mass of the extension: P(S0=s, H0=h, G0=g).
    double initial_mass(int s, int h, int g) const {
        return base.mu0[s] * initial_command_at(s, h, g);
    }

    // Transient states (h >= 1) carry all tables; shared flat index.
    int transient_count() const { return n_states() * max_horizon * n_goals(); }
    int transient_index(int s, int h, int g) const {
        return (s * max_horizon + (h - 1)) * n_goals() + g;
    }
};

// Assembles and validates the extension. Throws std::invalid_argument naming
// the violated constraint: invalid base, non-surjective or out-of-range goal
// map, N < 1, wrong command shape, negative entries, mass on h0 = 0, or an
// unnormalized command row at a state with positive mu0.
inline CommandExtension build_ce(BaseMdp base, GoalMap goal_map, int max_horizon,
                                 std::vector<double> initial_command) {
    if (auto rep = validate(base); !rep.ok)
        throw std::invalid_argument("build_ce: invalid base MDP: " + rep.message);
    if (goal_map.n_goals <= 0) throw std::invalid_argument("build_ce: n_goals must be positive");
    if (goal_map.rho.size() != static_cast<std::size_t>(base.n_states))
        throw std::invalid_argument("build_ce: rho has wrong size for n_states");
    std::vector<bool> hit(goal_map.n_goals, false);
    for (int s = 0; s < base.n_states; ++s) {
        const int g = goal_map.rho[s];
        if (g < 0 || g >= goal_map.n_goals)
            throw std::invalid_argument("build_ce: rho[" + std::to_string(s) +
                                        "] out of range (" + std::to_string(g) + ")");
        hit[g] = true;
    }
    for (int g = 0; g < goal_map.n_goals; ++g)
        if (!hit[g])
            throw std::invalid_argument("build_ce: goal " + std::to_string(g) +
                                        " is not realized by any state");
    if (max_horizon < 1) throw std::invalid_argument("build_ce: max_horizon must be >= 1");
    const std::size_t want =
        static_cast<std::size_t>(base.n_states) * (max_horizon + 1) * goal_map.n_goals;
    if (initial_command.size() != want)
        throw std::invalid_argument(
            "build_ce: initial_command has wrong size; expected [n_states][N+1][n_goals]");

    CommandExtension ce{std::move(base), std::move(goal_map), max_horizon,
                        std::move(initial_command)};
    for (int s = 0; s < ce.n_states(); ++s) {
        double sum = 0.0;
        for (int h = 0; h <= max_horizon; ++h) {
            for (int g = 0; g < ce.n_goals(); ++g) {
                const double v = ce.initial_command_at(s, h, g);
                if (v < 0.0)
                    throw std::invalid_argument("build_ce: initial_command[s=" +
                                                std::to_string(s) + "][h=" + std::to_string(h) +
                                                "][g=" + std::to_string(g) + "] is negative");
                if (h == 0 && v != 0.0)
                    throw std::invalid_argument(
                        "build_ce: initial_command assigns mass to h0 = 0 at s=" +
                        std::to_string(s) + ", g=" + std::to_string(g));
                sum += v;
            }
        }
        if (ce.base.mu0[s] > 0.0 && std::abs(sum - 1.0) > kProbTol)
            throw std::invalid_argument("build_ce: initial_command row at s=" +
                                        std::to_string(s) + " sums to " + std::to_string(sum));
    }
    return ce;
}

// One-step transition probability of the extension. From a transient state the
// horizon must decrement and the goal must persist; anything else has
// probability zero. Absorbing states self-loop with probability one under the
// fixed action (the policy's designated absorbing action); querying them with
// any other action is a contract violation.
inline double ce_transition(const CommandExtension& ce, const CeState& from, int a,
                            const CeState& to, int fixed_absorbing_action = 0) {
    if (from.h == 0) {
        if (a != fixed_absorbing_action)
            throw std::invalid_argument(
                "ce_transition: absorbing states admit only the fixed action");
        return (to == from) ? 1.0 : 0.0;
    }
    if (to.h != from.h - 1 || to.g != from.g) return 0.0;
    return ce.base.transition(from.s, a, to.s);
}

// Reward of the (to <- from, a) transition: 1 on first absorption iff the
// landing base state realizes the intended goal. Argument order mirrors the
// kernel convention (destination first).
inline int ce_reward(const CeState& to, const CeState& from, int /*a*/, const GoalMap& goal_map) {
    if (from.h == 1 && to.h == 0 && goal_map.rho[to.s] == to.g) return 1;
    return 0;
}

}  // namespace eudrl
