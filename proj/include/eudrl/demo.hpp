#pragma once

#include <stdexcept>
#include <vector>

#include "eudrl/policy.hpp"

// Two-state, two-action, horizon-1 environment on which exact relabeling
// iteration provably settles away from the optimum for alpha in (0.5, 1):
// from state 0, action a keeps the state with probability alpha if a = 0 and
// 1 - alpha if a = 1; state 1 is a sink; the goal is announced uniformly.
// Every quantity of interest has a closed form in alpha, which makes the
// family the golden reference for the iteration and metrics code.

namespace eudrl::demo {

// alpha in [0.5, 1].
inline CommandExtension build(double alpha) {
    if (alpha < 0.5 || alpha > 1.0)
        throw std::invalid_argument("demo::build: alpha must lie in [0.5, 1]");
    BaseMdp base;
    base.n_states = 2;
    base.n_actions = 2;
    base.p.assign(8, 0.0);
    base.transition(0, 0, 0) = alpha;
    base.transition(0, 0, 1) = 1.0 - alpha;
    base.transition(0, 1, 0) = 1.0 - alpha;
    base.transition(0, 1, 1) = alpha;
    base.transition(1, 0, 1) = 1.0;  // sink regardless of action
    base.transition(1, 1, 1) = 1.0;
    base.mu0 = {1.0, 0.0};
    GoalMap gm{2, {0, 1}};
    // [s][h in {0,1}][g]: all episodes have horizon 1, goal uniform.
    std::vector<double> command = {0.0, 0.0, 0.5, 0.5,
                                   0.0, 0.0, 0.5, 0.5};
    return build_ce(std::move(base), std::move(gm), 1, std::move(command));
}

// The iteration's attractor: pi(a | 0, 1, g) = p_T(g | 0, a). Rows at the sink
// state are never realized and are filled uniformly.
inline Policy fixed_point(double alpha) {
    if (alpha < 0.5 || alpha > 1.0)
        throw std::invalid_argument("demo::fixed_point: alpha must lie in [0.5, 1]");
    Policy pi;
    pi.n_states = 2;
    pi.max_horizon = 1;
    pi.n_goals = 2;
    pi.n_actions = 2;
    pi.probs = {alpha, 1.0 - alpha,  // (s=0, g=0)
                1.0 - alpha, alpha,  // (s=0, g=1)
                0.5, 0.5, 0.5, 0.5};
    return pi;
}

// The symmetric optimum pi(a | 0, 1, g) = 1{a = g}; at alpha = 0.5 this is the
// tie-break under which one iteration step maps it to the uniform fixed point.
inline Policy optimal_policy(double alpha) {
    if (alpha < 0.5 || alpha > 1.0)
        throw std::invalid_argument("demo::optimal_policy: alpha must lie in [0.5, 1]");
    Policy pi;
    pi.n_states = 2;
    pi.max_horizon = 1;
    pi.n_goals = 2;
    pi.n_actions = 2;
    pi.probs = {1.0, 0.0, 0.0, 1.0, 0.5, 0.5, 0.5, 0.5};
    return pi;
}

}  // namespace eudrl::demo
