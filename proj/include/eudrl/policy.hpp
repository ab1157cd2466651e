#pragma once

#include <span>
#include <string>
#include <vector>

#include "eudrl/command_extension.hpp"

namespace eudrl {

// Stationary goal-conditioned policy, tabulated over transient extended states
// as [state][horizon 1..N][goal][action]. Absorbing states are not stored: on
// them the policy is the deterministic fixed_absorbing_action.
struct Policy {
    int n_states = 0;
    int max_horizon = 0;
    int n_goals = 0;
    int n_actions = 0;
    int fixed_absorbing_action = 0;
    std::vector<double> probs;

    std::size_t offset(int s, int h, int g) const {
        return static_cast<std::size_t>((s * max_horizon + (h - 1)) * n_goals + g) * n_actions;
    }
    double prob(int s, int h, int g, int a) const { return probs[offset(s, h, g) + a]; }
    std::span<double> row(int s, int h, int g) {
        return {probs.data() + offset(s, h, g), static_cast<std::size_t>(n_actions)};
    }
    std::span<const double> row(int s, int h, int g) const {
        return {probs.data() + offset(s, h, g), static_cast<std::size_t>(n_actions)};
    }
};

inline Policy make_policy_like(const CommandExtension& ce) {
    Policy pi;
    pi.n_states = ce.n_states();
    pi.max_horizon = ce.max_horizon;
    pi.n_goals = ce.n_goals();
    pi.n_actions = ce.n_actions();
    pi.probs.assign(static_cast<std::size_t>(ce.transient_count()) * ce.n_actions(), 0.0);
    return pi;
}

inline Policy uniform_policy(const CommandExtension& ce) {
    Policy pi = make_policy_like(ce);
    const double u = 1.0 / ce.n_actions();
    for (double& v : pi.probs) v = u;
    return pi;
}

inline ValidationReport validate(const Policy& pi) {
    auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
    if (pi.n_states <= 0 || pi.max_horizon <= 0 || pi.n_goals <= 0 || pi.n_actions <= 0)
        return fail("policy dimensions must be positive");
    if (pi.fixed_absorbing_action < 0 || pi.fixed_absorbing_action >= pi.n_actions)
        return fail("fixed_absorbing_action out of range");
    if (pi.probs.size() != static_cast<std::size_t>(pi.n_states) * pi.max_horizon * pi.n_goals *
                               pi.n_actions)
        return fail("policy table has wrong size");
    for (int s = 0; s < pi.n_states; ++s)
        for (int h = 1; h <= pi.max_horizon; ++h)
            for (int g = 0; g < pi.n_goals; ++g) {
                double sum = 0.0;
                for (int a = 0; a < pi.n_actions; ++a) {
                    const double v = pi.prob(s, h, g, a);
                    if (v < 0.0)
                        return fail("policy row (s=" + std::to_string(s) + ", h=" +
                                    std::to_string(h) + ", g=" + std::to_string(g) +
                                    ") has a negative entry");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > kProbTol)
                    return fail("policy row (s=" + std::to_string(s) + ", h=" +
                                std::to_string(h) + ", g=" + std::to_string(g) + ") sums to " +
                                std::to_string(sum));
            }
    return {};
}

}  // namespace eudrl
