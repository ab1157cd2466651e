#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eudrl/random.hpp"

namespace eudrl {

// Tolerance for "this row is a probability distribution" checks.
inline constexpr double kProbTol = 1e-9;

// Finite MDP with tabular dynamics. p is the transition kernel flattened as
// [state][action][next state]; mu0 is the initial state distribution. Rewards
// live entirely in the goal-conditioned extension built on top, so none are
// stored here.
struct BaseMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> p;
    std::vector<double> mu0;

    double transition(int s, int a, int s2) const {
        return p[static_cast<std::size_t>((s * n_actions + a)) * n_states + s2];
    }
    double& transition(int s, int a, int s2) {
        return p[static_cast<std::size_t>((s * n_actions + a)) * n_states + s2];
    }
    std::span<const double> row(int s, int a) const {
        return {p.data() + static_cast<std::size_t>((s * n_actions + a)) * n_states,
                static_cast<std::size_t>(n_states)};
    }
};

struct ValidationReport {
    bool ok = true;
    std::string message;  // names the first violation found
};

// Checks shapes, nonnegativity, and row normalization (tolerance kProbTol).
// The report names the first offending row and its sum.
inline ValidationReport validate(const BaseMdp& mdp) {
    auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
    if (mdp.n_states <= 0 || mdp.n_actions <= 0)
        return fail("state and action counts must be positive");
    if (mdp.p.size() != static_cast<std::size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states)
        return fail("p_T has wrong size for (n_states, n_actions)");
    if (mdp.mu0.size() != static_cast<std::size_t>(mdp.n_states))
        return fail("mu0 has wrong size for n_states");
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) {
                const double v = mdp.transition(s, a, s2);
                if (v < 0.0)
                    return fail("p_T[s=" + std::to_string(s) + "][a=" + std::to_string(a) +
                                "][s'=" + std::to_string(s2) + "] is negative (" +
                                std::to_string(v) + ")");
                sum += v;
            }
            if (std::abs(sum - 1.0) > kProbTol)
                return fail("p_T row (s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                            ") sums to " + std::to_string(sum));
        }
    }
    double mass = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        if (mdp.mu0[s] < 0.0)
            return fail("mu0[" + std::to_string(s) + "] is negative (" +
                        std::to_string(mdp.mu0[s]) + ")");
        mass += mdp.mu0[s];
    }
    if (std::abs(mass - 1.0) > kProbTol)
        return fail("mu0 sums to " + std::to_string(mass));
    return {};
}

// Random instance with kernel rows and mu0 drawn from flat Dirichlets.
// Pure in (n_states, n_actions, seed): the same seed reproduces the same
// instance bit for bit.
inline BaseMdp random_mdp(int n_states, int n_actions, std::uint64_t seed) {
    if (n_states <= 0 || n_actions <= 0)
        throw std::invalid_argument("random_mdp: sizes must be positive");
    BaseMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = n_actions;
    mdp.p.resize(static_cast<std::size_t>(n_states) * n_actions * n_states);
    mdp.mu0.resize(n_states);
    auto rng = make_rng(seed, 0x6d6470 /* stream tag */);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            dirichlet_row({&mdp.transition(s, a, 0), static_cast<std::size_t>(n_states)}, rng);
    dirichlet_row(mdp.mu0, rng);
    return mdp;
}

}  // namespace eudrl
