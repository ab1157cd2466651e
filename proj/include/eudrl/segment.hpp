#pragma once

#include <optional>
#include <vector>

#include "eudrl/dp.hpp"
#include "eudrl/policy.hpp"
#include "eudrl/random.hpp"

// Trajectory and segment machinery for hindsight relabeling.
//
// Episodes are padded to a fixed length N: after absorption (step h0) the
// state repeats and the action is the policy's fixed absorbing action, so all
// trajectories expose N+1 states and N actions regardless of their true
// length. Training segments are contiguous windows of such trajectories that
// start strictly before absorption and end no later than it; a segment
// remembers the remaining horizon and intended goal at its start, and its
// endpoint supplies the relabeled goal.

namespace eudrl {

struct Trajectory {
    int length = 0;  // equals the initial horizon h0
    int h0 = 0;
    int g0 = 0;
    std::vector<int> states;   // N+1 entries
    std::vector<int> actions;  // N entries
};

struct Segment {
    int length = 0;  // l >= 1
    int s0 = 0;
    int h0 = 0;  // remaining horizon at the segment start; l <= h0
    int g0 = 0;  // intended goal at the segment start
    std::vector<int> actions;  // a_0 .. a_{l-1}
    std::vector<int> states;   // s_1 .. s_l
    int final_state() const { return states.back(); }
};

// nu[t][s][h][g] = occupancy of extended state (s,h,g) at time t, t = 0..N.
struct VisitationTensor {
    int n_states = 0;
    int max_horizon = 0;
    int n_goals = 0;
    std::vector<double> nu;

    std::size_t idx(int t, int s, int h, int g) const {
        return static_cast<std::size_t>(((t * n_states + s) * (max_horizon + 1) + h)) * n_goals +
               g;
    }
    double at(int t, int s, int h, int g) const { return nu[idx(t, s, h, g)]; }
    double& at(int t, int s, int h, int g) { return nu[idx(t, s, h, g)]; }
};

// Forward pass of the extension's state marginals under pi. Each time slice
// sums to one; mass drains from horizon h to h-1 and parks at h = 0.
inline VisitationTensor visitation(const CommandExtension& ce, const Policy& pi) {
    const int S = ce.n_states(), A = ce.n_actions(), G = ce.n_goals(), N = ce.max_horizon;
    VisitationTensor vt{S, N, G, {}};
    vt.nu.assign(static_cast<std::size_t>(N + 1) * S * (N + 1) * G, 0.0);
    for (int s = 0; s < S; ++s)
        for (int h = 1; h <= N; ++h)
            for (int g = 0; g < G; ++g) vt.at(0, s, h, g) = ce.initial_mass(s, h, g);
    for (int t = 0; t < N; ++t) {
        for (int s = 0; s < S; ++s)
            for (int g = 0; g < G; ++g) {
                vt.at(t + 1, s, 0, g) += vt.at(t, s, 0, g);  // absorbed mass stays put
                for (int h = 1; h <= N; ++h) {
                    const double m = vt.at(t, s, h, g);
                    if (m == 0.0) continue;
                    for (int a = 0; a < A; ++a) {
                        const double w = m * pi.prob(s, h, g, a);
                        if (w == 0.0) continue;
                        for (int s2 = 0; s2 < S; ++s2)
                            vt.at(t + 1, s2, h - 1, g) += w * ce.base.transition(s, a, s2);
                    }
                }
            }
    }
    return vt;
}

inline Trajectory sample_trajectory(const CommandExtension& ce, const Policy& pi,
                                    std::mt19937_64& rng) {
    const int N = ce.max_horizon, G = ce.n_goals();
    Trajectory tr;
    const int s0 = sample_index(ce.base.mu0, rng);
    // (h0, g0) drawn jointly from the command row of s0; the h = 0 slice is
    // zero by construction so the draw always yields h0 >= 1.
    std::span<const double> command_row{
        ce.initial_command.data() + static_cast<std::size_t>(s0) * (N + 1) * G,
        static_cast<std::size_t>(N + 1) * G};
    const int cell = sample_index(command_row, rng);
    tr.h0 = cell / G;
    tr.g0 = cell % G;
    tr.length = tr.h0;
    tr.states.assign(N + 1, 0);
    tr.actions.assign(N, pi.fixed_absorbing_action);
    tr.states[0] = s0;
    for (int t = 0; t < tr.h0; ++t) {
        const int a = sample_index(pi.row(tr.states[t], tr.h0 - t, tr.g0), rng);
        tr.actions[t] = a;
        tr.states[t + 1] = sample_index(ce.base.row(tr.states[t], a), rng);
    }
    for (int t = tr.h0; t < N; ++t) tr.states[t + 1] = tr.states[tr.h0];
    return tr;
}

// One proposal of the uniform-grid rejection scheme: (t, l) uniform over
// {l >= 1, t + l <= N}, accepted iff the window starts before absorption and
// fits inside the live part of the trajectory (l <= remaining horizon at t).
// Rejection is a normal outcome; callers loop.
inline std::optional<Segment> sample_segment(const Trajectory& tr, int max_horizon,
                                             std::mt19937_64& rng) {
    const int cells = max_horizon * (max_horizon + 1) / 2;
    int k = static_cast<int>(rng() % static_cast<std::uint64_t>(cells));
    int l = 1;
    while (k >= max_horizon - (l - 1)) {  // row l has N - l + 1 valid offsets
        k -= max_horizon - (l - 1);
        ++l;
    }
    const int t = k;
    const int h_t = tr.h0 > t ? tr.h0 - t : 0;
    if (l > h_t) return std::nullopt;
    Segment seg;
    seg.length = l;
    seg.s0 = tr.states[t];
    seg.h0 = h_t;
    seg.g0 = tr.g0;
    seg.actions.assign(tr.actions.begin() + t, tr.actions.begin() + t + l);
    seg.states.assign(tr.states.begin() + t + 1, tr.states.begin() + t + l + 1);
    return seg;
}

// Draws one segment exactly from the stationary segment law: every proposal
// gets a fresh trajectory, so acceptance never conditions on the trajectory
// that produced a rejected window. (Looping proposals within one trajectory
// would overweight short episodes, which offer fewer valid windows.)
inline Segment draw_segment(const CommandExtension& ce, const Policy& pi, std::mt19937_64& rng) {
    while (true) {
        const Trajectory tr = sample_trajectory(ce, pi, rng);
        if (auto seg = sample_segment(tr, ce.max_horizon, rng)) return *seg;
    }
}

// Posterior over the command (h', g') held at a segment start, given the start
// state s and segment length l: proportional to visitation of (s, h', g')
// summed over start times t <= N - l, restricted to h' >= l. Undefined when no
// mass qualifies.
struct StartWeights {
    bool defined = false;
    int max_horizon = 0;
    int n_goals = 0;
    std::vector<double> w;  // [h'-1][g']

    double at(int h, int g) const { return w[static_cast<std::size_t>(h - 1) * n_goals + g]; }
};

inline StartWeights start_weights(const CommandExtension& ce, const VisitationTensor& vt, int s,
                                  int l) {
    const int N = ce.max_horizon, G = ce.n_goals();
    StartWeights sw{false, N, G, std::vector<double>(static_cast<std::size_t>(N) * G, 0.0)};
    double total = 0.0;
    for (int h = l; h <= N; ++h)
        for (int g = 0; g < G; ++g) {
            double acc = 0.0;
            for (int t = 0; t + l <= N; ++t) acc += vt.at(t, s, h, g);
            sw.w[static_cast<std::size_t>(h - 1) * G + g] = acc;
            total += acc;
        }
    if (total <= 0.0) return sw;
    for (double& v : sw.w) v /= total;
    sw.defined = true;
    return sw;
}

inline StartWeights start_weights(const CommandExtension& ce, const Policy& pi, int s, int l) {
    return start_weights(ce, visitation(ce, pi), s, l);
}

}  // namespace eudrl
