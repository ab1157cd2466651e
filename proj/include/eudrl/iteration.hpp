#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "eudrl/segment.hpp"

// Policy iteration by hindsight relabeling. Each step refits the policy at
// command (s, h, g) to the conditional law of the first action of segments
// that start at s, have length h, and end on a state realizing g. exact_step
// computes that conditional in closed form from the current policy's segment
// law; sampled_step estimates it from relabeled rollouts. Commands the current
// policy never realizes keep their previous rows (carry-over), in both modes.

namespace eudrl {

// Goal-marginal policy at (s, h): current policy rows averaged under the
// start-weight posterior. Rows where the posterior is undefined are flagged.
struct AveragePolicy {
    int n_states = 0;
    int max_horizon = 0;
    int n_actions = 0;
    std::vector<double> probs;          // [s][h-1][a]
    std::vector<std::uint8_t> defined;  // [s][h-1]

    std::size_t ridx(int s, int h) const {
        return static_cast<std::size_t>(s) * max_horizon + (h - 1);
    }
    double at(int s, int h, int a) const { return probs[ridx(s, h) * n_actions + a]; }
    bool is_defined(int s, int h) const { return defined[ridx(s, h)] != 0; }
};

inline AveragePolicy average_policy(const CommandExtension& ce, const Policy& pi,
                                    const VisitationTensor& vt) {
    const int S = ce.n_states(), A = ce.n_actions(), G = ce.n_goals(), N = ce.max_horizon;
    AveragePolicy ap{S, N, A,
                     std::vector<double>(static_cast<std::size_t>(S) * N * A, 0.0),
                     std::vector<std::uint8_t>(static_cast<std::size_t>(S) * N, 0)};
    for (int s = 0; s < S; ++s)
        for (int h = 1; h <= N; ++h) {
            const StartWeights sw = start_weights(ce, vt, s, h);
            if (!sw.defined) continue;
            ap.defined[ap.ridx(s, h)] = 1;
            for (int hp = h; hp <= N; ++hp)
                for (int g = 0; g < G; ++g) {
                    const double w = sw.at(hp, g);
                    if (w == 0.0) continue;
                    for (int a = 0; a < A; ++a)
                        ap.probs[ap.ridx(s, h) * A + a] += w * pi.prob(s, hp, g, a);
                }
        }
    return ap;
}

inline AveragePolicy average_policy(const CommandExtension& ce, const Policy& pi) {
    return average_policy(ce, pi, visitation(ce, pi));
}

// Goal-marginal action value: probability that a segment of length h starting
// at s with first action a ends on a state realizing g, with the start command
// integrated out (posterior reweighted by the chance of picking a). Undefined
// when the posterior is empty or a has zero marginal probability.
inline std::optional<double> average_q(const CommandExtension& ce, const Policy& pi,
                                       const VisitationTensor& vt, int s, int h, int a, int g) {
    const StartWeights sw = start_weights(ce, vt, s, h);
    if (!sw.defined) return std::nullopt;
    double denom = 0.0, acc = 0.0;
    for (int hp = h; hp <= ce.max_horizon; ++hp)
        for (int gp = 0; gp < ce.n_goals(); ++gp) {
            const double w = sw.at(hp, gp) * pi.prob(s, hp, gp, a);
            if (w == 0.0) continue;
            denom += w;
            acc += w * goal_reach(ce, pi, {s, hp, gp}, a, h, g);
        }
    if (denom <= 0.0) return std::nullopt;
    return acc / denom;
}

inline std::optional<double> average_q(const CommandExtension& ce, const Policy& pi, int s,
                                       int h, int a, int g) {
    return average_q(ce, pi, visitation(ce, pi), s, h, a, g);
}

// Full goal-marginal value table; defined is per (s, h, a).
struct AverageQ {
    int n_states = 0;
    int max_horizon = 0;
    int n_goals = 0;
    int n_actions = 0;
    std::vector<double> values;         // [s][h-1][g][a]
    std::vector<std::uint8_t> defined;  // [s][h-1][a]

    double at(int s, int h, int g, int a) const {
        return values[static_cast<std::size_t>((s * max_horizon + (h - 1)) * n_goals + g) *
                          n_actions +
                      a];
    }
    bool is_defined(int s, int h, int a) const {
        return defined[static_cast<std::size_t>(s * max_horizon + (h - 1)) * n_actions + a] != 0;
    }
};

inline AverageQ average_q_table(const CommandExtension& ce, const Policy& pi,
                                const VisitationTensor& vt) {
    const int S = ce.n_states(), A = ce.n_actions(), G = ce.n_goals(), N = ce.max_horizon;
    AverageQ aq{S, N, G, A,
                std::vector<double>(static_cast<std::size_t>(S) * N * G * A, 0.0),
                std::vector<std::uint8_t>(static_cast<std::size_t>(S) * N * A, 0)};
    std::vector<double> denom(A);
    for (int s = 0; s < S; ++s)
        for (int h = 1; h <= N; ++h) {
            const StartWeights sw = start_weights(ce, vt, s, h);
            if (!sw.defined) continue;
            std::fill(denom.begin(), denom.end(), 0.0);
            for (int hp = h; hp <= N; ++hp)
                for (int gp = 0; gp < G; ++gp) {
                    const double w0 = sw.at(hp, gp);
                    if (w0 == 0.0) continue;
                    for (int a = 0; a < A; ++a) {
                        const double w = w0 * pi.prob(s, hp, gp, a);
                        if (w == 0.0) continue;
                        denom[a] += w;
                        const auto reach = goal_reach_all(ce, pi, {s, hp, gp}, a, h);
                        for (int g = 0; g < G; ++g)
                            aq.values[static_cast<std::size_t>((s * N + (h - 1)) * G + g) * A +
                                      a] += w * reach[g];
                    }
                }
            for (int a = 0; a < A; ++a) {
                if (denom[a] <= 0.0) continue;
                aq.defined[static_cast<std::size_t>(s * N + (h - 1)) * A + a] = 1;
                for (int g = 0; g < G; ++g)
                    aq.values[static_cast<std::size_t>((s * N + (h - 1)) * G + g) * A + a] /=
                        denom[a];
            }
        }
    return aq;
}

// One exact iteration step. The refit row at (s, h, g) is proportional to
//   sum over start commands (h' >= h, g') of
//     posterior(h', g') * pi_n(a | s, h', g') * reach(g in h steps | a),
// which is the first-action conditional of the current segment law given the
// relabeled input (s, h, g). Zero-mass rows carry over from pi_n.
inline Policy exact_step(const CommandExtension& ce, const Policy& pi) {
    const int S = ce.n_states(), A = ce.n_actions(), G = ce.n_goals(), N = ce.max_horizon;
    const VisitationTensor vt = visitation(ce, pi);
    Policy out = pi;
    std::vector<double> score(static_cast<std::size_t>(G) * A);
    for (int s = 0; s < S; ++s)
        for (int h = 1; h <= N; ++h) {
            const StartWeights sw = start_weights(ce, vt, s, h);
            if (!sw.defined) continue;  // command never realized: keep rows
            std::fill(score.begin(), score.end(), 0.0);
            for (int hp = h; hp <= N; ++hp)
                for (int gp = 0; gp < G; ++gp) {
                    const double w0 = sw.at(hp, gp);
                    if (w0 == 0.0) continue;
                    for (int a = 0; a < A; ++a) {
                        const double w = w0 * pi.prob(s, hp, gp, a);
                        if (w == 0.0) continue;
                        const auto reach = goal_reach_all(ce, pi, {s, hp, gp}, a, h);
                        for (int g = 0; g < G; ++g)
                            score[static_cast<std::size_t>(g) * A + a] += w * reach[g];
                    }
                }
            for (int g = 0; g < G; ++g) {
                double total = 0.0;
                for (int a = 0; a < A; ++a) total += score[static_cast<std::size_t>(g) * A + a];
                if (total <= 0.0) continue;  // relabeled goal unreachable: keep row
                auto row = out.row(s, h, g);
                for (int a = 0; a < A; ++a)
                    row[a] = score[static_cast<std::size_t>(g) * A + a] / total;
            }
        }
    return out;
}

struct SampleParams {
    int batch_size = 10000;
    int segments_per_trajectory = 1;
    std::uint64_t seed = 0;
    int workers = 1;
};

// One sampled iteration step: batch_size rollouts under pi_n, each yielding
// segments_per_trajectory accepted segments (proposals are redrawn on the same
// trajectory until acceptance), refit by maximum likelihood on the relabeled
// tuples (s0, l, goal of final state) -> a0. Rows without data carry over.
//
// Trajectory i uses an RNG stream keyed by (seed, round, i), so results are
// identical for every worker count; `round` separates successive iterations.
// When `dump` is non-null it receives all accepted segments in trajectory
// order.
inline Policy sampled_step(const CommandExtension& ce, const Policy& pi, const SampleParams& sp,
                           std::uint64_t round = 0, std::vector<Segment>* dump = nullptr) {
    if (sp.batch_size < 1) throw std::invalid_argument("sampled_step: batch_size must be >= 1");
    if (sp.segments_per_trajectory < 1)
        throw std::invalid_argument("sampled_step: segments_per_trajectory must be >= 1");
    const int A = ce.n_actions();
    const int spt = sp.segments_per_trajectory;
    if (dump) dump->assign(static_cast<std::size_t>(sp.batch_size) * spt, Segment{});

    const int workers = std::clamp(sp.workers, 1, sp.batch_size);
    std::vector<std::vector<std::uint64_t>> counts(
        workers,
        std::vector<std::uint64_t>(static_cast<std::size_t>(ce.transient_count()) * A, 0));
    auto worker_fn = [&](int w) {
        auto& local = counts[w];
        for (int i = w; i < sp.batch_size; i += workers) {
            auto rng = make_rng(sp.seed, round, static_cast<std::uint64_t>(i));
            const Trajectory tr = sample_trajectory(ce, pi, rng);
            for (int j = 0; j < spt; ++j) {
                std::optional<Segment> seg;
                do {
                    seg = sample_segment(tr, ce.max_horizon, rng);
                } while (!seg);
                const int g = ce.goal_map.rho[seg->final_state()];
                local[static_cast<std::size_t>(ce.transient_index(seg->s0, seg->length, g)) * A +
                      seg->actions[0]]++;
                if (dump) (*dump)[static_cast<std::size_t>(i) * spt + j] = std::move(*seg);
            }
        }
    };
    if (workers == 1) {
        worker_fn(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn, w);
        for (auto& th : pool) th.join();
    }
    for (int w = 1; w < workers; ++w)
        for (std::size_t k = 0; k < counts[0].size(); ++k) counts[0][k] += counts[w][k];

    Policy out = pi;
    for (int s = 0; s < ce.n_states(); ++s)
        for (int h = 1; h <= ce.max_horizon; ++h)
            for (int g = 0; g < ce.n_goals(); ++g) {
                const std::size_t base =
                    static_cast<std::size_t>(ce.transient_index(s, h, g)) * A;
                std::uint64_t total = 0;
                for (int a = 0; a < A; ++a) total += counts[0][base + a];
                if (total == 0) continue;
                auto row = out.row(s, h, g);
                for (int a = 0; a < A; ++a)
                    row[a] = static_cast<double>(counts[0][base + a]) / total;
            }
    return out;
}

enum class StepMode { exact, sampled };

struct RunParams {
    StepMode mode = StepMode::exact;
    int iterations = 10;
    SampleParams sampling;                      // used in sampled mode only
    std::vector<Segment>* segment_sink = nullptr;  // per-step training segments, if wanted
};

// Iterates from pi0, invoking hook(n, policy) for n = 0 (initial policy) and
// after every step. Sampled iterations derive their streams from
// (sampling.seed, n), so a run is reproducible from its parameters alone. When
// segment_sink is set it holds step n's training segments while hook(n, ...)
// executes.
template <class Hook>
void run(const CommandExtension& ce, const Policy& pi0, const RunParams& params, Hook&& hook) {
    if (params.iterations < 0) throw std::invalid_argument("run: iterations must be >= 0");
    Policy pi = pi0;
    hook(0, pi);
    for (int n = 1; n <= params.iterations; ++n) {
        pi = params.mode == StepMode::exact
                 ? exact_step(ce, pi)
                 : sampled_step(ce, pi, params.sampling, static_cast<std::uint64_t>(n),
                                params.segment_sink);
        hook(n, pi);
    }
}

}  // namespace eudrl
