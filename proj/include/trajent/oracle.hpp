#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trajent/chain.hpp"
#include "trajent/graph.hpp"

namespace trajent {

struct OracleConfig {
    /// Enumeration may leave at most this much probability mass unexplored.
    double residual_mass_bound = 1e-12;
    /// Longest prefix (in states) worth extending; 0 means 10 * N^2.
    long long max_path_length = 0;
    /// Hard cap on completed trajectories. Chains whose cycles shed mass
    /// slowly can pile up paths fast, so the default stays memory-safe.
    long long max_paths = 1'000'000;
};

struct EnumerationResult {
    StateIndex source = -1;
    StateIndex destination = -1;
    std::vector<Trajectory> trajectories;
    /// Total probability of the enumerated trajectories.
    double covered_mass = 0.0;
    /// True when abandoned or still-open prefixes hold more mass than the
    /// residual bound. Mass stuck in states that cannot reach the
    /// destination is excluded; it belongs to no trajectory.
    bool truncated = false;
    double residual_mass_bound = 1e-12;
};

/// Thrown when the trajectory cap is hit with too much mass unexplored;
/// carries whatever was enumerated so far.
class LimitsExceededError : public Error {
  public:
    LimitsExceededError(std::string message, EnumerationResult partial_result)
        : Error(ErrorCode::LimitsExceeded, std::move(message)), partial(std::move(partial_result)) {}

    EnumerationResult partial;
};

namespace detail {

struct Enumerator {
    const MarkovChain& chain;
    const StateIndex dest;
    const double residual;
    const double threshold;
    const long long max_len;
    const long long max_paths;
    std::vector<bool> reach;
    std::vector<std::vector<StateIndex>> successors;  // per state, by descending probability

    EnumerationResult out;
    std::vector<StateIndex> path;
    double dead = 0.0;
    double pruned = 0.0;
    double alive_at_stop = 0.0;
    bool stop = false;
    bool cap_hit = false;

    Enumerator(const MarkovChain& c, StateIndex s, StateIndex d, const OracleConfig& cfg)
        : chain(c),
          dest(d),
          residual(cfg.residual_mass_bound),
          threshold(cfg.residual_mass_bound / static_cast<double>(cfg.max_paths)),
          max_len(cfg.max_path_length > 0 ? cfg.max_path_length
                                          : 10 * static_cast<long long>(c.size()) * c.size()),
          max_paths(cfg.max_paths),
          reach(can_reach(c, d)) {
        out.source = s;
        out.destination = d;
        out.residual_mass_bound = cfg.residual_mass_bound;
        successors.resize(static_cast<std::size_t>(c.size()));
        for (StateIndex i = 0; i < c.size(); ++i) {
            auto& row = successors[static_cast<std::size_t>(i)];
            for (StateIndex j = 0; j < c.size(); ++j)
                if (c.prob(i, j) > 0.0) row.push_back(j);
            std::sort(row.begin(), row.end(), [&](StateIndex a, StateIndex b) {
                const double pa = c.prob(i, a), pb = c.prob(i, b);
                return pa != pb ? pa > pb : a < b;
            });
        }
    }

    double unexplored_bound() const { return 1.0 - out.covered_mass - dead; }

    /// Depth-first over prefixes, largest transition first. `state` is the
    /// prefix's last state, `mass` its probability; entering `dest`
    /// completes a trajectory instead of recursing.
    void extend(StateIndex state, double mass) {
        if (stop) return;
        if (unexplored_bound() <= residual) {
            stop = true;
            return;
        }
        if (static_cast<long long>(path.size()) >= max_len) {
            pruned += mass;
            return;
        }
        for (StateIndex next : successors[static_cast<std::size_t>(state)]) {
            if (stop) {
                if (reach[static_cast<std::size_t>(next)])
                    alive_at_stop += mass * chain.prob(state, next);
                continue;
            }
            const double p = mass * chain.prob(state, next);
            if (next == dest) {
                path.push_back(next);
                out.trajectories.push_back({path, p});
                path.pop_back();
                out.covered_mass += p;
                if (static_cast<long long>(out.trajectories.size()) >= max_paths &&
                    unexplored_bound() > residual) {
                    stop = true;
                    cap_hit = true;
                }
                continue;
            }
            if (!reach[static_cast<std::size_t>(next)]) {
                dead += p;
                continue;
            }
            if (p < threshold) {
                pruned += p;
                continue;
            }
            path.push_back(next);
            extend(next, p);
            path.pop_back();
        }
    }

    EnumerationResult run() {
        if (!reach[static_cast<std::size_t>(out.source)] && out.source != dest) {
            out.truncated = false;
            return out;
        }
        path.push_back(out.source);
        extend(out.source, 1.0);
        out.truncated = cap_hit || pruned + alive_at_stop > residual;
        if (cap_hit)
            throw LimitsExceededError("trajectory cap " + std::to_string(max_paths) +
                                          " reached with " + std::to_string(unexplored_bound()) +
                                          " mass unexplored",
                                      std::move(out));
        return out;
    }
};

inline Bits renormalized_entropy(const std::vector<const Trajectory*>& kept, double mass) {
    Bits h = 0.0;
    for (const Trajectory* t : kept) {
        const double q = t->probability / mass;
        if (q > 0.0) h -= q * std::log2(q);
    }
    return h < 0.0 ? 0.0 : h;
}

inline void require_coverage(const EnumerationResult& result) {
    if (result.covered_mass < 1.0 - result.residual_mass_bound)
        throw Error(ErrorCode::InsufficientCoverage,
                    "enumeration covered only " + std::to_string(result.covered_mass) +
                        " of the trajectory mass");
}

}  // namespace detail

/// Every s-to-d trajectory with probability above the pruning threshold,
/// depth-first, larger transition probabilities first. For s = d the
/// trajectories are first returns; the initial position does not count as
/// an arrival.
inline EnumerationResult enumerate_trajectories(const MarkovChain& chain, StateIndex s, StateIndex d,
                                                const OracleConfig& config = {}) {
    chain.require_state(s);
    chain.require_state(d);
    if (!(config.residual_mass_bound > 0.0 && config.residual_mass_bound < 1.0))
        throw Error(ErrorCode::OutOfRange, "residual mass bound must lie in (0,1)");
    if (config.max_paths < 1 || config.max_path_length < 0)
        throw Error(ErrorCode::OutOfRange, "enumeration limits must be positive");
    detail::Enumerator e(chain, s, d, config);
    return e.run();
}

/// True when the trajectory's interior states contain `via` as a
/// subsequence; endpoints never match a waypoint.
inline bool contains_interior_sequence(const Trajectory& t, std::span<const StateIndex> via) {
    std::size_t k = 0;
    for (std::size_t i = 1; k < via.size() && i + 1 < t.states.size(); ++i)
        if (t.states[i] == via[k]) ++k;
    return k == via.size();
}

/// True when every listed state occurs somewhere in the trajectory's
/// interior, in any order.
inline bool contains_interior_set(const Trajectory& t, std::span<const StateIndex> states) {
    for (StateIndex want : states) {
        bool found = false;
        for (std::size_t i = 1; !found && i + 1 < t.states.size(); ++i)
            if (t.states[i] == want) found = true;
        if (!found) return false;
    }
    return true;
}

/// Entropy of the enumerated distribution, renormalized by covered mass.
inline Bits oracle_entropy(const EnumerationResult& result) {
    detail::require_coverage(result);
    std::vector<const Trajectory*> kept;
    kept.reserve(result.trajectories.size());
    for (const Trajectory& t : result.trajectories) kept.push_back(&t);
    if (kept.empty())
        throw Error(ErrorCode::InsufficientCoverage, "no trajectories enumerated");
    return detail::renormalized_entropy(kept, result.covered_mass);
}

namespace detail {

inline Bits filtered_entropy(const EnumerationResult& result, auto&& keep_predicate,
                             const std::string& what) {
    require_coverage(result);
    std::vector<const Trajectory*> kept;
    double mass = 0.0;
    for (const Trajectory& t : result.trajectories) {
        if (keep_predicate(t)) {
            kept.push_back(&t);
            mass += t.probability;
        }
    }
    if (kept.empty() || mass <= 0.0)
        throw Error(ErrorCode::ImpossibleConditioning,
                    "no enumerated trajectory " + what);
    return renormalized_entropy(kept, mass);
}

}  // namespace detail

/// Entropy conditioned on an ordered waypoint sequence, by filtering the
/// enumeration and renormalizing. Empty `via` degenerates to oracle_entropy.
inline Bits oracle_conditional_sequence(const EnumerationResult& result,
                                        std::span<const StateIndex> via) {
    if (via.empty()) return oracle_entropy(result);
    return detail::filtered_entropy(
        result, [&](const Trajectory& t) { return contains_interior_sequence(t, via); },
        "passes through the waypoint sequence");
}

inline Bits oracle_conditional_sequence(const EnumerationResult& result,
                                        const std::vector<StateIndex>& via) {
    return oracle_conditional_sequence(result, std::span<const StateIndex>(via));
}

/// Entropy conditioned on visiting every listed state at least once, in any
/// order. Enumeration-only; no closed form exists for this quantity.
inline Bits oracle_conditional_set(const EnumerationResult& result,
                                   std::span<const StateIndex> states) {
    if (states.empty()) return oracle_entropy(result);
    return detail::filtered_entropy(
        result, [&](const Trajectory& t) { return contains_interior_set(t, states); },
        "visits all required states");
}

inline Bits oracle_conditional_set(const EnumerationResult& result,
                                   const std::vector<StateIndex>& states) {
    return oracle_conditional_set(result, std::span<const StateIndex>(states));
}

struct WalkStats {
    long long walks = 0;
    long long completed = 0;
    double step_limit_fraction = 0.0;
    /// Per state: mean visits before absorption over completed walks (the
    /// start state counts, the final arrival does not), the standard error
    /// of that mean, and the fraction of walks that touched the state.
    Vector mean_visits;
    Vector visit_se;
    Vector hit_fraction;
};

/// Monte-Carlo cross-check: seeded random walks from s absorbed on first
/// arrival at d. Deterministic for a fixed seed.
inline WalkStats simulate_walks(const MarkovChain& chain, StateIndex s, StateIndex d,
                                long long n_walks, std::uint64_t rng_seed,
                                long long step_limit = 0) {
    chain.require_state(s);
    chain.require_state(d);
    if (n_walks < 1) throw Error(ErrorCode::OutOfRange, "need at least one walk");
    const StateIndex n = chain.size();
    if (step_limit <= 0) step_limit = 10 * static_cast<long long>(n) * n;

    Matrix cumulative(n, n);
    for (StateIndex i = 0; i < n; ++i) {
        double acc = 0.0;
        for (StateIndex j = 0; j < n; ++j) {
            acc += chain.prob(i, j);
            cumulative(i, j) = acc;
        }
        cumulative(i, n - 1) = 1.0;
    }

    std::mt19937_64 rng(rng_seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto pick = [&](StateIndex from) {
        const double r = uniform();
        for (StateIndex j = 0; j < n; ++j)
            if (r < cumulative(from, j)) return j;
        return n - 1;
    };

    Vector sum = Vector::Zero(n), sum_sq = Vector::Zero(n), hits = Vector::Zero(n);
    std::vector<long long> visit(static_cast<std::size_t>(n));
    long long completed = 0;
    for (long long w = 0; w < n_walks; ++w) {
        std::fill(visit.begin(), visit.end(), 0);
        StateIndex at = s;
        bool absorbed = false;
        for (long long step = 0; step < step_limit; ++step) {
            ++visit[static_cast<std::size_t>(at)];
            const StateIndex next = pick(at);
            if (next == d) {
                absorbed = true;
                break;
            }
            at = next;
        }
        if (!absorbed) continue;
        ++completed;
        for (StateIndex i = 0; i < n; ++i) {
            const auto v = static_cast<double>(visit[static_cast<std::size_t>(i)]);
            sum(i) += v;
            sum_sq(i) += v * v;
            if (v > 0.0) hits(i) += 1.0;
        }
    }

    WalkStats stats;
    stats.walks = n_walks;
    stats.completed = completed;
    stats.step_limit_fraction =
        static_cast<double>(n_walks - completed) / static_cast<double>(n_walks);
    stats.mean_visits = Vector::Zero(n);
    stats.visit_se = Vector::Zero(n);
    stats.hit_fraction = Vector::Zero(n);
    if (completed == 0) return stats;
    const auto c = static_cast<double>(completed);
    for (StateIndex i = 0; i < n; ++i) {
        const double mean = sum(i) / c;
        const double var = std::max(sum_sq(i) / c - mean * mean, 0.0);
        stats.mean_visits(i) = mean;
        stats.visit_se(i) = std::sqrt(var / c);
        stats.hit_fraction(i) = hits(i) / c;
    }
    return stats;
}

}  // namespace trajent
