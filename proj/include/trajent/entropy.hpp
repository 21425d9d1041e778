#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "trajent/absorption.hpp"
#include "trajent/chain.hpp"
#include "trajent/graph.hpp"

namespace trajent {

namespace detail {

/// H_sd for every source s at once: one solve of (I - Q_d) y = h_local.
/// Precondition: every state of `chain` reaches d.
inline Vector entropy_column_unchecked(const MarkovChain& chain, StateIndex d) {
    const StateIndex n = chain.size();
    std::vector<StateIndex> transient;
    transient.reserve(static_cast<std::size_t>(n) - 1);
    for (StateIndex i = 0; i < n; ++i)
        if (i != d) transient.push_back(i);

    Vector full = Vector::Zero(n);
    if (transient.empty()) return full;

    Matrix rhs(static_cast<StateIndex>(transient.size()), 1);
    for (std::size_t r = 0; r < transient.size(); ++r)
        rhs(static_cast<StateIndex>(r), 0) = local_entropy(chain, transient[r]);
    const Matrix y = solve_transient(chain, transient, rhs);
    for (std::size_t r = 0; r < transient.size(); ++r)
        full(transient[r]) = std::max(y(static_cast<StateIndex>(r), 0), 0.0);
    return full;
}

inline unsigned thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("TRAJENT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

}  // namespace detail

/// Entropy in bits of the trajectory distribution from s to first arrival
/// at d: the fundamental-matrix weighted sum of local entropies over states
/// that can still reach d. s = d is handled by splitting s into a
/// departure/arrival pair first.
inline Bits trajectory_entropy(const MarkovChain& chain, StateIndex s, StateIndex d) {
    chain.require_state(s);
    chain.require_state(d);
    if (s == d) {
        const auto [split, arrival] = split_state(chain, s);
        return trajectory_entropy(split, s, arrival);
    }
    const Restriction res = restrict_to_reaching(chain, d);
    if (!res.contains(s))
        throw Error(ErrorCode::SourceCannotReachDestination,
                    "no path from " + chain.label(s) + " to " + chain.label(d), s);
    const Vector col = detail::entropy_column_unchecked(res.chain, res.of(d));
    return col(res.of(s));
}

/// All N^2 pairwise trajectory entropies; (s,d) entry is the entropy from s
/// to d, the diagonal covers return trajectories. One linear solve per
/// destination column, columns computed in parallel (TRAJENT_THREADS caps
/// the worker count, 0 or unset picks the hardware default).
inline Matrix entropy_matrix(const MarkovChain& chain) {
    if (!is_irreducible(chain))
        throw Error(ErrorCode::NotIrreducible,
                    "pairwise entropies need every state reachable from every other");
    const StateIndex n = chain.size();
    Matrix H(n, n);
    auto fill_column = [&chain, &H, n](StateIndex d) {
        const Vector col = detail::entropy_column_unchecked(chain, d);
        for (StateIndex s = 0; s < n; ++s)
            if (s != d) H(s, d) = col(s);
        const auto [split, arrival] = split_state(chain, d);
        H(d, d) = trajectory_entropy(split, d, arrival);
    };

    const auto workers = static_cast<StateIndex>(detail::thread_count());
    if (workers <= 1 || n <= 1) {
        for (StateIndex d = 0; d < n; ++d) fill_column(d);
        return H;
    }
    const StateIndex pool_size = std::min(workers, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(pool_size));
    for (StateIndex w = 0; w < pool_size; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (StateIndex d = w; d < n; d += pool_size) fill_column(d);
            } catch (...) {
                failures[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return H;
}

}  // namespace trajent
