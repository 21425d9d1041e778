#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "trajent/chain.hpp"

namespace trajent {

/// States with a positive-probability path to d (d itself included).
inline std::vector<bool> can_reach(const MarkovChain& chain, StateIndex d) {
    chain.require_state(d);
    const StateIndex n = chain.size();
    std::vector<std::vector<StateIndex>> preds(static_cast<std::size_t>(n));
    for (StateIndex i = 0; i < n; ++i)
        for (StateIndex j = 0; j < n; ++j)
            if (chain.prob(i, j) > 0.0) preds[static_cast<std::size_t>(j)].push_back(i);

    std::vector<bool> reach(static_cast<std::size_t>(n), false);
    std::vector<StateIndex> stack{d};
    reach[static_cast<std::size_t>(d)] = true;
    while (!stack.empty()) {
        const StateIndex v = stack.back();
        stack.pop_back();
        for (StateIndex p : preds[static_cast<std::size_t>(v)]) {
            if (!reach[static_cast<std::size_t>(p)]) {
                reach[static_cast<std::size_t>(p)] = true;
                stack.push_back(p);
            }
        }
    }
    return reach;
}

/// Strongly connected components of the positive-transition graph, Tarjan's
/// algorithm with an explicit stack. Components come out in reverse
/// topological order.
inline std::vector<std::vector<StateIndex>> strongly_connected_components(const MarkovChain& chain) {
    const StateIndex n = chain.size();
    std::vector<std::vector<StateIndex>> succ(static_cast<std::size_t>(n));
    for (StateIndex i = 0; i < n; ++i)
        for (StateIndex j = 0; j < n; ++j)
            if (chain.prob(i, j) > 0.0) succ[static_cast<std::size_t>(i)].push_back(j);

    const StateIndex kUnvisited = -1;
    std::vector<StateIndex> index(static_cast<std::size_t>(n), kUnvisited);
    std::vector<StateIndex> lowlink(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<StateIndex> stack;
    std::vector<std::vector<StateIndex>> components;
    StateIndex next_index = 0;

    struct Frame {
        StateIndex v;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (StateIndex root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [v, child] = call.back();
            const auto vi = static_cast<std::size_t>(v);
            if (child == 0) {
                index[vi] = lowlink[vi] = next_index++;
                stack.push_back(v);
                on_stack[vi] = true;
            }
            if (child < succ[vi].size()) {
                const StateIndex w = succ[vi][child++];
                const auto wi = static_cast<std::size_t>(w);
                if (index[wi] == kUnvisited) {
                    call.push_back({w, 0});
                } else if (on_stack[wi]) {
                    lowlink[vi] = std::min(lowlink[vi], index[wi]);
                }
            } else {
                if (lowlink[vi] == index[vi]) {
                    std::vector<StateIndex> comp;
                    StateIndex w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = false;
                        comp.push_back(w);
                    } while (w != v);
                    std::sort(comp.begin(), comp.end());
                    components.push_back(std::move(comp));
                }
                call.pop_back();
                if (!call.empty()) {
                    const auto pi = static_cast<std::size_t>(call.back().v);
                    lowlink[pi] = std::min(lowlink[pi], lowlink[vi]);
                }
            }
        }
    }
    return components;
}

inline bool is_irreducible(const MarkovChain& chain) {
    return strongly_connected_components(chain).size() == 1;
}

/// Period of an irreducible chain: gcd of all cycle lengths, computed as the
/// gcd of level mismatches over a BFS tree. 1 means aperiodic.
inline long period(const MarkovChain& chain) {
    if (!is_irreducible(chain))
        throw Error(ErrorCode::NotIrreducible, "period is defined for irreducible chains only");
    const StateIndex n = chain.size();
    std::vector<long> level(static_cast<std::size_t>(n), -1);
    std::vector<StateIndex> queue{0};
    level[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const StateIndex v = queue[head];
        for (StateIndex w = 0; w < n; ++w) {
            if (chain.prob(v, w) > 0.0 && level[static_cast<std::size_t>(w)] < 0) {
                level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
                queue.push_back(w);
            }
        }
    }
    long g = 0;
    for (StateIndex v = 0; v < n; ++v)
        for (StateIndex w = 0; w < n; ++w)
            if (chain.prob(v, w) > 0.0)
                g = std::gcd(g, std::abs(level[static_cast<std::size_t>(v)] + 1 -
                                         level[static_cast<std::size_t>(w)]));
    return g == 0 ? 1 : g;
}

}  // namespace trajent
