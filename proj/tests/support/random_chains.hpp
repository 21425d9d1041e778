#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include <trajent/trajent.hpp>

namespace support {

/// Random strongly connected chain on n in [min_n, max_n] states. A cycle
/// through a shuffled ordering guarantees irreducibility; extra edges are
/// sprinkled on top with weights in [0.1, 1] so rows stay well conditioned.
inline trajent::MarkovChain random_irreducible_chain(std::mt19937_64& rng, int min_n = 3,
                                                     int max_n = 8) {
    const int n = std::uniform_int_distribution<int>(min_n, max_n)(rng);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    trajent::Matrix m = trajent::Matrix::Zero(n, n);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double edge_density = std::uniform_real_distribution<double>(0.2, 0.7)(rng);

    for (int i = 0; i < n; ++i) m(order[i], order[(i + 1) % n]) = weight(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && m(i, j) == 0.0 && coin(rng) < edge_density) m(i, j) = weight(rng);

    for (int i = 0; i < n; ++i) m.row(i) /= m.row(i).sum();
    return trajent::MarkovChain::build(m);
}

/// Random chain on n in [3, 5] states built for exhaustive trajectory
/// enumeration: an acyclic backbone of forward edges ending at the last
/// state, plus at most two short loop edges of small mass. Every state
/// reaches the last state, and cycle mass is light enough that enumeration
/// down to tiny residuals touches only a bounded set of trajectories.
inline trajent::MarkovChain random_enumerable_chain(std::mt19937_64& rng) {
    const int n = std::uniform_int_distribution<int>(3, 5)(rng);
    const int d = n - 1;
    trajent::Matrix m = trajent::Matrix::Zero(n, n);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    for (int i = 0; i < d; ++i) {
        m(i, d) = weight(rng);
        for (int j = i + 1; j < d; ++j)
            if (coin(rng) < 0.5) m(i, j) = weight(rng);
    }

    int loops = std::uniform_int_distribution<int>(0, 2)(rng);
    while (loops-- > 0) {
        // self-loop or a one-step retreat; longer jumps back multiply the
        // number of distinct cycles and blow up the trajectory count
        const int i = std::uniform_int_distribution<int>(0, d - 1)(rng);
        const int j = std::uniform_int_distribution<int>(std::max(0, i - 1), i)(rng);
        if (m(i, j) == 0.0) {
            const double mass = std::uniform_real_distribution<double>(0.04, 0.12)(rng);
            m.row(i) *= (1.0 - mass) / m.row(i).sum();
            m(i, j) = mass;
        }
    }

    // send the absorbing-side row back into the chain so the matrix is a
    // complete walk, not just a reachability gadget
    m(d, 0) = 1.0;

    for (int i = 0; i < n; ++i) m.row(i) /= m.row(i).sum();
    return trajent::MarkovChain::build(m);
}

}  // namespace support
