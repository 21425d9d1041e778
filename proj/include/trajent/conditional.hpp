#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "trajent/absorption.hpp"
#include "trajent/chain.hpp"
#include "trajent/entropy.hpp"

namespace trajent {

/// Entropy of the s-to-d trajectory conditioned on passing through the
/// ordered waypoints `via` (possibly empty) before terminating at d.
struct CondQuery {
    StateIndex source = -1;
    StateIndex destination = -1;
    std::vector<StateIndex> via;
};

struct CondResult {
    Bits entropy = 0.0;
    /// One entry per waypoint leg plus the final leg into the destination;
    /// sums to `entropy`.
    std::vector<Bits> per_leg;
    /// alphas[k] = probability that a walk from waypoint k hits the
    /// destination before waypoint k+1; must be < 1 for leg k to be
    /// conditionable.
    std::vector<double> alphas;
};

namespace detail {

/// The survival-ratio rescale: u and d absorbing, every other row i with
/// positive probability of reaching d before u is reweighted by
/// a_d(j)/a_d(i). Rows certain to hit u first are kept as-is; trajectories
/// of the conditioned law never enter them. The result's trajectory
/// distribution s -> d equals the original one conditioned on avoiding u.
inline MarkovChain avoid_transform_with(const MarkovChain& chain, const AbsorptionResult& ab) {
    const StateIndex n = chain.size();
    const StateIndex u = ab.target_u;
    const StateIndex d = ab.target_d;
    Matrix out = Matrix::Zero(n, n);
    out(u, u) = 1.0;
    out(d, d) = 1.0;
    for (StateIndex i = 0; i < n; ++i) {
        if (i == u || i == d) continue;
        const double survive_i = ab.a_d(i);
        if (survive_i <= 0.0) {
            out.row(i) = chain.matrix().row(i);
            continue;
        }
        for (StateIndex j = 0; j < n; ++j) {
            const double p = chain.prob(i, j);
            if (p == 0.0) continue;
            out(i, j) = ab.a_d(j) / survive_i * p;
        }
        const double sum = out.row(i).sum();
        if (!std::isfinite(sum) || std::abs(sum - 1.0) > kRowSumTolerance)
            throw Error(ErrorCode::SingularSystem,
                        "rescaled row for " + chain.label(i) + " sums to " + std::to_string(sum) +
                            "; absorption probabilities too imprecise",
                        i);
    }
    return MarkovChain::build(chain.labels(), std::move(out));
}

/// One conditional leg: entropy of the trajectory from `from` to `to` over
/// walks that do not touch `forbidden` in between, plus the probability of
/// hitting `forbidden` first.
inline std::pair<Bits, double> conditional_leg(const MarkovChain& chain, StateIndex from,
                                               StateIndex to, StateIndex forbidden) {
    if (from == to) {
        const auto [split, arrival] = split_state(chain, from);
        return conditional_leg(split, from, arrival, forbidden);
    }
    const AbsorptionResult ab = absorption_probabilities(chain, forbidden, to);
    const double alpha = ab.alpha(from);
    if (ab.a_d(from) <= 0.0)
        throw Error(ErrorCode::AlwaysPassesThroughU,
                    "every trajectory from " + chain.label(from) + " to " + chain.label(to) +
                        " hits " + chain.label(forbidden) + " first",
                    from);
    const MarkovChain transformed = avoid_transform_with(chain, ab);
    return {trajectory_entropy(transformed, from, to), alpha};
}

}  // namespace detail

/// The chain whose s->d trajectory law equals the original law conditioned
/// on never visiting u before d. u and d become absorbing, all other rows
/// are rescaled by survival ratios; output rows sum to 1.
inline MarkovChain avoid_transform(const MarkovChain& chain, StateIndex u, StateIndex d) {
    return detail::avoid_transform_with(chain, absorption_probabilities(chain, u, d));
}

/// H of the s->d trajectory conditioned on avoiding u. Defined whenever
/// some s->d trajectory misses u.
inline Bits entropy_avoiding(const MarkovChain& chain, StateIndex s, StateIndex d, StateIndex u) {
    chain.require_state(s);
    chain.require_state(d);
    chain.require_state(u);
    if (u == d || u == s)
        throw Error(ErrorCode::TargetsEqual,
                    "avoided state " + chain.label(u) + " must differ from both endpoints", u);
    if (s == d) {
        const auto [split, arrival] = split_state(chain, s);
        return entropy_avoiding(split, s, arrival, u);
    }
    const AbsorptionResult ab = absorption_probabilities(chain, u, d);
    if (ab.a_d(s) <= 0.0)
        throw Error(ErrorCode::AlwaysPassesThroughU,
                    "every trajectory from " + chain.label(s) + " to " + chain.label(d) + " visits " +
                        chain.label(u),
                    s);
    return trajectory_entropy(detail::avoid_transform_with(chain, ab), s, d);
}

/// H of the s->d trajectory conditioned on visiting u, by inverting the
/// decomposition H_sd = a H_via + (1-a) H_avoid + h(a). When every
/// trajectory visits u the conditioning is vacuous and H_sd comes back.
inline Bits entropy_via_single(const MarkovChain& chain, StateIndex s, StateIndex d, StateIndex u) {
    chain.require_state(s);
    chain.require_state(d);
    chain.require_state(u);
    if (s == d) {
        const auto [split, arrival] = split_state(chain, s);
        return entropy_via_single(split, s, arrival, u);
    }
    const AbsorptionResult ab = absorption_probabilities(chain, u, d);
    const double alpha = ab.alpha(s);
    if (alpha <= 0.0)
        throw Error(ErrorCode::NeverPassesThroughU,
                    "no trajectory from " + chain.label(s) + " to " + chain.label(d) + " visits " +
                        chain.label(u),
                    s);
    const Bits h_sd = trajectory_entropy(chain, s, d);
    if (alpha >= 1.0) return h_sd;
    const Bits h_avoid = trajectory_entropy(detail::avoid_transform_with(chain, ab), s, d);
    const Bits h_via = (h_sd - (1.0 - alpha) * h_avoid - bernoulli_entropy(alpha)) / alpha;
    return h_via < 0.0 && h_via > -kRowSumTolerance ? 0.0 : h_via;
}

/// Entropy conditioned on an ordered waypoint sequence, as the sum of
/// independent leg entropies: waypoint-to-waypoint legs that must not touch
/// the destination, then the plain final leg into it.
inline CondResult entropy_via_sequence(const MarkovChain& chain, const CondQuery& query) {
    chain.require_state(query.source);
    chain.require_state(query.destination);
    for (std::size_t k = 0; k < query.via.size(); ++k) {
        chain.require_state(query.via[k]);
        if (query.via[k] == query.destination)
            throw Error(ErrorCode::DestinationInVia,
                        "waypoint " + std::to_string(k + 1) + " is the destination " +
                            chain.label(query.destination) + "; trajectories end there",
                        static_cast<long>(k));
    }
    if (query.source == query.destination) {
        const auto [split, arrival] = split_state(chain, query.source);
        return entropy_via_sequence(split, CondQuery{query.source, arrival, query.via});
    }

    CondResult result;
    const std::size_t l = query.via.size();
    result.per_leg.reserve(l + 1);
    result.alphas.reserve(l);
    StateIndex from = query.source;
    for (std::size_t k = 0; k < l; ++k) {
        const StateIndex to = query.via[k];
        try {
            const auto [leg, alpha] = detail::conditional_leg(chain, from, to, query.destination);
            result.per_leg.push_back(leg);
            result.alphas.push_back(alpha);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::AlwaysPassesThroughU ||
                e.code() == ErrorCode::SourceCannotReachDestination)
                throw Error(ErrorCode::ImpossibleConditioning,
                            "leg " + std::to_string(k + 1) + " (" + chain.label(from) + " to " +
                                chain.label(to) + " avoiding " + chain.label(query.destination) +
                                ") has probability 0: " + e.what(),
                            static_cast<long>(k));
            throw;
        }
        from = to;
    }
    try {
        result.per_leg.push_back(trajectory_entropy(chain, from, query.destination));
    } catch (const Error& e) {
        if (l > 0 && e.code() == ErrorCode::SourceCannotReachDestination)
            throw Error(ErrorCode::ImpossibleConditioning,
                        "final leg (" + chain.label(from) + " to " + chain.label(query.destination) +
                            ") has probability 0: " + e.what(),
                        static_cast<long>(l));
        throw;
    }
    for (Bits leg : result.per_leg) result.entropy += leg;
    return result;
}

/// Closed-form difference between ordered-sequence and unordered-set
/// conditioning on the two-waypoint family of chains parameterized by
/// (eps0, eps1, m): h(eps0) - h(eps0*eps1/(1-eps0*(1-eps1)))
/// + (1-eps0)/(1-eps0*(1-eps1)) * log2(m). May be negative.
inline double figure2_gap(double eps0, double eps1, long long m) {
    if (!(eps0 > 0.0 && eps0 < 1.0))
        throw Error(ErrorCode::OutOfRange, "eps0 must lie in (0,1), got " + std::to_string(eps0));
    if (!(eps1 > 0.0 && eps1 <= 1.0))
        throw Error(ErrorCode::OutOfRange, "eps1 must lie in (0,1], got " + std::to_string(eps1));
    if (m < 1)
        throw Error(ErrorCode::OutOfRange, "m must be a positive integer, got " + std::to_string(m));
    const double denom = 1.0 - eps0 * (1.0 - eps1);
    const double crossing = eps0 * eps1 / denom;
    return bernoulli_entropy(eps0) - bernoulli_entropy(crossing) +
           (1.0 - eps0) / denom * std::log2(static_cast<double>(m));
}

}  // namespace trajent
