#pragma once

#include <Eigen/LU>

#include <span>
#include <string>
#include <vector>

#include "trajent/chain.hpp"
#include "trajent/graph.hpp"

namespace trajent {

/// Probabilities of being absorbed by u versus d once both are made
/// absorbing. a_u[i] + a_d[i] = 1 for every state (absorption is certain by
/// precondition), a_u is the alpha of the conditional-entropy formulas.
struct AbsorptionResult {
    StateIndex target_u = -1;
    StateIndex target_d = -1;
    Vector a_u;
    Vector a_d;
    /// Set when some probability landed inside (kAbsorptionEps, kRowSumTolerance)
    /// of 0 or 1, i.e. close enough to a branch cutoff to deserve a look.
    bool conditioning_warning = false;

    double alpha(StateIndex s) const { return a_u(s); }
};

/// Expected visits to each transient state before hitting the destination:
/// the rows of (I - Q_d)^-1. `transient` maps row/column positions back to
/// state indices of the source chain.
struct VisitCounts {
    StateIndex destination = -1;
    std::vector<StateIndex> transient;
    Matrix rows;

    double visits(StateIndex from, StateIndex to) const {
        return rows(position(from), position(to));
    }

    Eigen::Index position(StateIndex state) const {
        for (std::size_t i = 0; i < transient.size(); ++i)
            if (transient[i] == state) return static_cast<Eigen::Index>(i);
        throw Error(ErrorCode::UnknownState,
                    "state " + std::to_string(state) + " is not transient for this destination", state);
    }
};

/// A sub-chain together with the surviving states and their new indices.
struct Restriction {
    MarkovChain chain;
    std::vector<StateIndex> kept;                 ///< old index per new index
    std::vector<StateIndex> position;             ///< new index per old index, -1 if dropped

    bool contains(StateIndex old_state) const {
        return position[static_cast<std::size_t>(old_state)] >= 0;
    }
    StateIndex of(StateIndex old_state) const {
        return position[static_cast<std::size_t>(old_state)];
    }
};

/// Replaces each target row by a unit self-loop; everything else unchanged.
inline MarkovChain make_absorbing(const MarkovChain& chain, std::span<const StateIndex> targets) {
    if (targets.empty())
        throw Error(ErrorCode::OutOfRange, "make_absorbing needs at least one target state");
    Matrix m = chain.matrix();
    for (StateIndex t : targets) {
        chain.require_state(t);
        m.row(t).setZero();
        m(t, t) = 1.0;
    }
    return MarkovChain::build(chain.labels(), std::move(m));
}

inline MarkovChain make_absorbing(const MarkovChain& chain, std::initializer_list<StateIndex> targets) {
    return make_absorbing(chain, std::span<const StateIndex>(targets.begin(), targets.size()));
}

namespace detail {

/// Solves (I - Q) x = b for each column of b, where Q is the sub-matrix of
/// the chain on `transient` rows/columns. Verifies the residual so a
/// precondition violation cannot silently pass as a solution.
inline Matrix solve_transient(const MarkovChain& chain, const std::vector<StateIndex>& transient,
                              const Matrix& rhs) {
    const auto m = static_cast<StateIndex>(transient.size());
    Matrix iq = Matrix::Identity(m, m);
    for (StateIndex r = 0; r < m; ++r)
        for (StateIndex c = 0; c < m; ++c)
            iq(r, c) -= chain.prob(transient[static_cast<std::size_t>(r)],
                                   transient[static_cast<std::size_t>(c)]);
    Eigen::PartialPivLU<Matrix> lu(iq);
    Matrix x = lu.solve(rhs);
    const double residual = (iq * x - rhs).cwiseAbs().maxCoeff();
    if (!x.allFinite() || residual > 1e-8)
        throw Error(ErrorCode::SingularSystem,
                    "(I-Q) solve residual " + std::to_string(residual));
    return x;
}

}  // namespace detail

/// First-step absorption probabilities for the chain with {u, d} absorbing.
/// Every state must reach {u, d}; otherwise absorption is not certain and
/// the quantities the caller wants are undefined.
inline AbsorptionResult absorption_probabilities(const MarkovChain& chain, StateIndex u, StateIndex d) {
    chain.require_state(u);
    chain.require_state(d);
    if (u == d)
        throw Error(ErrorCode::TargetsEqual, "absorption targets must differ, got " + chain.label(u));

    const MarkovChain absorbed = make_absorbing(chain, {u, d});
    const std::vector<bool> to_u = can_reach(absorbed, u);
    const std::vector<bool> to_d = can_reach(absorbed, d);
    const StateIndex n = chain.size();
    for (StateIndex i = 0; i < n; ++i) {
        if (!to_u[static_cast<std::size_t>(i)] && !to_d[static_cast<std::size_t>(i)])
            throw Error(ErrorCode::AbsorptionNotCertain,
                        "state " + chain.label(i) + " reaches neither " + chain.label(u) + " nor " +
                            chain.label(d),
                        i);
    }

    std::vector<StateIndex> transient;
    transient.reserve(static_cast<std::size_t>(n));
    for (StateIndex i = 0; i < n; ++i)
        if (i != u && i != d) transient.push_back(i);

    Matrix rhs(static_cast<StateIndex>(transient.size()), 2);
    for (std::size_t r = 0; r < transient.size(); ++r) {
        rhs(static_cast<StateIndex>(r), 0) = chain.prob(transient[r], u);
        rhs(static_cast<StateIndex>(r), 1) = chain.prob(transient[r], d);
    }
    const Matrix sol = transient.empty()
                           ? Matrix(0, 2)
                           : detail::solve_transient(absorbed, transient, rhs);

    AbsorptionResult result;
    result.target_u = u;
    result.target_d = d;
    result.a_u = Vector::Zero(n);
    result.a_d = Vector::Zero(n);
    result.a_u(u) = 1.0;
    result.a_d(d) = 1.0;
    for (std::size_t r = 0; r < transient.size(); ++r) {
        double au = sol(static_cast<StateIndex>(r), 0);
        double ad = sol(static_cast<StateIndex>(r), 1);
        for (double* v : {&au, &ad}) {
            if (*v > kAbsorptionEps && *v < kRowSumTolerance) result.conditioning_warning = true;
            if (*v > 1.0 - kRowSumTolerance && *v < 1.0 - kAbsorptionEps) result.conditioning_warning = true;
            if (*v <= kAbsorptionEps) *v = 0.0;
            if (*v >= 1.0 - kAbsorptionEps) *v = 1.0;
        }
        result.a_u(transient[r]) = au;
        result.a_d(transient[r]) = ad;
    }
    return result;
}

/// Sub-chain induced on the states with a positive-probability path to d.
/// The induced rows must lose no mass; a leaking row means the trajectory
/// distribution toward d is improper and the query has no answer. The
/// destination's own outgoing row is irrelevant to any trajectory ending
/// there, so if its successors were dropped it is made absorbing instead.
inline Restriction restrict_to_reaching(const MarkovChain& chain, StateIndex d) {
    chain.require_state(d);
    const std::vector<bool> reach = can_reach(chain, d);
    const StateIndex n = chain.size();

    Restriction res{chain, {}, std::vector<StateIndex>(static_cast<std::size_t>(n), -1)};
    for (StateIndex i = 0; i < n; ++i) {
        if (reach[static_cast<std::size_t>(i)]) {
            res.position[static_cast<std::size_t>(i)] = static_cast<StateIndex>(res.kept.size());
            res.kept.push_back(i);
        }
    }
    if (static_cast<StateIndex>(res.kept.size()) == n) return res;  // nothing dropped

    const auto m = static_cast<StateIndex>(res.kept.size());
    Matrix sub(m, m);
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(m));
    for (StateIndex r = 0; r < m; ++r) {
        for (StateIndex c = 0; c < m; ++c)
            sub(r, c) = chain.prob(res.kept[static_cast<std::size_t>(r)],
                                   res.kept[static_cast<std::size_t>(c)]);
        labels.push_back(chain.label(res.kept[static_cast<std::size_t>(r)]));
    }
    for (StateIndex r = 0; r < m; ++r) {
        const StateIndex old = res.kept[static_cast<std::size_t>(r)];
        const double sum = sub.row(r).sum();
        if (std::abs(sum - 1.0) <= kRowSumTolerance) continue;
        if (old == d) {
            sub.row(r).setZero();
            sub(r, r) = 1.0;
            continue;
        }
        throw Error(ErrorCode::AbsorptionNotCertain,
                    "state " + chain.label(old) + " reaches " + chain.label(d) +
                        " only with probability < 1; trajectory distribution is improper",
                    old);
    }
    res.chain = MarkovChain::build(std::move(labels), std::move(sub));
    return res;
}

/// Fundamental matrix (I - Q_d)^-1 of a chain in which d is reachable from
/// every state. Entry (s, k) is the expected number of visits to k before
/// first hitting d, starting from s; the start state counts as one visit.
inline VisitCounts expected_visits(const MarkovChain& chain, StateIndex d) {
    chain.require_state(d);
    const std::vector<bool> reach = can_reach(chain, d);
    std::string offenders;
    for (StateIndex i = 0; i < chain.size(); ++i) {
        if (!reach[static_cast<std::size_t>(i)]) {
            if (!offenders.empty()) offenders += ", ";
            offenders += chain.label(i);
        }
    }
    if (!offenders.empty())
        throw Error(ErrorCode::DestinationUnreachable,
                    "no path to " + chain.label(d) + " from: " + offenders);

    VisitCounts vc;
    vc.destination = d;
    for (StateIndex i = 0; i < chain.size(); ++i)
        if (i != d) vc.transient.push_back(i);
    const auto m = static_cast<StateIndex>(vc.transient.size());
    vc.rows = m == 0 ? Matrix(0, 0) : detail::solve_transient(chain, vc.transient, Matrix::Identity(m, m));
    return vc;
}

}  // namespace trajent
