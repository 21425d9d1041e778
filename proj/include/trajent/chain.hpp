#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trajent/error.hpp"

namespace trajent {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using StateIndex = Eigen::Index;

/// Entropies are base-2 throughout; values are bits.
using Bits = double;

/// Row sums may deviate from 1 by at most this much; smaller deviations are
/// renormalized away, larger ones are rejected as data errors.
inline constexpr double kRowSumTolerance = 1e-9;

/// Solver outputs this close to 0 or 1 are treated as exactly 0 or 1.
inline constexpr double kAbsorptionEps = 1e-12;

/// Binary entropy in bits, with 0 log 0 = 0.
inline Bits bernoulli_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorCode::OutOfRange, "probability must lie in [0,1], got " + std::to_string(p));
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// A finite Markov chain: labelled states and a row-stochastic transition
/// matrix. Immutable after construction; transforms return new chains.
class MarkovChain {
  public:
    /// Validates and builds a chain. Rows whose sums are within
    /// kRowSumTolerance of 1 are renormalized; anything worse is rejected.
    static MarkovChain build(std::vector<std::string> labels, Matrix rows) {
        const StateIndex n = rows.rows();
        if (n < 1 || rows.cols() != n)
            throw Error(ErrorCode::NonSquare,
                        "transition matrix must be square and non-empty (" + std::to_string(rows.rows()) +
                            "x" + std::to_string(rows.cols()) + ")");
        if (static_cast<StateIndex>(labels.size()) != n)
            throw Error(ErrorCode::LabelCountMismatch,
                        std::to_string(labels.size()) + " labels for " + std::to_string(n) + " states");
        for (StateIndex i = 0; i < n; ++i) {
            for (StateIndex j = 0; j < n; ++j) {
                const double p = rows(i, j);
                if (!std::isfinite(p) || p < 0.0)
                    throw Error(ErrorCode::NegativeEntry,
                                "entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                                    std::to_string(p),
                                i);
            }
            const double sum = rows.row(i).sum();
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                throw Error(ErrorCode::RowSumViolation,
                            "row " + std::to_string(i) + " sums to " + std::to_string(sum), i);
            rows.row(i) /= sum;
        }
        std::unordered_map<std::string, StateIndex> by_label;
        by_label.reserve(labels.size());
        for (StateIndex i = 0; i < n; ++i) {
            if (!by_label.emplace(labels[i], i).second)
                throw Error(ErrorCode::DuplicateLabel, "label \"" + labels[i] + "\"", i);
        }
        return MarkovChain(std::move(labels), std::move(rows), std::move(by_label));
    }

    /// Convenience: states auto-labelled "1".."N".
    static MarkovChain build(Matrix rows) {
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(rows.rows()));
        for (StateIndex i = 0; i < rows.rows(); ++i) labels.push_back(std::to_string(i + 1));
        return build(std::move(labels), std::move(rows));
    }

    StateIndex size() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }
    double prob(StateIndex from, StateIndex to) const { return matrix_(from, to); }
    const std::string& label(StateIndex i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool has_state(StateIndex i) const { return i >= 0 && i < size(); }

    void require_state(StateIndex i) const {
        if (!has_state(i))
            throw Error(ErrorCode::UnknownState, "state index " + std::to_string(i), i);
    }

    /// Index of a label, or UnknownState.
    StateIndex index_of(const std::string& label) const {
        auto it = by_label_.find(label);
        if (it == by_label_.end())
            throw Error(ErrorCode::UnknownState, "no state labelled \"" + label + "\"");
        return it->second;
    }

  private:
    MarkovChain(std::vector<std::string> labels, Matrix matrix,
                std::unordered_map<std::string, StateIndex> by_label)
        : labels_(std::move(labels)), matrix_(std::move(matrix)), by_label_(std::move(by_label)) {}

    std::vector<std::string> labels_;
    Matrix matrix_;
    std::unordered_map<std::string, StateIndex> by_label_;
};

/// A single source-to-destination path together with its probability. The
/// destination appears only as the final state.
struct Trajectory {
    std::vector<StateIndex> states;
    double probability = 0.0;
};

/// Shannon entropy of state i's outgoing distribution, in bits.
inline Bits local_entropy(const MarkovChain& chain, StateIndex i) {
    chain.require_state(i);
    Bits h = 0.0;
    for (StateIndex j = 0; j < chain.size(); ++j) {
        const double p = chain.prob(i, j);
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

inline Vector local_entropies(const MarkovChain& chain) {
    Vector h(chain.size());
    for (StateIndex i = 0; i < chain.size(); ++i) h(i) = local_entropy(chain, i);
    return h;
}

/// Probability of traversing exactly this state sequence, stopping at its
/// final state. Zero if any step has no probability mass.
inline double trajectory_probability(const MarkovChain& chain, std::span<const StateIndex> states) {
    if (states.size() < 2)
        throw Error(ErrorCode::OutOfRange, "a trajectory needs at least two states");
    for (StateIndex s : states) chain.require_state(s);
    const StateIndex d = states.back();
    for (std::size_t i = 1; i + 1 < states.size(); ++i) {
        if (states[i] == d)
            throw Error(ErrorCode::DestinationRevisited,
                        "destination " + chain.label(d) + " occurs at interior position " + std::to_string(i),
                        static_cast<long>(i));
    }
    double p = 1.0;
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        p *= chain.prob(states[i], states[i + 1]);
        if (p == 0.0) return 0.0;
    }
    return p;
}

inline double trajectory_probability(const MarkovChain& chain, const std::vector<StateIndex>& states) {
    return trajectory_probability(chain, std::span<const StateIndex>(states));
}

/// Splits state s: s keeps its outgoing row, every transition into s is
/// redirected into a fresh absorbing state s' appended at index N. Return
/// trajectories s..s of the original chain become s..s' trajectories.
inline std::pair<MarkovChain, StateIndex> split_state(const MarkovChain& chain, StateIndex s) {
    chain.require_state(s);
    const StateIndex n = chain.size();
    Matrix m = Matrix::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = chain.matrix();
    m.block(0, n, n, 1) = m.block(0, s, n, 1);
    m.block(0, s, n, 1).setZero();
    m(n, n) = 1.0;

    std::vector<std::string> labels = chain.labels();
    std::string prime = chain.label(s) + "'";
    auto taken = [&](const std::string& name) {
        for (const auto& l : labels)
            if (l == name) return true;
        return false;
    };
    while (taken(prime)) prime += "'";
    labels.push_back(std::move(prime));
    return {MarkovChain::build(std::move(labels), std::move(m)), n};
}

}  // namespace trajent
