#pragma once

#include <Eigen/LU>

#include "trajent/chain.hpp"
#include "trajent/graph.hpp"

namespace trajent {

/// Stationary distribution of an irreducible chain, solved as the linear
/// system pi P = pi with the normalization sum(pi) = 1 replacing one
/// redundant equation. Periodicity is fine; the solution is still unique.
inline Vector stationary_distribution(const MarkovChain& chain) {
    if (!is_irreducible(chain))
        throw Error(ErrorCode::NotIrreducible, "stationary distribution requires an irreducible chain");
    const StateIndex n = chain.size();
    if (n == 1) return Vector::Ones(1);

    Matrix a = chain.matrix().transpose() - Matrix::Identity(n, n);
    a.row(n - 1).setOnes();
    Vector b = Vector::Zero(n);
    b(n - 1) = 1.0;
    Vector pi = a.partialPivLu().solve(b);

    const double residual = (pi.transpose() * chain.matrix() - pi.transpose()).cwiseAbs().maxCoeff();
    if (!pi.allFinite() || residual > kRowSumTolerance)
        throw Error(ErrorCode::SingularSystem,
                    "stationary solve residual " + std::to_string(residual));
    return pi;
}

/// Entropy rate sum_i pi(i) H(P_i.), bits per step.
inline Bits entropy_rate(const MarkovChain& chain) {
    const Vector pi = stationary_distribution(chain);
    return pi.dot(local_entropies(chain));
}

}  // namespace trajent
