#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <trajent/trajent.hpp>

// Every reference constant below was computed twice before being frozen:
// once by the enumeration oracle in this repo and once by an independent
// linear-algebra implementation outside it. The two-decimal matrix is the
// externally published table for this chain.
namespace support {

/// The canonical five-state walk used throughout the suite:
/// 1 -> {2: .25, 3: .75}, 2 -> 5, 3 -> {2: .5, 4: .5}, 4 -> 5,
/// 5 -> {1: .5, 4: .5}. Irreducible, aperiodic.
inline trajent::MarkovChain five_state_fixture() {
    trajent::Matrix m(5, 5);
    // clang-format off
    m << 0.0, 0.25, 0.75, 0.0, 0.0,
         0.0, 0.0,  0.0,  0.0, 1.0,
         0.0, 0.5,  0.0,  0.5, 0.0,
         0.0, 0.0,  0.0,  0.0, 1.0,
         0.5, 0.0,  0.0,  0.5, 0.0;
    // clang-format on
    return trajent::MarkovChain::build(m);
}

inline constexpr double kH15 = 1.561278124459133;
inline constexpr double kH14 = 3.180040908304193;
inline constexpr double kH11 = 3.561278124459133;
inline constexpr double kH33 = 4.748370832612178;
inline constexpr double kH55 = 1.7806390622295665;
inline constexpr double kLocal1 = 0.8112781244591328;       // h of row (.25, .75)
inline constexpr double kAlpha145 = 0.375;                  // p(visit 4 before 5 | from 1)
inline constexpr double kBernoulli375 = 0.954434002924965;  // h(0.375)
inline constexpr double kH15Avoid4 = 0.9709505944546686;    // h(0.4)
inline constexpr double kEntropyRate = 0.6193527172972405;

/// Pairwise entropies at two decimals.
inline constexpr double kReferenceMatrix[5][5] = {
    {3.56, 3.69, 1.74, 3.18, 1.56},
    {2.00, 5.69, 3.74, 2.59, 0.00},
    {3.00, 3.84, 4.74, 2.29, 1.00},
    {2.00, 5.69, 3.74, 2.59, 0.00},
    {2.00, 5.69, 3.74, 2.59, 1.78},
};

/// Row of expected visit counts from state 1 before first arrival at 5.
inline constexpr double kVisitsRowFrom1[4] = {1.0, 0.625, 0.75, 0.375};

/// Stationary distribution (4, 2.5, 3, 5.5, 8) / 23.
inline constexpr double kStationary[5] = {4.0 / 23, 2.5 / 23, 3.0 / 23, 5.5 / 23, 8.0 / 23};

}  // namespace support

#define REQUIRE_THROWS_CODE(expr, code_)                            \
    do {                                                            \
        try {                                                       \
            (void)(expr);                                           \
            FAIL("expected " #code_ " from " #expr);                \
        } catch (const trajent::Error& caught_) {                   \
            INFO(caught_.what());                                   \
            CHECK(caught_.code() == trajent::ErrorCode::code_);     \
        }                                                           \
    } while (0)
