#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <trajent/conditional.hpp>
#include <trajent/entropy.hpp>
#include <trajent/oracle.hpp>

#include "support/fixture.hpp"
#include "support/random_chains.hpp"

using Catch::Matchers::WithinAbs;
using namespace trajent;

TEST_CASE("avoid transform rescales rows and keeps them stochastic") {
    const MarkovChain chain = support::five_state_fixture();
    const MarkovChain t = avoid_transform(chain, 3, 4);  // avoid 4 on the way to 5

    // survival-ratio arithmetic: p(reach 5 before 4) is 0.625 from 1, 0.5 from 3
    CHECK_THAT(t.prob(0, 1), WithinAbs(0.4, 1e-12));
    CHECK_THAT(t.prob(0, 2), WithinAbs(0.6, 1e-12));
    CHECK_THAT(t.prob(2, 1), WithinAbs(1.0, 1e-12));
    CHECK(t.prob(2, 3) == 0.0);

    // both targets are absorbing
    CHECK(t.prob(3, 3) == 1.0);
    CHECK(t.prob(4, 4) == 1.0);

    for (StateIndex i = 0; i < t.size(); ++i)
        CHECK_THAT(t.matrix().row(i).sum(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("entropy avoiding a state") {
    const MarkovChain chain = support::five_state_fixture();
    CHECK_THAT(entropy_avoiding(chain, 0, 4, 3), WithinAbs(support::kH15Avoid4, 1e-12));

    REQUIRE_THROWS_CODE(entropy_avoiding(chain, 0, 4, 4), TargetsEqual);
    REQUIRE_THROWS_CODE(entropy_avoiding(chain, 0, 4, 0), TargetsEqual);
    // from 2 every walk to 1 goes through 5
    REQUIRE_THROWS_CODE(entropy_avoiding(chain, 1, 0, 4), AlwaysPassesThroughU);
}

TEST_CASE("entropy through a single state") {
    const MarkovChain chain = support::five_state_fixture();

    // only 1-3-4-5 passes through 4
    CHECK_THAT(entropy_via_single(chain, 0, 4, 3), WithinAbs(0.0, 1e-9));

    // from 3 the only way to 1 leads through 5 = d
    REQUIRE_THROWS_CODE(entropy_via_single(chain, 2, 4, 0), NeverPassesThroughU);

    // every 2 -> 1 walk hits 5, so conditioning on 5 changes nothing
    CHECK(entropy_via_single(chain, 1, 0, 4) == trajectory_entropy(chain, 1, 0));

    REQUIRE_THROWS_CODE(entropy_via_single(chain, 0, 4, 4), TargetsEqual);
}

TEST_CASE("two-way split identity on the fixture") {
    const MarkovChain chain = support::five_state_fixture();
    const Bits h_sd = trajectory_entropy(chain, 0, 4);
    for (StateIndex u : {1, 2, 3}) {
        const double alpha = absorption_probabilities(chain, u, 4).alpha(0);
        if (alpha <= 0.0 || alpha >= 1.0) continue;
        const Bits recombined = alpha * entropy_via_single(chain, 0, 4, u) +
                                (1.0 - alpha) * entropy_avoiding(chain, 0, 4, u) +
                                bernoulli_entropy(alpha);
        INFO("through state " << chain.label(u));
        CHECK_THAT(recombined, WithinAbs(h_sd, 1e-9));
    }
}

TEST_CASE("conditioning on waypoint sequences, fixture values") {
    const MarkovChain chain = support::five_state_fixture();

    SECTION("single waypoint 4: one trajectory remains") {
        const CondResult r = entropy_via_sequence(chain, {0, 4, {3}});
        CHECK_THAT(r.entropy, WithinAbs(0.0, 1e-9));
        REQUIRE(r.per_leg.size() == 2);
        REQUIRE(r.alphas.size() == 1);
    }

    SECTION("single waypoint 3: one residual bit") {
        const CondResult r = entropy_via_sequence(chain, {0, 4, {2}});
        CHECK_THAT(r.entropy, WithinAbs(1.0, 1e-9));
    }

    SECTION("sequence (3,2): fully determined") {
        const CondResult r = entropy_via_sequence(chain, {0, 4, {2, 1}});
        CHECK_THAT(r.entropy, WithinAbs(0.0, 1e-9));
        REQUIRE(r.per_leg.size() == 3);
        REQUIRE(r.alphas.size() == 2);
        CHECK_THAT(r.alphas[0], WithinAbs(0.25, 1e-12));
        CHECK_THAT(r.alphas[1], WithinAbs(0.5, 1e-12));
        double total = 0.0;
        for (Bits leg : r.per_leg) total += leg;
        CHECK_THAT(r.entropy, WithinAbs(total, 1e-12));
    }

    SECTION("empty sequence falls back to the plain entropy") {
        const CondResult r = entropy_via_sequence(chain, {0, 4, {}});
        CHECK_THAT(r.entropy, WithinAbs(support::kH15, 1e-12));
        REQUIRE(r.per_leg.size() == 1);
        CHECK(r.alphas.empty());
    }
}

TEST_CASE("sequence of length one agrees with the single-state form") {
    const MarkovChain chain = support::five_state_fixture();
    for (StateIndex s = 0; s < 5; ++s)
        for (StateIndex d = 0; d < 5; ++d)
            for (StateIndex u = 0; u < 5; ++u) {
                if (u == s || u == d || s == d) continue;
                Bits single = -1.0, sequence = -1.0;
                bool single_throws = false, sequence_throws = false;
                try {
                    single = entropy_via_single(chain, s, d, u);
                } catch (const Error&) {
                    single_throws = true;
                }
                try {
                    sequence = entropy_via_sequence(chain, {s, d, {u}}).entropy;
                } catch (const Error&) {
                    sequence_throws = true;
                }
                INFO("s=" << s << " d=" << d << " u=" << u);
                REQUIRE(single_throws == sequence_throws);
                if (!single_throws) CHECK_THAT(single, WithinAbs(sequence, 1e-9));
            }
}

TEST_CASE("waypoint closed forms agree with enumeration on the fixture") {
    const MarkovChain chain = support::five_state_fixture();
    const auto full = enumerate_trajectories(chain, 0, 4);
    REQUIRE_THAT(full.covered_mass, WithinAbs(1.0, 1e-12));

    const std::vector<std::vector<StateIndex>> vias = {{2}, {1}, {3}, {2, 1}, {2, 3}};
    for (const auto& via : vias) {
        INFO("via size " << via.size());
        const CondResult closed = entropy_via_sequence(chain, {0, 4, via});
        CHECK_THAT(closed.entropy, WithinAbs(oracle_conditional_sequence(full, via), 1e-9));
    }
}

TEST_CASE("conditioning with a repeated waypoint") {
    const MarkovChain chain = support::five_state_fixture();
    // walks 1 -> 4 that pass through 5 at least twice on the way; every
    // return to 5 multiplies the trajectory count, so bound the sweep
    OracleConfig config;
    config.max_paths = 1'000'000;
    config.residual_mass_bound = 1e-7;
    const auto full = enumerate_trajectories(chain, 0, 3, config);
    const std::vector<StateIndex> via = {4, 4};
    const CondResult closed = entropy_via_sequence(chain, {0, 3, via});
    CHECK_THAT(closed.entropy, WithinAbs(oracle_conditional_sequence(full, via), 1e-5));
    CHECK(closed.entropy > 0.0);
}

TEST_CASE("round trips condition through the split destination") {
    const MarkovChain chain = support::five_state_fixture();
    const auto returns = enumerate_trajectories(chain, 0, 0);
    REQUIRE_THAT(returns.covered_mass, WithinAbs(1.0, 1e-12));
    const std::vector<StateIndex> via = {2};
    const CondResult closed = entropy_via_sequence(chain, {0, 0, via});
    CHECK_THAT(closed.entropy, WithinAbs(oracle_conditional_sequence(returns, via), 1e-9));
}

TEST_CASE("infeasible waypoint sequences carry the leg index") {
    const MarkovChain chain = support::five_state_fixture();

    try {
        entropy_via_sequence(chain, {0, 4, {3, 1}});  // after 4 the walk must pass 5
        FAIL("expected ImpossibleConditioning");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImpossibleConditioning);
        CHECK(e.index() == 1);
    }

    try {
        entropy_via_sequence(chain, {0, 4, {1, 2}});  // 2 -> 3 cannot dodge 5
        FAIL("expected ImpossibleConditioning");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImpossibleConditioning);
        CHECK(e.index() == 1);
    }

    try {
        entropy_via_sequence(chain, {0, 4, {1, 4, 2}});
        FAIL("expected DestinationInVia");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DestinationInVia);
        CHECK(e.index() == 1);
    }
}

TEST_CASE("relay-network gap formula matches its own chain") {
    // 1 -> {2: 1-e0, 3: e0}, 2 -> 3, 3 -> {4: e1, 5: 1-e1},
    // 4 -> two equiprobable relays -> 2, 5 -> 1
    const double e0 = 0.35, e1 = 0.3;
    const int m = 2;
    const StateIndex n = 5 + m;
    Matrix p = Matrix::Zero(n, n);
    p(0, 1) = 1 - e0;
    p(0, 2) = e0;
    p(1, 2) = 1.0;
    p(2, 3) = e1;
    p(2, n - 1) = 1 - e1;
    for (int k = 0; k < m; ++k) {
        p(3, 4 + k) = 1.0 / m;
        p(4 + k, 1) = 1.0;
    }
    p(n - 1, 0) = 1.0;
    const MarkovChain chain = MarkovChain::build(p);

    const Bits h_sequence = entropy_via_sequence(chain, {0, n - 1, {2, 1}}).entropy;
    CHECK_THAT(h_sequence,
               WithinAbs(bernoulli_entropy(e0) + std::log2(m) + trajectory_entropy(chain, 2, n - 1),
                         1e-9));

    OracleConfig config;
    config.residual_mass_bound = 1e-9;
    const auto full = enumerate_trajectories(chain, 0, n - 1, config);
    REQUIRE(full.covered_mass >= 1.0 - 1e-9);
    const Bits h_set = oracle_conditional_set(full, {1, 2});
    CHECK_THAT(h_sequence - h_set, WithinAbs(figure2_gap(e0, e1, m), 1e-5));
}

TEST_CASE("gap formula edge cases") {
    // m = 1 and e1 = 1 collapse the relay detour
    CHECK_THAT(figure2_gap(0.5, 1.0, 1), WithinAbs(0.0, 1e-12));
    CHECK_THAT(figure2_gap(0.5, 0.5, 16), WithinAbs(2.748370832612177, 1e-12));

    REQUIRE_THROWS_CODE(figure2_gap(0.0, 0.5, 4), OutOfRange);
    REQUIRE_THROWS_CODE(figure2_gap(1.0, 0.5, 4), OutOfRange);
    REQUIRE_THROWS_CODE(figure2_gap(0.5, 0.0, 4), OutOfRange);
    REQUIRE_THROWS_CODE(figure2_gap(0.5, 1.1, 4), OutOfRange);
    REQUIRE_THROWS_CODE(figure2_gap(0.5, 0.5, 0), OutOfRange);
}

TEST_CASE("random chains keep the split identity and stochastic transforms") {
    std::mt19937_64 rng(77);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const MarkovChain chain = support::random_irreducible_chain(rng);
        const StateIndex n = chain.size();
        const StateIndex s = 0, d = n - 1;
        const Bits h_sd = trajectory_entropy(chain, s, d);
        for (StateIndex u = 1; u + 1 < n; ++u) {
            const double alpha = absorption_probabilities(chain, u, d).alpha(s);
            if (alpha <= 0.0 || alpha >= 1.0) continue;
            const Bits recombined = alpha * entropy_via_single(chain, s, d, u) +
                                    (1.0 - alpha) * entropy_avoiding(chain, s, d, u) +
                                    bernoulli_entropy(alpha);
            CHECK_THAT(recombined, WithinAbs(h_sd, 1e-9));

            const MarkovChain t = avoid_transform(chain, u, d);
            for (StateIndex i = 0; i < n; ++i)
                CHECK_THAT(t.matrix().row(i).sum(), WithinAbs(1.0, 1e-9));
            ++checked;
        }
    }
    CHECK(checked > 20);
}
