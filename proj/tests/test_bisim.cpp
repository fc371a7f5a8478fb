#include "doctest.h"

#include "pvgame/bisim.hpp"
#include "pvgame/errors.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace pvgame;

namespace {

Lts random_lts(std::mt19937_64& rng, std::size_t n)
{
    Lts lts;
    lts.add_states(n);
    std::uniform_int_distribution<std::size_t> state(0, n - 1);
    std::uniform_int_distribution<int> coin(0, 9);
    for (std::size_t s = 0; s < n; ++s) {
        for (const char* label : {"a", "b"}) {
            if (coin(rng) < 4)
                continue;
            switch (coin(rng) % 3) {
            case 0:
                lts.add_transition(s, label, 1.0, state(rng));
                break;
            case 1:
                lts.add_transition(s, label, 0.5, state(rng));
                lts.add_transition(s, label, 0.5, state(rng));
                break;
            default:
                lts.add_transition(s, label, 0.25, state(rng));
                lts.add_transition(s, label, 0.75, state(rng));
                break;
            }
        }
    }
    return lts;
}

// Calls f on every set partition of {0..n-1} (restricted growth strings).
void for_each_partition(std::size_t n, const std::function<void(const Partition&)>& f)
{
    std::vector<std::size_t> rgs(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t max_used) {
        if (i == n) {
            f(Partition(rgs));
            return;
        }
        for (std::size_t b = 0; b <= max_used + 1; ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(max_used, b));
        }
    };
    if (n == 0)
        return;
    rgs[0] = 0;
    rec(1, 0);
}

double block_mass(const Lts& lts, std::size_t s, std::size_t label, const std::vector<std::size_t>& targets)
{
    double m = 0.0;
    for (std::size_t t : targets)
        m += lts.mu(s, label, t);
    return m;
}

} // namespace

TEST_CASE("identical behaviour collapses")
{
    Lts lts;
    lts.add_states(3);
    lts.add_transition(0, "alpha", 1.0, 2);
    lts.add_transition(1, "alpha", 1.0, 2);
    Partition p = coarsest_bisimulation(lts);
    CHECK(p.num_blocks() == 2);
    CHECK(p.block_of(0) == p.block_of(1));
}

TEST_CASE("split mass distinguishes states when targets differ")
{
    // P = [0.5]alpha.A + [0.5]alpha.B, Q = [1]alpha.A, A and B inequivalent.
    Lts lts;
    lts.add_states(4); // P, Q, A, B
    lts.add_transition(0, "alpha", 0.5, 2);
    lts.add_transition(0, "alpha", 0.5, 3);
    lts.add_transition(1, "alpha", 1.0, 2);
    lts.add_transition(2, "a", 1.0, 2);
    lts.add_transition(3, "b", 1.0, 3);
    Partition p = coarsest_bisimulation(lts);
    CHECK(p.block_of(0) != p.block_of(1));
    CHECK(p.num_blocks() == 4);
}

TEST_CASE("quotient sums mass into merged blocks")
{
    // P = [0.5]alpha.A1 + [0.5]alpha.A2 with A1 ~ A2.
    Lts lts;
    lts.add_states(3);
    lts.add_transition(0, "alpha", 0.5, 1);
    lts.add_transition(0, "alpha", 0.5, 2);
    lts.add_transition(1, "a", 1.0, 1);
    lts.add_transition(2, "a", 1.0, 2);
    Partition p = coarsest_bisimulation(lts);
    REQUIRE(p.num_blocks() == 2);
    Lts q = quotient(lts, p);
    CHECK(q.num_states() == 2);
    const std::size_t alpha = q.intern_label("alpha");
    CHECK(q.mu(p.block_of(0), alpha, p.block_of(1)) == doctest::Approx(1.0));
}

TEST_CASE("identity partition gives an isomorphic quotient")
{
    std::mt19937_64 rng(5);
    Lts lts = random_lts(rng, 5);
    Lts q = quotient(lts, Partition::discrete(5));
    CHECK(q.num_states() == 5);
    CHECK(q.transitions().size() == lts.transitions().size());
    for (std::size_t s = 0; s < 5; ++s)
        for (std::size_t t = 0; t < 5; ++t)
            for (std::size_t l = 0; l < lts.num_labels(); ++l)
                CHECK(q.mu(s, l, t) == doctest::Approx(lts.mu(s, l, t)));
}

TEST_CASE("quotient rejects a non-bisimulation")
{
    Lts lts;
    lts.add_states(2);
    lts.add_transition(0, "a", 1.0, 0);
    CHECK_THROWS_AS(quotient(lts, Partition(std::vector<std::size_t>{0, 0})), InvariantViolation);
}

TEST_CASE("property: soundness, coarseness and mu preservation on random systems")
{
    std::mt19937_64 rng(99);
    int merged_cases = 0;
    for (int round = 0; round < 150; ++round) {
        const std::size_t n = 2 + round % 5; // 2..6 states
        Lts lts = random_lts(rng, n);
        Partition p = coarsest_bisimulation(lts);
        CHECK(is_bisimulation(lts, p));
        if (p.num_blocks() < n)
            ++merged_cases;

        // Every bisimulation refines the computed one, so nothing coarser exists.
        for_each_partition(n, [&](const Partition& cand) {
            if (is_bisimulation(lts, cand))
                CHECK(cand.refines(p));
        });

        Lts q = quotient(lts, p);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t l = 0; l < lts.num_labels(); ++l)
                for (std::size_t b = 0; b < p.num_blocks(); ++b)
                    CHECK(q.mu(p.block_of(s), l, b)
                          == doctest::Approx(block_mass(lts, s, l, p.members(b))).epsilon(1e-12));
    }
    CHECK(merged_cases > 10);
}

TEST_CASE("refinement is monotone relative to the start partition")
{
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
        Lts lts = random_lts(rng, 6);
        std::vector<std::size_t> seed(6);
        for (auto& x : seed)
            x = rng() % 2;
        Partition init(seed);
        Partition p = coarsest_bisimulation(lts, init);
        CHECK(p.refines(init));
        CHECK(p.num_blocks() >= init.num_blocks());
        CHECK(is_bisimulation(lts, p));
    }
}
