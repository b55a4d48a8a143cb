#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qss/protocol_rules.hpp"

namespace qss {
namespace {

constexpr double kTol = 1e-12;

RoundRecord record(std::uint64_t id, const std::string& bases, const std::string& outcomes) {
    RoundRecord r;
    r.round_id = id;
    r.bases = parse_bases(bases);
    r.outcomes = parse_outcomes(outcomes);
    r.round_class = classify_round(r.bases);
    r.designation = is_valid(r.round_class) ? Designation::CheckBit : Designation::Discarded;
    return r;
}

TEST(ClassifyRound, Examples) {
    EXPECT_EQ(classify_round(parse_bases("yxx")), RoundClass::OddY);
    EXPECT_EQ(classify_round(parse_bases("yyx")), RoundClass::TwoMod4);
    EXPECT_EQ(classify_round(parse_bases("xxx")), RoundClass::ZeroMod4);
    EXPECT_EQ(classify_round(parse_bases("yyyy")), RoundClass::ZeroMod4);
    EXPECT_EQ(classify_round(parse_bases("yyyyyyx")), RoundClass::TwoMod4);
}

TEST(ClassifyRound, PartitionCountsOddHalf) {
    for (std::size_t n = 2; n <= 12; ++n) {
        std::size_t odd = 0, two = 0, zero = 0;
        const std::size_t dim = std::size_t{1} << n;
        for (std::size_t i = 0; i < dim; ++i) {
            switch (classify_round(basis_vector_from_index(i, n))) {
                case RoundClass::OddY: ++odd; break;
                case RoundClass::TwoMod4: ++two; break;
                case RoundClass::ZeroMod4: ++zero; break;
            }
        }
        EXPECT_EQ(odd + two + zero, dim);
        EXPECT_EQ(odd, dim / 2) << n;
    }
}

TEST(ReconstructSecretBit, Examples) {
    EXPECT_EQ(reconstruct_secret_bit(parse_outcomes("00"), RoundClass::TwoMod4), Outcome::One);
    EXPECT_EQ(reconstruct_secret_bit(parse_outcomes("0000"), RoundClass::ZeroMod4), Outcome::Zero);
    EXPECT_EQ(reconstruct_secret_bit(parse_outcomes("101"), RoundClass::ZeroMod4), Outcome::Zero);
    EXPECT_EQ(reconstruct_secret_bit(parse_outcomes("100"), RoundClass::ZeroMod4), Outcome::One);
    EXPECT_THROW(reconstruct_secret_bit(parse_outcomes("00"), RoundClass::OddY), InvalidRoundError);
}

// n = 4, m = 0: Alice's sampled bit always equals the participants' parity.
TEST(ReconstructSecretBit, MatchesSampledAlice) {
    const auto ghz = make_ghz(4);
    const BasisVector b(4, Basis::X);
    Rng gen(8);
    for (int t = 0; t < 2000; ++t) {
        const auto o = measure_all(ghz, b, gen);
        ASSERT_EQ(reconstruct_secret_bit(std::span<const Outcome>(o).subspan(1), RoundClass::ZeroMod4), o[0]);
    }
}

// Every even-Y basis vector, n = 2..8: reconstruction never disagrees with Alice.
TEST(ParityLaw, HoldsForEveryValidBasisVector) {
    Rng gen(1234);
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto ghz = make_ghz(n);
        const std::size_t dim = std::size_t{1} << n;
        for (std::size_t bi = 0; bi < dim; ++bi) {
            const auto b = basis_vector_from_index(bi, n);
            const auto c = classify_round(b);
            if (!is_valid(c)) continue;
            for (int t = 0; t < 200; ++t) {
                const auto o = measure_all(ghz, b, gen);
                const Outcome total = parity(o);
                ASSERT_EQ(total, c == RoundClass::TwoMod4 ? Outcome::One : Outcome::Zero);
                ASSERT_EQ(reconstruct_secret_bit(std::span<const Outcome>(o).subspan(1), c), o[0]);
            }
        }
    }
}

// Odd-Y rounds: given the participants' outcomes, Alice's two possible bits
// carry equal probability. Exact, from the closed-form distribution.
TEST(OddYAmbiguity, ConditionalIsExactlyUniform) {
    for (std::size_t n = 2; n <= 8; ++n) {
        const std::size_t dim = std::size_t{1} << n;
        const std::size_t alice_bit = dim >> 1;
        for (std::size_t bi = 0; bi < dim; ++bi) {
            const auto b = basis_vector_from_index(bi, n);
            if (classify_round(b) != RoundClass::OddY) continue;
            for (std::size_t rest = 0; rest < alice_bit; ++rest) {
                const double a0 = std::abs(amplitude_in_bases(b, index_to_outcomes(rest, n)));
                const double a1 = std::abs(amplitude_in_bases(b, index_to_outcomes(rest | alice_bit, n)));
                ASSERT_GT(a0, 0.0);
                ASSERT_NEAR(a0, a1, kTol) << to_string(b);
            }
        }
    }
}

// With any nonempty subset of participants absent, the remaining outcomes
// leave Alice's bit at 1/2 on valid rounds.
TEST(CollusionNecessity, PartialCoalitionLearnsNothing) {
    for (std::size_t n = 3; n <= 7; ++n) {
        const std::size_t dim = std::size_t{1} << n;
        const std::size_t participants_mask = (dim >> 1) - 1;
        for (std::size_t bi = 0; bi < dim; ++bi) {
            const auto b = basis_vector_from_index(bi, n);
            if (!is_valid(classify_round(b))) continue;
            const auto dist = distribution_in_bases(b);
            for (std::size_t absent = 1; absent <= participants_mask; ++absent) {
                // joint[(alice, visible outcomes)] marginalized over absent parties
                std::vector<double> p0(dim), p1(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    const std::size_t visible = i & participants_mask & ~absent;
                    ((i >> (n - 1)) & 1U ? p1 : p0)[visible] += dist[i];
                }
                for (std::size_t v = 0; v < dim; ++v) {
                    if (p0[v] + p1[v] == 0.0) continue;
                    ASSERT_NEAR(p0[v], p1[v], kTol) << "n=" << n << ' ' << to_string(b) << " absent=" << absent;
                }
            }
        }
    }
}

TEST(Sift, Examples) {
    EXPECT_TRUE(sift(std::vector<RoundRecord>{}).empty());
    EXPECT_TRUE(sift(std::vector<RoundRecord>{record(0, "yxx", "000")}).empty());

    std::vector<RoundRecord> mixed{record(0, "yxx", "000"), record(1, "xxx", "011"), record(2, "yyy", "010"),
                                   record(3, "yyx", "100"), record(4, "xxy", "001")};
    mixed[3].designation = Designation::KeyBit;
    const auto kept = sift(mixed);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].round_id, 1u);
    EXPECT_EQ(kept[1].round_id, 3u);
    EXPECT_EQ(kept[1].designation, Designation::KeyBit);
}

TEST(EstimateErrorRate, EmptyIsFlagged) {
    const auto e = estimate_error_rate(std::vector<RoundRecord>{});
    EXPECT_EQ(e.rate, 0.0);
    EXPECT_TRUE(e.insufficient_samples);
}

TEST(EstimateErrorRate, CountsDisagreements) {
    // xxx: Alice = parity(rest); yyx: Alice = parity(rest) ^ 1
    std::vector<RoundRecord> rs{record(0, "xxx", "011"), record(1, "xxx", "111"), record(2, "yyx", "100"),
                                record(3, "yyx", "000")};
    const auto e = estimate_error_rate(rs);
    EXPECT_EQ(e.samples, 4u);
    EXPECT_EQ(e.errors, 2u);
    EXPECT_DOUBLE_EQ(e.rate, 0.5);
    EXPECT_FALSE(e.insufficient_samples);
}

TEST(EstimateErrorRate, RejectsOddY) {
    std::vector<RoundRecord> rs{record(0, "yxx", "000")};
    EXPECT_THROW(estimate_error_rate(rs), InvalidInputError);
}

TEST(EstimateErrorRate, NoiselessSimulationIsExactlyZero) {
    const auto ghz = make_ghz(3);
    Rng gen(99);
    std::vector<RoundRecord> rs;
    while (rs.size() < 10000) {
        RoundRecord r;
        r.bases = BasisVector(3);
        for (auto& b : r.bases) b = coin(gen) ? Basis::Y : Basis::X;
        r.round_class = classify_round(r.bases);
        r.outcomes = measure_all(ghz, r.bases, gen);
        if (is_valid(r.round_class)) rs.push_back(std::move(r));
    }
    EXPECT_EQ(estimate_error_rate(rs).rate, 0.0);
}

}  // namespace
}  // namespace qss
