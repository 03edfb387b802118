#include <gtest/gtest.h>

#include <functional>

#include "cotpot/oracle.hpp"
#include "cotpot/text.hpp"
#include "test_support.hpp"

using namespace cotpot;
using namespace cotpot::testing;

namespace {

// Every symbol prefix of positive probability, end symbol included.
void for_each_prefix(const ToyLM& toy, std::vector<Symbol>& prefix, bool ended,
                     const std::function<void(const std::vector<Symbol>&)>& fn) {
    fn(prefix);
    std::vector<Symbol> history;
    for (Symbol s : prefix)
        if (s != kEndSymbol) history.push_back(s);
    if (toy.is_terminal(history, ended)) return;
    for (const auto& t : toy.next(history)) {
        if (t.probability <= 0.0) continue;
        prefix.push_back(t.next);
        for_each_prefix(toy, prefix, t.next == kEndSymbol, fn);
        prefix.pop_back();
    }
}

std::vector<std::string> names(const ToyLM& toy, const std::vector<Symbol>& prefix) {
    std::vector<std::string> out;
    for (Symbol s : prefix) out.emplace_back(s == kEndSymbol ? std::string(kEndSymbolName) : toy.name(s));
    return out;
}

}  // namespace

TEST(Oracle, ChainPrefixPotential) {
    const auto toy = load_toy("chain3.json");
    const auto q = make_question("q", "1");
    EXPECT_NEAR(exact_potential(toy, q, std::vector<Symbol>{toy.symbol("A")}), 0.375, kOracleTolerance);
    EXPECT_NEAR(exact_potential(toy, q, "A"), 0.375, kOracleTolerance);
    EXPECT_NEAR(exact_potential(toy, q, std::vector<Symbol>{}), ReferenceOracle("chain3.json").potential({}, "1"),
                kOracleTolerance);
}

TEST(Oracle, AgreesWithReferenceOnRandomModels) {
    for (Seed seed = 0; seed < 40; ++seed) {
        const auto toy = ToyLM::random(seed);
        const ReferenceOracle ref(toy.to_json());
        const auto q = make_question("q", "1");
        std::vector<Symbol> prefix;
        for_each_prefix(toy, prefix, false, [&](const std::vector<Symbol>& p) {
            EXPECT_NEAR(exact_potential(toy, q, p), ref.potential(names(toy, p), "1"), kOracleTolerance);
        });
    }
}

TEST(Oracle, TowerProperty) {
    for (Seed seed = 100; seed < 130; ++seed) {
        const auto toy = ToyLM::random(seed);
        const auto q = make_question("q", "1");
        std::vector<Symbol> prefix;
        for_each_prefix(toy, prefix, false, [&](const std::vector<Symbol>& p) {
            std::vector<Symbol> history;
            bool ended = false;
            for (Symbol s : p) {
                if (s == kEndSymbol)
                    ended = true;
                else
                    history.push_back(s);
            }
            if (toy.is_terminal(history, ended)) return;
            double mixed = 0.0;
            for (const auto& t : toy.next(history)) {
                if (t.probability <= 0.0) continue;
                auto longer = p;
                longer.push_back(t.next);
                mixed += t.probability * exact_potential(toy, q, longer);
            }
            EXPECT_NEAR(mixed, exact_potential(toy, q, p), kOracleTolerance);
        });
    }
}

TEST(Oracle, TextPrefixWithAnswerIsDecided) {
    const auto toy = load_toy("uniform2.json");
    const auto q = make_question("q", "1");
    EXPECT_DOUBLE_EQ(exact_potential(toy, q, "x y \\boxed{0}"), 0.0);
    EXPECT_DOUBLE_EQ(exact_potential(toy, q, "x x \\boxed{1}"), 1.0);
    EXPECT_DOUBLE_EQ(exact_potential(toy, q, "x x"), 1.0);
    EXPECT_DOUBLE_EQ(exact_potential(toy, q, "y"), 0.5);
}

TEST(Oracle, StabilityOfWrongAnswer) {
    const auto toy = load_toy("stability_wrong.json");
    const auto q = make_question("q", "1");
    EXPECT_NEAR(exact_stability(toy, q, "A", "0"), 0.8, kOracleTolerance);
    EXPECT_NEAR(exact_stability(toy, q, "A", "1"), exact_potential(toy, q, "A"), kOracleTolerance);
    EXPECT_DOUBLE_EQ(exact_stability(toy, q, "A B \\boxed{0}", "0"), 1.0);
}

TEST(Oracle, NullEventIsAnError) {
    const auto toy = load_toy("chain3.json");
    const auto q = make_question("q", "1");
    try {
        exact_potential(toy, q, "C A");
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "conditioning on null event");
    }
    EXPECT_THROW(exact_potential(toy, q, std::vector<Symbol>{toy.symbol("A"), kEndSymbol}), Error);
}

TEST(Oracle, ExactCurveOnChunkGrid) {
    const auto toy = load_toy("curve3.json");
    Trace t;
    t.question_id = "q";
    t.text = "A A \\boxed{1}";
    const auto curve = exact_potential_curve(toy, make_question("q", "1"), t, 2);
    ASSERT_EQ(curve.points.size(), 3u);
    EXPECT_TRUE(curve.exact);
    EXPECT_DOUBLE_EQ(curve.points[0].estimate, 0.5);
    EXPECT_DOUBLE_EQ(curve.points[1].estimate, 0.75);
    EXPECT_DOUBLE_EQ(curve.points[2].estimate, 1.0);
}

TEST(Martingale, HoldsOnRandomModels) {
    for (Seed seed = 0; seed < 100; ++seed) {
        const auto toy = ToyLM::random(seed);
        const auto report = check_martingale(toy, make_question("q", "1"));
        EXPECT_TRUE(report.holds) << "seed " << seed;
        EXPECT_EQ(report.steps.size(), toy.horizon());
        EXPECT_GT(report.correct_probability, 0.0);
    }
}

TEST(Martingale, FirstStepMatchesHandComputation) {
    // On correct runs of the witness fixture: E[pot after one token] =
    // sum over first symbols of P(s | correct) * pot(s) = (0.5*1*1 + 0.5*0.1*0.1) / 0.55.
    const auto toy = load_toy("witness.json");
    const auto report = check_martingale(toy, make_question("q", "1"));
    ASSERT_TRUE(report.holds);
    EXPECT_NEAR(report.correct_probability, 0.55, kOracleTolerance);
    EXPECT_NEAR(report.steps[0].expected_now, 0.55, kOracleTolerance);
    EXPECT_NEAR(report.steps[0].expected_next, (0.5 + 0.005) / 0.55, kOracleTolerance);
    EXPECT_NEAR(report.steps[1].expected_next, 1.0, kOracleTolerance);
}

TEST(Martingale, WitnessPathDecreasesPointwise) {
    const auto toy = load_toy("witness.json");
    const auto q = make_question("q", "1");
    bool found = false;
    for (const auto& path : enumerate_token_paths(toy, q)) {
        if (!path.correct) continue;
        const auto pots = pointwise_potentials(toy, q, path);
        ASSERT_EQ(pots.size(), path.tokens.size() + 1);
        EXPECT_DOUBLE_EQ(pots.back(), 1.0);
        for (std::size_t t = 0; t + 1 < pots.size(); ++t)
            if (pots[t + 1] < pots[t] - kOracleTolerance) found = true;
    }
    EXPECT_TRUE(found);
    EXPECT_NEAR(exact_potential(toy, q, "b"), 0.1, kOracleTolerance);
}

TEST(Martingale, VacuousWithoutCorrectPaths) {
    try {
        check_martingale(load_toy("det.json"), make_question("q", "1"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "proposition vacuous");
    }
}

TEST(Martingale, TokenPathsSumToOne) {
    for (Seed seed = 0; seed < 20; ++seed) {
        const auto toy = ToyLM::random(seed);
        const auto q = make_question("q", "1");
        double total = 0.0, correct = 0.0;
        for (const auto& p : enumerate_token_paths(toy, q)) {
            total += p.probability;
            if (p.correct) correct += p.probability;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NEAR(correct, exact_potential(toy, q, std::vector<Symbol>{}), 1e-12);
    }
}
