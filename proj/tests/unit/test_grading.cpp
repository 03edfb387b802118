#include <gtest/gtest.h>

#include <random>

#include "cotpot/grading.hpp"

using namespace cotpot;

TEST(Extract, BoxedAnswer) {
    const auto r = extract_answer("so the answer is \\boxed{513}", AnswerKind::integer);
    ASSERT_TRUE(r.extracted);
    EXPECT_EQ(*r.extracted, "513");
    EXPECT_EQ(r.method, ExtractionMethod::boxed);
}

TEST(Extract, LastBoxedWins) {
    const auto r = extract_answer("first \\boxed{12} then \\boxed{\\frac{1}{2}} and \\boxed{40}", AnswerKind::integer);
    EXPECT_EQ(*r.extracted, "40");
    const auto nested = extract_answer("\\boxed{\\frac{1}{2}}", AnswerKind::exact_string);
    EXPECT_EQ(*nested.extracted, "\\frac{1}{2}");
}

TEST(Extract, AnswerPhraseWithHedge) {
    const auto r = extract_answer("Combining the cases, the answer is likely 80.", AnswerKind::integer);
    ASSERT_TRUE(r.extracted);
    EXPECT_EQ(*r.extracted, "80");
    EXPECT_EQ(r.method, ExtractionMethod::final_answer_phrase);
}

TEST(Extract, PhraseBeatsLaterIntegers) {
    const auto r = extract_answer("Final answer: 42. Checked with 7 cases.", AnswerKind::integer);
    EXPECT_EQ(*r.extracted, "42");
    const auto decimal = extract_answer("the answer is 3.5 or 12", AnswerKind::integer);
    EXPECT_EQ(*decimal.extracted, "12");
}

TEST(Extract, LastIntegerFallback) {
    const auto r = extract_answer("we get 12 then 15 and finally -3", AnswerKind::integer);
    EXPECT_EQ(*r.extracted, "-3");
    EXPECT_EQ(r.method, ExtractionMethod::last_integer);
    EXPECT_EQ(*extract_answer("x2 is 7, 2.5 is not", AnswerKind::integer).extracted, "7");
}

TEST(Extract, NoDigits) {
    const auto r = extract_answer("no digits here", AnswerKind::integer);
    EXPECT_FALSE(r.extracted);
    EXPECT_EQ(r.method, ExtractionMethod::none);
    EXPECT_FALSE(grade_text("no digits here", "1", AnswerKind::integer).correct);
}

TEST(Extract, MultipleChoice) {
    EXPECT_EQ(*extract_answer("Between A and C, I pick C", AnswerKind::multiple_choice).extracted, "C");
    const auto phrase = extract_answer("The answer is (B). Also consider D later", AnswerKind::multiple_choice);
    EXPECT_EQ(*phrase.extracted, "B");
    EXPECT_EQ(phrase.method, ExtractionMethod::final_answer_phrase);
    EXPECT_EQ(extract_answer("Cats and Dogs", AnswerKind::multiple_choice).method, ExtractionMethod::none);
}

TEST(Extract, ExactStringPhrase) {
    EXPECT_EQ(*extract_answer("Final answer: Paris.", AnswerKind::exact_string).extracted, "Paris");
}

TEST(Grade, IntegerNormalization) {
    EXPECT_TRUE(grade(std::string("080"), "80", AnswerKind::integer));
    EXPECT_TRUE(grade(std::string("033"), "33", AnswerKind::integer));
    EXPECT_TRUE(grade(std::string(" +5 "), "5", AnswerKind::integer));
    EXPECT_TRUE(grade(std::string("-0"), "0", AnswerKind::integer));
    EXPECT_TRUE(grade(std::string("$12$"), "12", AnswerKind::integer));
    EXPECT_FALSE(grade(std::string("-5"), "5", AnswerKind::integer));
    EXPECT_FALSE(grade(std::string("1/2"), "1", AnswerKind::integer));
    EXPECT_FALSE(grade(std::nullopt, "80", AnswerKind::integer));
}

TEST(Grade, IntegerAgreesWithParsedEquality) {
    std::mt19937 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const long a = static_cast<long>(rng() % 2001) - 1000;
        const long b = rng() % 4 == 0 ? a : static_cast<long>(rng() % 2001) - 1000;
        std::string sa = std::to_string(std::labs(a));
        sa = std::string(rng() % 3, '0') + sa;
        if (a < 0) sa = "-" + sa;
        EXPECT_EQ(grade(sa, std::to_string(b), AnswerKind::integer), a == b) << sa << " vs " << b;
    }
}

TEST(Grade, ExactStringIsReflexiveAndCaseFolded) {
    for (const char* s : {"x", "Paris", "  spaced out ", "\\frac{1}{2}", "ÄÖ"})
        EXPECT_TRUE(grade(std::string(s), s, AnswerKind::exact_string)) << s;
    EXPECT_TRUE(grade(std::string(" PARIS"), "paris", AnswerKind::exact_string));
    EXPECT_FALSE(grade(std::string("Lyon"), "paris", AnswerKind::exact_string));
}

TEST(Grade, ChoiceLetters) {
    EXPECT_TRUE(grade(std::string("b"), "B", AnswerKind::multiple_choice));
    EXPECT_TRUE(grade(std::string("(C)"), "C", AnswerKind::multiple_choice));
    EXPECT_FALSE(grade(std::string("A"), "D", AnswerKind::multiple_choice));
}

TEST(Extract, DeterministicAndTotal) {
    std::mt19937 rng(5);
    const std::string alphabet = "ab 01234\\{}.:-ABCDboxed\n";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const int len = static_cast<int>(rng() % 40);
        for (int j = 0; j < len; ++j) s.push_back(alphabet[rng() % alphabet.size()]);
        for (auto kind : {AnswerKind::integer, AnswerKind::exact_string, AnswerKind::multiple_choice}) {
            const auto a = extract_answer(s, kind);
            const auto b = extract_answer(s, kind);
            EXPECT_EQ(a.extracted, b.extracted);
            if (!a.extracted) EXPECT_FALSE(grade(a.extracted, "1", kind));
        }
    }
}

TEST(Strip, RemovesFinalAnswerSentence) {
    EXPECT_EQ(strip_final_answer("We add 3 and 4. So the answer is \\boxed{7}.", AnswerKind::integer), "We add 3 and 4.");
    EXPECT_EQ(strip_final_answer("k k m \\boxed{0}", AnswerKind::integer), "k k m");
    EXPECT_EQ(strip_final_answer("line one\nFinal answer: 12", AnswerKind::integer), "line one");
    EXPECT_EQ(strip_final_answer("nothing to strip  ", AnswerKind::multiple_choice), "nothing to strip");
}
