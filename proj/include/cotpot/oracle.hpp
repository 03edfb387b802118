#pragma once

// Exact potentials and stabilities on a ToyLM by full enumeration.
//
// A prefix is either a symbol sequence or rendered text. Text prefixes may end
// with the "\boxed{...}" answer token, in which case the answer is already
// decided. All arithmetic is double precision.

#include <string>
#include <string_view>
#include <vector>

#include "cotpot/core.hpp"
#include "cotpot/toy_lm.hpp"

namespace cotpot {

inline constexpr double kOracleTolerance = 1e-12;

/// Probability that a continuation of `prefix` ends with an answer matching
/// the question's gold answer. Throws Error("conditioning on null event") for
/// zero-probability prefixes.
double exact_potential(const ToyLM& toy, const Question& question, const std::vector<Symbol>& prefix);
double exact_potential(const ToyLM& toy, const Question& question, std::string_view prefix_text);

/// As exact_potential, graded against `target_answer` instead of gold.
double exact_stability(const ToyLM& toy, const Question& question, const std::vector<Symbol>& prefix,
                       std::string_view target_answer);
double exact_stability(const ToyLM& toy, const Question& question, std::string_view prefix_text,
                       std::string_view target_answer);

/// Exact curve on the same prefix grid estimate_potential uses.
PotentialCurve exact_potential_curve(const ToyLM& toy, const Question& question, const Trace& trace, int n_chunks,
                                     bool include_empty = true);

struct MartingaleStep {
    std::size_t t = 0;
    double expected_now = 0.0;   // E[pot(c_<t)] over correct runs
    double expected_next = 0.0;  // E[pot(c_<t+1)] over correct runs
    bool holds = false;          // expected_next >= expected_now - kOracleTolerance
};

struct MartingaleReport {
    std::vector<MartingaleStep> steps;  // t = 0 .. horizon-1
    double correct_probability = 0.0;   // potential of the empty prefix
    bool holds = false;
};

/// Token-level check that, on runs that end correctly, the expected potential
/// never decreases. Prefixes are weighted by their probability conditioned on a
/// correct completion; a sampled end symbol counts as one token. Throws
/// Error("proposition vacuous") when no path is correct.
MartingaleReport check_martingale(const ToyLM& toy, const Question& question);

/// A full path as the token sequence a run produces (end symbol included when sampled).
struct TokenPath {
    std::vector<Symbol> tokens;
    double probability = 0.0;
    bool correct = false;
};

std::vector<TokenPath> enumerate_token_paths(const ToyLM& toy, const Question& question);

/// Exact potential after each token of `path`: element t is pot of the first t tokens.
std::vector<double> pointwise_potentials(const ToyLM& toy, const Question& question, const TokenPath& path);

}  // namespace cotpot
