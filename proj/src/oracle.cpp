#include "cotpot/oracle.hpp"

#include <functional>

#include "cotpot/grading.hpp"
#include "cotpot/text.hpp"

namespace cotpot {

namespace {

using Matcher = std::function<bool(const std::optional<std::string>&)>;

// Probability of a matching answer from a given state.
double state_value(const ToyLM& toy, std::vector<Symbol>& history, bool ended, const Matcher& match) {
    if (toy.is_terminal(history, ended)) return match(toy.answer(history)) ? 1.0 : 0.0;
    double total = 0.0;
    for (const auto& t : toy.next(history)) {
        if (t.probability <= 0.0) continue;
        if (t.next == kEndSymbol) {
            total += t.probability * state_value(toy, history, true, match);
            continue;
        }
        history.push_back(t.next);
        total += t.probability * state_value(toy, history, false, match);
        history.pop_back();
    }
    return total;
}

[[noreturn]] void null_event() { throw Error("conditioning on null event"); }

double symbols_value(const ToyLM& toy, const std::vector<Symbol>& prefix, const Matcher& match) {
    if (prefix.size() > toy.horizon()) null_event();
    std::vector<Symbol> history;
    bool ended = false;
    for (Symbol s : prefix) {
        if (ended || toy.is_terminal(history, false) || toy.probability(history, s) <= 0.0) null_event();
        if (s == kEndSymbol) {
            ended = true;
            continue;
        }
        history.push_back(s);
    }
    return state_value(toy, history, ended, match);
}

double text_value(const ToyLM& toy, std::string_view text, const Matcher& match) {
    auto state = toy.parse_prefix(text);
    if (!state) null_event();
    if (state->emitted_answer) return match(state->emitted_answer) ? 1.0 : 0.0;
    return state_value(toy, state->history, state->ended, match);
}

Matcher gold_matcher(const Question& q) {
    return [&q](const std::optional<std::string>& a) { return grade(a, q.gold_answer, q.kind); };
}

Matcher target_matcher(const Question& q, std::string_view target) {
    return [kind = q.kind, target = std::string(target)](const std::optional<std::string>& a) {
        return grade(a, target, kind);
    };
}

}  // namespace

double exact_potential(const ToyLM& toy, const Question& question, const std::vector<Symbol>& prefix) {
    return symbols_value(toy, prefix, gold_matcher(question));
}

double exact_potential(const ToyLM& toy, const Question& question, std::string_view prefix_text) {
    return text_value(toy, prefix_text, gold_matcher(question));
}

double exact_stability(const ToyLM& toy, const Question& question, const std::vector<Symbol>& prefix,
                       std::string_view target_answer) {
    return symbols_value(toy, prefix, target_matcher(question, target_answer));
}

double exact_stability(const ToyLM& toy, const Question& question, std::string_view prefix_text,
                       std::string_view target_answer) {
    return text_value(toy, prefix_text, target_matcher(question, target_answer));
}

PotentialCurve exact_potential_curve(const ToyLM& toy, const Question& question, const Trace& trace, int n_chunks,
                                     bool include_empty) {
    const Trace chunked = chunk_trace(trace, n_chunks);
    PotentialCurve curve;
    curve.question_id = question.id;
    curve.trace_ref = trace.ref();
    curve.trace_correct = trace.correct;
    curve.exact = true;
    for (int i = include_empty ? 0 : 1; i <= n_chunks; ++i) {
        CurvePoint p;
        p.prefix_fraction = static_cast<double>(i) / n_chunks;
        p.estimate = exact_potential(toy, question, prefix_at(chunked, static_cast<std::size_t>(i)));
        curve.points.push_back(p);
    }
    return curve;
}

std::vector<TokenPath> enumerate_token_paths(const ToyLM& toy, const Question& question) {
    std::vector<TokenPath> out;
    std::vector<Symbol> history;
    std::vector<Symbol> tokens;
    std::function<void(double, bool)> walk = [&](double prob, bool ended) {
        if (toy.is_terminal(history, ended)) {
            out.push_back({tokens, prob, grade(toy.answer(history), question.gold_answer, question.kind)});
            return;
        }
        for (const auto& t : toy.next(history)) {
            if (t.probability <= 0.0) continue;
            tokens.push_back(t.next);
            if (t.next == kEndSymbol) {
                walk(prob * t.probability, true);
            } else {
                history.push_back(t.next);
                walk(prob * t.probability, false);
                history.pop_back();
            }
            tokens.pop_back();
        }
    };
    walk(1.0, false);
    return out;
}

std::vector<double> pointwise_potentials(const ToyLM& toy, const Question& question, const TokenPath& path) {
    std::vector<double> out;
    std::vector<Symbol> prefix;
    out.push_back(exact_potential(toy, question, prefix));
    for (Symbol s : path.tokens) {
        prefix.push_back(s);
        out.push_back(exact_potential(toy, question, prefix));
    }
    return out;
}

MartingaleReport check_martingale(const ToyLM& toy, const Question& question) {
    const std::size_t horizon = toy.horizon();
    // acc[t] = sum over depth-t prefixes of P(prefix) * pot(prefix)^2. Under the
    // correct-run law a prefix has weight P(prefix) * pot(prefix) / pot(root), so
    // E[pot_t] = acc[t] / pot(root). Finished runs stay put at later depths.
    std::vector<double> acc(horizon + 1, 0.0);
    const auto match = gold_matcher(question);
    std::vector<Symbol> history;
    std::function<double(double, bool, std::size_t)> walk = [&](double prob, bool ended, std::size_t depth) {
        double pot = 0.0;
        if (toy.is_terminal(history, ended)) {
            pot = match(toy.answer(history)) ? 1.0 : 0.0;
            for (std::size_t t = depth; t <= horizon; ++t) acc[t] += prob * pot;
            return pot;
        }
        for (const auto& t : toy.next(history)) {
            if (t.probability <= 0.0) continue;
            if (t.next == kEndSymbol) {
                pot += t.probability * walk(prob * t.probability, true, depth + 1);
                continue;
            }
            history.push_back(t.next);
            pot += t.probability * walk(prob * t.probability, false, depth + 1);
            history.pop_back();
        }
        acc[depth] += prob * pot * pot;
        return pot;
    };
    const double root = walk(1.0, false, 0);
    if (root <= 0.0) throw Error("proposition vacuous");

    MartingaleReport report;
    report.correct_probability = root;
    report.holds = true;
    for (std::size_t t = 0; t < horizon; ++t) {
        MartingaleStep step;
        step.t = t;
        step.expected_now = acc[t] / root;
        step.expected_next = acc[t + 1] / root;
        step.holds = step.expected_next >= step.expected_now - kOracleTolerance;
        report.holds = report.holds && step.holds;
        report.steps.push_back(step);
    }
    return report;
}

}  // namespace cotpot
