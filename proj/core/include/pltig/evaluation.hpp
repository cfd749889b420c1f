#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pltig/corpus.hpp"

namespace pltig {

// Sentence scorer: log2 probability, -inf for unparseable input.
using SentenceScorer = std::function<double(const Sentence&)>;

struct CrossEntropyResult {
    double bits_per_word = 0.0;
    std::size_t scored = 0;
    std::size_t skipped = 0;  // -inf sentences, excluded from the average
    long long tokens = 0;
};

// -(sum of per-sentence log2 P) / (sum of token counts) over scored
// sentences.  Throws Error when every sentence is skipped.
CrossEntropyResult cross_entropy(const SentenceScorer& scorer,
                                 const std::vector<Sentence>& corpus);

enum class CrossingMode {
    BracketLevel,   // % of candidate brackets that cross no gold bracket
    SentenceLevel,  // % of sentences whose candidates are all crossing-free
};

struct CrossingResult {
    double percentage = 100.0;
    std::size_t numerator = 0;
    std::size_t denominator = 0;  // sentences with no candidates contribute nothing
};

// Candidates and golds are parallel per-sentence bracket sets; candidates
// are expected pre-filtered to width >= 2 and < T.
CrossingResult crossing_brackets(const std::vector<BracketSet>& candidates,
                                 const std::vector<BracketSet>& golds,
                                 CrossingMode mode = CrossingMode::BracketLevel);

struct TTestResult {
    double mean_difference = 0.0;  // mean(a - b)
    double t_statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;  // two-sided
    bool significant = false;
};

// Two-sided paired t-test on a - b; zero-variance samples give p = 0 when
// the mean difference is nonzero and p = 1 otherwise.
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha = 0.05);

enum class Verdict { Better, Worse, Insignificant };
std::string verdict_name(Verdict v);  // "better" / "worse" / "--"

// Orientation-aware verdict for model A against model B.
Verdict ttest_verdict(const TTestResult& test, bool lower_is_better);

// Regularized incomplete beta function I_x(a, b); backs the t CDF.
double incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, int dof);

struct EvalReport {
    std::string model_id;
    long long parameters = 0;
    std::optional<int> iterations;       // empty for closed-form models
    std::optional<double> train_seconds;
    double cross_entropy_bits = 0.0;
    double crossing_bracket_pct = 0.0;
    std::size_t sentences_scored = 0;
    std::size_t sentences_skipped = 0;
};

struct SignificanceCell {
    std::string row, column;
    double mean_difference = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;
    Verdict verdict = Verdict::Insignificant;
};

struct SignificanceTable {
    std::vector<std::string> models;
    std::vector<SignificanceCell> cells;  // ordered pairs, row != column
    double alpha = 0.05;

    const SignificanceCell* find(const std::string& row, const std::string& column) const;
};

// Pairwise tests over per-split scores (lower is better for entropy-style
// metrics).  scores[model] must have one value per split.
SignificanceTable significance_table(const std::vector<std::string>& models,
                                     const std::vector<std::vector<double>>& scores,
                                     double alpha = 0.05, bool lower_is_better = true);

// Aligned-column summary with models as columns and the metric rows
// (parameters, iterations, time, cross-entropy, crossing brackets).
std::string render_report(const std::vector<EvalReport>& reports);
std::string render_significance(const SignificanceTable& table);

}  // namespace pltig
