#include "pltig/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace pltig {

CrossEntropyResult cross_entropy(const SentenceScorer& scorer,
                                 const std::vector<Sentence>& corpus) {
    if (corpus.empty()) throw Error("cross-entropy over an empty corpus");
    CrossEntropyResult result;
    double total_log2 = 0;
    for (const Sentence& s : corpus) {
        const double lp = scorer(s);
        if (lp == kNegInf) {
            ++result.skipped;
            continue;
        }
        total_log2 += lp;
        result.tokens += s.length();
        ++result.scored;
    }
    if (result.scored == 0) throw Error("every sentence was skipped while scoring");
    result.bits_per_word = -total_log2 / static_cast<double>(result.tokens);
    return result;
}

CrossingResult crossing_brackets(const std::vector<BracketSet>& candidates,
                                 const std::vector<BracketSet>& golds, CrossingMode mode) {
    if (candidates.size() != golds.size())
        throw Error("crossing_brackets needs parallel candidate and gold lists");
    CrossingResult result;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].empty()) continue;  // contributes nothing
        std::size_t clean = 0;
        for (const Span& cand : candidates[i]) {
            bool crosses = false;
            for (const Span& gold : golds[i])
                if (spans_cross(cand, gold)) {
                    crosses = true;
                    break;
                }
            if (!crosses) ++clean;
        }
        if (mode == CrossingMode::BracketLevel) {
            result.numerator += clean;
            result.denominator += candidates[i].size();
        } else {
            result.numerator += (clean == candidates[i].size()) ? 1 : 0;
            result.denominator += 1;
        }
    }
    result.percentage = result.denominator == 0
                            ? 100.0
                            : 100.0 * static_cast<double>(result.numerator) /
                                  static_cast<double>(result.denominator);
    return result;
}

// Regularized incomplete beta via the Lentz continued fraction.
double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    auto cont_fraction = [](double a, double b, double x) {
        const double tiny = 1e-300;
        double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 400; ++m) {
            const double m2 = 2.0 * m;
            double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
            d = 1.0 + num * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
            d = 1.0 + num * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::abs(delta - 1.0) < 1e-15) break;
        }
        return h;
    };
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * cont_fraction(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                          b * std::log(1.0 - x) + a * std::log(x)) *
                     cont_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int dof) {
    if (dof < 1) throw Error("t test needs at least one degree of freedom");
    const double x = dof / (dof + t * t);
    return incomplete_beta(dof / 2.0, 0.5, x);
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha) {
    if (a.size() != b.size()) throw Error("paired t-test needs equal-length samples");
    const int n = static_cast<int>(a.size());
    if (n < 2) throw Error("paired t-test needs at least two pairs");

    TTestResult result;
    result.degrees_of_freedom = n - 1;
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= n;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    result.mean_difference = mean;
    const double var = ss / (n - 1);
    if (var == 0.0) {
        // Degenerate: identical differences everywhere.
        result.t_statistic = mean == 0.0 ? 0.0 : (mean > 0 ? 1.0 : -1.0) *
                                                     std::numeric_limits<double>::infinity();
        result.p_value = mean == 0.0 ? 1.0 : 0.0;
    } else {
        result.t_statistic = mean / std::sqrt(var / n);
        result.p_value = student_t_two_sided_p(result.t_statistic, n - 1);
    }
    result.significant = result.p_value < alpha;
    return result;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Better: return "better";
        case Verdict::Worse: return "worse";
        default: return "--";
    }
}

Verdict ttest_verdict(const TTestResult& test, bool lower_is_better) {
    if (!test.significant || test.mean_difference == 0.0) return Verdict::Insignificant;
    const bool a_has_lower = test.mean_difference < 0;
    return (a_has_lower == lower_is_better) ? Verdict::Better : Verdict::Worse;
}

const SignificanceCell* SignificanceTable::find(const std::string& row,
                                                const std::string& column) const {
    for (const auto& cell : cells)
        if (cell.row == row && cell.column == column) return &cell;
    return nullptr;
}

SignificanceTable significance_table(const std::vector<std::string>& models,
                                     const std::vector<std::vector<double>>& scores,
                                     double alpha, bool lower_is_better) {
    if (models.size() != scores.size())
        throw Error("significance table needs one score list per model");
    SignificanceTable table;
    table.models = models;
    table.alpha = alpha;
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = 0; j < models.size(); ++j) {
            if (i == j) continue;
            TTestResult tt = paired_ttest(scores[i], scores[j], alpha);
            SignificanceCell cell;
            cell.row = models[i];
            cell.column = models[j];
            cell.mean_difference = tt.mean_difference;
            cell.t_statistic = tt.t_statistic;
            cell.p_value = tt.p_value;
            cell.verdict = ttest_verdict(tt, lower_is_better);
            table.cells.push_back(cell);
        }
    }
    return table;
}

namespace {

std::string fixed(double x, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << x;
    return out.str();
}

}  // namespace

std::string render_report(const std::vector<EvalReport>& reports) {
    const std::vector<std::string> row_names = {
        "Number of parameters", "Iterations to convergence", "Training time (s)",
        "Cross-entropy (bits/word)", "Crossing brackets (%)"};
    std::vector<std::vector<std::string>> columns;
    for (const EvalReport& r : reports) {
        std::vector<std::string> col;
        col.push_back(r.model_id);
        col.push_back(std::to_string(r.parameters));
        col.push_back(r.iterations ? std::to_string(*r.iterations) : "--");
        col.push_back(r.train_seconds ? fixed(*r.train_seconds, 1) : "--");
        col.push_back(fixed(r.cross_entropy_bits, 2));
        col.push_back(fixed(r.crossing_bracket_pct, 2));
        columns.push_back(std::move(col));
    }
    std::size_t label_width = 0;
    for (const auto& name : row_names) label_width = std::max(label_width, name.size());
    std::vector<std::size_t> widths(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (const auto& cell : columns[c]) widths[c] = std::max(widths[c], cell.size());

    std::ostringstream out;
    auto row = [&](std::size_t r, const std::string& label) {
        out << std::left << std::setw(static_cast<int>(label_width)) << label;
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << "  " << std::right << std::setw(static_cast<int>(widths[c]))
                << columns[c][r];
        out << "\n";
    };
    row(0, "");
    for (std::size_t r = 0; r < row_names.size(); ++r) row(r + 1, row_names[r]);
    return out.str();
}

std::string render_significance(const SignificanceTable& table) {
    std::size_t width = 7;
    for (const auto& m : table.models) width = std::max(width, m.size());
    const int w = static_cast<int>(width);
    std::ostringstream out;
    out << "Pairwise t-tests (alpha = " << table.alpha
        << "): cell (row, column) says whether the row model scores better than the "
           "column model.\n";
    out << std::left << std::setw(w) << "" << " ";
    for (const auto& m : table.models) out << " " << std::right << std::setw(w) << m;
    out << "\n";
    for (const auto& row : table.models) {
        out << std::left << std::setw(w) << row << " ";
        for (const auto& col : table.models) {
            std::string text = ".";
            if (row != col) {
                const SignificanceCell* cell = table.find(row, col);
                text = cell ? verdict_name(cell->verdict) : "?";
            }
            out << " " << std::right << std::setw(w) << text;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace pltig
