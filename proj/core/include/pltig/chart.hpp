#pragma once

#include <cstddef>
#include <vector>

#include "pltig/grammar.hpp"
#include "pltig/params.hpp"

namespace pltig {

// Per-node adjunction state of a chart cell: no adjunction, exactly one left,
// exactly one right, or a simultaneous left and right adjunction.
enum AdjState { kAdjNone = 0, kAdjLeft = 1, kAdjRight = 2, kAdjBoth = 3 };

struct ChartOptions {
    bool constraints = false;   // zero cells whose span crosses a gold bracket
    bool halve_both = true;     // weight simultaneous-adjunction mass by 1/2
};

// Dense (span, node, state) table.  Values are kept in linear space scaled by
// 2^(kappa * width) per cell so that width-40 charts stay inside double
// range; kappa is chosen from the vocabulary size and bumped on overflow or
// underflow of the total.  Slot 4 holds the state-combined value
//   P_NL*P_NR*e(none) + P_NR*e(L) + P_NL*e(R) + e(LR)/2.
class Chart {
  public:
    Chart() = default;
    Chart(int T, int num_nodes);

    static int span_index(int s, int t) { return t * (t + 1) / 2 + s; }

    double raw(int s, int t, int node, AdjState state) const {
        return v_[idx(s, t, node) + state];
    }
    double combined(int s, int t, int node) const { return v_[idx(s, t, node) + 4]; }

    double& at(int s, int t, int node, int slot) { return v_[idx(s, t, node) + slot]; }
    double at(int s, int t, int node, int slot) const { return v_[idx(s, t, node) + slot]; }

    int T() const { return T_; }
    int num_nodes() const { return num_nodes_; }

  private:
    std::size_t idx(int s, int t, int node) const {
        return (static_cast<std::size_t>(span_index(s, t)) * num_nodes_ + node) * 5;
    }
    int T_ = 0;
    int num_nodes_ = 0;
    std::vector<double> v_;
};

struct InsideChart {
    Chart cells;
    double kappa = 0.0;       // log2 scale per unit width
    double scaled_total = 0;  // combined value at the initial root over (0, T)
    double log2_prob = 0.0;   // true log2 sentence probability (-inf if 0)
    std::size_t cell_updates = 0;
    bool constrained = false;
};

struct OutsideChart {
    Chart cells;  // scaled by 2^(kappa * (T - width)), pairing with the inside
    std::size_t cell_updates = 0;
};

// Bottom-up inside pass over increasing span widths.  Throws VocabError on
// out-of-vocabulary tokens and Error on empty sentences.
InsideChart compute_inside(const Grammar& grammar, const ParamSet& params,
                           const Sentence& sentence, bool constraints = false);
InsideChart compute_inside(const Grammar& grammar, const ParamSet& params,
                           const Sentence& sentence, const ChartOptions& options);

// Top-down outside pass; requires the matching inside chart.
OutsideChart compute_outside(const Grammar& grammar, const ParamSet& params,
                             const Sentence& sentence, const InsideChart& inside,
                             bool constraints = false);

// log2 P(sentence); -inf when the sentence has no derivation (possible only
// under bracket constraints or degenerate hand-set parameters).
double sentence_log_prob(const Grammar& grammar, const ParamSet& params,
                         const Sentence& sentence, bool constraints = false);

// Exact log-space evaluation of the same recursions (log-sum-exp at every
// accumulation).  Slow; reference path for numeric tests.
double inside_log2_reference(const Grammar& grammar, const ParamSet& params,
                             const Sentence& sentence, bool constraints = false);

// Diagnostic for the 1/2 weighting of simultaneous adjunctions: total
// sentence mass with the factor as specified and with it replaced by 1.
struct BothStateMass {
    double log2_halved;
    double log2_unhalved;
};
BothStateMass simultaneous_mass_diagnostic(const Grammar& grammar, const ParamSet& params,
                                           const Sentence& sentence);

}  // namespace pltig
