#pragma once

#include <cstdint>
#include <vector>

#include "pltig/corpus.hpp"

namespace pltig {

// Interpolated N-gram model (N in {2, 3}) over the tag vocabulary, with
// start-symbol padding.  Counts are kept so a saved model reconstructs
// scoring exactly.
//
// When `sentence_end` is set, every context distribution includes an
// end-of-sentence event and scoring adds its log probability; that variant
// makes a trained bigram assign exactly the chain probabilities of the
// bigram-simulating tree template.  The default (no end event) scores
// observed tokens only, which keeps bits/word directly comparable across
// model families in reports.
class NgramModel {
  public:
    NgramModel() = default;
    NgramModel(int vocab_size, int order, bool sentence_end);

    int order() const { return order_; }
    int V() const { return V_; }
    bool sentence_end() const { return sentence_end_; }

    void count_sentence(const std::vector<int>& tokens, double weight = 1.0);

    // Fits interpolation weights on held-out data (uniform, unigram, ...,
    // order-gram components) by EM; deterministic.
    void fit_lambda(const std::vector<Sentence>& heldout);
    void set_lambda(std::vector<double> lambda);
    const std::vector<double>& lambda() const { return lambda_; }

    // Interpolated P(w | context); `w` may be the end event (= V) only when
    // sentence_end() is true.
    double prob(const std::vector<int>& context, int w) const;
    // Unsmoothed maximum-likelihood conditional of the highest order.
    double ml_prob(const std::vector<int>& context, int w) const;

    double sentence_log2(const std::vector<int>& tokens, bool smoothed = true) const;

    // Raw count accessors for serialization; call rebuild_totals() after
    // writing into the tables directly.
    const std::vector<std::vector<double>>& counts() const { return counts_; }
    std::vector<std::vector<double>>& counts() { return counts_; }
    void rebuild_totals();

  private:
    int n_events() const { return sentence_end_ ? V_ + 1 : V_; }
    int context_id(const std::vector<int>& context, int length) const;
    double component_prob(int component, const std::vector<int>& context, int w) const;

    int V_ = 0;
    int order_ = 2;
    bool sentence_end_ = false;
    // counts_[k] holds the order-(k+1) table: contexts of length k over
    // (V + 1) padded symbols, times n_events() outcomes.
    std::vector<std::vector<double>> counts_;
    std::vector<std::vector<double>> totals_per_context_;
    std::vector<double> lambda_;  // uniform, unigram, ..., order-gram
};

struct NgramOptions {
    int order = 2;
    bool sentence_end = false;
};

NgramModel ngram_train(const std::vector<Sentence>& train,
                       const std::vector<Sentence>& heldout, const NgramOptions& options);

// Published-table accounting for interpolated N-gram sizes: start-padded
// contexts times V outcomes, plus the V unigram cells:
//   V * ((V+1)^(N-1) + 1).
long long ngram_param_count(int vocab_size, int order);

// Right-branching bracketing heuristic with a trailing period tag attaching
// outside all brackets: spans {(i, T') : 1 <= i <= T' - 2} where T' drops
// one trailing token whose tag is `period_symbol` (pass -1 to disable).
BracketSet right_branching_brackets(const Sentence& sentence, int period_symbol = -1);

}  // namespace pltig
