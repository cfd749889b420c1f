#include "pltig/ngram.hpp"

#include <cmath>
#include <numeric>

namespace pltig {

// Contexts are padded with a start symbol (index V), so the context alphabet
// has V+1 symbols whatever the event set is.

NgramModel::NgramModel(int vocab_size, int order, bool sentence_end)
    : V_(vocab_size), order_(order), sentence_end_(sentence_end) {
    if (order_ < 1 || order_ > 3) throw ConfigError("n-gram order must be 1, 2, or 3");
    if (V_ < 1) throw ConfigError("n-gram model needs a non-empty vocabulary");
    std::size_t contexts = 1;
    for (int k = 0; k < order_; ++k) {
        counts_.emplace_back(contexts * n_events(), 0.0);
        totals_per_context_.emplace_back(contexts, 0.0);
        contexts *= V_ + 1;
    }
    lambda_.assign(order_ + 1, 1.0 / (order_ + 1));
}

int NgramModel::context_id(const std::vector<int>& context, int length) const {
    int id = 0;
    const int base = V_ + 1;
    // Uses the most recent `length` symbols, start-padded on the left.
    for (int k = length; k >= 1; --k) {
        int sym = V_;  // start padding
        if (static_cast<int>(context.size()) >= k) sym = context[context.size() - k];
        id = id * base + sym;
    }
    return id;
}

void NgramModel::count_sentence(const std::vector<int>& tokens, double weight) {
    std::vector<int> context;
    auto bump = [&](int event) {
        for (int k = 0; k < order_; ++k) {
            const int ctx = context_id(context, k);
            counts_[k][static_cast<std::size_t>(ctx) * n_events() + event] += weight;
            totals_per_context_[k][ctx] += weight;
        }
    };
    for (int tok : tokens) {
        if (tok < 0 || tok >= V_) throw VocabError("token outside n-gram vocabulary");
        bump(tok);
        context.push_back(tok);
    }
    if (sentence_end_) bump(V_);
}

void NgramModel::rebuild_totals() {
    for (int k = 0; k < order_; ++k) {
        const std::size_t contexts = totals_per_context_[k].size();
        for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
            double total = 0;
            for (int ev = 0; ev < n_events(); ++ev)
                total += counts_[k][ctx * n_events() + ev];
            totals_per_context_[k][ctx] = total;
        }
    }
}

double NgramModel::component_prob(int component, const std::vector<int>& context,
                                  int w) const {
    if (component == 0) return 1.0 / n_events();  // uniform floor
    const int k = component - 1;  // context length of the ML table
    const int ctx = context_id(context, k);
    const double total = totals_per_context_[k][ctx];
    if (total <= 0.0) return 0.0;
    return counts_[k][static_cast<std::size_t>(ctx) * n_events() + w] / total;
}

double NgramModel::prob(const std::vector<int>& context, int w) const {
    double p = 0;
    for (int c = 0; c <= order_; ++c) p += lambda_[c] * component_prob(c, context, w);
    return p;
}

double NgramModel::ml_prob(const std::vector<int>& context, int w) const {
    return component_prob(order_, context, w);
}

void NgramModel::set_lambda(std::vector<double> lambda) {
    if (static_cast<int>(lambda.size()) != order_ + 1)
        throw ConfigError("lambda needs one weight per component (uniform first)");
    double sum = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("lambda weights must sum to 1");
    lambda_ = std::move(lambda);
}

void NgramModel::fit_lambda(const std::vector<Sentence>& heldout) {
    std::vector<double> lambda(order_ + 1, 1.0 / (order_ + 1));
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> expect(order_ + 1, 0.0);
        for (const Sentence& sent : heldout) {
            std::vector<int> context;
            auto absorb = [&](int event) {
                std::vector<double> parts(order_ + 1);
                double z = 0;
                for (int c = 0; c <= order_; ++c)
                    z += (parts[c] = lambda[c] * component_prob(c, context, event));
                if (z <= 0) return;
                for (int c = 0; c <= order_; ++c) expect[c] += parts[c] / z;
            };
            for (int tok : sent.tokens) {
                absorb(tok);
                context.push_back(tok);
            }
            if (sentence_end_) absorb(V_);
        }
        double z = std::accumulate(expect.begin(), expect.end(), 0.0);
        if (z <= 0) break;
        double delta = 0;
        for (int c = 0; c <= order_; ++c) {
            double next = expect[c] / z;
            delta += std::abs(next - lambda[c]);
            lambda[c] = next;
        }
        if (delta < 1e-13) break;
    }
    lambda_ = lambda;
}

double NgramModel::sentence_log2(const std::vector<int>& tokens, bool smoothed) const {
    double lp = 0;
    std::vector<int> context;
    auto score = [&](int event) {
        const double p = smoothed ? prob(context, event) : ml_prob(context, event);
        if (p <= 0.0) {
            lp = kNegInf;
            return false;
        }
        lp += std::log2(p);
        return true;
    };
    for (int tok : tokens) {
        if (lp == kNegInf || !score(tok)) return kNegInf;
        context.push_back(tok);
    }
    if (sentence_end_ && !score(V_)) return kNegInf;
    return lp;
}

NgramModel ngram_train(const std::vector<Sentence>& train,
                       const std::vector<Sentence>& heldout, const NgramOptions& options) {
    if (train.empty()) throw TrainError("n-gram training needs a non-empty corpus");
    int vocab_size = 0;
    for (const Sentence& s : train)
        for (int tok : s.tokens) vocab_size = std::max(vocab_size, tok + 1);
    for (const Sentence& s : heldout)
        for (int tok : s.tokens) vocab_size = std::max(vocab_size, tok + 1);
    NgramModel model(vocab_size, options.order, options.sentence_end);
    for (const Sentence& s : train) model.count_sentence(s.tokens);
    if (!heldout.empty()) model.fit_lambda(heldout);
    return model;
}

long long ngram_param_count(int vocab_size, int order) {
    const long long v = vocab_size;
    long long contexts = 1;
    for (int k = 1; k < order; ++k) contexts *= v + 1;
    return v * (contexts + 1);
}

BracketSet right_branching_brackets(const Sentence& sentence, int period_symbol) {
    const int T = sentence.length();
    int effective = T;
    if (period_symbol >= 0 && T >= 1 && sentence.tokens[T - 1] == period_symbol)
        --effective;  // the trailing period attaches outside all brackets
    BracketSet spans;
    for (int i = 1; i <= effective - 2; ++i) spans.insert({i, effective});
    return spans;
}

}  // namespace pltig
