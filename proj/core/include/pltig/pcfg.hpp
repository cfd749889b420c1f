#pragma once

#include <cstdint>
#include <vector>

#include "pltig/corpus.hpp"
#include "pltig/training.hpp"

namespace pltig {

// Dense Chomsky-normal-form PCFG over M nonterminals: every binary rule
// A -> B C and every lexical rule A -> w exists with positive probability,
// normalized jointly per left-hand side.  Start symbol is nonterminal 0.
struct Pcfg {
    int M = 0;
    int V = 0;
    std::vector<double> binary;   // [A*M*M + B*M + C]
    std::vector<double> lexical;  // [A*V + w]

    double rule(int a, int b, int c) const { return binary[(a * M + b) * M + c]; }
    double& rule(int a, int b, int c) { return binary[(a * M + b) * M + c]; }
    double lex(int a, int w) const { return lexical[a * V + w]; }
    double& lex(int a, int w) { return lexical[a * V + w]; }
};

Pcfg pcfg_build(const Vocabulary& vocab, int nonterminals, std::uint64_t seed);

long long pcfg_param_count(int nonterminals, int vocab_size);  // M^3 + M V

std::vector<std::string> pcfg_validate(const Pcfg& pcfg, double tol = 1e-10);

struct PcfgChart {
    int T = 0;
    int M = 0;
    std::vector<double> inside;   // [span][A], scaled like the PLTIG chart
    std::vector<double> outside;  // filled by pcfg_expectations
    double kappa = 0.0;
    double log2_prob = 0.0;
    double scaled_total = 0.0;
    std::size_t cell_updates = 0;

    double in(int s, int t, int a) const {
        return inside[static_cast<std::size_t>(Chart::span_index(s, t)) * M + a];
    }
};

PcfgChart pcfg_inside(const Pcfg& pcfg, const Sentence& sentence, bool constraints = false);

double pcfg_sentence_log_prob(const Pcfg& pcfg, const Sentence& sentence,
                              bool constraints = false);

struct PcfgCounts {
    std::vector<double> binary;
    std::vector<double> lexical;
    double corpus_log2 = 0.0;
    std::size_t sentences = 0;
    std::size_t skipped = 0;

    static PcfgCounts zeros(const Pcfg& pcfg);
    void add(const PcfgCounts& other);
};

bool pcfg_accumulate(const Pcfg& pcfg, const Sentence& sentence, bool constraints,
                     PcfgCounts& into);

Pcfg pcfg_reestimate(const Pcfg& previous, const PcfgCounts& counts, int* retained = nullptr);

struct PcfgTrainResult {
    Pcfg pcfg;
    TrainTrace trace;
    int best_iteration = 0;
};

// Inside-outside EM with the same convergence rule as the PLTIG trainer.
// The smoothing field of `config` is ignored: these dense grammars assign
// positive mass everywhere already.
PcfgTrainResult pcfg_train(const Pcfg& init, const std::vector<Sentence>& train,
                           const std::vector<Sentence>& heldout, const TrainConfig& config,
                           const std::function<void(int, const Pcfg&)>& checkpoint_hook = {});

double pcfg_bits_per_word(const Pcfg& pcfg, const std::vector<Sentence>& corpus,
                          std::size_t* skipped = nullptr, int threads = 1);

// Max-product CYK; returns the internal-node spans (width >= 2, < T) of the
// best parse.  Ties break toward the lowest rule index, then leftmost split.
BracketSet pcfg_viterbi(const Pcfg& pcfg, const Sentence& sentence);

}  // namespace pltig
