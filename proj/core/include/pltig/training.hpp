#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pltig/chart.hpp"

namespace pltig {

enum class Smoothing { None, DeletedInterpolation };

struct TrainConfig {
    int max_iterations = 100;
    double min_entropy_gain = 0.001;  // bits/word improvement on held-out
    Smoothing smoothing = Smoothing::None;
    bool constraints = false;
    std::uint64_t seed = 1;
    int threads = 1;                 // E-step workers; merge order is fixed
    bool checkpoints = false;        // handled by the CLI layer
};

// Expected adjunction counts, laid out like ParamSet distributions: counts
// per (site, candidate symbol) with the no-adjunction count at index V.
struct ExpectedCounts {
    std::vector<std::vector<double>> left;
    std::vector<std::vector<double>> right;
    double corpus_log2 = 0.0;  // sum of log2 P over parsed sentences
    std::size_t sentences = 0;
    std::size_t skipped = 0;  // unparseable under constraints

    static ExpectedCounts zeros(const Grammar& grammar);
    void add(const ExpectedCounts& other);
};

struct IterationRecord {
    int iteration = 0;            // 1-based
    double train_log2 = 0.0;      // corpus log-likelihood, bits
    double heldout_bits = 0.0;    // held-out cross-entropy, bits/word
    double seconds = 0.0;
};

using TrainTrace = std::vector<IterationRecord>;

// E-step for a single sentence: posterior adjunction counts accumulated into
// `into`.  Returns false (and bumps `skipped`) when the sentence has zero
// probability under the constraints.
bool accumulate_counts(const Grammar& grammar, const ParamSet& params,
                       const Sentence& sentence, bool constraints, ExpectedCounts& into);
ExpectedCounts accumulate_counts(const Grammar& grammar, const ParamSet& params,
                                 const Sentence& sentence, bool constraints = false);

// M-step: per-site relative frequencies.  Sites with zero total mass keep
// their previous distribution (counted in `retained` when non-null).
ParamSet reestimate(const Grammar& grammar, const ExpectedCounts& counts,
                    const ParamSet& previous, int* retained = nullptr);

// Deleted-interpolation smoothing of an M-step estimate:
//   P = l1 * ML + l2 * direction-pooled backoff + l3 * uniform,
// with the weights fitted on held-out expected counts.
struct InterpolationWeights {
    double ml = 1.0, backoff = 0.0, uniform = 0.0;
};
InterpolationWeights fit_interpolation(const Grammar& grammar,
                                       const ExpectedCounts& train_counts,
                                       const ExpectedCounts& heldout_counts);
ParamSet apply_interpolation(const Grammar& grammar, const ExpectedCounts& counts,
                             const ParamSet& previous, const InterpolationWeights& w);

struct TrainResult {
    ParamSet params;  // best held-out parameters
    TrainTrace trace;
    int best_iteration = 0;
};

// Inside-outside EM: alternates corpus E-steps with M-steps, scoring the
// held-out set each iteration; stops when the held-out improvement drops
// below config.min_entropy_gain or max_iterations is reached.  With
// smoothing enabled the internal chain stays unsmoothed (keeping the
// monotone-likelihood guarantee) and interpolation is applied to the
// evaluation-facing parameters each iteration.
TrainResult em_train(const Grammar& grammar, const ParamSet& init,
                     const std::vector<Sentence>& train,
                     const std::vector<Sentence>& heldout, const TrainConfig& config,
                     const std::function<void(int, const ParamSet&)>& checkpoint_hook = {});

// Corpus cross-entropy in bits/word under the grammar; -inf sentences are
// excluded and reported via `skipped`.
double corpus_bits_per_word(const Grammar& grammar, const ParamSet& params,
                            const std::vector<Sentence>& corpus,
                            std::size_t* skipped = nullptr, int threads = 1);

}  // namespace pltig
