#pragma once

#include <cstdint>
#include <vector>

#include "pltig/params.hpp"
#include "pltig/pcfg.hpp"
#include "pltig/viterbi.hpp"

namespace pltig {

// Synthetic-corpus generators; sentences carry the generator's constituent
// spans as gold brackets (width >= 2 and < T, matching the bracket-scoring
// convention).  Used by tests and by grammar-recovery experiments.

struct SampleOptions {
    int max_length = 20;
    int min_length = 1;
    int max_attempts = 1000;  // rejection budget per sentence
};

Sentence sample_pltig_sentence(const Grammar& grammar, const ParamSet& params, Rng& rng,
                               const SampleOptions& options);
std::vector<Sentence> sample_pltig_corpus(const Grammar& grammar, const ParamSet& params,
                                          int count, std::uint64_t seed,
                                          const SampleOptions& options);

Sentence sample_pcfg_sentence(const Pcfg& pcfg, Rng& rng, const SampleOptions& options);
std::vector<Sentence> sample_pcfg_corpus(const Pcfg& pcfg, int count, std::uint64_t seed,
                                         const SampleOptions& options);

}  // namespace pltig
