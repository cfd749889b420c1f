#pragma once

// Brute-force reference machinery for the chart algorithms.  Everything here
// enumerates structures explicitly and never shares code with the dynamic
// programs it checks.

#include <map>
#include <tuple>
#include <vector>

#include "pltig/grammar.hpp"
#include "pltig/params.hpp"
#include "pltig/pcfg.hpp"

namespace pltig::oracle {

struct Derivation {
    std::vector<int> tokens;
    double weight = 1.0;
    // (host node, 0=left/1=right, adjoined tree) -> multiplicity
    std::map<std::tuple<int, int, int>, int> events;
    std::map<int, int> instances;  // tree id -> instance count
};

// Enumerates every derivation whose yield has at most `max_tokens` tokens.
// Each adjoined auxiliary tree contributes exactly one token, so the space
// is finite.  With `halve_both`, derivation weights carry a factor 1/2 per
// node hosting both a left and a right adjunction, matching the chart's
// combination rule.
class Enumerator {
  public:
    Enumerator(const Grammar& grammar, const ParamSet& params, int max_tokens,
               bool halve_both = true);

    const std::vector<Derivation>& all() const { return all_; }

    double sentence_prob(const std::vector<int>& tokens) const;
    double best_derivation_prob(const std::vector<int>& tokens) const;

    // Posterior expected counts for one sentence, shaped like ExpectedCounts:
    // per site, per candidate symbol, no-adjunction at index V.
    struct Counts {
        std::vector<std::vector<double>> left, right;
    };
    Counts expected_counts(const std::vector<int>& tokens) const;

  private:
    std::vector<Derivation> enumerate_tree(int tree, int budget);

    const Grammar& g_;
    const ParamSet& p_;
    int max_tokens_;
    bool halve_both_;
    std::map<std::pair<int, int>, std::vector<Derivation>> memo_;
    std::vector<Derivation> all_;
};

// Exhaustive PCFG parse-forest sum: enumerates labeled binary trees
// recursively without memoization.
double pcfg_tree_sum(const Pcfg& pcfg, const std::vector<int>& tokens);
double pcfg_best_tree(const Pcfg& pcfg, const std::vector<int>& tokens);

}  // namespace pltig::oracle
