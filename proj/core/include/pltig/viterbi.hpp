#pragma once

#include <set>

#include "pltig/chart.hpp"

namespace pltig {

enum class AdjDir { Left, Right };

// One adjunction in a derivation.  For a left adjunction the adjoined tree
// yields (s, r) and the host continues over (r, t); for a right adjunction
// the host's own material is (s, r) and the adjoined tree yields (r, t).
// Either way (s, t) is the span the adjoined tree's root dominates in the
// derived tree (right adjunctions compose inside left ones).
struct AdjOp {
    int node;  // host node id
    AdjDir dir;
    int tree;  // adjoined tree id
    int s, r, t;

    bool operator==(const AdjOp& o) const {
        return node == o.node && dir == o.dir && tree == o.tree && s == o.s &&
               r == o.r && t == o.t;
    }
};

struct Derivation {
    int root_tree = 0;          // the initial tree
    std::vector<AdjOp> ops;     // discovery order: outermost first
    double log2_score = 0.0;
};

// Max-product analogue of the inside pass with deterministic tie-breaking
// (no-adjunction state first, then lowest adjoined tree id, then leftmost
// split).  Throws NoParseError when the sentence has probability zero.
Derivation viterbi_parse(const Grammar& grammar, const ParamSet& params,
                         const Sentence& sentence);

// Spans of the internal nodes of the derived tree obtained by performing all
// adjunctions, filtered to width >= 2 and < T, duplicates collapsed.
BracketSet extract_brackets(const Derivation& derivation, const Sentence& sentence);
BracketSet extract_brackets(const Derivation& derivation, int T);

}  // namespace pltig
