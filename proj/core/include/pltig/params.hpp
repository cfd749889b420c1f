#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pltig/grammar.hpp"

namespace pltig {

// Trainable state, separate from the grammar skeleton so one template can
// host many parameter vectors (splits, restarts, checkpoints).
//
// left[s] and right[s] are distributions over candidate auxiliary trees for
// site s, indexed by anchor symbol, with the no-adjunction mass stored at
// index V.  start[t] is the derivation-start probability of tree t: 1 on the
// unique initial tree, 0 on auxiliary trees.
struct ParamSet {
    std::vector<double> start;
    std::vector<std::vector<double>> left;
    std::vector<std::vector<double>> right;

    double p_left(int site, int symbol) const { return left[site][symbol]; }
    double p_no_left(int site) const { return left[site].back(); }
    double p_right(int site, int symbol) const { return right[site][symbol]; }
    double p_no_right(int site) const { return right[site].back(); }

    // No-adjunction mass seen from a node; 1 for nodes without the site.
    double node_no_left(const Node& n) const {
        return n.has_left_site() ? p_no_left(n.left_site) : 1.0;
    }
    double node_no_right(const Node& n) const {
        return n.has_right_site() ? p_no_right(n.right_site) : 1.0;
    }
};

// Admissible random initialization: independent uniform weights in
// [0.1, 1.0] normalized per distribution, so every string keeps a non-zero
// probability.  Deterministic for a fixed seed.
ParamSet init_params(const Grammar& grammar, std::uint64_t seed);

// Uniform distributions at every site; used by tests and smoothing.
ParamSet uniform_params(const Grammar& grammar);

// Empty list iff all ParamSet invariants hold within `tol`; each entry names
// the offending site/tree and the deviation.
std::vector<std::string> validate(const Grammar& grammar, const ParamSet& params,
                                  double tol = 1e-10);

}  // namespace pltig
