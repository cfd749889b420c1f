#pragma once

// Private chart machinery shared by chart.cpp (sum-product) and viterbi.cpp
// (max-product).  Not installed.
//
// The inside pass runs over increasing span widths.  Per (span, node) cell it
// fills four raw adjunction states plus their weighted combination:
//
//   none:  children of the node jointly generate (s, t); leaves use the base
//          cases (foot/empty nodes cover width 0, anchors their own token).
//   left:  an adjoined left auxiliary tree generates (s, r), the node's own
//          children the remaining (r, t).
//   right: the node's children generate (s, r), an adjoined right auxiliary
//          tree the trailing (r, t).
//   both:  left tree over (s, r1), then the right state over (r1, t).  This
//          factored form is equal to the four-fold sum over (r1, r2) pairs by
//          distributivity and keeps the pass cubic in T.
//
//   combined = P_NL*P_NR*none + P_NR*left + P_NL*right + both/2
//
// Within one span, auxiliary-tree cells never read same-span entries (their
// interior nodes dominate the anchor, so zero-width rests vanish), and the
// initial tree's cells read only auxiliary roots; visiting auxiliary trees
// first therefore keeps the pass well-ordered.

#include <cmath>

#include "pltig/chart.hpp"
#include "pltig/util.hpp"

namespace pltig {
namespace detail {

struct LinearOps {
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static double add(double a, double b) { return a + b; }
    static double mul(double a, double b) { return a * b; }
    static double from_prob(double p) { return p; }
    static double scaled_unit(double kappa) { return std::exp2(kappa); }
};

struct LogOps {
    static double zero() { return kNegInf; }
    static double one() { return 0.0; }
    static bool is_zero(double x) { return x == kNegInf; }
    static double add(double a, double b) { return log2_add(a, b); }
    static double mul(double a, double b) { return a + b; }
    static double from_prob(double p) { return p > 0 ? std::log2(p) : kNegInf; }
    static double scaled_unit(double) { return 0.0; }  // exact, unscaled
};

struct MaxOps {
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static double add(double a, double b) { return a > b ? a : b; }
    static double mul(double a, double b) { return a * b; }
    static double from_prob(double p) { return p; }
    static double scaled_unit(double kappa) { return std::exp2(kappa); }
};

template <class Ops>
struct InsidePass {
    const Grammar& g;
    const ParamSet& p;
    const Sentence& sent;
    bool constraints;
    bool halve_both;
    double kappa;

    Chart chart;
    std::size_t updates = 0;
    double total = 0;  // combined value of the initial root over (0, T), times P_I

    void run() {
        const int T = sent.length();
        if (T == 0) throw Error("cannot build a chart for an empty sentence");
        for (int tok : sent.tokens)
            if (tok < 0 || tok >= g.V())
                throw VocabError("token index " + std::to_string(tok) +
                                 " outside vocabulary of size " + std::to_string(g.V()));

        chart = Chart(T, static_cast<int>(g.nodes.size()));
        const double zero = Ops::zero();
        for (int s = 0; s <= T; ++s)
            for (int t = s; t <= T; ++t)
                for (int node = 0; node < chart.num_nodes(); ++node)
                    for (int slot = 0; slot < 5; ++slot) chart.at(s, t, node, slot) = zero;

        const double unit = Ops::scaled_unit(kappa);
        const double half = Ops::from_prob(halve_both ? 0.5 : 1.0);

        for (int w = 0; w <= T; ++w) {
            for (int s = 0; s + w <= T; ++s) {
                const int t = s + w;
                if (constraints && w > 1 && w < T && !span_compatible(sent, {s, t}))
                    continue;  // cells stay zero
                for (int node : g.inside_order) fill_cell(node, s, t, w, unit, half);
            }
        }
        const int root = g.trees[g.initial_tree()].root;
        total = Ops::mul(Ops::from_prob(p.start[g.initial_tree()]),
                         chart.combined(0, T, root));
    }

    void fill_cell(int node, int s, int t, int w, double unit, double half) {
        const Node& n = g.nodes[node];

        double e_none = Ops::zero();
        switch (n.kind) {
            case NodeKind::Empty:
            case NodeKind::Foot:
                if (w == 0) e_none = Ops::one();
                break;
            case NodeKind::Anchor:
                if (w == 1 && sent.tokens[s] == n.symbol) e_none = unit;
                break;
            case NodeKind::Interior:
                if (n.num_children == 1) {
                    e_none = chart.combined(s, t, n.child[0]);
                } else {
                    for (int r = s; r <= t; ++r) {
                        ++updates;
                        e_none = Ops::add(e_none, Ops::mul(chart.combined(s, r, n.child[0]),
                                                           chart.combined(r, t, n.child[1])));
                    }
                }
                break;
        }
        chart.at(s, t, node, kAdjNone) = e_none;

        double e_left = Ops::zero();
        if (n.has_left_site() && w >= 1) {
            for (int r = s + 1; r <= t; ++r) {
                const double rest = chart.raw(r, t, node, kAdjNone);
                if (Ops::is_zero(rest)) continue;
                e_left = Ops::add(e_left, Ops::mul(left_sum(n.left_site, s, r), rest));
            }
        }
        chart.at(s, t, node, kAdjLeft) = e_left;

        double e_right = Ops::zero();
        if (n.has_right_site() && w >= 1) {
            for (int r = s; r < t; ++r) {
                const double own = chart.raw(s, r, node, kAdjNone);
                if (Ops::is_zero(own)) continue;
                e_right = Ops::add(e_right, Ops::mul(own, right_sum(n.right_site, r, t)));
            }
        }
        chart.at(s, t, node, kAdjRight) = e_right;

        double e_both = Ops::zero();
        if (n.has_left_site() && n.has_right_site() && w >= 2) {
            for (int r1 = s + 1; r1 < t; ++r1) {
                const double rest = chart.raw(r1, t, node, kAdjRight);
                if (Ops::is_zero(rest)) continue;
                e_both = Ops::add(e_both, Ops::mul(left_sum(n.left_site, s, r1), rest));
            }
        }
        chart.at(s, t, node, kAdjBoth) = e_both;

        const double pnl = Ops::from_prob(p.node_no_left(n));
        const double pnr = Ops::from_prob(p.node_no_right(n));
        double combined = Ops::mul(Ops::mul(pnl, pnr), e_none);
        combined = Ops::add(combined, Ops::mul(pnr, e_left));
        combined = Ops::add(combined, Ops::mul(pnl, e_right));
        combined = Ops::add(combined, Ops::mul(half, e_both));
        chart.at(s, t, node, 4) = combined;
    }

    // Candidate-weighted inside mass of all left auxiliary roots over (s, r).
    double left_sum(int site, int s, int r) {
        double acc = Ops::zero();
        for (int v = 0; v < g.num_left_aux(); ++v) {
            ++updates;
            const int root = g.nodes[g.trees[g.left_tree_of[v]].root].id;
            acc = Ops::add(acc, Ops::mul(Ops::from_prob(p.left[site][v]),
                                         chart.combined(s, r, root)));
        }
        return acc;
    }

    double right_sum(int site, int r, int t) {
        double acc = Ops::zero();
        for (int v = 0; v < g.num_right_aux(); ++v) {
            ++updates;
            const int root = g.nodes[g.trees[g.right_tree_of[v]].root].id;
            acc = Ops::add(acc, Ops::mul(Ops::from_prob(p.right[site][v]),
                                         chart.combined(r, t, root)));
        }
        return acc;
    }
};

// Default per-width log2 scale; enough to keep admissible random grammars in
// range, adjusted on demand by the caller when it is not.
inline double default_kappa(int vocab_size) { return std::log2(vocab_size + 1.0) + 1.0; }

}  // namespace detail
}  // namespace pltig
