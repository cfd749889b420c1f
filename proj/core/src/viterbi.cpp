#include "pltig/viterbi.hpp"

#include <cmath>

#include "chart_impl.hpp"

namespace pltig {

namespace {

// Max-product in log space: exact scores, no scaling needed.
struct MaxLogOps {
    static double zero() { return kNegInf; }
    static double one() { return 0.0; }
    static bool is_zero(double x) { return x == kNegInf; }
    static double add(double a, double b) { return a > b ? a : b; }
    static double mul(double a, double b) { return a + b; }
    static double from_prob(double p) { return p > 0 ? std::log2(p) : kNegInf; }
    static double scaled_unit(double) { return 0.0; }
};

constexpr double kLogHalf = -1.0;  // log2(1/2)

// Re-derives the argmax choices from the max chart.  Ties break toward the
// no-adjunction state, then the lowest adjoined tree id, then the leftmost
// split, matching the iteration order below.
struct Walk {
    const Grammar& g;
    const ParamSet& p;
    const Chart& chart;
    Derivation& out;

    double lp(double prob) const { return prob > 0 ? std::log2(prob) : kNegInf; }

    int left_root(int v) const { return g.trees[g.left_tree_of[v]].root; }
    int right_root(int v) const { return g.trees[g.right_tree_of[v]].root; }

    void combined(int node, int s, int t) {
        const Node& n = g.nodes[node];
        const double pnl = lp(p.node_no_left(n));
        const double pnr = lp(p.node_no_right(n));
        const double c_none = pnl + pnr + chart.raw(s, t, node, kAdjNone);
        const double c_left = pnr + chart.raw(s, t, node, kAdjLeft);
        const double c_right = pnl + chart.raw(s, t, node, kAdjRight);
        const double c_both = kLogHalf + chart.raw(s, t, node, kAdjBoth);

        double best = c_none;
        int choice = 0;
        if (c_left > best) { best = c_left; choice = 1; }
        if (c_right > best) { best = c_right; choice = 2; }
        if (c_both > best) { best = c_both; choice = 3; }
        switch (choice) {
            case 0: none(node, s, t); break;
            case 1: left(node, s, t); break;
            case 2: right(node, s, t); break;
            case 3: both(node, s, t); break;
        }
    }

    void none(int node, int s, int t) {
        const Node& n = g.nodes[node];
        if (n.kind != NodeKind::Interior) return;
        if (n.num_children == 1) {
            combined(n.child[0], s, t);
            return;
        }
        double best = kNegInf;
        int best_r = s;
        for (int r = s; r <= t; ++r) {
            double v = chart.combined(s, r, n.child[0]) + chart.combined(r, t, n.child[1]);
            if (v > best) { best = v; best_r = r; }
        }
        combined(n.child[0], s, best_r);
        combined(n.child[1], best_r, t);
    }

    void left(int node, int s, int t) {
        const Node& n = g.nodes[node];
        double best = kNegInf;
        int best_v = 0, best_r = s + 1;
        for (int v = 0; v < g.num_left_aux(); ++v) {
            const double pl = lp(p.left[n.left_site][v]);
            for (int r = s + 1; r <= t; ++r) {
                double val = pl + chart.combined(s, r, left_root(v)) +
                             chart.raw(r, t, node, kAdjNone);
                if (val > best) { best = val; best_v = v; best_r = r; }
            }
        }
        out.ops.push_back({node, AdjDir::Left, g.left_tree_of[best_v], s, best_r, t});
        combined(left_root(best_v), s, best_r);
        none(node, best_r, t);
    }

    void right(int node, int s, int t) {
        const Node& n = g.nodes[node];
        double best = kNegInf;
        int best_v = 0, best_r = s;
        for (int v = 0; v < g.num_right_aux(); ++v) {
            const double pr = lp(p.right[n.right_site][v]);
            for (int r = s; r < t; ++r) {
                double val = chart.raw(s, r, node, kAdjNone) + pr +
                             chart.combined(r, t, right_root(v));
                if (val > best) { best = val; best_v = v; best_r = r; }
            }
        }
        out.ops.push_back({node, AdjDir::Right, g.right_tree_of[best_v], s, best_r, t});
        none(node, s, best_r);
        combined(right_root(best_v), best_r, t);
    }

    void both(int node, int s, int t) {
        const Node& n = g.nodes[node];
        double best = kNegInf;
        int best_v = 0, best_r = s + 1;
        for (int v = 0; v < g.num_left_aux(); ++v) {
            const double pl = lp(p.left[n.left_site][v]);
            for (int r1 = s + 1; r1 < t; ++r1) {
                double val = pl + chart.combined(s, r1, left_root(v)) +
                             chart.raw(r1, t, node, kAdjRight);
                if (val > best) { best = val; best_v = v; best_r = r1; }
            }
        }
        out.ops.push_back({node, AdjDir::Left, g.left_tree_of[best_v], s, best_r, t});
        combined(left_root(best_v), s, best_r);
        right(node, best_r, t);
    }
};

}  // namespace

Derivation viterbi_parse(const Grammar& g, const ParamSet& p, const Sentence& sentence) {
    detail::InsidePass<MaxLogOps> pass{g, p, sentence, false, true, 0.0};
    pass.run();
    if (pass.total == kNegInf)
        throw NoParseError("sentence has probability zero under this grammar");

    Derivation der;
    der.root_tree = g.initial_tree();
    der.log2_score = pass.total;
    Walk walk{g, p, pass.chart, der};
    walk.combined(g.trees[g.initial_tree()].root, 0, sentence.length());
    return der;
}

BracketSet extract_brackets(const Derivation& derivation, int T) {
    BracketSet spans;
    auto keep = [&](int s, int t) {
        if (t - s >= 2 && t - s < T) spans.insert({s, t});
    };
    // An adjoined root dominates the full (s, t) of its operation; the host
    // node's own children dominate the remaining part of the triple.
    for (const AdjOp& op : derivation.ops) {
        keep(op.s, op.t);
        if (op.dir == AdjDir::Left)
            keep(op.r, op.t);
        else
            keep(op.s, op.r);
    }
    return spans;
}

BracketSet extract_brackets(const Derivation& derivation, const Sentence& sentence) {
    return extract_brackets(derivation, sentence.length());
}

}  // namespace pltig
