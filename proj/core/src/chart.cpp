#include "pltig/chart.hpp"

#include <cmath>

#include "chart_impl.hpp"

namespace pltig {

Chart::Chart(int T, int num_nodes)
    : T_(T),
      num_nodes_(num_nodes),
      v_(static_cast<std::size_t>(span_index(T, T) + 1) * num_nodes * 5, 0.0) {}

namespace {

// Runs the linear pass; on overflow/underflow of the total, recomputes the
// exact log-space value once and reruns with a scale that centres the total.
InsideChart inside_linear(const Grammar& g, const ParamSet& p, const Sentence& sent,
                          const ChartOptions& options) {
    const int T = sent.length();
    double kappa = detail::default_kappa(g.V());
    for (int attempt = 0;; ++attempt) {
        detail::InsidePass<detail::LinearOps> pass{g, p, sent, options.constraints,
                                                   options.halve_both, kappa};
        pass.run();
        InsideChart out;
        out.kappa = kappa;
        out.constrained = options.constraints;
        out.cell_updates = pass.updates;
        out.scaled_total = pass.total;
        if (pass.total > 0.0 && std::isfinite(pass.total)) {
            out.cells = std::move(pass.chart);
            out.log2_prob = std::log2(pass.total) - kappa * T;
            return out;
        }
        detail::InsidePass<detail::LogOps> ref{g, p, sent, options.constraints,
                                               options.halve_both, 0.0};
        ref.run();
        if (ref.total == kNegInf) {
            out.cells = std::move(pass.chart);
            out.log2_prob = kNegInf;
            out.scaled_total = 0.0;
            return out;
        }
        if (attempt >= 2)
            throw Error("inside chart would not fit double range at any scale");
        kappa = -ref.total / T;  // centres the scaled total at 1
    }
}

}  // namespace

InsideChart compute_inside(const Grammar& g, const ParamSet& p, const Sentence& sent,
                           bool constraints) {
    ChartOptions options;
    options.constraints = constraints;
    return inside_linear(g, p, sent, options);
}

InsideChart compute_inside(const Grammar& g, const ParamSet& p, const Sentence& sent,
                           const ChartOptions& options) {
    return inside_linear(g, p, sent, options);
}

double sentence_log_prob(const Grammar& g, const ParamSet& p, const Sentence& sent,
                         bool constraints) {
    return compute_inside(g, p, sent, constraints).log2_prob;
}

double inside_log2_reference(const Grammar& g, const ParamSet& p, const Sentence& sent,
                             bool constraints) {
    detail::InsidePass<detail::LogOps> pass{g, p, sent, constraints, true, 0.0};
    pass.run();
    return pass.total;
}

BothStateMass simultaneous_mass_diagnostic(const Grammar& g, const ParamSet& p,
                                           const Sentence& sent) {
    detail::InsidePass<detail::LogOps> halved{g, p, sent, false, true, 0.0};
    halved.run();
    detail::InsidePass<detail::LogOps> unhalved{g, p, sent, false, false, 0.0};
    unhalved.run();
    return {halved.total, unhalved.total};
}

// Outside pass.  Cells are scaled by 2^(kappa * (T - width)) so inside and
// outside values of one cell multiply to sentence mass at a uniform scale of
// 2^(kappa * T).  Five context configurations feed the no-adjunction state:
// only child, left child beside a sibling, right child beside one, and root
// of an adjoined left or right auxiliary tree.  The remaining states move the
// adjoined material of the node itself out of the span.  Under bracket
// constraints, incompatible spans stay zero here too — context mass may not
// flow through a slot the inside pass already ruled out.
OutsideChart compute_outside(const Grammar& g, const ParamSet& p, const Sentence& sent,
                             const InsideChart& inside, bool constraints) {
    const int T = sent.length();
    if (inside.cells.T() != T || inside.cells.num_nodes() != static_cast<int>(g.nodes.size()))
        throw Error("outside pass given a chart for a different sentence or grammar");

    OutsideChart out;
    out.cells = Chart(T, static_cast<int>(g.nodes.size()));
    Chart& f = out.cells;
    const Chart& e = inside.cells;
    std::size_t updates = 0;

    auto left_sum = [&](int site, int s, int r) {
        double acc = 0;
        for (int v = 0; v < g.num_left_aux(); ++v) {
            ++updates;
            acc += p.left[site][v] * e.combined(s, r, g.trees[g.left_tree_of[v]].root);
        }
        return acc;
    };
    auto right_sum = [&](int site, int r, int t) {
        double acc = 0;
        for (int v = 0; v < g.num_right_aux(); ++v) {
            ++updates;
            acc += p.right[site][v] * e.combined(r, t, g.trees[g.right_tree_of[v]].root);
        }
        return acc;
    };

    for (int w = T; w >= 0; --w) {
        for (int s = 0; s + w <= T; ++s) {
            const int t = s + w;
            if (constraints && w > 1 && w < T && !span_compatible(sent, {s, t})) continue;
            for (int node : g.outside_order) {
                const Node& n = g.nodes[node];
                const ElementaryTree& tree = g.trees[n.tree];
                double f_none = 0;

                if (node == tree.root) {
                    if (tree.kind == TreeKind::Initial) {
                        f_none = (s == 0 && t == T) ? p.start[tree.id] : 0.0;
                    } else if (tree.kind == TreeKind::LeftAux) {
                        // Adjoined left of a host: host keeps (t, r) without
                        // further left adjunction.
                        for (std::size_t ls = 0; ls < g.left_site_nodes.size(); ++ls) {
                            const int host = g.left_site_nodes[ls];
                            const double pl = p.left[ls][tree.anchor];
                            const double pnr_host = p.node_no_right(g.nodes[host]);
                            for (int r = t; r <= T; ++r) {
                                ++updates;
                                const double ctx = f.raw(s, r, host, kAdjNone);
                                if (ctx == 0.0) continue;
                                const double host_inside =
                                    e.raw(t, r, host, kAdjNone) * pnr_host +
                                    e.raw(t, r, host, kAdjRight) * 0.5;
                                f_none += pl * ctx * host_inside;
                            }
                        }
                    } else {
                        for (std::size_t rs = 0; rs < g.right_site_nodes.size(); ++rs) {
                            const int host = g.right_site_nodes[rs];
                            const double pr = p.right[rs][tree.anchor];
                            const double pnl_host = p.node_no_left(g.nodes[host]);
                            for (int r = 0; r <= s; ++r) {
                                ++updates;
                                const double ctx = f.raw(r, t, host, kAdjNone);
                                if (ctx == 0.0) continue;
                                const double host_inside =
                                    e.raw(r, s, host, kAdjNone) * pnl_host +
                                    e.raw(r, s, host, kAdjLeft) * 0.5;
                                f_none += pr * ctx * host_inside;
                            }
                        }
                    }
                } else {
                    const Node& parent = g.nodes[n.parent];
                    if (parent.num_children == 1) {
                        f_none = f.combined(s, t, n.parent);
                    } else if (parent.child[0] == node) {
                        const int sibling = parent.child[1];
                        for (int r = t; r <= T; ++r) {
                            ++updates;
                            f_none += f.combined(s, r, n.parent) * e.combined(t, r, sibling);
                        }
                    } else {
                        const int sibling = parent.child[0];
                        for (int r = 0; r <= s; ++r) {
                            ++updates;
                            f_none += f.combined(r, t, n.parent) * e.combined(r, s, sibling);
                        }
                    }
                }
                f.at(s, t, node, kAdjNone) = f_none;

                double f_left = 0;
                if (n.has_left_site()) {
                    for (int r = 0; r < s; ++r) {
                        const double ctx = f.raw(r, t, node, kAdjNone);
                        if (ctx == 0.0) continue;
                        f_left += left_sum(n.left_site, r, s) * ctx;
                    }
                }
                f.at(s, t, node, kAdjLeft) = f_left;

                double f_right = 0;
                if (n.has_right_site()) {
                    for (int r = t + 1; r <= T; ++r) {
                        const double ctx = f.raw(s, r, node, kAdjNone);
                        if (ctx == 0.0) continue;
                        f_right += right_sum(n.right_site, t, r) * ctx;
                    }
                }
                f.at(s, t, node, kAdjRight) = f_right;

                double f_both = 0;
                if (n.has_left_site() && n.has_right_site()) {
                    // Factored like the inside both-state: left material over
                    // (r1, s) against the right-state context at (r1, t).
                    for (int r1 = 0; r1 < s; ++r1) {
                        const double ctx = f.raw(r1, t, node, kAdjRight);
                        if (ctx == 0.0) continue;
                        f_both += left_sum(n.left_site, r1, s) * ctx;
                    }
                }
                f.at(s, t, node, kAdjBoth) = f_both;

                const double pnl = p.node_no_left(n);
                const double pnr = p.node_no_right(n);
                f.at(s, t, node, 4) =
                    pnl * pnr * f_none + pnr * f_left + pnl * f_right + f_both * 0.5;
            }
        }
    }
    out.cell_updates = updates;
    return out;
}

}  // namespace pltig
