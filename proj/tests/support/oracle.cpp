#include "oracle.hpp"

#include <algorithm>

namespace pltig::oracle {

Enumerator::Enumerator(const Grammar& grammar, const ParamSet& params, int max_tokens,
                       bool halve_both)
    : g_(grammar), p_(params), max_tokens_(max_tokens), halve_both_(halve_both) {
    all_ = enumerate_tree(g_.initial_tree(), max_tokens_);
    for (Derivation& d : all_) d.weight *= p_.start[g_.initial_tree()];
}

std::vector<Derivation> Enumerator::enumerate_tree(int tree, int budget) {
    const auto key = std::make_pair(tree, budget);
    auto found = memo_.find(key);
    if (found != memo_.end()) return found->second;

    const ElementaryTree& t = g_.trees[tree];
    std::vector<Derivation> partials;
    const bool lexical = t.anchor >= 0;
    if (!(lexical && budget < 1)) {
        Derivation core;
        if (lexical) core.tokens.push_back(t.anchor);
        core.instances[tree] = 1;
        partials.push_back(core);

        // Innermost spine node first; outer nodes wrap their material around.
        for (auto it = t.spine.rbegin(); it != t.spine.rend(); ++it) {
            const Node& node = g_.nodes[*it];
            std::vector<Derivation> next;
            for (const Derivation& cur : partials) {
                const int room = budget - static_cast<int>(cur.tokens.size());

                struct Option {
                    double weight;
                    const Derivation* sub;  // nullptr = no adjunction
                    int tree = -1;
                };
                auto options = [&](bool left) {
                    std::vector<Option> opts;
                    const int site = left ? node.left_site : node.right_site;
                    if (site < 0) {
                        opts.push_back({1.0, nullptr});
                        return std::make_pair(opts, std::vector<std::vector<Derivation>>{});
                    }
                    const auto& dist = left ? p_.left[site] : p_.right[site];
                    opts.push_back({dist.back(), nullptr});
                    std::vector<std::vector<Derivation>> subs;
                    const auto& trees = left ? g_.left_tree_of : g_.right_tree_of;
                    for (std::size_t v = 0; v < trees.size(); ++v) {
                        subs.push_back(enumerate_tree(trees[v], room));
                        for (const Derivation& sub : subs.back())
                            opts.push_back({dist[v] * sub.weight, &sub, trees[v]});
                    }
                    return std::make_pair(opts, std::move(subs));
                };

                // The sub-lists must stay alive while options point into them.
                auto [left_opts, left_keep] = options(true);
                auto [right_opts, right_keep] = options(false);

                for (const Option& lo : left_opts) {
                    for (const Option& ro : right_opts) {
                        const int extra = (lo.sub ? lo.sub->tokens.size() : 0) +
                                          (ro.sub ? ro.sub->tokens.size() : 0);
                        if (extra > room) continue;
                        Derivation d;
                        if (lo.sub)
                            d.tokens.insert(d.tokens.end(), lo.sub->tokens.begin(),
                                            lo.sub->tokens.end());
                        d.tokens.insert(d.tokens.end(), cur.tokens.begin(), cur.tokens.end());
                        if (ro.sub)
                            d.tokens.insert(d.tokens.end(), ro.sub->tokens.begin(),
                                            ro.sub->tokens.end());
                        d.weight = cur.weight * lo.weight * ro.weight;
                        if (lo.sub && ro.sub && halve_both_) d.weight *= 0.5;
                        d.events = cur.events;
                        d.instances = cur.instances;
                        auto absorb = [&](const Option& o, int dir) {
                            if (!o.sub) return;
                            d.events[{node.id, dir, o.tree}] += 1;
                            for (const auto& [ev, n] : o.sub->events) d.events[ev] += n;
                            for (const auto& [tr, n] : o.sub->instances)
                                d.instances[tr] += n;
                        };
                        absorb(lo, 0);
                        absorb(ro, 1);
                        next.push_back(std::move(d));
                    }
                }
            }
            partials = std::move(next);
        }
    }
    memo_[key] = partials;
    return partials;
}

double Enumerator::sentence_prob(const std::vector<int>& tokens) const {
    double total = 0;
    for (const Derivation& d : all_)
        if (d.tokens == tokens) total += d.weight;
    return total;
}

double Enumerator::best_derivation_prob(const std::vector<int>& tokens) const {
    double best = 0;
    for (const Derivation& d : all_)
        if (d.tokens == tokens) best = std::max(best, d.weight);
    return best;
}

Enumerator::Counts Enumerator::expected_counts(const std::vector<int>& tokens) const {
    Counts counts;
    counts.left.assign(g_.num_left_sites(),
                       std::vector<double>(g_.num_left_aux() + 1, 0.0));
    counts.right.assign(g_.num_right_sites(),
                        std::vector<double>(g_.num_right_aux() + 1, 0.0));
    double total = sentence_prob(tokens);
    if (total <= 0) return counts;

    for (const Derivation& d : all_) {
        if (d.tokens != tokens) continue;
        const double post = d.weight / total;
        // Adjunction events per (site, symbol).
        for (const auto& [ev, n] : d.events) {
            const auto& [node, dir, tree] = ev;
            const Node& host = g_.nodes[node];
            const int symbol = g_.trees[tree].anchor;
            if (dir == 0)
                counts.left[host.left_site][symbol] += post * n;
            else
                counts.right[host.right_site][symbol] += post * n;
        }
        // No-adjunction: every instance of the host's tree not covered by an
        // event at that (node, direction).
        auto none = [&](const std::vector<int>& site_nodes, int dir, auto& out) {
            for (std::size_t s = 0; s < site_nodes.size(); ++s) {
                const Node& host = g_.nodes[site_nodes[s]];
                int visits = 0;
                if (auto it = d.instances.find(host.tree); it != d.instances.end())
                    visits = it->second;
                int adjoined = 0;
                for (const auto& [ev, n] : d.events)
                    if (std::get<0>(ev) == host.id && std::get<1>(ev) == dir)
                        adjoined += n;
                out[s].back() += post * (visits - adjoined);
            }
        };
        none(g_.left_site_nodes, 0, counts.left);
        none(g_.right_site_nodes, 1, counts.right);
    }
    return counts;
}

namespace {

// All labeled binary parses of tokens[s, t) rooted at `a`, summed (or maxed)
// by explicit recursion; deliberately memo-free.
double pcfg_walk(const Pcfg& g, const std::vector<int>& tokens, int a, int s, int t,
                 bool maximize) {
    if (t - s == 1) return g.lex(a, tokens[s]);
    double acc = 0;
    for (int r = s + 1; r < t; ++r)
        for (int b = 0; b < g.M; ++b)
            for (int c = 0; c < g.M; ++c) {
                const double v = g.rule(a, b, c) * pcfg_walk(g, tokens, b, s, r, maximize) *
                                 pcfg_walk(g, tokens, c, r, t, maximize);
                acc = maximize ? std::max(acc, v) : acc + v;
            }
    return acc;
}

}  // namespace

double pcfg_tree_sum(const Pcfg& pcfg, const std::vector<int>& tokens) {
    return pcfg_walk(pcfg, tokens, 0, 0, static_cast<int>(tokens.size()), false);
}

double pcfg_best_tree(const Pcfg& pcfg, const std::vector<int>& tokens) {
    return pcfg_walk(pcfg, tokens, 0, 0, static_cast<int>(tokens.size()), true);
}

}  // namespace pltig::oracle
