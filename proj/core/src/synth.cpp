#include "pltig/synth.hpp"

#include <functional>

namespace pltig {

namespace {

struct Budget {
    int remaining;
};

// Draw from a distribution; the last index is the no-adjunction event for
// site distributions.
int draw(const std::vector<double>& dist, Rng& rng) {
    double u = rng.uniform();
    double acc = 0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
        acc += dist[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(dist.size()) - 1;
}

struct Instance {
    int tree;
    // Per spine node of the tree: adjoined sub-instances, or -1.
    std::vector<int> left_child, right_child;
};

struct Sampler {
    const Grammar& g;
    const ParamSet& p;
    Rng& rng;
    int budget;  // remaining token allowance; every auxiliary tree costs one
    std::vector<Instance> instances;
    bool overran = false;

    int sample_instance(int tree_id) {
        const ElementaryTree& tree = g.trees[tree_id];
        if (tree.kind != TreeKind::Initial && --budget < 0) {
            overran = true;
            return -1;
        }
        const int self = static_cast<int>(instances.size());
        instances.push_back({tree_id,
                             std::vector<int>(tree.spine.size(), -1),
                             std::vector<int>(tree.spine.size(), -1)});
        for (std::size_t j = 0; j < tree.spine.size() && !overran; ++j) {
            const Node& node = g.nodes[tree.spine[j]];
            if (node.has_left_site()) {
                int v = draw(p.left[node.left_site], rng);
                if (v < g.num_left_aux())
                    instances[self].left_child[j] = sample_instance(g.left_tree_of[v]);
            }
            if (overran) break;
            if (node.has_right_site()) {
                int v = draw(p.right[node.right_site], rng);
                if (v < g.num_right_aux())
                    instances[self].right_child[j] = sample_instance(g.right_tree_of[v]);
            }
        }
        return self;
    }

    int width(int inst) const {
        const Instance& in = instances[inst];
        int w = g.trees[in.tree].anchor >= 0 ? 1 : 0;
        for (std::size_t j = 0; j < in.left_child.size(); ++j) {
            if (in.left_child[j] >= 0) w += width(in.left_child[j]);
            if (in.right_child[j] >= 0) w += width(in.right_child[j]);
        }
        return w;
    }

    // Lays out tokens and records adjunctions with the same span triples the
    // Viterbi walk produces, so extract_brackets applies unchanged.
    void linearize(int inst, int start, std::vector<int>& tokens, Derivation& der) const {
        const Instance& in = instances[inst];
        const ElementaryTree& tree = g.trees[in.tree];
        const int total = width(inst);

        // Material order: left adjunctions outside-in, anchor, right
        // adjunctions inside-out.
        std::vector<int> left_start(in.left_child.size());
        int pos = start;
        for (std::size_t j = 0; j < in.left_child.size(); ++j) {
            left_start[j] = pos;
            if (in.left_child[j] >= 0) pos += width(in.left_child[j]);
        }
        if (tree.anchor >= 0) tokens[pos++] = tree.anchor;
        std::vector<int> right_end(in.right_child.size());
        int back = start + total;
        for (std::size_t j = 0; j < in.right_child.size(); ++j) {
            right_end[j] = back;
            if (in.right_child[j] >= 0) back -= width(in.right_child[j]);
        }

        for (std::size_t j = 0; j < in.left_child.size(); ++j) {
            const int node = tree.spine[j];
            const int kids_start = j + 1 < in.left_child.size()
                                       ? left_start[j + 1]
                                       : left_start[j] +
                                             (in.left_child[j] >= 0
                                                  ? width(in.left_child[j])
                                                  : 0);
            const int kids_end = j + 1 < in.right_child.size()
                                     ? right_end[j + 1]
                                     : right_end[j] - (in.right_child[j] >= 0
                                                           ? width(in.right_child[j])
                                                           : 0);
            if (in.left_child[j] >= 0) {
                der.ops.push_back({node, AdjDir::Left, instances[in.left_child[j]].tree,
                                   left_start[j], kids_start, right_end[j]});
                linearize(in.left_child[j], left_start[j], tokens, der);
            }
            if (in.right_child[j] >= 0) {
                der.ops.push_back({node, AdjDir::Right, instances[in.right_child[j]].tree,
                                   kids_start, kids_end, right_end[j]});
                linearize(in.right_child[j], kids_end, tokens, der);
            }
        }
    }
};

}  // namespace

Sentence sample_pltig_sentence(const Grammar& grammar, const ParamSet& params, Rng& rng,
                               const SampleOptions& options) {
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        Sampler sampler{grammar, params, rng, options.max_length, {}, false};
        int root = sampler.sample_instance(grammar.initial_tree());
        if (sampler.overran) continue;
        const int T = sampler.width(root);
        if (T < options.min_length || T > options.max_length) continue;

        Sentence sentence;
        sentence.tokens.assign(T, -1);
        Derivation der;
        der.root_tree = grammar.initial_tree();
        sampler.linearize(root, 0, sentence.tokens, der);
        sentence.gold_brackets = extract_brackets(der, T);
        return sentence;
    }
    throw Error("sampler exhausted its attempt budget; the grammar rarely emits "
                "sentences in the requested length range");
}

std::vector<Sentence> sample_pltig_corpus(const Grammar& grammar, const ParamSet& params,
                                          int count, std::uint64_t seed,
                                          const SampleOptions& options) {
    Rng rng(seed);
    std::vector<Sentence> corpus;
    corpus.reserve(count);
    for (int i = 0; i < count; ++i)
        corpus.push_back(sample_pltig_sentence(grammar, params, rng, options));
    return corpus;
}

Sentence sample_pcfg_sentence(const Pcfg& pcfg, Rng& rng, const SampleOptions& options) {
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        Sentence sentence;
        bool overran = false;
        // Iterative leftmost expansion; spans recovered afterwards.
        struct Frame {
            int nt;
            int start;
            Span* span_out;
        };
        std::vector<Span> spans;
        spans.reserve(2 * options.max_length);
        const int max_depth = 16 * (options.max_length + 2);
        std::function<int(int, int, int)> expand = [&](int nt, int start, int depth) -> int {
            if (overran || depth > max_depth ||
                static_cast<int>(sentence.tokens.size()) > options.max_length) {
                overran = true;
                return start;
            }
            // One draw over binary + lexical events.
            double u = rng.uniform();
            double acc = 0;
            for (int b = 0; b < pcfg.M && !overran; ++b)
                for (int c = 0; c < pcfg.M; ++c) {
                    acc += pcfg.rule(nt, b, c);
                    if (u < acc) {
                        const int mid = expand(b, start, depth + 1);
                        const int end = expand(c, mid, depth + 1);
                        if (!overran) spans.push_back({start, end});
                        return end;
                    }
                }
            for (int w = 0; w < pcfg.V; ++w) {
                acc += pcfg.lex(nt, w);
                if (u < acc) {
                    sentence.tokens.push_back(w);
                    return start + 1;
                }
            }
            sentence.tokens.push_back(pcfg.V - 1);  // rounding residue
            return start + 1;
        };
        const int T = expand(0, 0, 0);
        if (overran || T < options.min_length || T > options.max_length) continue;
        for (const Span& sp : spans)
            if (sp.second - sp.first >= 2 && sp.second - sp.first < T)
                sentence.gold_brackets.insert(sp);
        return sentence;
    }
    throw Error("sampler exhausted its attempt budget; the grammar rarely emits "
                "sentences in the requested length range");
}

std::vector<Sentence> sample_pcfg_corpus(const Pcfg& pcfg, int count, std::uint64_t seed,
                                         const SampleOptions& options) {
    Rng rng(seed);
    std::vector<Sentence> corpus;
    corpus.reserve(count);
    for (int i = 0; i < count; ++i)
        corpus.push_back(sample_pcfg_sentence(pcfg, rng, options));
    return corpus;
}

}  // namespace pltig
