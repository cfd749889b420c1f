#include "pltig/grammar.hpp"

#include <algorithm>
#include <cctype>

namespace pltig {

void TemplateConfig::validate() const {
    if (shape == Shape::LnRm) {
        if (left_sites < 0 || right_sites < 0)
            throw ConfigError("template site counts must be non-negative");
        if (left_sites + right_sites < 1)
            throw ConfigError("LnRm template needs at least one adjunction site per tree");
    }
}

std::string TemplateConfig::name() const {
    if (shape == Shape::Bigram) return "bigram";
    return "L" + std::to_string(left_sites) + "R" + std::to_string(right_sites);
}

TemplateConfig TemplateConfig::parse(const std::string& name) {
    TemplateConfig config;
    if (name == "bigram") {
        config.shape = Shape::Bigram;
        config.left_sites = 0;
        config.right_sites = 1;
        return config;
    }
    // LnRm, e.g. "L2R1".
    auto fail = [&] { throw ConfigError("unknown template name: " + name); };
    if (name.size() < 4 || (name[0] != 'L' && name[0] != 'l')) fail();
    std::size_t rpos = name.find_first_of("Rr", 1);
    if (rpos == std::string::npos || rpos == 1 || rpos + 1 >= name.size()) fail();
    for (std::size_t i = 1; i < name.size(); ++i)
        if (i != rpos && !std::isdigit(static_cast<unsigned char>(name[i]))) fail();
    config.shape = Shape::LnRm;
    config.left_sites = std::stoi(name.substr(1, rpos - 1));
    config.right_sites = std::stoi(name.substr(rpos + 1));
    config.validate();
    return config;
}

namespace {

int add_node(Grammar& g, int tree, NodeKind kind, int symbol = -1) {
    Node n;
    n.id = static_cast<int>(g.nodes.size());
    n.tree = tree;
    n.kind = kind;
    n.symbol = symbol;
    g.nodes.push_back(n);
    return n.id;
}

void link(Grammar& g, int parent, int child) {
    Node& p = g.nodes[parent];
    p.child[p.num_children++] = child;
    g.nodes[child].parent = parent;
}

void give_left_site(Grammar& g, int node) {
    g.nodes[node].left_site = static_cast<int>(g.left_site_nodes.size());
    g.left_site_nodes.push_back(node);
}

void give_right_site(Grammar& g, int node) {
    g.nodes[node].right_site = static_cast<int>(g.right_site_nodes.size());
    g.right_site_nodes.push_back(node);
}

// Root, then spine top-down, then anchor, with the foot beside the spine top.
// Spine node j (1-based from the root) gets a left site iff j <= n and a
// right site iff j <= m; roots and leaves never carry sites.
int build_aux_tree(Grammar& g, TreeKind kind, int symbol, int n_left, int m_right,
                   int spine_len) {
    ElementaryTree tree;
    tree.id = static_cast<int>(g.trees.size());
    tree.kind = kind;
    tree.anchor = symbol;
    g.trees.push_back(tree);
    ElementaryTree& t = g.trees.back();

    t.root = add_node(g, t.id, NodeKind::Interior);
    t.foot = add_node(g, t.id, NodeKind::Foot);
    int top = add_node(g, t.id, NodeKind::Interior);
    if (kind == TreeKind::LeftAux) {
        link(g, t.root, top);   // anchor material left of the foot
        link(g, t.root, t.foot);
    } else {
        link(g, t.root, t.foot);
        link(g, t.root, top);
    }
    int prev = top;
    t.spine.push_back(top);
    for (int j = 2; j <= spine_len; ++j) {
        int next = add_node(g, t.id, NodeKind::Interior);
        link(g, prev, next);
        t.spine.push_back(next);
        prev = next;
    }
    t.anchor_node = add_node(g, t.id, NodeKind::Anchor, symbol);
    link(g, prev, t.anchor_node);

    for (int j = 1; j <= spine_len; ++j) {
        if (j <= n_left) give_left_site(g, t.spine[j - 1]);
        if (j <= m_right) give_right_site(g, t.spine[j - 1]);
    }
    return t.id;
}

void node_order_rec(const Grammar& g, int node, bool children_first, std::vector<int>& out) {
    if (children_first) {
        const Node& n = g.nodes[node];
        for (int c = 0; c < n.num_children; ++c)
            node_order_rec(g, n.child[c], children_first, out);
        out.push_back(node);
    } else {
        out.push_back(node);
        const Node& n = g.nodes[node];
        for (int c = 0; c < n.num_children; ++c)
            node_order_rec(g, n.child[c], children_first, out);
    }
}

}  // namespace

Grammar build_template(const Vocabulary& vocab, const TemplateConfig& config) {
    config.validate();
    if (vocab.size() < 1) throw ConfigError("cannot build a template over an empty vocabulary");

    Grammar g;
    g.vocab = vocab;
    g.config = config;

    // Initial tree: root over one interior node over the empty anchor.
    {
        ElementaryTree tree;
        tree.id = 0;
        tree.kind = TreeKind::Initial;
        g.trees.push_back(tree);
        ElementaryTree& t = g.trees.back();
        t.root = add_node(g, 0, NodeKind::Interior);
        int interior = add_node(g, 0, NodeKind::Interior);
        link(g, t.root, interior);
        t.spine.push_back(interior);
        t.anchor_node = add_node(g, 0, NodeKind::Empty);
        link(g, interior, t.anchor_node);
        if (config.shape == TemplateConfig::Shape::LnRm) give_left_site(g, interior);
        give_right_site(g, interior);
    }

    const int V = vocab.size();
    if (config.shape == TemplateConfig::Shape::Bigram) {
        for (int v = 0; v < V; ++v)
            g.right_tree_of.push_back(build_aux_tree(g, TreeKind::RightAux, v, 0, 1, 1));
    } else {
        const int spine = config.spine_length();
        for (int v = 0; v < V; ++v) {
            g.left_tree_of.push_back(build_aux_tree(g, TreeKind::LeftAux, v,
                                                    config.left_sites, config.right_sites,
                                                    spine));
            g.right_tree_of.push_back(build_aux_tree(g, TreeKind::RightAux, v,
                                                     config.left_sites, config.right_sites,
                                                     spine));
        }
    }

    for (std::size_t i = 1; i < g.trees.size(); ++i)
        node_order_rec(g, g.trees[i].root, true, g.inside_order);
    node_order_rec(g, g.trees[0].root, true, g.inside_order);

    node_order_rec(g, g.trees[0].root, false, g.outside_order);
    for (std::size_t i = 1; i < g.trees.size(); ++i)
        node_order_rec(g, g.trees[i].root, false, g.outside_order);

    return g;
}

long long param_count(const Grammar& grammar) {
    const long long V = grammar.V();
    if (grammar.config.shape == TemplateConfig::Shape::Bigram) {
        // One right distribution of size V+1 per tree, counting the initial
        // tree; there is no published formula for this template.
        return (V + 1) * (V + 1);
    }
    const long long K = grammar.config.sites_per_tree();
    return 2 * (V + 1) + 2 * V * K * (V + 1);
}

}  // namespace pltig
