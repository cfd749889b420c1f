#pragma once

#include <array>
#include <string>
#include <vector>

#include "pltig/corpus.hpp"

namespace pltig {

// Elementary-tree inventory for the lexicalized tree-insertion templates.
//
// Every tree is a chain of interior nodes ending in an anchor leaf, with the
// foot leaf (auxiliary trees only) attached to the root on the side the
// formalism dictates: a left auxiliary tree keeps its anchor material left of
// the foot, a right auxiliary tree right of it.  Adjunction sites live on the
// interior "spine" nodes between root and anchor; roots of auxiliary trees
// never carry sites.

enum class TreeKind { Initial, LeftAux, RightAux };

enum class NodeKind { Interior, Anchor, Empty, Foot };

struct Node {
    int id = -1;
    int tree = -1;
    NodeKind kind = NodeKind::Interior;
    int symbol = -1;  // anchor symbol; -1 otherwise
    std::array<int, 2> child{-1, -1};
    int num_children = 0;
    int parent = -1;
    int left_site = -1;   // dense index into ParamSet::left, or -1
    int right_site = -1;  // dense index into ParamSet::right, or -1

    bool has_left_site() const { return left_site >= 0; }
    bool has_right_site() const { return right_site >= 0; }
    bool is_leaf() const { return num_children == 0; }
};

struct ElementaryTree {
    int id = -1;
    TreeKind kind = TreeKind::Initial;
    int anchor = -1;  // symbol index; -1 for the empty-anchored initial tree
    int root = -1;
    int foot = -1;  // -1 for the initial tree
    int anchor_node = -1;
    std::vector<int> spine;  // interior site-bearing nodes, root side first
};

struct TemplateConfig {
    enum class Shape { Bigram, LnRm };

    Shape shape = Shape::LnRm;
    int left_sites = 1;   // n, per auxiliary tree
    int right_sites = 1;  // m, per auxiliary tree

    int sites_per_tree() const {
        return shape == Shape::Bigram ? 1 : left_sites + right_sites;
    }
    int spine_length() const {
        return shape == Shape::Bigram ? 1 : std::max(left_sites, right_sites);
    }
    void validate() const;
    std::string name() const;  // "bigram", "L2R1", ...
    static TemplateConfig parse(const std::string& name);
};

struct Grammar {
    Vocabulary vocab;
    TemplateConfig config;
    std::vector<ElementaryTree> trees;  // trees[0] is the initial tree
    std::vector<Node> nodes;

    std::vector<int> left_tree_of;   // symbol -> LeftAux tree id (empty for bigram)
    std::vector<int> right_tree_of;  // symbol -> RightAux tree id
    std::vector<int> left_site_nodes;   // site index -> node id
    std::vector<int> right_site_nodes;  // site index -> node id

    int V() const { return vocab.size(); }
    int initial_tree() const { return 0; }
    int num_left_sites() const { return static_cast<int>(left_site_nodes.size()); }
    int num_right_sites() const { return static_cast<int>(right_site_nodes.size()); }
    int num_left_aux() const { return static_cast<int>(left_tree_of.size()); }
    int num_right_aux() const { return static_cast<int>(right_tree_of.size()); }

    // Node visit orders used by the chart recursions.  Within one span,
    // auxiliary trees never depend on the initial tree's inside entries, and
    // outside entries flow root-to-leaf; see chart.cpp.
    std::vector<int> inside_order;   // aux trees bottom-up, then initial tree
    std::vector<int> outside_order;  // initial tree top-down, then aux trees
};

// Builds the elementary-tree set for `config` over `vocab`:
//   Bigram: one empty-anchored initial tree with a single right site, plus a
//     right auxiliary tree with a single right site per symbol.
//   LnRm:   initial tree with one left and one right site on its interior
//     node, plus a left and a right auxiliary tree per symbol whose
//     max(n, m) spine nodes get sites outside-in (node j from the root has a
//     left site iff j <= n and a right site iff j <= m).
Grammar build_template(const Vocabulary& vocab, const TemplateConfig& config);

// Free-parameter count of the template: every adjunction site contributes
// one probability per candidate tree plus one no-adjunction mass.
long long param_count(const Grammar& grammar);

}  // namespace pltig
