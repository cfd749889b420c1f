#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pltig/grammar.hpp"
#include "pltig/params.hpp"

using namespace pltig;

namespace {

Vocabulary vocab_of(int size) {
    std::vector<std::string> symbols;
    for (int i = 0; i < size; ++i) symbols.push_back("T" + std::to_string(i));
    return Vocabulary(symbols);
}

int count_sites(const Grammar& g, int tree_id) {
    int total = 0;
    for (const Node& n : g.nodes) {
        if (n.tree != tree_id) continue;
        total += n.has_left_site() ? 1 : 0;
        total += n.has_right_site() ? 1 : 0;
    }
    return total;
}

// One probability per (site, candidate tree) plus one no-adjunction mass per
// site, walked directly over the node inventory.
long long walk_param_count(const Grammar& g) {
    long long total = 0;
    for (const Node& n : g.nodes) {
        if (n.has_left_site()) total += g.num_left_aux() + 1;
        if (n.has_right_site()) total += g.num_right_aux() + 1;
    }
    return total;
}

}  // namespace

TEST_CASE("bigram template shape") {
    Grammar g = build_template(vocab_of(2), TemplateConfig::parse("bigram"));
    CHECK(g.trees.size() == 3);  // initial + one right-aux per symbol
    CHECK(g.trees[0].kind == TreeKind::Initial);
    CHECK(g.num_left_sites() == 0);
    CHECK(g.num_right_sites() == 3);
    int total_sites = 0;
    for (const auto& t : g.trees) total_sites += count_sites(g, t.id);
    CHECK(total_sites == 3);
    for (const auto& t : g.trees) {
        CHECK_FALSE(g.nodes[t.root].has_left_site());
        CHECK_FALSE(g.nodes[t.root].has_right_site());
    }
}

TEST_CASE("LnRm site assignment is outside-in") {
    SUBCASE("L1R2") {
        Grammar g = build_template(vocab_of(2), TemplateConfig::parse("L1R2"));
        for (const auto& t : g.trees) {
            if (t.kind == TreeKind::Initial) continue;
            REQUIRE(t.spine.size() == 2);
            CHECK(g.nodes[t.spine[0]].has_left_site());
            CHECK(g.nodes[t.spine[0]].has_right_site());
            CHECK_FALSE(g.nodes[t.spine[1]].has_left_site());
            CHECK(g.nodes[t.spine[1]].has_right_site());
            CHECK(count_sites(g, t.id) == 3);
        }
    }
    SUBCASE("L2R2") {
        Grammar g = build_template(vocab_of(2), TemplateConfig::parse("L2R2"));
        for (const auto& t : g.trees) {
            if (t.kind == TreeKind::Initial) continue;
            REQUIRE(t.spine.size() == 2);
            for (int spine_node : t.spine) {
                CHECK(g.nodes[spine_node].has_left_site());
                CHECK(g.nodes[spine_node].has_right_site());
            }
            CHECK(count_sites(g, t.id) == 4);
        }
    }
    SUBCASE("initial tree has exactly two sites in any LnRm template") {
        for (const char* name : {"L1R1", "L1R2", "L2R1", "L2R2", "L3R1"}) {
            Grammar g = build_template(vocab_of(3), TemplateConfig::parse(name));
            CHECK(count_sites(g, 0) == 2);
            CHECK(g.nodes[g.trees[0].spine[0]].has_left_site());
            CHECK(g.nodes[g.trees[0].spine[0]].has_right_site());
        }
    }
}

TEST_CASE("no auxiliary root carries a site; structural invariants hold") {
    for (const char* name : {"bigram", "L1R1", "L2R1", "L1R2", "L2R2"}) {
        Grammar g = build_template(vocab_of(3), TemplateConfig::parse(name));
        for (const auto& t : g.trees) {
            const Node& root = g.nodes[t.root];
            CHECK_FALSE(root.has_left_site());
            CHECK_FALSE(root.has_right_site());
            if (t.kind != TreeKind::Initial) {
                CHECK(t.foot >= 0);
                CHECK(g.nodes[t.foot].kind == NodeKind::Foot);
                CHECK(g.nodes[t.anchor_node].symbol == t.anchor);
                // Left auxiliary: anchor material strictly left of the foot.
                if (t.kind == TreeKind::LeftAux)
                    CHECK(root.child[1] == t.foot);
                else
                    CHECK(root.child[0] == t.foot);
            }
        }
        for (const Node& n : g.nodes)
            if (n.kind != NodeKind::Interior) CHECK(n.num_children == 0);
    }
}

TEST_CASE("invalid template configurations are rejected") {
    CHECK_THROWS_AS(TemplateConfig::parse("L0R0"), ConfigError);
    CHECK_THROWS_AS(TemplateConfig::parse("quadgram"), ConfigError);
    CHECK_THROWS_AS(build_template(Vocabulary(std::vector<std::string>{}),
                                   TemplateConfig::parse("L1R1")),
                    ConfigError);
}

TEST_CASE("parameter counts reproduce the published table values") {
    auto count = [](int v, const char* name) {
        return param_count(build_template(vocab_of(v), TemplateConfig::parse(name)));
    };
    CHECK(count(32, "L1R2") == 6402);
    CHECK(count(32, "L2R1") == 6402);
    CHECK(count(32, "L2R2") == 8514);
    CHECK(count(48, "L1R2") == 14210);
    CHECK(count(48, "L2R1") == 14210);
    CHECK(count(48, "L2R2") == 18914);
}

TEST_CASE("parameter count equals a direct walk over sites") {
    for (const char* name : {"bigram", "L1R1", "L2R1", "L1R2", "L2R2", "L3R2"})
        for (int v : {1, 2, 5, 32}) {
            Grammar g = build_template(vocab_of(v), TemplateConfig::parse(name));
            CHECK(param_count(g) == walk_param_count(g));
        }
}

TEST_CASE("mirrored templates have mirrored shapes and equal counts") {
    for (auto [n, m] : {std::pair{1, 2}, {2, 1}, {2, 2}, {3, 1}}) {
        TemplateConfig a;
        a.left_sites = n;
        a.right_sites = m;
        TemplateConfig b;
        b.left_sites = m;
        b.right_sites = n;
        Grammar ga = build_template(vocab_of(4), a);
        Grammar gb = build_template(vocab_of(4), b);
        CHECK(param_count(ga) == param_count(gb));
        CHECK(ga.num_left_sites() == gb.num_right_sites());
        CHECK(ga.num_right_sites() == gb.num_left_sites());
        CHECK(ga.nodes.size() == gb.nodes.size());
    }
}

TEST_CASE("template names round-trip") {
    for (const char* name : {"bigram", "L1R1", "L2R1", "L1R2", "L2R2"})
        CHECK(TemplateConfig::parse(name).name() == name);
}

TEST_CASE("random initialization is admissible and deterministic") {
    Grammar g = build_template(vocab_of(3), TemplateConfig::parse("L2R1"));
    ParamSet p = init_params(g, 17);
    CHECK(validate(g, p).empty());
    for (const auto& dist : p.left)
        for (double x : dist) CHECK(x > 0.0);
    for (const auto& dist : p.right)
        for (double x : dist) CHECK(x > 0.0);
    CHECK(p.start[0] == 1.0);

    ParamSet q = init_params(g, 17);
    CHECK(p.left == q.left);
    CHECK(p.right == q.right);
    ParamSet r = init_params(g, 18);
    CHECK(p.left != r.left);
}

TEST_CASE("single-symbol left distribution is a two-point distribution") {
    Grammar g = build_template(vocab_of(1), TemplateConfig::parse("L1R1"));
    ParamSet p = init_params(g, 5);
    for (const auto& dist : p.left) {
        REQUIRE(dist.size() == 2);
        CHECK(dist[0] > 0.0);
        CHECK(dist[0] < 1.0);
        CHECK(dist[1] > 0.0);
        CHECK(dist[0] + dist[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("validate flags broken parameters") {
    Grammar g = build_template(vocab_of(2), TemplateConfig::parse("L1R1"));
    ParamSet p = init_params(g, 1);
    SUBCASE("perturbed no-adjunction mass") {
        p.left[0].back() += 0.1;
        auto violations = validate(g, p);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].find("node " + std::to_string(g.left_site_nodes[0])) !=
              std::string::npos);
    }
    SUBCASE("start mass on an auxiliary tree") {
        p.start[1] = 0.5;
        auto violations = validate(g, p);
        REQUIRE_FALSE(violations.empty());
        CHECK(violations[0].find("auxiliary") != std::string::npos);
    }
    SUBCASE("fresh parameters validate cleanly") { CHECK(validate(g, p).empty()); }
}
