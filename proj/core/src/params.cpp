#include "pltig/params.hpp"

#include <cmath>
#include <numeric>

namespace pltig {

namespace {

std::vector<double> random_dist(std::size_t size, Rng& rng) {
    std::vector<double> d(size);
    double sum = 0;
    for (double& x : d) {
        x = rng.uniform(0.1, 1.0);  // bounded away from zero
        sum += x;
    }
    for (double& x : d) x /= sum;
    return d;
}

}  // namespace

ParamSet init_params(const Grammar& grammar, std::uint64_t seed) {
    Rng rng(seed);
    ParamSet p;
    p.start.assign(grammar.trees.size(), 0.0);
    p.start[grammar.initial_tree()] = 1.0;
    const std::size_t left_dim = grammar.num_left_aux() + 1;
    const std::size_t right_dim = grammar.num_right_aux() + 1;
    for (int s = 0; s < grammar.num_left_sites(); ++s)
        p.left.push_back(random_dist(left_dim, rng));
    for (int s = 0; s < grammar.num_right_sites(); ++s)
        p.right.push_back(random_dist(right_dim, rng));
    return p;
}

ParamSet uniform_params(const Grammar& grammar) {
    ParamSet p;
    p.start.assign(grammar.trees.size(), 0.0);
    p.start[grammar.initial_tree()] = 1.0;
    const std::size_t left_dim = grammar.num_left_aux() + 1;
    const std::size_t right_dim = grammar.num_right_aux() + 1;
    p.left.assign(grammar.num_left_sites(), std::vector<double>(left_dim, 1.0 / left_dim));
    p.right.assign(grammar.num_right_sites(), std::vector<double>(right_dim, 1.0 / right_dim));
    return p;
}

std::vector<std::string> validate(const Grammar& grammar, const ParamSet& params, double tol) {
    std::vector<std::string> violations;
    auto complain = [&](const std::string& msg) { violations.push_back(msg); };

    if (params.start.size() != grammar.trees.size()) {
        complain("start vector has wrong size");
    } else {
        double init_mass = 0;
        for (std::size_t t = 0; t < params.start.size(); ++t) {
            if (grammar.trees[t].kind == TreeKind::Initial) {
                init_mass += params.start[t];
            } else if (params.start[t] != 0.0) {
                complain("tree " + std::to_string(t) +
                         ": start probability on an auxiliary tree (" +
                         std::to_string(params.start[t]) + ")");
            }
        }
        if (std::abs(init_mass - 1.0) > tol)
            complain("start mass over initial trees is " + std::to_string(init_mass));
    }

    auto check_sites = [&](const std::vector<std::vector<double>>& dists,
                           const std::vector<int>& site_nodes, std::size_t dim,
                           const char* dir) {
        if (dists.size() != site_nodes.size()) {
            complain(std::string(dir) + " distributions have wrong count");
            return;
        }
        for (std::size_t s = 0; s < dists.size(); ++s) {
            const auto& d = dists[s];
            std::string where = std::string(dir) + " site at node " +
                                std::to_string(site_nodes[s]);
            if (d.size() != dim) {
                complain(where + ": wrong dimension");
                continue;
            }
            double sum = std::accumulate(d.begin(), d.end(), 0.0);
            if (std::abs(sum - 1.0) > tol)
                complain(where + ": sums to " + std::to_string(sum) + " (off by " +
                         std::to_string(sum - 1.0) + ")");
            for (double x : d)
                if (x < 0 || !std::isfinite(x)) {
                    complain(where + ": entry out of range");
                    break;
                }
        }
    };
    check_sites(params.left, grammar.left_site_nodes, grammar.num_left_aux() + 1, "left");
    check_sites(params.right, grammar.right_site_nodes, grammar.num_right_aux() + 1, "right");
    return violations;
}

}  // namespace pltig
