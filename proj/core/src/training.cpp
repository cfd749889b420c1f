#include "pltig/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace pltig {

namespace {

// Fixed-size sentence blocks; per-block results merge in block order, so the
// totals are bit-identical for any worker count.
constexpr std::size_t kBlock = 32;

template <typename Counts, typename PerSentence>
Counts parallel_estep(const std::vector<Sentence>& corpus, int threads, Counts zeros,
                      const PerSentence& per_sentence) {
    const std::size_t blocks = (corpus.size() + kBlock - 1) / kBlock;
    std::vector<Counts> partial(blocks, zeros);
    auto run_block = [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(corpus.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) per_sentence(corpus[i], partial[b]);
    };
    if (threads <= 1 || blocks <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, static_cast<int>(blocks));
        pool.reserve(n);
        for (int w = 0; w < n; ++w)
            pool.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }
    Counts total = std::move(partial[0]);
    for (std::size_t b = 1; b < blocks; ++b) total.add(partial[b]);
    return total;
}

}  // namespace

ExpectedCounts ExpectedCounts::zeros(const Grammar& grammar) {
    ExpectedCounts c;
    c.left.assign(grammar.num_left_sites(),
                  std::vector<double>(grammar.num_left_aux() + 1, 0.0));
    c.right.assign(grammar.num_right_sites(),
                   std::vector<double>(grammar.num_right_aux() + 1, 0.0));
    return c;
}

void ExpectedCounts::add(const ExpectedCounts& other) {
    for (std::size_t s = 0; s < left.size(); ++s)
        for (std::size_t v = 0; v < left[s].size(); ++v) left[s][v] += other.left[s][v];
    for (std::size_t s = 0; s < right.size(); ++s)
        for (std::size_t v = 0; v < right[s].size(); ++v) right[s][v] += other.right[s][v];
    corpus_log2 += other.corpus_log2;
    sentences += other.sentences;
    skipped += other.skipped;
}

// Posterior adjunction counts.  Each left adjunction is counted once, at the
// cell where the adjoined material joins the host's children (inside state
// "left"), with the host's right side carried entirely by the outside part:
// either no right adjunction (P_NR, context f_none) or one whose material
// lies beyond the span (f_right, halved for the simultaneous weighting).
// No-adjunction decisions are counted at the bare-children cells the same
// way, without the 1/2 (a lone right adjunction is not simultaneous).
bool accumulate_counts(const Grammar& g, const ParamSet& p, const Sentence& sent,
                       bool constraints, ExpectedCounts& into) {
    InsideChart inside = compute_inside(g, p, sent, constraints);
    if (inside.log2_prob == kNegInf) {
        ++into.skipped;
        return false;
    }
    OutsideChart outside = compute_outside(g, p, sent, inside, constraints);
    const Chart& e = inside.cells;
    const Chart& f = outside.cells;
    const double inv_total = 1.0 / inside.scaled_total;
    const int T = sent.length();

    for (std::size_t ls = 0; ls < g.left_site_nodes.size(); ++ls) {
        const int node = g.left_site_nodes[ls];
        const Node& n = g.nodes[node];
        const double pnl = p.p_no_left(ls);
        const double pnr = p.node_no_right(n);
        for (int s = 0; s <= T; ++s) {
            for (int t = s; t <= T; ++t) {
                const double f_none = f.raw(s, t, node, kAdjNone);
                const double f_right = f.raw(s, t, node, kAdjRight);
                if (f_none == 0.0 && f_right == 0.0) continue;
                const double e_none = e.raw(s, t, node, kAdjNone);
                if (e_none != 0.0)
                    into.left[ls].back() +=
                        inv_total * pnl * e_none * (pnr * f_none + f_right);
                const double ctx = pnr * f_none + 0.5 * f_right;
                if (ctx == 0.0) continue;
                for (int r = s + 1; r <= t; ++r) {
                    const double rest = e.raw(r, t, node, kAdjNone);
                    if (rest == 0.0) continue;
                    const double scale = inv_total * rest * ctx;
                    for (int v = 0; v < g.num_left_aux(); ++v) {
                        const double root_in =
                            e.combined(s, r, g.trees[g.left_tree_of[v]].root);
                        if (root_in == 0.0) continue;
                        into.left[ls][v] += scale * p.left[ls][v] * root_in;
                    }
                }
            }
        }
    }

    for (std::size_t rs = 0; rs < g.right_site_nodes.size(); ++rs) {
        const int node = g.right_site_nodes[rs];
        const Node& n = g.nodes[node];
        const double pnr = p.p_no_right(rs);
        const double pnl = p.node_no_left(n);
        for (int s = 0; s <= T; ++s) {
            for (int t = s; t <= T; ++t) {
                const double f_none = f.raw(s, t, node, kAdjNone);
                const double f_left = f.raw(s, t, node, kAdjLeft);
                if (f_none == 0.0 && f_left == 0.0) continue;
                const double e_none = e.raw(s, t, node, kAdjNone);
                if (e_none != 0.0)
                    into.right[rs].back() +=
                        inv_total * pnr * e_none * (pnl * f_none + f_left);
                const double ctx = pnl * f_none + 0.5 * f_left;
                if (ctx == 0.0) continue;
                for (int r = s; r < t; ++r) {
                    const double own = e.raw(s, r, node, kAdjNone);
                    if (own == 0.0) continue;
                    const double scale = inv_total * own * ctx;
                    for (int v = 0; v < g.num_right_aux(); ++v) {
                        const double root_in =
                            e.combined(r, t, g.trees[g.right_tree_of[v]].root);
                        if (root_in == 0.0) continue;
                        into.right[rs][v] += scale * p.right[rs][v] * root_in;
                    }
                }
            }
        }
    }

    into.corpus_log2 += inside.log2_prob;
    ++into.sentences;
    return true;
}

ExpectedCounts accumulate_counts(const Grammar& g, const ParamSet& p, const Sentence& sent,
                                 bool constraints) {
    ExpectedCounts counts = ExpectedCounts::zeros(g);
    accumulate_counts(g, p, sent, constraints, counts);
    return counts;
}

namespace {

bool renormalize(std::vector<double>& dist, const std::vector<double>& previous) {
    double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (total <= 0.0) {
        dist = previous;
        return false;
    }
    for (double& x : dist) x /= total;
    return true;
}

}  // namespace

ParamSet reestimate(const Grammar& g, const ExpectedCounts& counts, const ParamSet& previous,
                    int* retained) {
    ParamSet next;
    next.start = previous.start;
    next.left = counts.left;
    next.right = counts.right;
    int kept = 0;
    for (std::size_t s = 0; s < next.left.size(); ++s)
        if (!renormalize(next.left[s], previous.left[s])) ++kept;
    for (std::size_t s = 0; s < next.right.size(); ++s)
        if (!renormalize(next.right[s], previous.right[s])) ++kept;
    if (retained) *retained = kept;
    return next;
}

namespace {

// Pools counts per adjoined tree across all sites of one direction.
std::vector<double> pooled_backoff(const std::vector<std::vector<double>>& counts,
                                   std::size_t dim) {
    std::vector<double> pool(dim, 0.0);
    for (const auto& site : counts)
        for (std::size_t v = 0; v < dim; ++v) pool[v] += site[v];
    double total = std::accumulate(pool.begin(), pool.end(), 0.0);
    if (total > 0)
        for (double& x : pool) x /= total;
    else
        pool.assign(dim, 1.0 / dim);
    return pool;
}

struct SiteDists {
    std::vector<std::vector<double>> ml;  // per site; empty when unestimable
    std::vector<double> backoff;
    double uniform;
};

SiteDists direction_dists(const std::vector<std::vector<double>>& counts, std::size_t dim) {
    SiteDists d;
    d.uniform = 1.0 / dim;
    d.backoff = pooled_backoff(counts, dim);
    for (const auto& site : counts) {
        double total = std::accumulate(site.begin(), site.end(), 0.0);
        std::vector<double> ml;
        if (total > 0) {
            ml = site;
            for (double& x : ml) x /= total;
        }
        d.ml.push_back(std::move(ml));
    }
    return d;
}

}  // namespace

InterpolationWeights fit_interpolation(const Grammar& g, const ExpectedCounts& train_counts,
                                       const ExpectedCounts& heldout_counts) {
    SiteDists left = direction_dists(train_counts.left, g.num_left_aux() + 1);
    SiteDists right = direction_dists(train_counts.right, g.num_right_aux() + 1);

    double lambda[3] = {0.4, 0.3, 0.3};  // ml, backoff, uniform
    for (int iter = 0; iter < 200; ++iter) {
        double expect[3] = {0, 0, 0};
        auto absorb = [&](const SiteDists& d, const std::vector<std::vector<double>>& held) {
            for (std::size_t s = 0; s < held.size(); ++s) {
                const std::vector<double>* ml = d.ml[s].empty() ? nullptr : &d.ml[s];
                for (std::size_t v = 0; v < held[s].size(); ++v) {
                    const double c = held[s][v];
                    if (c == 0.0) continue;
                    double parts[3] = {lambda[0] * (ml ? (*ml)[v] : 0.0),
                                       lambda[1] * d.backoff[v], lambda[2] * d.uniform};
                    double z = parts[0] + parts[1] + parts[2];
                    if (z <= 0.0) continue;
                    for (int k = 0; k < 3; ++k) expect[k] += c * parts[k] / z;
                }
            }
        };
        absorb(left, heldout_counts.left);
        absorb(right, heldout_counts.right);
        double z = expect[0] + expect[1] + expect[2];
        if (z <= 0.0) break;
        double delta = 0;
        for (int k = 0; k < 3; ++k) {
            double next = expect[k] / z;
            delta += std::abs(next - lambda[k]);
            lambda[k] = next;
        }
        if (delta < 1e-12) break;
    }
    return {lambda[0], lambda[1], lambda[2]};
}

ParamSet apply_interpolation(const Grammar& g, const ExpectedCounts& counts,
                             const ParamSet& previous, const InterpolationWeights& w) {
    SiteDists left = direction_dists(counts.left, g.num_left_aux() + 1);
    SiteDists right = direction_dists(counts.right, g.num_right_aux() + 1);
    ParamSet next;
    next.start = previous.start;
    auto blend = [&](const SiteDists& d, const std::vector<std::vector<double>>& prev) {
        std::vector<std::vector<double>> out;
        for (std::size_t s = 0; s < d.ml.size(); ++s) {
            const std::vector<double>& ml = d.ml[s].empty() ? prev[s] : d.ml[s];
            std::vector<double> dist(ml.size());
            for (std::size_t v = 0; v < ml.size(); ++v)
                dist[v] = w.ml * ml[v] + w.backoff * d.backoff[v] + w.uniform * d.uniform;
            out.push_back(std::move(dist));
        }
        return out;
    };
    next.left = blend(left, previous.left);
    next.right = blend(right, previous.right);
    return next;
}

double corpus_bits_per_word(const Grammar& g, const ParamSet& p,
                            const std::vector<Sentence>& corpus, std::size_t* skipped,
                            int threads) {
    struct Acc {
        double log2 = 0;
        long long tokens = 0;
        std::size_t skipped = 0;
        void add(const Acc& o) {
            log2 += o.log2;
            tokens += o.tokens;
            skipped += o.skipped;
        }
    };
    Acc total = parallel_estep(corpus, threads, Acc{}, [&](const Sentence& s, Acc& acc) {
        double lp = sentence_log_prob(g, p, s, false);
        if (lp == kNegInf) {
            ++acc.skipped;
        } else {
            acc.log2 += lp;
            acc.tokens += s.length();
        }
    });
    if (skipped) *skipped = total.skipped;
    if (total.tokens == 0) throw TrainError("every sentence was unparseable while scoring");
    return -total.log2 / static_cast<double>(total.tokens);
}

TrainResult em_train(const Grammar& g, const ParamSet& init,
                     const std::vector<Sentence>& train, const std::vector<Sentence>& heldout,
                     const TrainConfig& config,
                     const std::function<void(int, const ParamSet&)>& checkpoint_hook) {
    if (train.empty() || heldout.empty())
        throw TrainError("training needs non-empty train and held-out corpora");
    if (config.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");

    TrainResult result;
    TrainTrace& trace = result.trace;
    ParamSet params = init;  // unsmoothed chain
    double best_heldout = std::numeric_limits<double>::infinity();
    double prev_heldout = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        auto t0 = std::chrono::steady_clock::now();
        ExpectedCounts counts =
            parallel_estep(train, config.threads, ExpectedCounts::zeros(g),
                           [&](const Sentence& s, ExpectedCounts& acc) {
                               accumulate_counts(g, params, s, config.constraints, acc);
                           });
        if (counts.sentences == 0)
            throw TrainError("no training sentence is parseable under the constraints");
        ParamSet next = reestimate(g, counts, params);

        ParamSet scoring = next;
        if (config.smoothing == Smoothing::DeletedInterpolation) {
            ExpectedCounts held_counts =
                parallel_estep(heldout, config.threads, ExpectedCounts::zeros(g),
                               [&](const Sentence& s, ExpectedCounts& acc) {
                                   accumulate_counts(g, next, s, false, acc);
                               });
            InterpolationWeights w = fit_interpolation(g, counts, held_counts);
            scoring = apply_interpolation(g, counts, params, w);
        }
        double heldout_bits = corpus_bits_per_word(g, scoring, heldout, nullptr, config.threads);
        auto t1 = std::chrono::steady_clock::now();

        IterationRecord rec;
        rec.iteration = iter;
        rec.train_log2 = counts.corpus_log2;
        rec.heldout_bits = heldout_bits;
        rec.seconds = std::chrono::duration<double>(t1 - t0).count();
        trace.push_back(rec);
        if (checkpoint_hook) checkpoint_hook(iter, scoring);

        if (heldout_bits < best_heldout) {
            best_heldout = heldout_bits;
            result.params = scoring;
            result.best_iteration = iter;
        }
        params = next;

        if (iter > 1 && prev_heldout - heldout_bits < config.min_entropy_gain) break;
        prev_heldout = heldout_bits;
    }
    if (result.best_iteration == 0) {  // every iteration scored infinite
        result.params = params;
        result.best_iteration = static_cast<int>(trace.size());
    }
    return result;
}

}  // namespace pltig
