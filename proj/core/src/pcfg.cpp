#include "pltig/pcfg.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace pltig {

long long pcfg_param_count(int nonterminals, int vocab_size) {
    const long long m = nonterminals, v = vocab_size;
    return m * m * m + m * v;
}

Pcfg pcfg_build(const Vocabulary& vocab, int nonterminals, std::uint64_t seed) {
    if (nonterminals < 1) throw ConfigError("PCFG needs at least one nonterminal");
    if (vocab.size() < 1) throw ConfigError("PCFG needs a non-empty vocabulary");
    Pcfg g;
    g.M = nonterminals;
    g.V = vocab.size();
    g.binary.resize(static_cast<std::size_t>(g.M) * g.M * g.M);
    g.lexical.resize(static_cast<std::size_t>(g.M) * g.V);
    Rng rng(seed);
    for (int a = 0; a < g.M; ++a) {
        double total = 0;
        for (int b = 0; b < g.M; ++b)
            for (int c = 0; c < g.M; ++c) total += (g.rule(a, b, c) = rng.uniform(0.1, 1.0));
        for (int w = 0; w < g.V; ++w) total += (g.lex(a, w) = rng.uniform(0.1, 1.0));
        for (int b = 0; b < g.M; ++b)
            for (int c = 0; c < g.M; ++c) g.rule(a, b, c) /= total;
        for (int w = 0; w < g.V; ++w) g.lex(a, w) /= total;
    }
    return g;
}

std::vector<std::string> pcfg_validate(const Pcfg& g, double tol) {
    std::vector<std::string> violations;
    for (int a = 0; a < g.M; ++a) {
        double total = 0;
        for (int b = 0; b < g.M; ++b)
            for (int c = 0; c < g.M; ++c) total += g.rule(a, b, c);
        for (int w = 0; w < g.V; ++w) total += g.lex(a, w);
        if (std::abs(total - 1.0) > tol)
            violations.push_back("nonterminal " + std::to_string(a) + ": rules sum to " +
                                 std::to_string(total));
    }
    return violations;
}

namespace {

struct PcfgPass {
    const Pcfg& g;
    const Sentence& sent;
    bool constraints;
    double kappa;
    PcfgChart chart;

    std::size_t cell(int s, int t) const {
        return static_cast<std::size_t>(Chart::span_index(s, t)) * g.M;
    }

    bool allowed(int s, int t) const {
        const int T = sent.length();
        return !constraints || t - s <= 1 || t - s == T || span_compatible(sent, {s, t});
    }

    void inside() {
        const int T = sent.length();
        chart.T = T;
        chart.M = g.M;
        chart.kappa = kappa;
        chart.inside.assign(cell(T, T) + g.M, 0.0);
        const double unit = std::exp2(kappa);
        std::size_t updates = 0;
        for (int i = 0; i < T; ++i) {
            const int w = sent.tokens[i];
            if (w < 0 || w >= g.V) throw VocabError("token outside PCFG vocabulary");
            for (int a = 0; a < g.M; ++a) chart.inside[cell(i, i + 1) + a] = g.lex(a, w) * unit;
        }
        for (int width = 2; width <= T; ++width) {
            for (int s = 0; s + width <= T; ++s) {
                const int t = s + width;
                if (!allowed(s, t)) continue;
                double* out = &chart.inside[cell(s, t)];
                for (int r = s + 1; r < t; ++r) {
                    const double* lhs = &chart.inside[cell(s, r)];
                    const double* rhs = &chart.inside[cell(r, t)];
                    for (int b = 0; b < g.M; ++b) {
                        if (lhs[b] == 0.0) continue;
                        for (int c = 0; c < g.M; ++c) {
                            const double pair = lhs[b] * rhs[c];
                            if (pair == 0.0) continue;
                            for (int a = 0; a < g.M; ++a) {
                                ++updates;
                                out[a] += g.rule(a, b, c) * pair;
                            }
                        }
                    }
                }
            }
        }
        chart.cell_updates = updates;
        chart.scaled_total = chart.inside[cell(0, T)];  // start symbol 0
        chart.log2_prob = chart.scaled_total > 0
                              ? std::log2(chart.scaled_total) - kappa * T
                              : kNegInf;
    }

    void outside() {
        const int T = sent.length();
        chart.outside.assign(chart.inside.size(), 0.0);
        chart.outside[cell(0, T) + 0] = 1.0;
        for (int width = T; width >= 1; --width) {
            for (int s = 0; s + width <= T; ++s) {
                const int t = s + width;
                if (!allowed(s, t)) continue;
                const double* out_a = &chart.outside[cell(s, t)];
                for (int a = 0; a < g.M; ++a) {
                    const double fa = out_a[a];
                    if (fa == 0.0) continue;
                    for (int r = s + 1; r < t; ++r) {
                        const double* lhs = &chart.inside[cell(s, r)];
                        const double* rhs = &chart.inside[cell(r, t)];
                        double* fl = &chart.outside[cell(s, r)];
                        double* fr = &chart.outside[cell(r, t)];
                        for (int b = 0; b < g.M; ++b) {
                            for (int c = 0; c < g.M; ++c) {
                                const double far = fa * g.rule(a, b, c);
                                if (rhs[c] != 0.0) fl[b] += far * rhs[c];
                                if (lhs[b] != 0.0) fr[c] += far * lhs[b];
                            }
                        }
                    }
                }
            }
        }
    }
};

PcfgChart pcfg_inside_impl(const Pcfg& g, const Sentence& sent, bool constraints,
                           bool with_outside) {
    if (sent.length() == 0) throw Error("cannot build a chart for an empty sentence");
    double kappa = std::log2(g.V + 1.0) + std::log2(static_cast<double>(g.M)) + 1.0;
    for (int attempt = 0;; ++attempt) {
        PcfgPass pass{g, sent, constraints, kappa, {}};
        pass.inside();
        if (pass.chart.scaled_total > 0 && std::isfinite(pass.chart.scaled_total)) {
            if (with_outside) pass.outside();
            return std::move(pass.chart);
        }
        // Either a genuine zero (constraints) or an out-of-range scale; an
        // exact log pass cheap enough at these sizes settles which.
        double lp = kNegInf;
        {
            const int T = sent.length();
            std::vector<double> logs(static_cast<std::size_t>(Chart::span_index(T, T) + 1) *
                                         g.M,
                                     kNegInf);
            auto at = [&](int s, int t, int a) -> double& {
                return logs[static_cast<std::size_t>(Chart::span_index(s, t)) * g.M + a];
            };
            for (int i = 0; i < T; ++i)
                for (int a = 0; a < g.M; ++a)
                    at(i, i + 1, a) = std::log2(g.lex(a, sent.tokens[i]));
            for (int width = 2; width <= T; ++width)
                for (int s = 0; s + width <= T; ++s) {
                    const int t = s + width;
                    if (constraints && width != T && !span_compatible(sent, {s, t})) continue;
                    for (int a = 0; a < g.M; ++a) {
                        double acc = kNegInf;
                        for (int r = s + 1; r < t; ++r)
                            for (int b = 0; b < g.M; ++b) {
                                if (at(s, r, b) == kNegInf) continue;
                                for (int c = 0; c < g.M; ++c) {
                                    if (at(r, t, c) == kNegInf) continue;
                                    acc = log2_add(acc, std::log2(g.rule(a, b, c)) +
                                                            at(s, r, b) + at(r, t, c));
                                }
                            }
                        at(s, t, a) = acc;
                    }
                }
            lp = at(0, T, 0);
        }
        if (lp == kNegInf) {
            PcfgPass zero{g, sent, constraints, kappa, {}};
            zero.inside();
            zero.chart.log2_prob = kNegInf;
            return std::move(zero.chart);
        }
        if (attempt >= 2) throw Error("PCFG chart would not fit double range at any scale");
        kappa = -lp / sent.length();
    }
}

}  // namespace

PcfgChart pcfg_inside(const Pcfg& g, const Sentence& sent, bool constraints) {
    return pcfg_inside_impl(g, sent, constraints, false);
}

double pcfg_sentence_log_prob(const Pcfg& g, const Sentence& sent, bool constraints) {
    return pcfg_inside_impl(g, sent, constraints, false).log2_prob;
}

PcfgCounts PcfgCounts::zeros(const Pcfg& g) {
    PcfgCounts c;
    c.binary.assign(g.binary.size(), 0.0);
    c.lexical.assign(g.lexical.size(), 0.0);
    return c;
}

void PcfgCounts::add(const PcfgCounts& other) {
    for (std::size_t i = 0; i < binary.size(); ++i) binary[i] += other.binary[i];
    for (std::size_t i = 0; i < lexical.size(); ++i) lexical[i] += other.lexical[i];
    corpus_log2 += other.corpus_log2;
    sentences += other.sentences;
    skipped += other.skipped;
}

bool pcfg_accumulate(const Pcfg& g, const Sentence& sent, bool constraints, PcfgCounts& into) {
    PcfgChart chart = pcfg_inside_impl(g, sent, constraints, true);
    if (chart.log2_prob == kNegInf) {
        ++into.skipped;
        return false;
    }
    const int T = sent.length();
    const int M = g.M;
    const double inv_total = 1.0 / chart.scaled_total;
    auto in = [&](int s, int t, int a) {
        return chart.inside[static_cast<std::size_t>(Chart::span_index(s, t)) * M + a];
    };
    auto out = [&](int s, int t, int a) {
        return chart.outside[static_cast<std::size_t>(Chart::span_index(s, t)) * M + a];
    };
    for (int width = 2; width <= T; ++width)
        for (int s = 0; s + width <= T; ++s) {
            const int t = s + width;
            for (int a = 0; a < M; ++a) {
                const double fa = out(s, t, a);
                if (fa == 0.0) continue;
                for (int r = s + 1; r < t; ++r)
                    for (int b = 0; b < M; ++b) {
                        const double lb = in(s, r, b);
                        if (lb == 0.0) continue;
                        for (int c = 0; c < M; ++c) {
                            const double rc = in(r, t, c);
                            if (rc == 0.0) continue;
                            into.binary[(static_cast<std::size_t>(a) * M + b) * M + c] +=
                                inv_total * fa * g.rule(a, b, c) * lb * rc;
                        }
                    }
            }
        }
    const double unit = std::exp2(chart.kappa);
    for (int i = 0; i < T; ++i)
        for (int a = 0; a < M; ++a) {
            const double fa = out(i, i + 1, a);
            if (fa == 0.0) continue;
            into.lexical[static_cast<std::size_t>(a) * g.V + sent.tokens[i]] +=
                inv_total * fa * g.lex(a, sent.tokens[i]) * unit;
        }
    into.corpus_log2 += chart.log2_prob;
    ++into.sentences;
    return true;
}

Pcfg pcfg_reestimate(const Pcfg& previous, const PcfgCounts& counts, int* retained) {
    Pcfg next = previous;
    int kept = 0;
    for (int a = 0; a < previous.M; ++a) {
        double total = 0;
        for (int b = 0; b < previous.M; ++b)
            for (int c = 0; c < previous.M; ++c)
                total += counts.binary[(static_cast<std::size_t>(a) * previous.M + b) *
                                           previous.M +
                                       c];
        for (int w = 0; w < previous.V; ++w)
            total += counts.lexical[static_cast<std::size_t>(a) * previous.V + w];
        if (total <= 0.0) {
            ++kept;
            continue;
        }
        for (int b = 0; b < previous.M; ++b)
            for (int c = 0; c < previous.M; ++c)
                next.rule(a, b, c) =
                    counts.binary[(static_cast<std::size_t>(a) * previous.M + b) * previous.M +
                                  c] /
                    total;
        for (int w = 0; w < previous.V; ++w)
            next.lex(a, w) =
                counts.lexical[static_cast<std::size_t>(a) * previous.V + w] / total;
    }
    if (retained) *retained = kept;
    return next;
}

namespace {

constexpr std::size_t kBlock = 32;

template <typename Counts, typename PerSentence>
Counts pcfg_parallel(const std::vector<Sentence>& corpus, int threads, Counts zeros,
                     const PerSentence& per_sentence) {
    const std::size_t blocks = (corpus.size() + kBlock - 1) / kBlock;
    std::vector<Counts> partial(blocks, zeros);
    auto run_block = [&](std::size_t blk) {
        const std::size_t lo = blk * kBlock;
        const std::size_t hi = std::min(corpus.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) per_sentence(corpus[i], partial[blk]);
    };
    if (threads <= 1 || blocks <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, static_cast<int>(blocks));
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

double pcfg_bits_per_word(const Pcfg& g, const std::vector<Sentence>& corpus,
                          std::size_t* skipped, int threads) {
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
    Acc total = pcfg_parallel(corpus, threads, Acc{}, [&](const Sentence& s, Acc& acc) {
        double lp = pcfg_sentence_log_prob(g, s, false);
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

PcfgTrainResult pcfg_train(const Pcfg& init, const std::vector<Sentence>& train,
                           const std::vector<Sentence>& heldout, const TrainConfig& config,
                           const std::function<void(int, const Pcfg&)>& checkpoint_hook) {
    if (train.empty() || heldout.empty())
        throw TrainError("training needs non-empty train and held-out corpora");
    if (config.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");

    PcfgTrainResult result;
    Pcfg current = init;
    double best_heldout = std::numeric_limits<double>::infinity();
    double prev_heldout = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        auto t0 = std::chrono::steady_clock::now();
        PcfgCounts counts =
            pcfg_parallel(train, config.threads, PcfgCounts::zeros(current),
                          [&](const Sentence& s, PcfgCounts& acc) {
                              pcfg_accumulate(current, s, config.constraints, acc);
                          });
        if (counts.sentences == 0)
            throw TrainError("no training sentence is parseable under the constraints");
        Pcfg next = pcfg_reestimate(current, counts);
        double heldout_bits = pcfg_bits_per_word(next, heldout, nullptr, config.threads);
        auto t1 = std::chrono::steady_clock::now();

        IterationRecord rec;
        rec.iteration = iter;
        rec.train_log2 = counts.corpus_log2;
        rec.heldout_bits = heldout_bits;
        rec.seconds = std::chrono::duration<double>(t1 - t0).count();
        result.trace.push_back(rec);
        if (checkpoint_hook) checkpoint_hook(iter, next);

        if (heldout_bits < best_heldout) {
            best_heldout = heldout_bits;
            result.pcfg = next;
            result.best_iteration = iter;
        }
        current = next;
        if (iter > 1 && prev_heldout - heldout_bits < config.min_entropy_gain) break;
        prev_heldout = heldout_bits;
    }
    if (result.best_iteration == 0) {
        result.pcfg = current;
        result.best_iteration = static_cast<int>(result.trace.size());
    }
    return result;
}

BracketSet pcfg_viterbi(const Pcfg& g, const Sentence& sent) {
    const int T = sent.length();
    if (T == 0) throw Error("cannot parse an empty sentence");
    const int M = g.M;
    std::vector<double> best(static_cast<std::size_t>(Chart::span_index(T, T) + 1) * M,
                             kNegInf);
    std::vector<int> back(best.size(), -1);  // encodes (r, b, c)
    auto idx = [&](int s, int t, int a) {
        return static_cast<std::size_t>(Chart::span_index(s, t)) * M + a;
    };
    for (int i = 0; i < T; ++i)
        for (int a = 0; a < M; ++a) best[idx(i, i + 1, a)] = std::log2(g.lex(a, sent.tokens[i]));
    for (int width = 2; width <= T; ++width)
        for (int s = 0; s + width <= T; ++s) {
            const int t = s + width;
            for (int a = 0; a < M; ++a) {
                double b_best = kNegInf;
                int b_back = -1;
                // Rule index (b, c) ascending, then leftmost split.
                for (int b = 0; b < M; ++b)
                    for (int c = 0; c < M; ++c) {
                        const double lr = std::log2(g.rule(a, b, c));
                        for (int r = s + 1; r < t; ++r) {
                            double v = lr + best[idx(s, r, b)] + best[idx(r, t, c)];
                            if (v > b_best) {
                                b_best = v;
                                b_back = (b * M + c) * T + r;
                            }
                        }
                    }
                best[idx(s, t, a)] = b_best;
                back[idx(s, t, a)] = b_back;
            }
        }

    BracketSet spans;
    struct Item {
        int s, t, a;
    };
    std::vector<Item> stack{{0, T, 0}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        if (it.t - it.s < 2) continue;
        if (it.t - it.s < T) spans.insert({it.s, it.t});
        const int code = back[idx(it.s, it.t, it.a)];
        if (code < 0) continue;
        const int r = code % T;
        const int bc = code / T;
        stack.push_back({it.s, r, bc / M});
        stack.push_back({r, it.t, bc % M});
    }
    return spans;
}

}  // namespace pltig
