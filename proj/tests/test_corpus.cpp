#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>

#include "pltig/corpus.hpp"

using namespace pltig;

namespace {

// Independent recursive-descent reading of a bracketed line, used to verify
// the production parser's bracket extraction.
struct SexpOracle {
    std::vector<std::string> tags;
    BracketSet brackets;

    void parse(const std::string& line) {
        std::size_t i = 0;
        walk(line, i, true);
    }

    void walk(const std::string& line, std::size_t& i, bool top) {
        while (i < line.size()) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
            } else if (line[i] == '(') {
                ++i;
                int start = static_cast<int>(tags.size());
                walk(line, i, false);
                brackets.insert({start, static_cast<int>(tags.size())});
            } else if (line[i] == ')') {
                ++i;
                if (top) throw std::runtime_error("unbalanced");
                return;
            } else {
                std::string tag;
                while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
                       line[i] != '(' && line[i] != ')')
                    tag += line[i++];
                tags.push_back(tag);
            }
        }
        if (!top) throw std::runtime_error("unbalanced");
    }
};

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "corpus_test_" + std::to_string(counter++) + ".tmp";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::vector<std::string> names(const Corpus& c, const std::vector<int>& tokens) {
    std::vector<std::string> out;
    for (int t : tokens) out.push_back(c.vocab.name(t));
    return out;
}

}  // namespace

TEST_CASE("bracketed line with a single constituent") {
    TempFile f("( DT NN )\n");
    Corpus c = load_corpus(f.path, CorpusFormat::BracketedSexp);
    REQUIRE(c.sentences.size() == 1);
    CHECK(names(c, c.sentences[0].tokens) == std::vector<std::string>{"DT", "NN"});
    CHECK(c.sentences[0].gold_brackets == BracketSet{{0, 2}});
}

TEST_CASE("nested brackets agree with the recursive-descent oracle") {
    const std::string line = "( ( DT NN ) VBZ )";
    TempFile f(line + "\n");
    Corpus c = load_corpus(f.path, CorpusFormat::BracketedSexp);
    SexpOracle oracle;
    oracle.parse(line);
    CHECK(names(c, c.sentences[0].tokens) == oracle.tags);
    CHECK(c.sentences[0].gold_brackets == oracle.brackets);
    CHECK(c.sentences[0].gold_brackets == BracketSet{{0, 2}, {0, 3}});
}

TEST_CASE("flat format carries no brackets") {
    TempFile f("DT NN VBZ\n");
    Corpus c = load_corpus(f.path, CorpusFormat::FlatTags);
    CHECK(names(c, c.sentences[0].tokens) == std::vector<std::string>{"DT", "NN", "VBZ"});
    CHECK(c.sentences[0].gold_brackets.empty());
}

TEST_CASE("parse errors carry line numbers") {
    SUBCASE("unbalanced open") {
        TempFile f("( DT NN\n");
        CHECK_THROWS_WITH_AS(load_corpus(f.path, CorpusFormat::BracketedSexp),
                             doctest::Contains("line 1"), ParseError);
    }
    SUBCASE("unbalanced close on a later line") {
        TempFile f("( DT )\nDT NN )\n");
        CHECK_THROWS_WITH_AS(load_corpus(f.path, CorpusFormat::BracketedSexp),
                             doctest::Contains("line 2"), ParseError);
    }
    SUBCASE("empty sentence") {
        TempFile f("( DT )\n\n");
        CHECK_THROWS_WITH_AS(load_corpus(f.path, CorpusFormat::BracketedSexp),
                             doctest::Contains("line 2"), ParseError);
    }
}

TEST_CASE("unknown tags are rejected when loading against a fixed vocabulary") {
    TempFile f("DT XX\n");
    Vocabulary vocab({"DT", "NN"});
    CHECK_THROWS_WITH_AS(load_sentences(f.path, CorpusFormat::FlatTags, vocab),
                         doctest::Contains("XX"), VocabError);
}

TEST_CASE("random corpora round-trip through the bracketed format") {
    Rng rng(42);
    Vocabulary vocab({"A", "B", "C", "D"});
    Corpus original;
    original.vocab = vocab;
    for (int i = 0; i < 120; ++i) {
        Sentence s;
        const int T = 1 + static_cast<int>(rng.below(8));
        for (int j = 0; j < T; ++j) s.tokens.push_back(static_cast<int>(rng.below(4)));
        // Random non-crossing brackets: grow a random binary segmentation.
        std::function<void(int, int)> carve = [&](int lo, int hi) {
            if (hi - lo < 2 || rng.uniform() < 0.4) return;
            s.gold_brackets.insert({lo, hi});
            int mid = lo + 1 + static_cast<int>(rng.below(hi - lo - 1));
            carve(lo, mid);
            carve(mid, hi);
        };
        carve(0, T);
        if (rng.uniform() < 0.2) s.gold_brackets.insert({0, T});
        original.sentences.push_back(s);
    }
    TempFile f("");
    save_corpus_sexp(original, f.path);
    Corpus reloaded = load_corpus(f.path, CorpusFormat::BracketedSexp);
    REQUIRE(reloaded.sentences.size() == original.sentences.size());
    for (std::size_t i = 0; i < original.sentences.size(); ++i) {
        CHECK(names(original, original.sentences[i].tokens) ==
              names(reloaded, reloaded.sentences[i].tokens));
        CHECK(original.sentences[i].gold_brackets == reloaded.sentences[i].gold_brackets);
    }
}

TEST_CASE("span crossing") {
    Sentence s;
    s.tokens = {0, 1, 2};
    s.gold_brackets = {{0, 2}};
    CHECK_FALSE(span_compatible(s, {1, 3}));
    CHECK(span_compatible(s, {0, 2}));

    Sentence wide;
    wide.tokens = {0, 1, 2, 3, 4};
    wide.gold_brackets = {{0, 2}, {2, 5}};
    CHECK_FALSE(span_compatible(wide, {1, 4}));

    // Exhaustive cross-check of the crossing predicate against the
    // definition spelled out pairwise.
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b <= 5; ++b)
            for (int x = 0; x < 5; ++x)
                for (int y = x + 1; y <= 5; ++y) {
                    bool expected = (a < x && x < b && b < y) || (x < a && a < y && y < b);
                    CHECK(spans_cross({a, b}, {x, y}) == expected);
                }
}

TEST_CASE("full span and single tokens never cross") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Sentence s;
        const int T = 2 + static_cast<int>(rng.below(8));
        s.tokens.assign(T, 0);
        std::function<void(int, int)> carve = [&](int lo, int hi) {
            if (hi - lo < 2 || rng.uniform() < 0.4) return;
            s.gold_brackets.insert({lo, hi});
            int mid = lo + 1 + static_cast<int>(rng.below(hi - lo - 1));
            carve(lo, mid);
            carve(mid, hi);
        };
        carve(0, T);
        CHECK(span_compatible(s, {0, T}));
        for (int i = 0; i < T; ++i) CHECK(span_compatible(s, {i, i + 1}));
    }
}

TEST_CASE("splits partition the filtered corpus deterministically") {
    std::vector<Sentence> corpus;
    for (int i = 0; i < 577; ++i) {
        Sentence s;
        s.tokens.assign(1 + i % 12, 0);
        corpus.push_back(s);
    }
    SplitSpec spec;
    spec.seed = 7;

    SplitIndices split = split_indices(corpus, spec);
    CHECK(split.train.size() == 462);
    CHECK(split.heldout.size() == 57);
    CHECK(split.test.size() == 58);

    SplitIndices again = split_indices(corpus, spec);
    CHECK(split.train == again.train);
    CHECK(split.heldout == again.heldout);
    CHECK(split.test == again.test);

    std::vector<int> all;
    for (auto* part : {&split.train, &split.heldout, &split.test})
        all.insert(all.end(), part->begin(), part->end());
    std::sort(all.begin(), all.end());
    CHECK(all.size() == corpus.size());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("degenerate split fractions are rejected") {
    std::vector<Sentence> corpus(20, Sentence{{0}, {}});
    SplitSpec spec;
    spec.train_fraction = 1.0;
    spec.heldout_fraction = 0.0;
    spec.test_fraction = 0.0;
    CHECK_THROWS_AS(split_indices(corpus, spec), ConfigError);
}

TEST_CASE("length filter applies before splitting") {
    std::vector<Sentence> corpus;
    for (int i = 0; i < 100; ++i) {
        Sentence s;
        s.tokens.assign(i < 50 ? 3 : 60, 0);
        corpus.push_back(s);
    }
    SplitSpec spec;
    spec.max_length = 40;
    SplitIndices split = split_indices(corpus, spec);
    CHECK(split.train.size() + split.heldout.size() + split.test.size() == 50);
    for (auto* part : {&split.train, &split.heldout, &split.test})
        for (int i : *part) CHECK(corpus[i].length() <= 40);
}

TEST_CASE("manifests round-trip") {
    std::vector<Sentence> corpus(40, Sentence{{0, 1}, {}});
    SplitSpec spec;
    spec.seed = 3;
    SplitIndices split = split_indices(corpus, spec);
    TempFile f("");
    save_manifest(split, spec, f.path);
    SplitIndices loaded = load_manifest(f.path);
    CHECK(loaded.train == split.train);
    CHECK(loaded.heldout == split.heldout);
    CHECK(loaded.test == split.test);
}
