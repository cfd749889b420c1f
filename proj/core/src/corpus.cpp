#include "pltig/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace pltig {

Vocabulary::Vocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (!index_.emplace(symbols_[i], static_cast<int>(i)).second)
            throw ConfigError("duplicate vocabulary symbol: " + symbols_[i]);
    }
}

int Vocabulary::add(const std::string& symbol) {
    auto it = index_.find(symbol);
    if (it != index_.end()) return it->second;
    symbols_.push_back(symbol);
    index_.emplace(symbol, static_cast<int>(symbols_.size()) - 1);
    return static_cast<int>(symbols_.size()) - 1;
}

int Vocabulary::require(const std::string& symbol) const {
    if (auto found = find(symbol)) return *found;
    throw VocabError("unknown tag: " + symbol);
}

std::optional<int> Vocabulary::find(const std::string& symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

CorpusFormat parse_corpus_format(const std::string& name) {
    if (name == "bracketed-sexp") return CorpusFormat::BracketedSexp;
    if (name == "flat-tags") return CorpusFormat::FlatTags;
    throw ConfigError("unknown corpus format: " + name +
                      " (expected bracketed-sexp or flat-tags)");
}

std::string format_name(CorpusFormat format) {
    return format == CorpusFormat::BracketedSexp ? "bracketed-sexp" : "flat-tags";
}

bool spans_cross(const Span& a, const Span& b) {
    return (a.first < b.first && b.first < a.second && a.second < b.second) ||
           (b.first < a.first && a.first < b.second && b.second < a.second);
}

bool span_compatible(const Sentence& sentence, const Span& span) {
    for (const Span& gold : sentence.gold_brackets)
        if (spans_cross(gold, span)) return false;
    return true;
}

Sentence parse_sentence_line(const std::string& line, CorpusFormat format,
                             Vocabulary& vocab, bool grow_vocab, int line_number) {
    const std::string where = "line " + std::to_string(line_number);
    Sentence sentence;

    auto add_token = [&](const std::string& tag) {
        int sym;
        if (grow_vocab) {
            sym = vocab.add(tag);
        } else {
            auto found = vocab.find(tag);
            if (!found) throw VocabError(where + ": unknown tag: " + tag);
            sym = *found;
        }
        sentence.tokens.push_back(sym);
    };

    if (format == CorpusFormat::FlatTags) {
        for (const std::string& tag : split_ws(line)) add_token(tag);
    } else {
        std::vector<int> open_stack;
        std::string tag;
        auto flush = [&] {
            if (!tag.empty()) {
                add_token(tag);
                tag.clear();
            }
        };
        for (char c : line) {
            if (c == '(') {
                flush();
                open_stack.push_back(static_cast<int>(sentence.tokens.size()));
            } else if (c == ')') {
                flush();
                if (open_stack.empty())
                    throw ParseError(where + ": unbalanced ')'");
                int s = open_stack.back();
                open_stack.pop_back();
                int t = static_cast<int>(sentence.tokens.size());
                if (t > s) sentence.gold_brackets.insert({s, t});
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                flush();
            } else {
                tag += c;
            }
        }
        flush();
        if (!open_stack.empty()) throw ParseError(where + ": unbalanced '('");
    }

    if (sentence.tokens.empty()) throw ParseError(where + ": empty sentence");
    return sentence;
}

Corpus load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    Corpus corpus;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        corpus.sentences.push_back(
            parse_sentence_line(line, format, corpus.vocab, true, line_number));
    }
    if (corpus.sentences.empty()) throw ParseError("empty corpus: " + path);
    return corpus;
}

std::vector<Sentence> load_sentences(const std::string& path, CorpusFormat format,
                                     const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<Sentence> sentences;
    Vocabulary fixed = vocab;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        sentences.push_back(parse_sentence_line(line, format, fixed, false, line_number));
    }
    return sentences;
}

std::string render_sexp(const std::vector<int>& tokens, const BracketSet& brackets,
                        const Vocabulary& vocab) {
    const int T = static_cast<int>(tokens.size());
    // Sorted by start ascending then end descending, outer brackets first.
    std::vector<Span> sorted(brackets.begin(), brackets.end());
    std::sort(sorted.begin(), sorted.end(), [](const Span& a, const Span& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    });

    std::ostringstream out;
    bool first = true;
    std::size_t next = 0;
    std::vector<int> close_stack;
    std::function<void(int, int)> emit = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            while (next < sorted.size() && sorted[next].first == i) {
                if (!first) out << ' ';
                out << '(';
                first = false;
                close_stack.push_back(sorted[next].second);
                ++next;
            }
            if (!first) out << ' ';
            out << vocab.name(tokens[i]);
            first = false;
            while (!close_stack.empty() && close_stack.back() == i + 1) {
                out << " )";
                close_stack.pop_back();
            }
        }
    };
    emit(0, T);
    return out.str();
}

void save_corpus_sexp(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write corpus file: " + path);
    for (const Sentence& s : corpus.sentences)
        out << render_sexp(s.tokens, s.gold_brackets, corpus.vocab) << "\n";
}

void SplitSpec::validate() const {
    double sum = train_fraction + heldout_fraction + test_fraction;
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError("split fractions must sum to 1, got " + std::to_string(sum));
    if (train_fraction < 0 || heldout_fraction < 0 || test_fraction < 0)
        throw ConfigError("split fractions must be non-negative");
    if (max_length && *max_length < 1) throw ConfigError("max_length must be >= 1");
}

SplitIndices split_indices(const std::vector<Sentence>& corpus, const SplitSpec& spec) {
    spec.validate();
    if (corpus.empty()) throw ConfigError("cannot split an empty corpus");

    std::vector<int> kept;
    for (int i = 0; i < static_cast<int>(corpus.size()); ++i)
        if (!spec.max_length || corpus[i].length() <= *spec.max_length) kept.push_back(i);
    if (kept.empty()) throw ConfigError("length filter removed every sentence");

    Rng rng(spec.seed);
    rng.shuffle(kept);

    const double n = static_cast<double>(kept.size());
    auto boundary = [&](double fraction_sum) {
        return static_cast<std::size_t>(std::floor(fraction_sum * n + 0.5));
    };
    std::size_t b1 = boundary(spec.train_fraction);
    std::size_t b2 = boundary(spec.train_fraction + spec.heldout_fraction);

    SplitIndices split;
    split.train.assign(kept.begin(), kept.begin() + b1);
    split.heldout.assign(kept.begin() + b1, kept.begin() + b2);
    split.test.assign(kept.begin() + b2, kept.end());
    if (split.train.empty() || split.heldout.empty() || split.test.empty())
        throw ConfigError("split produced an empty partition (sizes " +
                          std::to_string(split.train.size()) + "/" +
                          std::to_string(split.heldout.size()) + "/" +
                          std::to_string(split.test.size()) + ")");
    return split;
}

std::vector<Sentence> select(const std::vector<Sentence>& corpus,
                             const std::vector<int>& indices) {
    std::vector<Sentence> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(corpus.at(i));
    return out;
}

CorpusSplit split_corpus(const std::vector<Sentence>& corpus, const SplitSpec& spec) {
    SplitIndices idx = split_indices(corpus, spec);
    return {select(corpus, idx.train), select(corpus, idx.heldout), select(corpus, idx.test)};
}

void save_manifest(const SplitIndices& split, const SplitSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << "# corpus split seed=" << spec.seed << " fractions=" << spec.train_fraction
        << "/" << spec.heldout_fraction << "/" << spec.test_fraction;
    if (spec.max_length) out << " max_length=" << *spec.max_length;
    out << "\n";
    auto write = [&](const char* name, const std::vector<int>& indices) {
        out << name << ":";
        for (int i : indices) out << ' ' << i;
        out << "\n";
    };
    write("train", split.train);
    write("heldout", split.heldout);
    write("test", split.test);
}

SplitIndices load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    SplitIndices split;
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("manifest line missing ':' in " + path);
        std::string name = line.substr(0, colon);
        std::vector<int>* part = name == "train"     ? &split.train
                                 : name == "heldout" ? &split.heldout
                                 : name == "test"    ? &split.test
                                                     : nullptr;
        if (!part) throw ParseError("unknown manifest partition: " + name);
        for (const std::string& tok : split_ws(line.substr(colon + 1)))
            part->push_back(std::stoi(tok));
        any = true;
    }
    if (!any) throw ParseError("empty manifest: " + path);
    return split;
}

}  // namespace pltig
