#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pltig/util.hpp"

namespace pltig {

using Span = std::pair<int, int>;  // token span (s, t), 0 <= s < t <= T
using BracketSet = std::set<Span>;

// Closed tag inventory induced from the training data.  Tokens that do not
// resolve to a known symbol are rejected (the tagsets here are closed; there
// is no OOV symbol).
class Vocabulary {
  public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> symbols);

    int add(const std::string& symbol);          // idempotent
    int require(const std::string& symbol) const;  // throws VocabError
    std::optional<int> find(const std::string& symbol) const;

    int size() const { return static_cast<int>(symbols_.size()); }
    const std::string& name(int index) const { return symbols_.at(index); }
    const std::vector<std::string>& symbols() const { return symbols_; }

    bool operator==(const Vocabulary& other) const { return symbols_ == other.symbols_; }

  private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, int> index_;
};

struct Sentence {
    std::vector<int> tokens;
    BracketSet gold_brackets;  // non-crossing; may include width-1 / full spans

    int length() const { return static_cast<int>(tokens.size()); }
};

struct Corpus {
    Vocabulary vocab;
    std::vector<Sentence> sentences;
};

enum class CorpusFormat { BracketedSexp, FlatTags };

CorpusFormat parse_corpus_format(const std::string& name);  // throws ConfigError
std::string format_name(CorpusFormat format);

// Two spans cross iff they overlap without nesting.
bool spans_cross(const Span& a, const Span& b);

// True iff `span` crosses no gold bracket of `sentence`.
bool span_compatible(const Sentence& sentence, const Span& span);

// Reads one sentence per line.  BracketedSexp lines are parenthesized groups
// of whitespace-separated tags; parentheses become gold brackets.  FlatTags
// lines carry tokens only.  Vocabulary is induced from the data.
Corpus load_corpus(const std::string& path, CorpusFormat format);

// Same, but every tag must already exist in `vocab` (test-time loading).
std::vector<Sentence> load_sentences(const std::string& path, CorpusFormat format,
                                     const Vocabulary& vocab);

// Parses a single line; exposed for reuse by the CLI parse command.
Sentence parse_sentence_line(const std::string& line, CorpusFormat format,
                             Vocabulary& vocab, bool grow_vocab, int line_number);

// Renders tokens with the given non-crossing brackets as a bracketed-sexp
// line; the inverse of BracketedSexp loading up to bracket-set equality.
std::string render_sexp(const std::vector<int>& tokens, const BracketSet& brackets,
                        const Vocabulary& vocab);

void save_corpus_sexp(const Corpus& corpus, const std::string& path);

struct SplitSpec {
    double train_fraction = 0.8;
    double heldout_fraction = 0.1;
    double test_fraction = 0.1;
    std::uint64_t seed = 1;
    std::optional<int> max_length;  // filter applied before splitting

    void validate() const;  // fractions sum to 1 within 1e-12
};

// Partition of (filtered) corpus positions, stored as indices into the
// original sentence list so a manifest can be replayed exactly.
struct SplitIndices {
    std::vector<int> train, heldout, test;
};

SplitIndices split_indices(const std::vector<Sentence>& corpus, const SplitSpec& spec);

struct CorpusSplit {
    std::vector<Sentence> train, heldout, test;
};

CorpusSplit split_corpus(const std::vector<Sentence>& corpus, const SplitSpec& spec);

std::vector<Sentence> select(const std::vector<Sentence>& corpus,
                             const std::vector<int>& indices);

// Plain-text manifest: a header comment plus one "name: i j k ..." line per
// partition.  Byte-identical for identical inputs.
void save_manifest(const SplitIndices& split, const SplitSpec& spec, const std::string& path);
SplitIndices load_manifest(const std::string& path);

}  // namespace pltig
