#include "pltig/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace pltig {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump(2) << "\n";
}

void expect_format(const ordered_json& j, const std::string& format,
                   const std::string& path) {
    if (!j.contains("format") || j["format"] != format)
        throw ParseError(path + ": expected a " + format + " file");
    if (!j.contains("version") || j["version"].get<int>() != 1)
        throw ParseError(path + ": unsupported schema version");
}

ordered_json tree_inventory(const Grammar& g) {
    ordered_json trees = ordered_json::array();
    for (const ElementaryTree& t : g.trees) {
        ordered_json jt;
        jt["id"] = t.id;
        jt["kind"] = t.kind == TreeKind::Initial    ? "initial"
                     : t.kind == TreeKind::LeftAux  ? "left-aux"
                                                    : "right-aux";
        jt["anchor"] = t.anchor < 0 ? "" : g.vocab.name(t.anchor);
        ordered_json nodes = ordered_json::array();
        for (const Node& n : g.nodes) {
            if (n.tree != t.id) continue;
            ordered_json jn;
            jn["id"] = n.id;
            jn["kind"] = n.kind == NodeKind::Interior ? "interior"
                         : n.kind == NodeKind::Anchor ? "anchor"
                         : n.kind == NodeKind::Empty  ? "empty"
                                                      : "foot";
            if (n.has_left_site()) jn["left_site"] = n.left_site;
            if (n.has_right_site()) jn["right_site"] = n.right_site;
            ordered_json children = ordered_json::array();
            for (int c = 0; c < n.num_children; ++c) children.push_back(n.child[c]);
            jn["children"] = children;
            nodes.push_back(jn);
        }
        jt["nodes"] = nodes;
        trees.push_back(jt);
    }
    return trees;
}

}  // namespace

void save_pltig_model(const PltigModel& model, const std::string& path) {
    const Grammar& g = model.grammar;
    ordered_json j;
    j["format"] = "pltig-model";
    j["version"] = 1;
    j["vocabulary"] = g.vocab.symbols();
    j["template"] = g.config.name();
    j["trees"] = tree_inventory(g);
    j["start"] = model.params.start;
    j["left"] = model.params.left;
    j["right"] = model.params.right;
    write_json(j, path);
}

PltigModel load_pltig_model(const std::string& path) {
    ordered_json j = read_json(path);
    expect_format(j, "pltig-model", path);
    PltigModel model;
    Vocabulary vocab(j["vocabulary"].get<std::vector<std::string>>());
    model.grammar = build_template(vocab, TemplateConfig::parse(j["template"]));
    model.params.start = j["start"].get<std::vector<double>>();
    model.params.left = j["left"].get<std::vector<std::vector<double>>>();
    model.params.right = j["right"].get<std::vector<std::vector<double>>>();
    // The stored inventory is redundant with the template; insist it agrees.
    if (tree_inventory(model.grammar) != j["trees"])
        throw ParseError(path + ": tree inventory does not match the declared template");
    std::vector<std::string> violations = validate(model.grammar, model.params, 1e-6);
    if (!violations.empty())
        throw ParseError(path + ": invalid parameters: " + violations.front());
    return model;
}

void save_pcfg_model(const PcfgModel& model, const std::string& path) {
    ordered_json j;
    j["format"] = "pcfg-model";
    j["version"] = 1;
    j["vocabulary"] = model.vocab.symbols();
    j["nonterminals"] = model.pcfg.M;
    j["binary"] = model.pcfg.binary;
    j["lexical"] = model.pcfg.lexical;
    write_json(j, path);
}

PcfgModel load_pcfg_model(const std::string& path) {
    ordered_json j = read_json(path);
    expect_format(j, "pcfg-model", path);
    PcfgModel model;
    model.vocab = Vocabulary(j["vocabulary"].get<std::vector<std::string>>());
    model.pcfg.M = j["nonterminals"].get<int>();
    model.pcfg.V = model.vocab.size();
    model.pcfg.binary = j["binary"].get<std::vector<double>>();
    model.pcfg.lexical = j["lexical"].get<std::vector<double>>();
    const std::size_t m = model.pcfg.M;
    if (model.pcfg.binary.size() != m * m * m ||
        model.pcfg.lexical.size() != m * static_cast<std::size_t>(model.pcfg.V))
        throw ParseError(path + ": rule tables do not match the declared sizes");
    std::vector<std::string> violations = pcfg_validate(model.pcfg, 1e-6);
    if (!violations.empty())
        throw ParseError(path + ": invalid parameters: " + violations.front());
    return model;
}

void save_ngram_model(const NgramModelFile& model, const std::string& path) {
    ordered_json j;
    j["format"] = "ngram-model";
    j["version"] = 1;
    j["vocabulary"] = model.vocab.symbols();
    j["order"] = model.model.order();
    j["sentence_end"] = model.model.sentence_end();
    j["lambda"] = model.model.lambda();
    j["counts"] = model.model.counts();
    write_json(j, path);
}

NgramModelFile load_ngram_model(const std::string& path) {
    ordered_json j = read_json(path);
    expect_format(j, "ngram-model", path);
    NgramModelFile file;
    file.vocab = Vocabulary(j["vocabulary"].get<std::vector<std::string>>());
    file.model = NgramModel(file.vocab.size(), j["order"].get<int>(),
                            j["sentence_end"].get<bool>());
    auto counts = j["counts"].get<std::vector<std::vector<double>>>();
    if (counts.size() != file.model.counts().size())
        throw ParseError(path + ": count tables do not match the declared order");
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k].size() != file.model.counts()[k].size())
            throw ParseError(path + ": count table " + std::to_string(k) + " has wrong size");
        file.model.counts()[k] = counts[k];
    }
    file.model.rebuild_totals();
    file.model.set_lambda(j["lambda"].get<std::vector<double>>());
    return file;
}

std::string model_format(const std::string& path) {
    ordered_json j = read_json(path);
    if (!j.contains("format")) throw ParseError(path + ": missing format field");
    return j["format"].get<std::string>();
}

void save_train_trace(const TrainTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write training log: " + path);
    for (const IterationRecord& rec : trace) {
        ordered_json j;
        j["iteration"] = rec.iteration;
        j["train_log2"] = rec.train_log2;
        j["heldout_bits_per_word"] = rec.heldout_bits;
        j["seconds"] = rec.seconds;
        out << j.dump() << "\n";
    }
}

TrainTrace load_train_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open training log: " + path);
    TrainTrace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        IterationRecord rec;
        rec.iteration = j["iteration"].get<int>();
        rec.train_log2 = j["train_log2"].get<double>();
        rec.heldout_bits = j["heldout_bits_per_word"].get<double>();
        rec.seconds = j["seconds"].get<double>();
        trace.push_back(rec);
    }
    return trace;
}

}  // namespace pltig
