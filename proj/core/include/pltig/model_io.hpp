#pragma once

#include <string>
#include <utility>

#include "pltig/grammar.hpp"
#include "pltig/ngram.hpp"
#include "pltig/params.hpp"
#include "pltig/pcfg.hpp"
#include "pltig/training.hpp"

namespace pltig {

// Versioned JSON model files.  Probabilities are written in decimal with
// shortest round-trip precision, so load-then-save is value-identical and
// save output is deterministic.

struct PltigModel {
    Grammar grammar;
    ParamSet params;
};

void save_pltig_model(const PltigModel& model, const std::string& path);
PltigModel load_pltig_model(const std::string& path);

struct PcfgModel {
    Vocabulary vocab;
    Pcfg pcfg;
};

void save_pcfg_model(const PcfgModel& model, const std::string& path);
PcfgModel load_pcfg_model(const std::string& path);

struct NgramModelFile {
    Vocabulary vocab;
    NgramModel model;
};

void save_ngram_model(const NgramModelFile& model, const std::string& path);
NgramModelFile load_ngram_model(const std::string& path);

// Peeks at the "format" field: "pltig-model" / "pcfg-model" / "ngram-model".
std::string model_format(const std::string& path);

// Training log: one JSON record per iteration, one line each.
void save_train_trace(const TrainTrace& trace, const std::string& path);
TrainTrace load_train_trace(const std::string& path);

}  // namespace pltig
