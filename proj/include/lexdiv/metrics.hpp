#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/corpus.hpp"
#include "lexdiv/tagger.hpp"
#include "lexdiv/textproc.hpp"

namespace lexdiv {

class TooFewDocumentsError : public Error {
public:
    TooFewDocumentsError(size_t have, size_t need)
        : Error("need at least " + std::to_string(need) + " documents, have " + std::to_string(have)) {}
};

class ScorerFailureError : public Error {
public:
    ScorerFailureError(const std::string& id_a, const std::string& id_b, const std::string& why)
        : Error("scorer failed on pair (" + id_a + ", " + id_b + "): " + why) {}
};

// DEFLATE (zlib, level 6, 32 KiB window) of the payload; the canonical
// compressor for CR and CR-POS. Returned bytes are deterministic for a given
// zlib build, and the compressor identity is recorded in report provenance.
std::string deflate_compress(const std::string& payload);
std::string compressor_id();

// uncompressed bytes / compressed bytes over the corpus payload: lowercased
// token streams, one doc per line. Higher means more redundancy.
double compression_ratio(const Corpus& corpus);

// Same ratio over space-joined POS tag sequences (one doc per line). Tags
// come from the model applied to cased tokens.
double compression_ratio_pos(const Corpus& corpus, const TaggerModel& model);
// Variant for pre-tagged input: tag sequences supplied directly, one vector
// per document.
double compression_ratio_pos_tags(const std::vector<std::vector<std::string>>& tags_per_doc);

// Sum over n=1..max_n of unique/total n-gram ratios, pooled corpus-wide.
// Orders with zero realizable n-grams are skipped.
double ngram_diversity(const Corpus& corpus, size_t max_n = 4);

// (1/N) sum over docs of ln(1 + r_d) where r_d counts the token positions
// whose n-gram also occurs in at least one other document.
double self_repetition(const Corpus& corpus, size_t n = 4);

using PairScorer = std::function<double(const Document&, const Document&)>;

struct PairBudget {
    bool all = true;
    size_t budget = 0;
    static PairBudget all_pairs() { return {true, 0}; }
    static PairBudget sampled(size_t k) { return {false, k}; }
};

// Mean pairwise similarity over unordered document pairs: every pair, or a
// seeded uniform sample without replacement when a budget is given.
double homogenization(const Corpus& corpus, const PairScorer& scorer, PairBudget budget,
                      uint64_t seed);

// 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59
double flesch_kincaid(const TokenizedDoc& doc);
// 0.4*((words/sentences) + 100*(complex/words)), complex = 3+ syllables
double gunning_fog(const TokenizedDoc& doc);

struct MetricToggles {
    bool cr = false;
    bool cr_pos = false;
    bool nds = false;
    bool sr = false;
    bool hom_bs = false;
    bool fk = false;
    bool gf = false;

    static MetricToggles all();
    // Comma list: cr,cr-pos,nds,sr,hom-bs,fk,gf
    static MetricToggles parse(const std::string& list);
};

struct MeasureConfig {
    MetricToggles toggles;
    size_t nds_max_n = 4;
    size_t sr_n = 4;
    const TaggerModel* tagger = nullptr;             // required when cr_pos is on
    const std::vector<std::vector<std::string>>* pretagged = nullptr; // overrides tagger
    PairScorer scorer;                               // required when hom_bs is on
    std::optional<size_t> hom_pair_budget;           // default: all pairs up to 2000 docs
    uint64_t hom_seed = 0;
    std::string scorer_id = "none";
};

// One report row (one corpus under one condition).
struct MetricReport {
    std::string condition;
    std::optional<double> cr, cr_pos, nds, sr, hom_bs;
    std::optional<double> fk_mean, fk_sd, gf_mean, gf_sd;
    std::string source;       // corpus provenance
    std::string config_hash;  // resolved-config hash, filled by the CLI
    std::string provenance;   // compressor / scorer / seed notes

    static std::string csv_header();
    std::string csv_row() const;
    static std::string markdown_header();
    std::string markdown_row() const;
};

MetricReport measure_all(const Corpus& corpus, const MeasureConfig& config);

// Readability over all docs: per-document grades, then mean and population SD.
struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};
MeanSd readability_mean_sd(const Corpus& corpus, double (*grade)(const TokenizedDoc&));

} // namespace lexdiv
