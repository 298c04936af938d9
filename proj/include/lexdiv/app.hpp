#pragma once

#include <iosfwd>
#include <string>

#include "lexdiv/config.hpp"
#include "lexdiv/corpus.hpp"
#include "lexdiv/embed.hpp"
#include "lexdiv/metrics.hpp"

namespace lexdiv::app {

// Corpus described by config keys "<prefix>.path", "<prefix>.preset" or
// explicit field-map keys, optional "<prefix>.sample_k"/"<prefix>.sample_seed".
Corpus load_corpus_from_config(const KvConfig& config, const std::string& prefix);
FieldMap field_map_from_config(const KvConfig& config, const std::string& prefix);

EmbedConfig embed_config_from(const KvConfig& config);

// Pair scorer for the homogenization metric: greedy BERTScore-F1 over token
// embeddings (or cosine over document embeddings), floored at 0 so scores
// stay in [0,1]. Embeddings are computed once per document id and reused.
PairScorer make_hom_scorer(EmbeddingBackend& backend, bool token_level);

// Subcommand bodies. They throw ConfigError for usage problems (exit 2) and
// Error for computation problems (exit 1); `out` receives progress lines.
void cmd_measure(const KvConfig& config, std::ostream& out);
void cmd_shuffle_eval(const KvConfig& config, std::ostream& out);
void cmd_derive_coarse(const KvConfig& config, std::ostream& out);
void cmd_generate(const KvConfig& config, std::ostream& out);
void cmd_compare(const KvConfig& config, std::ostream& out);
void cmd_report(const KvConfig& config, std::ostream& out);

// Shared exit-code mapping used by the CLI binary.
int run_command(const std::string& name, const KvConfig& config, std::ostream& out,
                std::ostream& err);

} // namespace lexdiv::app
