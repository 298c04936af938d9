#include "lexdiv/metrics.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lexdiv/rng.hpp"
#include "lexdiv/util.hpp"

namespace lexdiv {

std::string deflate_compress(const std::string& payload) {
    z_stream strm{};
    if (deflateInit2(&strm, 6, Z_DEFLATED, 15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error("deflateInit2 failed");

    std::string out;
    out.resize(deflateBound(&strm, static_cast<uLong>(payload.size())));
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(payload.data()));
    strm.avail_in = static_cast<uInt>(payload.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&strm, Z_FINISH);
    if (rc != Z_STREAM_END) {
        deflateEnd(&strm);
        throw Error("deflate failed: rc=" + std::to_string(rc));
    }
    out.resize(strm.total_out);
    deflateEnd(&strm);
    return out;
}

std::string compressor_id() {
    return std::string("zlib-deflate level=6 window=15 zlib=") + zlibVersion();
}

namespace {

std::string token_payload(const Corpus& corpus) {
    std::string payload;
    bool first = true;
    for (const auto& doc : corpus.docs()) {
        if (!first) payload.push_back('\n');
        first = false;
        const auto tokens = tokenize(doc.text);
        for (size_t i = 0; i < tokens.size(); ++i) {
            if (i) payload.push_back(' ');
            payload += tokens[i];
        }
    }
    return payload;
}

double ratio_of(const std::string& payload) {
    const std::string compressed = deflate_compress(payload);
    return static_cast<double>(payload.size()) / static_cast<double>(compressed.size());
}

std::string tags_payload(const std::vector<std::vector<std::string>>& tags_per_doc) {
    std::string payload;
    bool first = true;
    for (const auto& tags : tags_per_doc) {
        if (!first) payload.push_back('\n');
        first = false;
        for (size_t i = 0; i < tags.size(); ++i) {
            if (i) payload.push_back(' ');
            payload += tags[i];
        }
    }
    return payload;
}

} // namespace

double compression_ratio(const Corpus& corpus) {
    if (corpus.empty()) throw EmptyCorpusError("compression_ratio");
    return ratio_of(token_payload(corpus));
}

double compression_ratio_pos(const Corpus& corpus, const TaggerModel& model) {
    if (corpus.empty()) throw EmptyCorpusError("compression_ratio_pos");
    std::vector<std::vector<std::string>> tags_per_doc;
    tags_per_doc.reserve(corpus.size());
    for (const auto& doc : corpus.docs())
        tags_per_doc.push_back(model.tag(tokenize_cased(doc.text)));
    return ratio_of(tags_payload(tags_per_doc));
}

double compression_ratio_pos_tags(const std::vector<std::vector<std::string>>& tags_per_doc) {
    if (tags_per_doc.empty()) throw EmptyCorpusError("compression_ratio_pos_tags");
    return ratio_of(tags_payload(tags_per_doc));
}

double ngram_diversity(const Corpus& corpus, size_t max_n) {
    if (corpus.empty()) throw EmptyCorpusError("ngram_diversity");
    std::vector<std::vector<std::string>> tokens_per_doc;
    tokens_per_doc.reserve(corpus.size());
    for (const auto& doc : corpus.docs()) tokens_per_doc.push_back(tokenize(doc.text));

    double score = 0.0;
    for (size_t n = 1; n <= max_n; ++n) {
        const NGramCounts counts = extract_ngrams(tokens_per_doc, n);
        if (counts.total == 0) continue;
        score += static_cast<double>(counts.unique()) / static_cast<double>(counts.total);
    }
    return score;
}

double self_repetition(const Corpus& corpus, size_t n) {
    if (corpus.size() < 2) throw TooFewDocumentsError(corpus.size(), 2);

    std::vector<std::vector<std::string>> tokens_per_doc;
    tokens_per_doc.reserve(corpus.size());
    for (const auto& doc : corpus.docs()) tokens_per_doc.push_back(tokenize(doc.text));

    // Document frequency per n-gram; a position counts when its gram occurs
    // in >= 2 distinct documents.
    std::unordered_map<std::string, uint32_t> doc_freq;
    for (const auto& tokens : tokens_per_doc) {
        if (tokens.size() < n) continue;
        std::unordered_set<std::string> grams;
        for (size_t i = 0; i + n <= tokens.size(); ++i) grams.insert(ngram_key(tokens, i, n));
        for (const auto& g : grams) ++doc_freq[g];
    }

    double sum = 0.0;
    for (const auto& tokens : tokens_per_doc) {
        uint64_t repeated = 0;
        if (tokens.size() >= n) {
            for (size_t i = 0; i + n <= tokens.size(); ++i)
                if (doc_freq[ngram_key(tokens, i, n)] >= 2) ++repeated;
        }
        sum += std::log1p(static_cast<double>(repeated));
    }
    return sum / static_cast<double>(corpus.size());
}

double homogenization(const Corpus& corpus, const PairScorer& scorer, PairBudget budget,
                      uint64_t seed) {
    const size_t n = corpus.size();
    if (n < 2) throw TooFewDocumentsError(n, 2);

    std::vector<std::pair<size_t, size_t>> pairs;
    const uint64_t all_pairs = static_cast<uint64_t>(n) * (n - 1) / 2;
    if (budget.all || budget.budget >= all_pairs) {
        pairs.reserve(all_pairs);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    } else {
        // Uniform sample without replacement by rejection; deterministic in seed.
        Rng rng(seed);
        std::set<std::pair<size_t, size_t>> chosen;
        while (chosen.size() < budget.budget) {
            size_t i = static_cast<size_t>(rng.bounded(n));
            size_t j = static_cast<size_t>(rng.bounded(n));
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            chosen.emplace(i, j);
        }
        pairs.assign(chosen.begin(), chosen.end());
    }

    double sum = 0.0;
    for (const auto& [i, j] : pairs) {
        const Document& a = corpus.at(i);
        const Document& b = corpus.at(j);
        double s;
        try {
            s = scorer(a, b);
        } catch (const std::exception& e) {
            throw ScorerFailureError(a.id, b.id, e.what());
        }
        if (!(s >= -1e-9 && s <= 1.0 + 1e-9))
            throw ScorerFailureError(a.id, b.id, "score out of [0,1]: " + std::to_string(s));
        sum += s;
    }
    return sum / static_cast<double>(pairs.size());
}

double flesch_kincaid(const TokenizedDoc& doc) {
    if (doc.tokens.empty() || doc.sentences.empty()) throw EmptyDocumentError(doc.doc_id);
    const double words = static_cast<double>(doc.word_count());
    const double sentences = static_cast<double>(doc.sentence_count());
    double syllables = 0.0;
    for (const auto& t : doc.tokens) syllables += count_syllables(t);
    return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

double gunning_fog(const TokenizedDoc& doc) {
    if (doc.tokens.empty() || doc.sentences.empty()) throw EmptyDocumentError(doc.doc_id);
    const double words = static_cast<double>(doc.word_count());
    const double sentences = static_cast<double>(doc.sentence_count());
    double complex_words = 0.0;
    for (const auto& t : doc.tokens)
        if (count_syllables(t) >= 3) complex_words += 1.0;
    return 0.4 * ((words / sentences) + 100.0 * (complex_words / words));
}

MetricToggles MetricToggles::all() {
    MetricToggles t;
    t.cr = t.cr_pos = t.nds = t.sr = t.hom_bs = t.fk = t.gf = true;
    return t;
}

MetricToggles MetricToggles::parse(const std::string& list) {
    MetricToggles t;
    for (const auto& raw : split(list, ',')) {
        const std::string m = lower_ascii(trim(raw));
        if (m.empty()) continue;
        if (m == "cr") t.cr = true;
        else if (m == "cr-pos" || m == "cr_pos") t.cr_pos = true;
        else if (m == "nds") t.nds = true;
        else if (m == "sr") t.sr = true;
        else if (m == "hom-bs" || m == "hom_bs") t.hom_bs = true;
        else if (m == "fk") t.fk = true;
        else if (m == "gf") t.gf = true;
        else if (m == "all") t = all();
        else throw ConfigError("unknown metric \"" + m + "\"");
    }
    return t;
}

MeanSd readability_mean_sd(const Corpus& corpus, double (*grade)(const TokenizedDoc&)) {
    std::vector<double> values;
    values.reserve(corpus.size());
    for (const auto& doc : corpus.docs()) {
        TokenizedDoc td = tokenize_doc(doc.id, doc.text);
        if (td.tokens.empty()) throw EmptyDocumentError(doc.id);
        values.push_back(grade(td));
    }
    MeanSd out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

MetricReport measure_all(const Corpus& corpus, const MeasureConfig& config) {
    if (corpus.empty()) throw EmptyCorpusError("measure_all");
    MetricReport report;
    report.source = corpus.source().path;
    if (!corpus.source().note.empty()) report.source += " [" + corpus.source().note + "]";

    auto wrap = [](const char* metric, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw Error(std::string(metric) + ": " + e.what());
        }
    };

    std::ostringstream prov;
    const auto& t = config.toggles;
    if (t.cr) report.cr = wrap("CR", [&] { return compression_ratio(corpus); });
    if (t.cr_pos) {
        report.cr_pos = wrap("CR-POS", [&] {
            if (config.pretagged) return compression_ratio_pos_tags(*config.pretagged);
            if (!config.tagger) throw ConfigError("CR-POS requires a tagger model or pre-tagged input");
            return compression_ratio_pos(corpus, *config.tagger);
        });
        prov << (config.pretagged ? "pos=pretagged " : "pos=perceptron ");
    }
    if (t.nds) report.nds = wrap("NDS", [&] { return ngram_diversity(corpus, config.nds_max_n); });
    if (t.sr) report.sr = wrap("SR", [&] { return self_repetition(corpus, config.sr_n); });
    if (t.hom_bs) {
        report.hom_bs = wrap("Hom-BS", [&] {
            if (!config.scorer) throw ConfigError("Hom-BS requires a pair scorer");
            PairBudget budget = PairBudget::all_pairs();
            if (config.hom_pair_budget) {
                budget = PairBudget::sampled(*config.hom_pair_budget);
            } else if (corpus.size() > 2000) {
                budget = PairBudget::sampled(100000);
            }
            return homogenization(corpus, config.scorer, budget, config.hom_seed);
        });
        prov << "scorer=" << config.scorer_id << " hom_seed=" << config.hom_seed << " ";
    }
    if (t.fk) {
        MeanSd fk = wrap("FK", [&] { return readability_mean_sd(corpus, flesch_kincaid); });
        report.fk_mean = fk.mean;
        report.fk_sd = fk.sd;
    }
    if (t.gf) {
        MeanSd gf = wrap("GF", [&] { return readability_mean_sd(corpus, gunning_fog); });
        report.gf_mean = gf.mean;
        report.gf_sd = gf.sd;
    }
    if (t.cr || t.cr_pos) prov << compressor_id();
    report.provenance = trim(prov.str());
    return report;
}

namespace {

std::string opt_csv(const std::optional<double>& v) {
    return v ? format_double(*v, 6) : std::string();
}

std::string opt_md(const std::optional<double>& v) {
    return v ? format_double(*v, 2) : std::string();
}

std::string opt_md_mean_sd(const std::optional<double>& mean, const std::optional<double>& sd) {
    if (!mean) return std::string();
    if (!sd) return format_double(*mean, 2);
    return format_mean_sd(*mean, *sd);
}

} // namespace

std::string MetricReport::csv_header() {
    return "condition,cr,cr_pos,nds,sr,hom_bs,fk_mean,fk_sd,gf_mean,gf_sd,source,config_hash,provenance";
}

std::string MetricReport::csv_row() const {
    std::ostringstream ss;
    ss << condition << ',' << opt_csv(cr) << ',' << opt_csv(cr_pos) << ',' << opt_csv(nds) << ','
       << opt_csv(sr) << ',' << opt_csv(hom_bs) << ',' << opt_csv(fk_mean) << ',' << opt_csv(fk_sd)
       << ',' << opt_csv(gf_mean) << ',' << opt_csv(gf_sd) << ',' << source << ',' << config_hash
       << ',' << provenance;
    return ss.str();
}

std::string MetricReport::markdown_header() {
    return "| Cond. | CR | CR-POS | NDS | SR | Hom.BS | FK | GF |\n"
           "|---|---|---|---|---|---|---|---|";
}

std::string MetricReport::markdown_row() const {
    std::ostringstream ss;
    ss << "| " << condition << " | " << opt_md(cr) << " | " << opt_md(cr_pos) << " | "
       << opt_md(nds) << " | " << opt_md(sr) << " | " << opt_md(hom_bs) << " | "
       << opt_md_mean_sd(fk_mean, fk_sd) << " | " << opt_md_mean_sd(gf_mean, gf_sd) << " |";
    return ss.str();
}

} // namespace lexdiv
