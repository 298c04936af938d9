#include "lexdiv/app.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "lexdiv/genclient.hpp"
#include "lexdiv/persona.hpp"
#include "lexdiv/stats.hpp"
#include "lexdiv/tagger.hpp"
#include "lexdiv/textproc.hpp"
#include "lexdiv/util.hpp"

namespace lexdiv::app {

namespace fs = std::filesystem;

FieldMap field_map_from_config(const KvConfig& config, const std::string& prefix) {
    if (config.has(prefix + ".preset")) return FieldMap::preset(config.get(prefix + ".preset"));
    if (config.has(prefix + ".field_map")) return FieldMap::from_file(config.get(prefix + ".field_map"));
    FieldMap fm;
    fm.text_field = config.require(prefix + ".text_field");
    fm.id_field = config.get(prefix + ".id_field");
    for (const auto& f : split(config.get(prefix + ".meta_fields"), ','))
        if (!trim(f).empty()) fm.meta_fields.emplace_back(trim(f));
    const std::string filter = config.get(prefix + ".filter");
    if (!filter.empty()) {
        const size_t eq = filter.find('=');
        if (eq == std::string::npos) throw ConfigError(prefix + ".filter must be key=value");
        fm.filter_key = filter.substr(0, eq);
        fm.filter_value = filter.substr(eq + 1);
    }
    fm.dedupe_text = config.get_bool(prefix + ".dedupe", false);
    return fm;
}

Corpus load_corpus_from_config(const KvConfig& config, const std::string& prefix) {
    const std::string path = config.require(prefix + ".path");
    if (!fs::exists(path)) throw ConfigError("input path does not exist: " + path);

    FieldMap fm = field_map_from_config(config, prefix);
    // Filter may also ride on top of a preset.
    const std::string filter = config.get(prefix + ".filter");
    if (!filter.empty()) {
        const size_t eq = filter.find('=');
        if (eq == std::string::npos) throw ConfigError(prefix + ".filter must be key=value");
        fm.filter_key = filter.substr(0, eq);
        fm.filter_value = filter.substr(eq + 1);
    }
    if (config.has(prefix + ".dedupe")) fm.dedupe_text = config.get_bool(prefix + ".dedupe", false);

    Corpus corpus = load_jsonl(path, fm);
    if (config.has(prefix + ".sample_k")) {
        const size_t k = config.get_u64(prefix + ".sample_k", 0);
        const uint64_t seed = config.get_u64(prefix + ".sample_seed", config.get_u64("seed", 0));
        corpus = sample(corpus, k, seed);
    }
    return corpus;
}

EmbedConfig embed_config_from(const KvConfig& config) {
    EmbedConfig ec;
    ec.kind = config.get("embed.kind", "mock");
    ec.dimension = config.get_u64("embed.dim", 64);
    ec.hash_seed = config.get_u64("embed.hash_seed", 0);
    ec.url = config.get("embed.url");
    ec.model = config.get("embed.model", ec.model);
    ec.auth_env = config.get("embed.auth_env");
    ec.batch_size = config.get_u64("embed.batch_size", 32);
    ec.max_in_flight = config.get_u64("embed.max_in_flight", 8);
    ec.timeout_ms = static_cast<int>(config.get_u64("embed.timeout_ms", 30000));
    ec.cache_dir = config.get("embed.cache_dir");
    return ec;
}

PairScorer make_hom_scorer(EmbeddingBackend& backend, bool token_level) {
    struct Cache {
        std::mutex mu;
        std::map<std::string, EmbeddingMatrix> matrices;
        std::map<std::string, std::vector<float>> vectors;
    };
    auto cache = std::make_shared<Cache>();

    if (token_level) {
        return [&backend, cache](const Document& a, const Document& b) {
            auto matrix_of = [&](const Document& d) -> const EmbeddingMatrix& {
                std::lock_guard<std::mutex> lock(cache->mu);
                auto it = cache->matrices.find(d.id);
                if (it == cache->matrices.end())
                    it = cache->matrices.emplace(d.id, backend.embed_tokens(d.text)).first;
                return it->second;
            };
            const double f1 = bertscore_f1(matrix_of(a), matrix_of(b));
            return std::max(0.0, f1);
        };
    }
    return [&backend, cache](const Document& a, const Document& b) {
        auto vector_of = [&](const Document& d) -> const std::vector<float>& {
            std::lock_guard<std::mutex> lock(cache->mu);
            auto it = cache->vectors.find(d.id);
            if (it == cache->vectors.end())
                it = cache->vectors.emplace(d.id, backend.embed_document(d.text)).first;
            return it->second;
        };
        return std::max(0.0, cosine(vector_of(a), vector_of(b)));
    };
}

namespace {

fs::path out_dir(const KvConfig& config) {
    const std::string out = config.get("out", "out");
    fs::create_directories(out);
    return out;
}

std::string md_footer(const KvConfig& config) {
    return "\n<!-- config:" + config.hash() + " -->\n";
}

std::string csv_footer(const KvConfig& config) {
    return "# config:" + config.hash() + "\n";
}

struct TaggerInputs {
    std::unique_ptr<TaggerModel> model;
    std::unique_ptr<std::vector<std::vector<std::string>>> pretagged;
};

TaggerInputs tagger_from_config(const KvConfig& config, size_t corpus_size) {
    TaggerInputs t;
    if (config.has("tagger.pretagged")) {
        const auto sents = read_tagged_file(config.get("tagger.pretagged"));
        auto tags = std::make_unique<std::vector<std::vector<std::string>>>();
        for (const auto& s : sents) {
            std::vector<std::string> doc_tags;
            doc_tags.reserve(s.size());
            for (const auto& tt : s) doc_tags.push_back(tt.tag);
            tags->push_back(std::move(doc_tags));
        }
        if (corpus_size && tags->size() != corpus_size)
            throw ConfigError("pretagged input has " + std::to_string(tags->size()) +
                              " documents, corpus has " + std::to_string(corpus_size));
        t.pretagged = std::move(tags);
        return t;
    }
    const std::string model_path = config.get("tagger.model");
    if (model_path.empty())
        throw ConfigError("cr-pos requires tagger.model or tagger.pretagged");
    if (!fs::exists(model_path)) throw ConfigError("tagger model does not exist: " + model_path);
    t.model = std::make_unique<TaggerModel>(TaggerModel::load(model_path));
    return t;
}

struct ScorerBundle {
    std::unique_ptr<EmbeddingBackend> backend;
    PairScorer scorer;
    std::string id;
};

ScorerBundle scorer_from_config(const KvConfig& config) {
    ScorerBundle s;
    s.backend = make_backend(embed_config_from(config));
    const bool token_level = config.get("embed.granularity", "token") == "token";
    s.scorer = make_hom_scorer(*s.backend, token_level);
    s.id = (token_level ? "bertscore-f1[" : "doc-cosine[") + s.backend->id() + "]";
    return s;
}

MeasureConfig measure_config_from(const KvConfig& config, const TaggerInputs& tagger,
                                  const ScorerBundle* scorer) {
    MeasureConfig mc;
    mc.toggles = MetricToggles::parse(config.get("metrics", "cr,cr-pos,nds,sr,fk,gf"));
    mc.nds_max_n = config.get_u64("nds.max_n", 4);
    mc.sr_n = config.get_u64("sr.n", 4);
    mc.tagger = tagger.model.get();
    mc.pretagged = tagger.pretagged.get();
    if (scorer) {
        mc.scorer = scorer->scorer;
        mc.scorer_id = scorer->id;
    }
    const std::string budget = config.get("hom.pair_budget");
    if (!budget.empty() && budget != "all") mc.hom_pair_budget = std::stoull(budget);
    mc.hom_seed = config.get_u64("hom.seed", config.get_u64("seed", 0));
    return mc;
}

// Per-plan scalar for one metric; readability enters as the document mean.
double metric_value(const std::string& name, const Corpus& corpus, const MeasureConfig& mc) {
    if (name == "cr") return compression_ratio(corpus);
    if (name == "cr-pos") {
        if (mc.pretagged) return compression_ratio_pos_tags(*mc.pretagged);
        if (!mc.tagger) throw ConfigError("cr-pos requires a tagger");
        return compression_ratio_pos(corpus, *mc.tagger);
    }
    if (name == "nds") return ngram_diversity(corpus, mc.nds_max_n);
    if (name == "sr") return self_repetition(corpus, mc.sr_n);
    if (name == "hom-bs") {
        PairBudget budget = PairBudget::all_pairs();
        if (mc.hom_pair_budget) budget = PairBudget::sampled(*mc.hom_pair_budget);
        else if (corpus.size() > 2000) budget = PairBudget::sampled(100000);
        return homogenization(corpus, mc.scorer, budget, mc.hom_seed);
    }
    if (name == "fk") return readability_mean_sd(corpus, flesch_kincaid).mean;
    if (name == "gf") return readability_mean_sd(corpus, gunning_fog).mean;
    throw ConfigError("unknown metric \"" + name + "\"");
}

std::vector<std::string> metric_names(const MetricToggles& t) {
    std::vector<std::string> names;
    if (t.cr) names.push_back("cr");
    if (t.cr_pos) names.push_back("cr-pos");
    if (t.nds) names.push_back("nds");
    if (t.sr) names.push_back("sr");
    if (t.hom_bs) names.push_back("hom-bs");
    if (t.fk) names.push_back("fk");
    if (t.gf) names.push_back("gf");
    return names;
}

std::string metric_column(const std::string& name) {
    if (name == "cr") return "CR";
    if (name == "cr-pos") return "CR-POS";
    if (name == "nds") return "NDS";
    if (name == "sr") return "SR";
    if (name == "hom-bs") return "Hom.BS";
    if (name == "fk") return "FK";
    if (name == "gf") return "GF";
    return name;
}

} // namespace

void cmd_measure(const KvConfig& config, std::ostream& out) {
    const auto names = config.group_names("corpus");
    if (names.empty()) throw ConfigError("measure: no corpus.<name>.path entries in config");

    TaggerInputs tagger;
    ScorerBundle scorer;
    const MetricToggles toggles = MetricToggles::parse(config.get("metrics", "cr,cr-pos,nds,sr,fk,gf"));
    if (toggles.cr_pos) tagger = tagger_from_config(config, 0);
    if (toggles.hom_bs) scorer = scorer_from_config(config);

    std::vector<MetricReport> reports;
    for (const auto& name : names) {
        Corpus corpus = load_corpus_from_config(config, "corpus." + name);
        MeasureConfig mc =
            measure_config_from(config, tagger, toggles.hom_bs ? &scorer : nullptr);
        if (mc.pretagged && mc.pretagged->size() != corpus.size())
            throw ConfigError("pretagged input does not match corpus " + name);
        MetricReport report = measure_all(corpus, mc);
        report.condition = name;
        report.config_hash = config.hash();
        reports.push_back(std::move(report));
        out << "measured " << name << " (" << corpus.size() << " docs)\n";
    }

    const fs::path dir = out_dir(config);
    std::ostringstream csv;
    csv << MetricReport::csv_header() << '\n';
    for (const auto& r : reports) csv << r.csv_row() << '\n';
    csv << csv_footer(config);
    atomic_write_file(dir / "measure.csv", csv.str());

    std::ostringstream md;
    md << MetricReport::markdown_header() << '\n';
    for (const auto& r : reports) md << r.markdown_row() << '\n';
    md << md_footer(config);
    atomic_write_file(dir / "measure.md", md.str());

    out << "wrote " << (dir / "measure.csv").string() << " and " << (dir / "measure.md").string()
        << "\n";
}

void cmd_derive_coarse(const KvConfig& config, std::ostream& out) {
    Corpus corpus = load_corpus_from_config(config, "personas");
    std::optional<fs::path> override_path;
    if (config.has("personas.coarse_file")) override_path = config.get("personas.coarse_file");
    const auto personas = load_personas(corpus, override_path);

    const fs::path dir = out_dir(config);
    write_coarse_tsv(dir / "coarse.tsv", personas);
    out << "derived " << personas.size() << " coarse personas -> " << (dir / "coarse.tsv").string()
        << "\n";
}

namespace {

struct ProtocolInputs {
    Corpus prompts;
    std::vector<PersonaRecord> personas;
    std::map<std::string, int> cutoffs; // by prompt id, present iff human responses configured
    std::vector<Condition> conditions;
};

ProtocolInputs protocol_inputs(const KvConfig& config, std::ostream& out) {
    ProtocolInputs in;
    in.prompts = load_corpus_from_config(config, "prompts");
    Corpus persona_corpus = load_corpus_from_config(config, "personas");
    std::optional<fs::path> override_path;
    if (config.has("personas.coarse_file")) override_path = config.get("personas.coarse_file");
    in.personas = load_personas(persona_corpus, override_path);
    in.conditions = parse_conditions(config.get("conditions", "np,fp,cp,np-cu,fp-cu,cp-cu"));

    const bool any_cutoff =
        std::any_of(in.conditions.begin(), in.conditions.end(), [](const Condition& c) { return c.cutoff; });
    if (any_cutoff) {
        Corpus human = load_corpus_from_config(config, "human");
        for (const auto& doc : human.docs()) in.cutoffs[doc.id] = cutoff_words(doc);
        for (const auto& prompt : in.prompts.docs())
            if (!in.cutoffs.count(prompt.id))
                throw ConfigError("no human response (cutoff) for prompt " + prompt.id);
    }
    out << "protocol: " << in.prompts.size() << " prompts, " << in.personas.size() << " personas\n";
    return in;
}

} // namespace

void cmd_generate(const KvConfig& config, std::ostream& out) {
    ProtocolInputs in = protocol_inputs(config, out);

    const uint64_t seed = config.get_u64("seed", 7);
    const size_t shuffles = config.get_u64("shuffles", 100);
    std::vector<PairingPlan> plans;
    if (config.has("plans.path")) {
        plans = import_plans_csv(config.get("plans.path"));
    } else {
        plans = shuffle_pairings(in.prompts, in.personas, shuffles, seed);
    }

    BatchRequest request;
    request.plans = plans;
    request.prompts = &in.prompts;
    request.personas = &in.personas;
    request.conditions = in.conditions;
    request.cutoffs = in.cutoffs;
    request.params.model = config.require("gen.model");
    request.params.temperature = config.get_double("gen.temperature", 1.0);
    request.params.max_new_tokens = static_cast<int>(config.get_u64("gen.max_new_tokens", 1024));
    request.params.timeout_ms = static_cast<int>(config.get_u64("gen.timeout_ms", 120000));
    request.params.retry.max_attempts = static_cast<int>(config.get_u64("gen.retry_max_attempts", 3));
    request.params.retry.backoff_base_ms =
        static_cast<int>(config.get_u64("gen.retry_backoff_ms", 500));
    request.params.sample_index = config.get_u64("gen.sample_index", 0);
    request.endpoint.base_url = config.require("gen.base_url");
    request.endpoint.auth_env = config.get("gen.auth_env");
    request.endpoint.cache_dir = config.get("gen.cache_dir");
    request.max_in_flight = config.get_u64("gen.max_in_flight", 4);

    const fs::path dir = out_dir(config);
    const fs::path responses_dir = dir / "responses";
    ResponseSet existing = ResponseSet::load_shards(responses_dir);
    out << "resuming with " << existing.size() << " existing records\n";

    BatchOutcome outcome = run_batch(request, existing);
    outcome.responses.save_shards(responses_dir);
    export_plans_csv(dir / "plans.csv", plans);

    std::ostringstream report;
    report << "expected=" << outcome.expected << " present=" << outcome.responses.size()
           << " generated=" << outcome.generated << " reused=" << outcome.reused
           << " failed=" << outcome.failed_keys.size() << "\n";
    for (const auto& k : outcome.failed_keys) report << "FAILED " << k << "\n";
    report << "config:" << config.hash() << "\n";
    atomic_write_file(dir / "completeness.txt", report.str());
    out << report.str();

    if (!outcome.failed_keys.empty())
        throw Error(std::to_string(outcome.failed_keys.size()) +
                    " generations failed; see completeness.txt");
}

void cmd_shuffle_eval(const KvConfig& config, std::ostream& out) {
    const fs::path responses_dir =
        config.has("responses.dir") ? fs::path(config.get("responses.dir"))
                                    : out_dir(config) / "responses";
    if (!fs::exists(responses_dir))
        throw ConfigError("responses directory does not exist: " + responses_dir.string());
    const ResponseSet responses = ResponseSet::load_shards(responses_dir);
    if (responses.size() == 0) throw ConfigError("no responses found in " + responses_dir.string());

    const auto conditions = parse_conditions(config.get("conditions", "np,fp,cp,np-cu,fp-cu,cp-cu"));
    const MetricToggles toggles = MetricToggles::parse(config.get("metrics", "cr,cr-pos,nds,sr,fk,gf"));
    const auto names = metric_names(toggles);

    TaggerInputs tagger;
    if (toggles.cr_pos) tagger = tagger_from_config(config, 0);
    ScorerBundle scorer;
    if (toggles.hom_bs) scorer = scorer_from_config(config);
    MeasureConfig mc = measure_config_from(config, tagger, toggles.hom_bs ? &scorer : nullptr);
    if (mc.pretagged)
        throw ConfigError("shuffle-eval computes tags per shuffle; use tagger.model");

    // Expected prompt ids: the configured prompt corpus when given, else the
    // union of ids seen in the responses.
    std::set<std::string> expected_prompts;
    if (config.has("prompts.path")) {
        Corpus prompts = load_corpus_from_config(config, "prompts");
        for (const auto& d : prompts.docs()) expected_prompts.insert(d.id);
    } else {
        for (const ResponseRecord* r : responses.sorted()) expected_prompts.insert(r->prompt_id);
    }

    // Hom-BS is evaluated on its own (smaller) shuffle budget.
    const size_t hom_shuffles = config.get_u64("hom.shuffles", 3);

    std::ostringstream csv;
    csv << "condition,metric,mean,sd,shuffles\n";
    std::ostringstream md;
    md << "| Cond. |";
    for (const auto& n : names) md << " " << metric_column(n) << " |";
    md << "\n|---|";
    for (size_t i = 0; i < names.size(); ++i) md << "---|";
    md << "\n";

    for (const Condition& cond : conditions) {
        // Shuffle indices present for this condition.
        std::set<std::optional<size_t>> shuffles_present;
        for (const ResponseRecord* r : responses.sorted())
            if (r->condition == cond.key()) shuffles_present.insert(r->shuffle_index);
        if (shuffles_present.empty())
            throw IncompleteResponseSetError("no responses for condition " + cond.key());

        // Validate coverage and build one corpus per shuffle.
        std::vector<Corpus> corpora;
        std::vector<std::string> missing;
        for (const auto& shuffle : shuffles_present) {
            Corpus c = responses.corpus_for(cond, shuffle);
            std::set<std::string> have;
            for (const auto& d : c.docs()) have.insert(d.id);
            for (const auto& want : expected_prompts)
                if (!have.count(want))
                    missing.push_back(cond.key() +
                                      (shuffle ? "/" + std::to_string(*shuffle) : "") + "/" + want);
            corpora.push_back(std::move(c));
        }
        if (!missing.empty()) {
            std::string list;
            for (size_t i = 0; i < missing.size() && i < 20; ++i) list += " " + missing[i];
            throw IncompleteResponseSetError(std::to_string(missing.size()) + " missing keys:" + list);
        }

        md << "| " << cond.label() << " |";
        for (const auto& metric : names) {
            size_t use = corpora.size();
            if (metric == "hom-bs" && cond.needs_persona())
                use = std::min(use, hom_shuffles);
            std::vector<double> values;
            for (size_t i = 0; i < use; ++i) values.push_back(metric_value(metric, corpora[i], mc));
            const ShuffleResult agg = shuffle_aggregate(metric, values);
            const bool single = !cond.needs_persona() || values.size() == 1;
            csv << cond.key() << ',' << metric << ',' << format_double(agg.mean, 6) << ','
                << format_double(agg.sd, 6) << ',' << values.size() << '\n';
            md << " " << (single ? format_double(agg.mean, 2) : format_mean_sd(agg.mean, agg.sd))
               << " |";
        }
        md << "\n";
        out << "evaluated " << cond.label() << " over " << corpora.size() << " shuffle(s)\n";
    }

    const fs::path dir = out_dir(config);
    csv << csv_footer(config);
    std::string md_str = md.str() + md_footer(config);
    atomic_write_file(dir / "shuffle_eval.csv", csv.str());
    atomic_write_file(dir / "shuffle_eval.md", md_str);
    out << "wrote " << (dir / "shuffle_eval.md").string() << "\n";
}

namespace {

Corpus compare_side(const KvConfig& config, const std::string& prefix) {
    if (config.has(prefix + ".responses_dir")) {
        const ResponseSet set = ResponseSet::load_shards(config.get(prefix + ".responses_dir"));
        const Condition cond = Condition::parse(config.require(prefix + ".condition"));
        std::optional<size_t> shuffle;
        if (cond.needs_persona()) shuffle = config.get_u64(prefix + ".shuffle", 0);
        Corpus c = set.corpus_for(cond, shuffle);
        if (c.empty())
            throw ConfigError(prefix + ": no responses for condition " + cond.key());
        return c;
    }
    return load_corpus_from_config(config, prefix);
}

} // namespace

void cmd_compare(const KvConfig& config, std::ostream& out) {
    Corpus a = compare_side(config, "compare.a");
    Corpus b = compare_side(config, "compare.b");

    const MetricToggles toggles = MetricToggles::parse(config.get("compare.metrics", "cr,nds,sr"));
    const size_t B = config.get_u64("compare.bootstrap_b", 10000);
    const uint64_t seed = config.get_u64("seed", 7);

    TaggerInputs tagger;
    if (toggles.cr_pos) tagger = tagger_from_config(config, 0);

    std::vector<TestResult> results;
    std::ostringstream md;
    md << "| Test | Metric | Statistic | p |\n|---|---|---|---|\n";

    for (const auto& metric : metric_names(toggles)) {
        if (metric == "hom-bs" || metric == "fk" || metric == "gf") continue;
        CorpusMetric fn;
        if (metric == "cr") fn = [](const Corpus& c) { return compression_ratio(c); };
        else if (metric == "cr-pos") {
            const TaggerModel* model = tagger.model.get();
            if (!model) throw ConfigError("compare cr-pos requires tagger.model");
            fn = [model](const Corpus& c) { return compression_ratio_pos(c, *model); };
        } else if (metric == "nds") fn = [](const Corpus& c) { return ngram_diversity(c, 4); };
        else if (metric == "sr") fn = [](const Corpus& c) { return self_repetition(c, 4); };
        TestResult r = paired_bootstrap(a, b, fn, B, seed);
        r.note = metric;
        md << "| paired-bootstrap | " << metric_column(metric) << " | "
           << format_double(r.statistic, 4) << " | " << format_double(r.p_value, 4) << " |\n";
        out << r.summary() << "\n";
        results.push_back(std::move(r));
    }

    // Variance comparison of readability grades, two groups.
    for (const auto& metric : {std::string("fk"), std::string("gf")}) {
        if ((metric == "fk" && !toggles.fk) || (metric == "gf" && !toggles.gf)) continue;
        auto grades = [&](const Corpus& c) {
            std::vector<double> v;
            for (const auto& d : c.docs()) {
                TokenizedDoc td = tokenize_doc(d.id, d.text);
                v.push_back(metric == "fk" ? flesch_kincaid(td) : gunning_fog(td));
            }
            return v;
        };
        TestResult r = levene({grades(a), grades(b)});
        r.note = metric;
        md << "| levene | " << metric_column(metric) << " | " << format_double(r.statistic, 4)
           << " | " << format_double(r.p_value, 4) << " |\n";
        out << r.summary() << "\n";
        results.push_back(std::move(r));
    }

    const fs::path dir = out_dir(config);

    // Content-diversity block: per-prompt cosine between the two sides'
    // responses, plus rank correlation against prompt length when prompts
    // are configured.
    if (config.get_bool("compare.content", true)) {
        auto backend = make_backend(embed_config_from(config));
        std::map<std::string, const Document*> b_by_id;
        for (const auto& d : b.docs()) b_by_id[d.id] = &d;

        std::vector<double> cosines;
        std::vector<std::pair<std::string, double>> rows;
        for (const auto& da : a.docs()) {
            auto it = b_by_id.find(da.id);
            if (it == b_by_id.end()) throw AlignmentError("id \"" + da.id + "\" missing from side b");
            const double c = cosine(backend->embed_document(da.text),
                                    backend->embed_document(it->second->text));
            cosines.push_back(c);
            rows.emplace_back(da.id, c);
        }
        const ShuffleResult agg = shuffle_aggregate("cosine", cosines);
        md << "| content | mean-cosine | " << format_double(agg.mean, 4) << " | |\n";
        md << "| content | sd-cosine | " << format_double(agg.sd, 4) << " | |\n";
        out << "content: mean cosine " << format_double(agg.mean, 4) << " (sd "
            << format_double(agg.sd, 4) << ") over " << cosines.size() << " pairs\n";

        std::ostringstream content_csv;
        content_csv << "prompt_id,cosine";
        std::optional<Corpus> prompts;
        if (config.has("prompts.path")) {
            prompts = load_corpus_from_config(config, "prompts");
            content_csv << ",prompt_words";
        }
        content_csv << "\n";
        std::vector<double> lengths;
        for (const auto& [id, c] : rows) {
            content_csv << id << ',' << format_double(c, 6);
            if (prompts) {
                const Document* p = prompts->find(id);
                if (!p) throw AlignmentError("prompt id \"" + id + "\" not in prompts corpus");
                const double words = static_cast<double>(tokenize(p->text).size());
                lengths.push_back(words);
                content_csv << ',' << static_cast<size_t>(words);
            }
            content_csv << '\n';
        }
        content_csv << csv_footer(config);
        atomic_write_file(dir / "content.csv", content_csv.str());

        if (prompts && cosines.size() >= 3) {
            TestResult r = spearman(lengths, cosines);
            r.note = "prompt length vs cosine";
            md << "| spearman | length-vs-cosine | " << format_double(r.statistic, 4) << " | "
               << format_double(r.p_value, 4) << " |\n";
            out << r.summary() << "\n";
            results.push_back(std::move(r));
        }
    }

    std::ostringstream json;
    json << "[";
    for (size_t i = 0; i < results.size(); ++i) json << (i ? ",\n " : "\n ") << results[i].to_json();
    json << "\n]\n";
    atomic_write_file(dir / "compare.json", json.str());

    std::string md_str = md.str() + md_footer(config);
    atomic_write_file(dir / "compare.md", md_str);
    out << "wrote " << (dir / "compare.md").string() << "\n";
}

void cmd_report(const KvConfig& config, std::ostream& out) {
    const fs::path dir = out_dir(config);
    std::ostringstream report;
    report << "# Diversity report\n";
    const std::vector<std::pair<std::string, std::string>> sections = {
        {"measure.md", "Corpus metrics"},
        {"shuffle_eval.md", "Shuffle evaluation"},
        {"compare.md", "Comparisons"},
    };
    size_t found = 0;
    for (const auto& [file, title] : sections) {
        const fs::path path = dir / file;
        if (!fs::exists(path)) continue;
        ++found;
        report << "\n## " << title << "\n\n" << read_file(path);
    }
    if (found == 0) throw ConfigError("report: no prior outputs found in " + dir.string());
    report << md_footer(config);
    atomic_write_file(dir / "report.md", report.str());
    out << "merged " << found << " section(s) -> " << (dir / "report.md").string() << "\n";
}

int run_command(const std::string& name, const KvConfig& config, std::ostream& out,
                std::ostream& err) {
    try {
        if (name == "measure") cmd_measure(config, out);
        else if (name == "shuffle-eval") cmd_shuffle_eval(config, out);
        else if (name == "derive-coarse") cmd_derive_coarse(config, out);
        else if (name == "generate") cmd_generate(config, out);
        else if (name == "compare") cmd_compare(config, out);
        else if (name == "report") cmd_report(config, out);
        else {
            err << "unknown command: " << name << "\n";
            return 2;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace lexdiv::app
