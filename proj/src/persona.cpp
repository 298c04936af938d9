#include "lexdiv/persona.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "lexdiv/rng.hpp"
#include "lexdiv/textproc.hpp"
#include "lexdiv/util.hpp"

namespace lexdiv {

namespace {

const std::array<const char*, 9> kClauseCues = {
    " with ", " who ", " that ", " whose ", " specializing ",
    " interested ", " known ", " working ", " and "};

std::string trim_trailing_punct(std::string s) {
    while (!s.empty()) {
        const char c = s.back();
        const bool punct = std::ispunct(static_cast<unsigned char>(c)) != 0;
        if (!punct && !std::isspace(static_cast<unsigned char>(c))) break;
        s.pop_back();
    }
    return s;
}

// Normalization used for the coarse-prefix invariant: lowercase, collapse
// whitespace runs, drop trailing punctuation.
std::string normalize_for_prefix(const std::string& s) {
    std::string collapsed;
    bool in_space = true;
    for (char c : lower_ascii(trim_trailing_punct(s))) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) collapsed.push_back(' ');
            in_space = true;
        } else {
            collapsed.push_back(c);
            in_space = false;
        }
    }
    while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
    return collapsed;
}

} // namespace

PersonaRecord PersonaRecord::make(std::string id, std::string fine_text, std::string coarse_text) {
    if (trim(fine_text).empty()) throw EmptyPersonaError();
    if (trim(coarse_text).empty()) throw EmptyPersonaError();
    const std::string nfine = normalize_for_prefix(fine_text);
    const std::string ncoarse = normalize_for_prefix(coarse_text);
    if (nfine.compare(0, ncoarse.size(), ncoarse) != 0)
        throw Error("coarse persona is not a prefix of the fine persona (id " + id + ")");
    return PersonaRecord{std::move(id), std::move(fine_text), std::move(coarse_text)};
}

std::string derive_coarse(const std::string& fine_text) {
    const std::string text{trim(fine_text)};
    if (text.empty()) throw EmptyPersonaError();

    size_t cut = std::string::npos;
    const size_t comma = text.find(',');
    if (comma != std::string::npos) cut = comma;

    for (const char* cue : kClauseCues) {
        const size_t pos = text.find(cue);
        if (pos == std::string::npos || pos >= cut) continue;
        if (tokenize(text.substr(0, pos)).size() >= 2) cut = pos;
    }

    std::string coarse = cut == std::string::npos ? text : text.substr(0, cut);
    coarse = trim_trailing_punct(coarse);
    return coarse.empty() ? text : coarse;
}

std::vector<PersonaRecord> load_personas(const Corpus& corpus,
                                         const std::optional<std::filesystem::path>& coarse_override) {
    std::map<std::string, std::string> overrides;
    if (coarse_override) overrides = read_coarse_override(*coarse_override);

    std::vector<PersonaRecord> personas;
    personas.reserve(corpus.size());
    for (const auto& doc : corpus.docs()) {
        auto it = overrides.find(doc.id);
        std::string coarse = it != overrides.end() ? it->second : derive_coarse(doc.text);
        personas.push_back(PersonaRecord::make(doc.id, doc.text, std::move(coarse)));
    }
    return personas;
}

std::map<std::string, std::string> read_coarse_override(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open coarse override file: " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw IoError(path.string() + ":" + std::to_string(line_no) +
                          ": expected persona_id TAB coarse_text");
        out[line.substr(0, tab)] = std::string(trim(line.substr(tab + 1)));
    }
    return out;
}

void write_coarse_tsv(const std::filesystem::path& path, const std::vector<PersonaRecord>& personas) {
    std::ostringstream out;
    for (const auto& p : personas) out << p.id << '\t' << p.coarse_text << '\n';
    atomic_write_file(path, out.str());
}

Condition Condition::parse(const std::string& s) {
    const std::string key = lower_ascii(trim(s));
    Condition c;
    std::string base = key;
    if (key.size() > 3 && key.compare(key.size() - 3, 3, "-cu") == 0) {
        c.cutoff = true;
        base = key.substr(0, key.size() - 3);
    }
    if (base == "np") c.persona = PersonaKind::None;
    else if (base == "fp") c.persona = PersonaKind::Fine;
    else if (base == "cp") c.persona = PersonaKind::Coarse;
    else throw ConfigError("unknown condition \"" + s + "\"");
    return c;
}

std::string Condition::key() const {
    std::string base = persona == PersonaKind::None ? "np"
                       : persona == PersonaKind::Fine ? "fp" : "cp";
    return cutoff ? base + "-cu" : base;
}

std::string Condition::label() const {
    std::string base = persona == PersonaKind::None ? "NP"
                       : persona == PersonaKind::Fine ? "FP" : "CP";
    return cutoff ? base + "+cu" : base;
}

std::vector<Condition> parse_conditions(const std::string& list) {
    std::vector<Condition> out;
    std::set<std::string> seen;
    for (const auto& item : split(list, ',')) {
        if (trim(item).empty()) continue;
        Condition c = Condition::parse(item);
        if (seen.insert(c.key()).second) out.push_back(c);
    }
    if (out.empty()) throw ConfigError("no conditions given");
    return out;
}

int cutoff_words(const Document& human_response) {
    const size_t words = tokenize(human_response.text).size();
    if (words == 0) throw EmptyDocumentError(human_response.id);
    return static_cast<int>((words + 9) / 10 * 10);
}

PromptInstance render_prompt(Condition condition, const Document& question,
                             const PersonaRecord* persona, std::optional<int> cutoff) {
    if (condition.needs_persona() != (persona != nullptr))
        throw ConditionArgumentMismatchError("persona must be present exactly for FP/CP (" +
                                             condition.key() + ")");
    if (condition.cutoff != cutoff.has_value())
        throw ConditionArgumentMismatchError("cutoff must be present exactly for +cu conditions (" +
                                             condition.key() + ")");
    if (cutoff && (*cutoff <= 0 || *cutoff % 10 != 0))
        throw ConditionArgumentMismatchError("cutoff must be a positive multiple of 10, got " +
                                             std::to_string(*cutoff));

    const std::string length_phrase =
        cutoff ? " in " + std::to_string(*cutoff) + " words or less" : "";

    PromptInstance inst;
    inst.prompt_id = question.id;
    inst.condition = condition;
    inst.cutoff = cutoff;
    if (condition.persona == PersonaKind::None) {
        inst.rendered_text =
            "Respond to the following question/instruction" + length_phrase + ":\n\n" + question.text;
    } else {
        const std::string& ptext =
            condition.persona == PersonaKind::Fine ? persona->fine_text : persona->coarse_text;
        inst.persona_id = persona->id;
        inst.rendered_text = "Assume you are the following persona: " + ptext +
                             ".\n\nNow respond to the following question/instruction appropriately "
                             "from the perspective of the above persona" +
                             length_phrase + ":\n\n" + question.text;
    }
    return inst;
}

bool PairingPlan::is_bijection() const {
    std::set<std::string> values;
    for (const auto& [_, v] : assignment) values.insert(v);
    return values.size() == assignment.size();
}

std::vector<PairingPlan> shuffle_pairings(const Corpus& prompts,
                                          const std::vector<PersonaRecord>& personas,
                                          size_t k_shuffles, uint64_t seed) {
    if (prompts.size() != personas.size()) throw SizeMismatchError(prompts.size(), personas.size());
    if (k_shuffles < 1) throw ConfigError("k_shuffles must be >= 1");

    std::vector<PairingPlan> plans;
    plans.reserve(k_shuffles);
    for (size_t k = 0; k < k_shuffles; ++k) {
        Rng rng = Rng::substream(seed, k);
        const std::vector<size_t> perm = rng.permutation(personas.size());
        PairingPlan plan;
        plan.shuffle_index = k;
        plan.seed = seed;
        for (size_t i = 0; i < prompts.size(); ++i)
            plan.assignment[prompts.at(i).id] = personas[perm[i]].id;
        plans.push_back(std::move(plan));
    }
    return plans;
}

void export_plans_csv(const std::filesystem::path& path, const std::vector<PairingPlan>& plans) {
    std::ostringstream out;
    out << "shuffle_index,prompt_id,persona_id\n";
    for (const auto& plan : plans)
        for (const auto& [prompt_id, persona_id] : plan.assignment)
            out << plan.shuffle_index << ',' << prompt_id << ',' << persona_id << '\n';
    atomic_write_file(path, out.str());
}

std::vector<PairingPlan> import_plans_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plans file: " + path.string());
    std::map<size_t, PairingPlan> by_index;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || trim(line).empty()) continue; // header
        const auto cols = split(line, ',');
        if (cols.size() != 3)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 3 columns");
        const size_t idx = static_cast<size_t>(std::stoull(cols[0]));
        PairingPlan& plan = by_index[idx];
        plan.shuffle_index = idx;
        plan.assignment[cols[1]] = cols[2];
    }
    std::vector<PairingPlan> plans;
    plans.reserve(by_index.size());
    for (auto& [_, plan] : by_index) plans.push_back(std::move(plan));
    return plans;
}

} // namespace lexdiv
