#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/corpus.hpp"
#include "lexdiv/errors.hpp"

namespace lexdiv {

class EmptyPersonaError : public Error {
public:
    EmptyPersonaError() : Error("persona description is empty") {}
};

class ConditionArgumentMismatchError : public Error {
public:
    explicit ConditionArgumentMismatchError(const std::string& msg)
        : Error("condition/argument mismatch: " + msg) {}
};

class SizeMismatchError : public Error {
public:
    SizeMismatchError(size_t prompts, size_t personas)
        : Error("prompt/persona size mismatch: " + std::to_string(prompts) + " vs " +
                std::to_string(personas)) {}
};

struct PersonaRecord {
    std::string id;
    std::string fine_text;
    std::string coarse_text;

    // Validates that coarse_text is non-empty and a normalized prefix of
    // fine_text (whitespace-collapsed, lowercased, trailing punctuation
    // ignored).
    static PersonaRecord make(std::string id, std::string fine_text, std::string coarse_text);
};

// First clause of a persona description: cut at the first comma, or at the
// first connective cue (" with ", " who ", " that ", " whose ",
// " specializing ", " interested ", " known ", " working ", " and ") that
// has at least two tokens before it, whichever comes first; trailing
// punctuation is trimmed; the full text is returned when no cut applies.
std::string derive_coarse(const std::string& fine_text);

// Personas from JSONL (id/fine text per the field map), coarse texts derived
// unless a TSV override file (persona_id TAB coarse_text) is given.
std::vector<PersonaRecord> load_personas(const Corpus& corpus,
                                         const std::optional<std::filesystem::path>& coarse_override);
std::map<std::string, std::string> read_coarse_override(const std::filesystem::path& path);
void write_coarse_tsv(const std::filesystem::path& path, const std::vector<PersonaRecord>& personas);

enum class PersonaKind { None, Fine, Coarse };

struct Condition {
    PersonaKind persona = PersonaKind::None;
    bool cutoff = false;

    // np, fp, cp, np-cu, fp-cu, cp-cu
    static Condition parse(const std::string& s);
    std::string key() const;   // "fp-cu"
    std::string label() const; // "FP+cu"
    bool needs_persona() const { return persona != PersonaKind::None; }
};

std::vector<Condition> parse_conditions(const std::string& list);

// Word budget for the cutoff conditions: the human response's word count
// rounded up to the nearest ten.
int cutoff_words(const Document& human_response);

struct PromptInstance {
    std::string prompt_id;
    std::string persona_id; // empty for NP
    Condition condition;
    std::string rendered_text;
    std::optional<int> cutoff;
};

// Render the final prompt string for a condition. Templates are byte-exact:
//
//   NP:     "Respond to the following question/instruction:\n\n{q}"
//   NP+cu:  "Respond to the following question/instruction in {x} words or less:\n\n{q}"
//   FP/CP:  "Assume you are the following persona: {p}.\n\nNow respond to the
//            following question/instruction appropriately from the perspective
//            of the above persona:\n\n{q}"
//   +cu inserts " in {x} words or less" before the colon of the second
//   sentence, with {p} the fine or coarse persona text.
PromptInstance render_prompt(Condition condition, const Document& question,
                             const PersonaRecord* persona, std::optional<int> cutoff);

struct PairingPlan {
    size_t shuffle_index = 0;
    uint64_t seed = 0;
    std::map<std::string, std::string> assignment; // prompt_id -> persona_id

    bool is_bijection() const;
};

// k independent uniform persona permutations; plan i depends only on
// (seed, i), so any subset of shuffles can be regenerated on its own.
std::vector<PairingPlan> shuffle_pairings(const Corpus& prompts,
                                          const std::vector<PersonaRecord>& personas,
                                          size_t k_shuffles, uint64_t seed);

void export_plans_csv(const std::filesystem::path& path, const std::vector<PairingPlan>& plans);
std::vector<PairingPlan> import_plans_csv(const std::filesystem::path& path);

} // namespace lexdiv
