#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexdiv/errors.hpp"

namespace lexdiv {

// The 17 Universal POS tags, in the canonical order used for weight vectors.
inline constexpr std::array<const char*, 17> kUposTags = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

inline constexpr size_t kTagCount = kUposTags.size();

// Index of a tag name, or -1 when unknown.
int tag_index(const std::string& tag);

class ModelFormatError : public Error {
public:
    explicit ModelFormatError(const std::string& msg) : Error("tagger model: " + msg) {}
};

// Averaged-perceptron tagging model. Feature template (version DPT1):
//   bias | w=<word> | suf1..suf3 | pre1..pre3 | cap / allcap / num / hasdig /
//   hashyp shape flags | pw=<prev word> | nw=<next word> | pt=<prev tag> |
//   ptw=<prev tag>|<word>
// Words are ASCII-lowercased inside features; the cap flags carry the case
// signal. Decoding is greedy left to right, ties broken by tag order.
class TaggerModel {
public:
    using Weights = std::array<float, kTagCount>;

    TaggerModel() = default;

    static TaggerModel load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::vector<std::string> tag(const std::vector<std::string>& tokens) const;

    const std::string& version() const { return version_; }
    size_t feature_count() const { return weights_.size(); }

    // Trainer access.
    std::unordered_map<std::string, Weights>& weights() { return weights_; }
    const std::unordered_map<std::string, Weights>& weights() const { return weights_; }

    // The contextual features for position i; shared by tagging and training.
    static std::vector<std::string> features(const std::vector<std::string>& tokens, size_t i,
                                             const std::string& prev_tag);

private:
    std::unordered_map<std::string, Weights> weights_;
    std::string version_ = "DPT1";
};

struct TaggedToken {
    std::string token;
    std::string tag;
};
using TaggedSentence = std::vector<TaggedToken>;

// Read "token TAB tag" lines, blank line between documents/sentences.
std::vector<TaggedSentence> read_tagged_file(const std::filesystem::path& path);
void write_tagged_file(const std::filesystem::path& path, const std::vector<TaggedSentence>& sents);

// Averaged-perceptron training over gold sentences. Sentence order is
// reshuffled each epoch with the library PRNG, so training is deterministic
// in (corpus, epochs, seed).
TaggerModel train_tagger(const std::vector<TaggedSentence>& gold, int epochs, uint64_t seed);

} // namespace lexdiv
