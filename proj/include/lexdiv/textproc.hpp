#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexdiv/errors.hpp"

namespace lexdiv {

class EmptyDocumentError : public Error {
public:
    explicit EmptyDocumentError(const std::string& id)
        : Error("document \"" + id + "\" has no tokens/sentences") {}
};

// Tokenization rules (fixed; reproduce them exactly when porting):
//  - the text is scanned as UTF-8 codepoints
//  - Unicode whitespace separates tokens
//  - within a whitespace-delimited chunk, any codepoint that is not a
//    letter, digit, apostrophe or hyphen also separates (so an em-dash
//    splits, a hyphen does not)
//  - U+2019 is normalized to ', U+2010/U+2011 to -
//  - leading/trailing apostrophes and hyphens are stripped from each token
//  - non-ASCII codepoints outside the handled punctuation ranges count as
//    letters, so accented words survive intact
//  - tokenize() lowercases ASCII letters; tokenize_cased() keeps case
std::vector<std::string> tokenize(const std::string& text);
std::vector<std::string> tokenize_cased(const std::string& text);

// Sentence boundaries sit after . ! ? followed by whitespace and a capital
// letter, or at end of text. A short abbreviation list (Mr., Dr., e.g.,
// i.e., etc., vs.) suppresses boundaries after those words. Returns byte
// ranges [begin, end) into the original text; always at least one.
std::vector<std::pair<size_t, size_t>> split_sentences(const std::string& text);

// Heuristic syllable count, >= 1. Counts vowel letters (aeiouy) treating
// consecutive repeats of the same letter as one group ("oo" is one group,
// "ea" is two), then subtracts a final silent 'e' unless the word ends in
// consonant + "le". No dictionary lookups; the rule is the contract.
int count_syllables(const std::string& word);

// A document tokenized once, with sentence structure, feeding every metric.
struct TokenizedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;                    // lowercased
    std::vector<std::pair<size_t, size_t>> sentences;   // [begin, end) token spans

    size_t word_count() const { return tokens.size(); }
    size_t sentence_count() const { return sentences.size(); }
};

// Tokenize with sentence spans. Sentence splitting runs on the original
// (cased) text; sentences that contain no tokens are dropped, so the spans
// partition the token list exactly.
TokenizedDoc tokenize_doc(const std::string& doc_id, const std::string& text);

struct NGramCounts {
    size_t n = 0;
    std::unordered_map<std::string, uint64_t> counts; // key: tokens joined by ' '
    uint64_t total = 0;

    size_t unique() const { return counts.size(); }
};

// Sliding-window n-grams within each document; documents shorter than n
// contribute nothing. Grams never cross document boundaries.
NGramCounts extract_ngrams(const std::vector<std::vector<std::string>>& tokens_per_doc, size_t n);

// Join tokens[i..i+n) with single spaces; the canonical n-gram key.
std::string ngram_key(const std::vector<std::string>& tokens, size_t i, size_t n);

} // namespace lexdiv
