#include "lexdiv/textproc.hpp"

#include <array>
#include <cctype>

#include "lexdiv/util.hpp"

namespace lexdiv {

namespace {

struct Codepoint {
    uint32_t value = 0;
    size_t offset = 0; // byte offset in the source string
    size_t length = 0; // byte length of the encoding
};

// Minimal UTF-8 decoding; invalid bytes are passed through as single-byte
// codepoints so tokenization stays total on arbitrary input.
std::vector<Codepoint> decode_utf8(const std::string& s) {
    std::vector<Codepoint> cps;
    cps.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        uint32_t cp = b;
        size_t len = 1;
        if (b >= 0xF0 && i + 3 < s.size()) {
            cp = (b & 0x07u) << 18 | (s[i + 1] & 0x3Fu) << 12 | (s[i + 2] & 0x3Fu) << 6 | (s[i + 3] & 0x3Fu);
            len = 4;
        } else if (b >= 0xE0 && i + 2 < s.size()) {
            cp = (b & 0x0Fu) << 12 | (s[i + 1] & 0x3Fu) << 6 | (s[i + 2] & 0x3Fu);
            len = 3;
        } else if (b >= 0xC0 && i + 1 < s.size()) {
            cp = (b & 0x1Fu) << 6 | (s[i + 1] & 0x3Fu);
            len = 2;
        }
        cps.push_back({cp, i, len});
        i += len;
    }
    return cps;
}

bool is_space_cp(uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_ascii_alnum(uint32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

// Non-ASCII punctuation treated as token separators. Anything else above
// 0x7F counts as a letter.
bool is_unicode_punct(uint32_t cp) {
    if (cp >= 0x2012 && cp <= 0x2027 && cp != 0x2019) return true; // dashes, quotes, dots
    if (cp >= 0x2030 && cp <= 0x205E) return true;                 // per-mille..general punct
    switch (cp) {
        case 0xA1: case 0xAB: case 0xB7: case 0xBB: case 0xBF:
        case 0x2010: case 0x2011: // handled as hyphens before this check
            return true;
        default:
            return false;
    }
}

enum class CharClass { Space, Separator, Apostrophe, Hyphen, Letter };

CharClass classify(uint32_t cp) {
    if (is_space_cp(cp)) return CharClass::Space;
    if (cp == '\'' || cp == 0x2019) return CharClass::Apostrophe;
    if (cp == '-' || cp == 0x2010 || cp == 0x2011) return CharClass::Hyphen;
    if (cp < 0x80) return is_ascii_alnum(cp) ? CharClass::Letter : CharClass::Separator;
    return is_unicode_punct(cp) ? CharClass::Separator : CharClass::Letter;
}

void append_cp(std::string& out, uint32_t cp, const std::string& src, const Codepoint& c, bool lowercase) {
    if (cp == 0x2019) {
        out.push_back('\'');
    } else if (cp == 0x2010 || cp == 0x2011) {
        out.push_back('-');
    } else if (cp < 0x80) {
        char ch = static_cast<char>(cp);
        if (lowercase && ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
        out.push_back(ch);
    } else {
        out.append(src, c.offset, c.length);
    }
}

// Strip leading/trailing ' and -; may produce an empty string.
std::string strip_edges(const std::string& tok) {
    size_t b = 0, e = tok.size();
    while (b < e && (tok[b] == '\'' || tok[b] == '-')) ++b;
    while (e > b && (tok[e - 1] == '\'' || tok[e - 1] == '-')) --e;
    return tok.substr(b, e - b);
}

std::vector<std::string> tokenize_impl(const std::string& text, bool lowercase) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        std::string t = strip_edges(current);
        if (!t.empty()) tokens.push_back(std::move(t));
        current.clear();
    };
    for (const Codepoint& c : decode_utf8(text)) {
        switch (classify(c.value)) {
            case CharClass::Space:
            case CharClass::Separator:
                flush();
                break;
            default:
                append_cp(current, c.value, text, c, lowercase);
                break;
        }
    }
    flush();
    return tokens;
}

bool is_vowel(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
            return true;
        default:
            return false;
    }
}

const std::array<const char*, 6> kAbbreviations = {"mr.", "dr.", "e.g.", "i.e.", "etc.", "vs."};

} // namespace

std::vector<std::string> tokenize(const std::string& text) { return tokenize_impl(text, true); }

std::vector<std::string> tokenize_cased(const std::string& text) { return tokenize_impl(text, false); }

std::vector<std::pair<size_t, size_t>> split_sentences(const std::string& text) {
    std::vector<std::pair<size_t, size_t>> spans;
    size_t start = 0;
    const size_t n = text.size();
    for (size_t i = 0; i < n; ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;

        // Look ahead: boundary requires whitespace then an ASCII capital,
        // or nothing but whitespace until end of text.
        size_t j = i + 1;
        while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        bool at_end = (j == n);
        bool capital_next = (j > i + 1) && j < n && text[j] >= 'A' && text[j] <= 'Z';
        if (!at_end && !capital_next) continue;

        if (c == '.') {
            // The word just before the period, including internal dots, so
            // "e.g." is matched whole.
            size_t w = i;
            while (w > start) {
                char p = text[w - 1];
                bool wordish = std::isalpha(static_cast<unsigned char>(p)) || p == '.';
                if (!wordish) break;
                --w;
            }
            std::string word = lower_ascii(std::string_view(text).substr(w, i - w + 1));
            bool abbrev = false;
            for (const char* a : kAbbreviations)
                if (word == a) { abbrev = true; break; }
            if (abbrev && !at_end) continue;
        }

        spans.emplace_back(start, i + 1);
        start = j;
        i = j > 0 ? j - 1 : 0;
    }
    if (start < n) spans.emplace_back(start, n);
    if (spans.empty()) spans.emplace_back(0, n);
    return spans;
}

int count_syllables(const std::string& word) {
    std::string w = lower_ascii(word);
    int groups = 0;
    char prev = '\0';
    for (char c : w) {
        if (is_vowel(c) && !(is_vowel(prev) && c == prev)) ++groups;
        prev = c;
    }
    // Silent terminal e: "table" keeps its -le syllable, "whale" does not.
    if (w.size() >= 2 && w.back() == 'e') {
        bool cons_le = w.size() >= 3 && w[w.size() - 2] == 'l' && !is_vowel(w[w.size() - 3]);
        if (!cons_le) --groups;
    }
    return groups < 1 ? 1 : groups;
}

TokenizedDoc tokenize_doc(const std::string& doc_id, const std::string& text) {
    TokenizedDoc doc;
    doc.doc_id = doc_id;
    size_t consumed = 0;
    for (const auto& [begin, end] : split_sentences(text)) {
        std::vector<std::string> sent = tokenize(text.substr(begin, end - begin));
        if (sent.empty()) continue;
        doc.sentences.emplace_back(consumed, consumed + sent.size());
        consumed += sent.size();
        for (auto& t : sent) doc.tokens.push_back(std::move(t));
    }
    return doc;
}

std::string ngram_key(const std::vector<std::string>& tokens, size_t i, size_t n) {
    std::string key = tokens[i];
    for (size_t j = 1; j < n; ++j) {
        key.push_back(' ');
        key += tokens[i + j];
    }
    return key;
}

NGramCounts extract_ngrams(const std::vector<std::vector<std::string>>& tokens_per_doc, size_t n) {
    NGramCounts out;
    out.n = n;
    for (const auto& tokens : tokens_per_doc) {
        if (tokens.size() < n) continue;
        for (size_t i = 0; i + n <= tokens.size(); ++i) {
            ++out.counts[ngram_key(tokens, i, n)];
            ++out.total;
        }
    }
    return out;
}

} // namespace lexdiv
