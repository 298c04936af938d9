#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/errors.hpp"

namespace lexdiv {

// One text unit (prompt, response, or persona description).
struct Document {
    std::string id;
    std::string text;
    std::map<std::string, std::string> meta;
};

// How a corpus was read from disk: the JSONL field map plus optional
// filter/sampling knobs. Recorded so reports can state their provenance.
struct FieldMap {
    std::string text_field;
    std::string id_field;                 // empty -> id = zero-padded line index
    std::vector<std::string> meta_fields; // copied into Document.meta when present
    std::string filter_key;               // optional key=value retention predicate
    std::string filter_value;
    bool dedupe_text = false;             // drop lines whose text was already seen

    // Parse a key=value file: text_field, id_field, meta_fields (comma
    // separated), filter (key=value), dedupe (true/false).
    static FieldMap from_file(const std::filesystem::path& path);
    // Built-in presets: "dolly", "no_robots", "personahub", "personahub_persona",
    // "tulu3", "generic" (field "text").
    static FieldMap preset(const std::string& name);

    std::string describe() const;
};

struct SourceInfo {
    std::string path;
    std::string field_map; // FieldMap::describe()
    std::string note;      // e.g. "sample k=100 seed=7"
};

class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<Document> docs, SourceInfo source);

    const std::vector<Document>& docs() const { return docs_; }
    size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const Document& at(size_t i) const { return docs_.at(i); }
    const SourceInfo& source() const { return source_; }

    // Lookup by id; nullptr when absent.
    const Document* find(const std::string& id) const;

    void export_csv(const std::filesystem::path& path) const;

private:
    std::vector<Document> docs_;
    SourceInfo source_;
};

class MalformedLineError : public Error {
public:
    MalformedLineError(size_t line_no, const std::string& what_failed)
        : Error("malformed JSON at line " + std::to_string(line_no) + ": " + what_failed),
          line_no(line_no) {}
    size_t line_no;
};

class MissingFieldError : public Error {
public:
    MissingFieldError(size_t line_no, const std::string& field)
        : Error("line " + std::to_string(line_no) + ": missing field \"" + field + "\""),
          line_no(line_no), field(field) {}
    size_t line_no;
    std::string field;
};

class EmptyCorpusError : public Error {
public:
    explicit EmptyCorpusError(const std::string& context)
        : Error("empty corpus: " + context) {}
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& id)
        : Error("duplicate document id: \"" + id + "\"") {}
};

class SampleTooLargeError : public Error {
public:
    SampleTooLargeError(size_t k, size_t n)
        : Error("sample size " + std::to_string(k) + " exceeds corpus size " + std::to_string(n)) {}
};

// Read a JSONL file (one object per line, UTF-8). Documents keep file order.
// Lines failing the filter are skipped; retained lines must carry the text
// field with non-whitespace content. Blank lines are ignored.
Corpus load_jsonl(const std::filesystem::path& path, const FieldMap& field_map);

// k documents sampled without replacement, deterministic in seed, relative
// input order preserved.
Corpus sample(const Corpus& corpus, size_t k, uint64_t seed);

} // namespace lexdiv
