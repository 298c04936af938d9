#include "lexdiv/corpus.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "lexdiv/rng.hpp"
#include "lexdiv/util.hpp"

namespace lexdiv {

using nlohmann::json;

FieldMap FieldMap::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field map: " + path.string());
    FieldMap fm;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv[0] == '#') continue;
        size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key{trim(sv.substr(0, eq))};
        std::string value{trim(sv.substr(eq + 1))};
        if (key == "text_field") {
            fm.text_field = value;
        } else if (key == "id_field") {
            fm.id_field = value;
        } else if (key == "meta_fields") {
            for (auto& f : split(value, ','))
                if (!trim(f).empty()) fm.meta_fields.emplace_back(trim(f));
        } else if (key == "filter") {
            size_t feq = value.find('=');
            if (feq == std::string::npos)
                throw ConfigError(path.string() + ": filter must be key=value");
            fm.filter_key = value.substr(0, feq);
            fm.filter_value = value.substr(feq + 1);
        } else if (key == "dedupe") {
            fm.dedupe_text = (value == "true" || value == "1");
        } else {
            throw ConfigError(path.string() + ": unknown field map key \"" + key + "\"");
        }
    }
    if (fm.text_field.empty())
        throw ConfigError(path.string() + ": field map must set text_field");
    return fm;
}

FieldMap FieldMap::preset(const std::string& name) {
    FieldMap fm;
    if (name == "dolly") {
        fm.text_field = "instruction";
        fm.meta_fields = {"category"};
    } else if (name == "dolly_response") {
        fm.text_field = "response";
        fm.meta_fields = {"category"};
    } else if (name == "no_robots") {
        fm.text_field = "prompt";
        fm.meta_fields = {"category"};
    } else if (name == "personahub") {
        fm.text_field = "synthesized text";
        fm.meta_fields = {"input persona"};
    } else if (name == "personahub_persona") {
        fm.text_field = "persona";
    } else if (name == "tulu3") {
        fm.text_field = "prompt";
    } else if (name == "generic") {
        fm.text_field = "text";
        fm.id_field = "id";
    } else {
        throw ConfigError("unknown field map preset \"" + name + "\"");
    }
    return fm;
}

std::string FieldMap::describe() const {
    std::ostringstream ss;
    ss << "text_field=" << text_field;
    if (!id_field.empty()) ss << " id_field=" << id_field;
    if (!meta_fields.empty()) {
        ss << " meta_fields=";
        for (size_t i = 0; i < meta_fields.size(); ++i)
            ss << (i ? "," : "") << meta_fields[i];
    }
    if (!filter_key.empty()) ss << " filter=" << filter_key << "=" << filter_value;
    if (dedupe_text) ss << " dedupe=true";
    return ss.str();
}

Corpus::Corpus(std::vector<Document> docs, SourceInfo source)
    : docs_(std::move(docs)), source_(std::move(source)) {
    std::set<std::string> seen;
    for (const auto& d : docs_) {
        if (!seen.insert(d.id).second) throw DuplicateIdError(d.id);
        if (trim(d.text).empty()) throw Error("document \"" + d.id + "\" has empty text");
    }
}

const Document* Corpus::find(const std::string& id) const {
    for (const auto& d : docs_)
        if (d.id == id) return &d;
    return nullptr;
}

namespace {

std::string json_as_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_escape(const std::string& s) {
    bool needs_quote = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

} // namespace

void Corpus::export_csv(const std::filesystem::path& path) const {
    std::ostringstream ss;
    ss << "id,text\n";
    for (const auto& d : docs_) ss << csv_escape(d.id) << "," << csv_escape(d.text) << "\n";
    atomic_write_file(path, ss.str());
}

Corpus load_jsonl(const std::filesystem::path& path, const FieldMap& field_map) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());

    std::vector<Document> docs;
    std::set<std::string> seen_texts;
    std::string line;
    size_t line_no = 0; // 0-based, used for synthetic ids
    size_t file_line = 0;
    while (std::getline(in, line)) {
        ++file_line;
        if (trim(line).empty()) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedLineError(file_line, e.what());
        }
        if (!obj.is_object()) throw MalformedLineError(file_line, "line is not a JSON object");

        if (!field_map.filter_key.empty()) {
            auto it = obj.find(field_map.filter_key);
            if (it == obj.end() || json_as_string(*it) != field_map.filter_value) {
                ++line_no;
                continue;
            }
        }

        auto text_it = obj.find(field_map.text_field);
        if (text_it == obj.end())
            throw MissingFieldError(file_line, field_map.text_field);
        std::string text = json_as_string(*text_it);
        if (trim(text).empty())
            throw MissingFieldError(file_line, field_map.text_field + " (empty after trim)");

        if (field_map.dedupe_text && !seen_texts.insert(text).second) {
            ++line_no;
            continue;
        }

        Document doc;
        doc.text = std::move(text);
        if (!field_map.id_field.empty()) {
            auto id_it = obj.find(field_map.id_field);
            if (id_it == obj.end()) throw MissingFieldError(file_line, field_map.id_field);
            doc.id = json_as_string(*id_it);
        } else {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%07zu", line_no);
            doc.id = buf;
        }
        for (const auto& mf : field_map.meta_fields) {
            auto it = obj.find(mf);
            if (it != obj.end()) doc.meta[mf] = json_as_string(*it);
        }
        docs.push_back(std::move(doc));
        ++line_no;
    }

    if (docs.empty()) throw EmptyCorpusError("no documents retained from " + path.string());
    return Corpus(std::move(docs), SourceInfo{path.string(), field_map.describe(), ""});
}

Corpus sample(const Corpus& corpus, size_t k, uint64_t seed) {
    if (k > corpus.size()) throw SampleTooLargeError(k, corpus.size());
    if (k == 0) throw EmptyCorpusError("sample with k=0");
    Rng rng(seed);
    std::vector<size_t> idx = rng.sample_indices(corpus.size(), k);
    std::vector<Document> docs;
    docs.reserve(k);
    for (size_t i : idx) docs.push_back(corpus.at(i));
    SourceInfo src = corpus.source();
    src.note = "sample k=" + std::to_string(k) + " seed=" + std::to_string(seed);
    return Corpus(std::move(docs), std::move(src));
}

} // namespace lexdiv
