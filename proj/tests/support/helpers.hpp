#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lexdiv/corpus.hpp"

namespace testsupport {

// Scratch directory removed on destruction.
class TmpDir {
public:
    explicit TmpDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lexdiv-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// Small word pool for random fixtures; mt19937_64 here is intentionally a
// different generator family than the library PRNG.
inline std::vector<std::string> random_tokens(std::mt19937_64& rng, size_t count, size_t vocab = 40) {
    static const std::vector<std::string> pool = {
        "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india",
        "juliet", "kilo", "lima", "mike", "november", "oscar", "papa", "quebec", "romeo",
        "sierra", "tango", "uniform", "victor", "whiskey", "xray", "yankee", "zulu", "amber",
        "birch", "cedar", "dune", "ember", "fjord", "grove", "harbor", "isle", "jade", "knoll",
        "lagoon", "mesa", "nook"};
    std::vector<std::string> out;
    out.reserve(count);
    std::uniform_int_distribution<size_t> pick(0, std::min(vocab, pool.size()) - 1);
    for (size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
    return out;
}

inline std::string join(const std::vector<std::string>& tokens, const std::string& sep = " ") {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

// Corpus built directly from texts, ids 0000000, 0000001, ...
inline lexdiv::Corpus make_corpus(const std::vector<std::string>& texts) {
    std::vector<lexdiv::Document> docs;
    for (size_t i = 0; i < texts.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "%07zu", i);
        docs.push_back({id, texts[i], {}});
    }
    return lexdiv::Corpus(std::move(docs), lexdiv::SourceInfo{"memory", "", ""});
}

inline lexdiv::Corpus random_corpus(std::mt19937_64& rng, size_t max_docs, size_t max_tokens,
                                    size_t vocab = 40) {
    std::uniform_int_distribution<size_t> ndocs(2, max_docs);
    std::uniform_int_distribution<size_t> ntok(1, max_tokens);
    std::vector<std::string> texts;
    const size_t n = ndocs(rng);
    for (size_t d = 0; d < n; ++d) texts.push_back(join(random_tokens(rng, ntok(rng), vocab)));
    return make_corpus(texts);
}

} // namespace testsupport
