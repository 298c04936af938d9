#include "lexdiv/tagger.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "lexdiv/rng.hpp"
#include "lexdiv/util.hpp"

namespace lexdiv {

int tag_index(const std::string& tag) {
    for (size_t i = 0; i < kTagCount; ++i)
        if (tag == kUposTags[i]) return static_cast<int>(i);
    return -1;
}

namespace {

constexpr char kMagic[4] = {'D', 'P', 'T', '1'};

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw ModelFormatError("unexpected end of file");
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    out.write(reinterpret_cast<char*>(b), 4);
}

float read_f32(std::istream& in) {
    uint32_t bits = read_u32(in);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

void write_f32(std::ostream& out, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    write_u32(out, bits);
}

bool all_digits(const std::string& w) {
    if (w.empty()) return false;
    for (char c : w)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace

TaggerModel TaggerModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw ModelFormatError("bad magic in " + path.string());

    TaggerModel model;
    const uint32_t count = read_u32(in);
    model.weights_.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t len = read_u32(in);
        if (len > (1u << 20)) throw ModelFormatError("implausible feature length");
        std::string feature(len, '\0');
        in.read(feature.data(), len);
        if (!in) throw ModelFormatError("truncated feature string");
        Weights w{};
        for (size_t t = 0; t < kTagCount; ++t) w[t] = read_f32(in);
        model.weights_.emplace(std::move(feature), w);
    }
    return model;
}

void TaggerModel::save(const std::filesystem::path& path) const {
    std::ostringstream out(std::ios::binary);
    out.write(kMagic, 4);
    write_u32(out, static_cast<uint32_t>(weights_.size()));
    // Sorted on disk so the file is byte-stable across runs.
    std::map<std::string, const Weights*> sorted;
    for (const auto& [f, w] : weights_) sorted.emplace(f, &w);
    for (const auto& [f, w] : sorted) {
        write_u32(out, static_cast<uint32_t>(f.size()));
        out.write(f.data(), static_cast<std::streamsize>(f.size()));
        for (size_t t = 0; t < kTagCount; ++t) write_f32(out, (*w)[t]);
    }
    atomic_write_file(path, out.str());
}

std::vector<std::string> TaggerModel::features(const std::vector<std::string>& tokens, size_t i,
                                               const std::string& prev_tag) {
    const std::string& raw = tokens[i];
    const std::string w = lower_ascii(raw);
    std::vector<std::string> feats;
    feats.reserve(16);
    feats.emplace_back("b");
    feats.emplace_back("w=" + w);
    for (size_t k = 1; k <= 3 && k <= w.size(); ++k) {
        feats.emplace_back("suf" + std::to_string(k) + "=" + w.substr(w.size() - k));
        feats.emplace_back("pre" + std::to_string(k) + "=" + w.substr(0, k));
    }
    if (!raw.empty() && raw[0] >= 'A' && raw[0] <= 'Z') feats.emplace_back("cap");
    if (raw.size() > 1) {
        bool allcap = true;
        for (char c : raw)
            if (c < 'A' || c > 'Z') { allcap = false; break; }
        if (allcap) feats.emplace_back("allcap");
    }
    if (all_digits(w)) feats.emplace_back("num");
    if (w.find_first_of("0123456789") != std::string::npos) feats.emplace_back("hasdig");
    if (w.find('-') != std::string::npos) feats.emplace_back("hashyp");
    feats.emplace_back("pw=" + (i > 0 ? lower_ascii(tokens[i - 1]) : std::string("<s>")));
    feats.emplace_back("nw=" + (i + 1 < tokens.size() ? lower_ascii(tokens[i + 1]) : std::string("</s>")));
    feats.emplace_back("pt=" + prev_tag);
    feats.emplace_back("ptw=" + prev_tag + "|" + w);
    return feats;
}

std::vector<std::string> TaggerModel::tag(const std::vector<std::string>& tokens) const {
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    std::string prev_tag = "<s>";
    for (size_t i = 0; i < tokens.size(); ++i) {
        std::array<double, kTagCount> scores{};
        for (const auto& f : features(tokens, i, prev_tag)) {
            auto it = weights_.find(f);
            if (it == weights_.end()) continue;
            for (size_t t = 0; t < kTagCount; ++t) scores[t] += it->second[t];
        }
        size_t best = 0;
        for (size_t t = 1; t < kTagCount; ++t)
            if (scores[t] > scores[best]) best = t;
        prev_tag = kUposTags[best];
        tags.push_back(prev_tag);
    }
    return tags;
}

std::vector<TaggedSentence> read_tagged_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tagged file: " + path.string());
    std::vector<TaggedSentence> sents;
    TaggedSentence current;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            if (!current.empty()) sents.push_back(std::move(current));
            current.clear();
            continue;
        }
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected token TAB tag");
        TaggedToken tt{line.substr(0, tab), std::string(trim(line.substr(tab + 1)))};
        if (tag_index(tt.tag) < 0)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": unknown tag \"" + tt.tag + "\"");
        current.push_back(std::move(tt));
    }
    if (!current.empty()) sents.push_back(std::move(current));
    return sents;
}

void write_tagged_file(const std::filesystem::path& path, const std::vector<TaggedSentence>& sents) {
    std::ostringstream out;
    for (const auto& s : sents) {
        for (const auto& tt : s) out << tt.token << '\t' << tt.tag << '\n';
        out << '\n';
    }
    atomic_write_file(path, out.str());
}

TaggerModel train_tagger(const std::vector<TaggedSentence>& gold, int epochs, uint64_t seed) {
    struct Accum {
        std::array<double, kTagCount> w{};
        std::array<double, kTagCount> total{};
        std::array<uint64_t, kTagCount> stamp{};
    };
    std::unordered_map<std::string, Accum> acc;
    uint64_t updates = 1;

    auto bump = [&](const std::string& f, size_t t, double delta) {
        Accum& a = acc[f];
        a.total[t] += static_cast<double>(updates - a.stamp[t]) * a.w[t];
        a.stamp[t] = updates;
        a.w[t] += delta;
    };

    std::vector<size_t> order(gold.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t si : order) {
            const TaggedSentence& sent = gold[si];
            std::vector<std::string> tokens;
            tokens.reserve(sent.size());
            for (const auto& tt : sent) tokens.push_back(tt.token);

            std::string prev_tag = "<s>";
            for (size_t i = 0; i < sent.size(); ++i) {
                auto feats = TaggerModel::features(tokens, i, prev_tag);
                std::array<double, kTagCount> scores{};
                for (const auto& f : feats) {
                    auto it = acc.find(f);
                    if (it == acc.end()) continue;
                    for (size_t t = 0; t < kTagCount; ++t) scores[t] += it->second.w[t];
                }
                size_t guess = 0;
                for (size_t t = 1; t < kTagCount; ++t)
                    if (scores[t] > scores[guess]) guess = t;
                const int gold_idx = tag_index(sent[i].tag);
                if (static_cast<int>(guess) != gold_idx) {
                    for (const auto& f : feats) {
                        bump(f, static_cast<size_t>(gold_idx), 1.0);
                        bump(f, guess, -1.0);
                    }
                }
                ++updates;
                // Condition on the gold history during training; greedy
                // decoding at test time then sees mostly-correct contexts.
                prev_tag = sent[i].tag;
            }
        }
    }

    TaggerModel model;
    for (auto& [f, a] : acc) {
        TaggerModel::Weights w{};
        bool nonzero = false;
        for (size_t t = 0; t < kTagCount; ++t) {
            const double total = a.total[t] + static_cast<double>(updates - a.stamp[t]) * a.w[t];
            const double avg = total / static_cast<double>(updates);
            w[t] = static_cast<float>(avg);
            if (w[t] != 0.0f) nonzero = true;
        }
        if (nonzero) model.weights().emplace(f, w);
    }
    return model;
}

} // namespace lexdiv
