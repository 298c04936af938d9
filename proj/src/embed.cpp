#include "lexdiv/embed.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "lexdiv/rng.hpp"
#include "lexdiv/textproc.hpp"
#include "lexdiv/util.hpp"

// httplib is pulled in only here; keep it out of the public headers.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace lexdiv {

using nlohmann::json;

double cosine(const std::vector<float>& u, const std::vector<float>& v) {
    if (u.size() != v.size()) throw DimensionMismatchError(u.size(), v.size());
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<double>(u[i]) * v[i];
        nu += static_cast<double>(u[i]) * u[i];
        nv += static_cast<double>(v[i]) * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ZeroVectorError();
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double bertscore_f1(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    if (a.rows.empty() || b.rows.empty()) throw EmptyTextError();
    if (a.dimension != b.dimension) throw DimensionMismatchError(a.dimension, b.dimension);

    auto best_mean = [](const EmbeddingMatrix& from, const EmbeddingMatrix& to) {
        double sum = 0.0;
        for (const auto& row : from.rows) {
            double best = -1.0;
            for (const auto& other : to.rows) best = std::max(best, cosine(row, other));
            sum += best;
        }
        return sum / static_cast<double>(from.rows.size());
    };

    const double precision = best_mean(a, b);
    const double recall = best_mean(b, a);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

void l2_normalize(std::vector<float>& v) {
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0f; // hash collision to the zero vector is astronomically unlikely
        return;
    }
    for (float& x : v) x = static_cast<float>(x / norm);
}

class MockBackend final : public EmbeddingBackend {
public:
    MockBackend(size_t dimension, uint64_t hash_seed) : dim_(dimension), seed_(hash_seed) {}

    EmbeddingMatrix embed_tokens(const std::string& text) override {
        const auto tokens = tokenize(text);
        if (tokens.empty()) throw EmptyTextError();
        EmbeddingMatrix m;
        m.dimension = dim_;
        m.rows.reserve(tokens.size());
        for (size_t i = 0; i < tokens.size(); ++i) m.rows.push_back(token_vector(tokens[i], i / 8));
        return m;
    }

    std::vector<float> embed_document(const std::string& text) override {
        const EmbeddingMatrix m = embed_tokens(text);
        std::vector<float> mean(dim_, 0.0f);
        for (const auto& row : m.rows)
            for (size_t d = 0; d < dim_; ++d) mean[d] += row[d];
        for (float& x : mean) x /= static_cast<float>(m.rows.size());
        l2_normalize(mean);
        return mean;
    }

    std::string id() const override {
        return "mock dim=" + std::to_string(dim_) + " seed=" + std::to_string(seed_);
    }

private:
    std::vector<float> token_vector(const std::string& token, size_t bucket) const {
        // One hash per component, chained from (token, bucket, seed), mapped
        // to [-1, 1) and normalized.
        uint64_t h = fnv1a64(token, seed_ ^ 0xCBF29CE484222325ULL);
        h ^= scramble64(bucket + 1);
        std::vector<float> v(dim_);
        for (size_t d = 0; d < dim_; ++d) {
            h = scramble64(h + d + 1);
            const double unit = static_cast<double>(h >> 11) * 0x1.0p-53; // [0,1)
            v[d] = static_cast<float>(2.0 * unit - 1.0);
        }
        l2_normalize(v);
        return v;
    }

    size_t dim_;
    uint64_t seed_;
};

struct ParsedUrl {
    std::string host_port; // scheme://host:port
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("embedding url must include scheme: " + url);
    const size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpBackend final : public EmbeddingBackend {
public:
    explicit HttpBackend(EmbedConfig config) : config_(std::move(config)) {
        if (config_.url.empty()) throw ConfigError("http embedding backend requires embed.url");
        if (!config_.auth_env.empty()) {
            const char* tok = std::getenv(config_.auth_env.c_str());
            if (tok) token_ = tok;
        }
        if (!config_.cache_dir.empty())
            std::filesystem::create_directories(config_.cache_dir);
    }

    EmbeddingMatrix embed_tokens(const std::string& text) override {
        const auto tokens = tokenize(text);
        if (tokens.empty()) throw EmptyTextError();
        EmbeddingMatrix m;
        m.rows = embed_texts(tokens);
        m.dimension = m.rows.empty() ? 0 : m.rows.front().size();
        return m;
    }

    std::vector<float> embed_document(const std::string& text) override {
        if (tokenize(text).empty()) throw EmptyTextError();
        return embed_texts({text}).front();
    }

    std::string id() const override { return "http model=" + config_.model + " url=" + config_.url; }

private:
    std::filesystem::path cache_path(const std::string& text) const {
        const std::string key = sha256_hex({config_.model, text});
        return std::filesystem::path(config_.cache_dir) / (key + ".demb");
    }

    // Resolve every input, from cache where possible, over HTTP in batches
    // otherwise. Order of results matches order of inputs.
    std::vector<std::vector<float>> embed_texts(const std::vector<std::string>& texts) {
        std::vector<std::vector<float>> out(texts.size());
        std::vector<size_t> missing;
        for (size_t i = 0; i < texts.size(); ++i) {
            if (!config_.cache_dir.empty()) {
                if (auto cached = read_embedding_cache(cache_path(texts[i]))) {
                    out[i] = std::move(*cached);
                    continue;
                }
            }
            missing.push_back(i);
        }
        if (missing.empty()) return out;

        // Batch the misses, then run batches on a bounded set of workers.
        std::vector<std::vector<size_t>> batches;
        for (size_t start = 0; start < missing.size(); start += config_.batch_size) {
            const size_t end = std::min(missing.size(), start + config_.batch_size);
            batches.emplace_back(missing.begin() + static_cast<long>(start),
                                 missing.begin() + static_cast<long>(end));
        }

        std::mutex mu;
        std::exception_ptr first_error;
        size_t next_batch = 0;
        auto worker = [&] {
            while (true) {
                size_t b;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (first_error || next_batch >= batches.size()) return;
                    b = next_batch++;
                }
                try {
                    run_batch(texts, batches[b], out);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        const size_t workers = std::min(config_.max_in_flight, batches.size());
        std::vector<std::thread> threads;
        for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
        return out;
    }

    void run_batch(const std::vector<std::string>& texts, const std::vector<size_t>& idx,
                   std::vector<std::vector<float>>& out) {
        json body;
        body["model"] = config_.model;
        json input = json::array();
        for (size_t i : idx) input.push_back(texts[i]);
        body["input"] = std::move(input);

        const ParsedUrl url = parse_url(config_.url);
        httplib::Client client(url.host_port);
        client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        if (!res) throw BackendUnavailableError(httplib::to_string(res.error()));
        if (res->status != 200)
            throw BackendProtocolError(res->status, res->body.substr(0, 200));

        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw BackendProtocolError(res->status, std::string("bad JSON: ") + e.what());
        }
        if (!parsed.contains("data") || !parsed["data"].is_array() ||
            parsed["data"].size() != idx.size())
            throw BackendProtocolError(res->status, "response data shape mismatch");

        for (size_t k = 0; k < idx.size(); ++k) {
            const json& item = parsed["data"][k];
            if (!item.contains("embedding") || !item["embedding"].is_array())
                throw BackendProtocolError(res->status, "missing embedding array");
            std::vector<float> vec;
            vec.reserve(item["embedding"].size());
            for (const auto& x : item["embedding"]) vec.push_back(x.get<float>());
            if (!config_.cache_dir.empty()) write_embedding_cache(cache_path(texts[idx[k]]), vec);
            out[idx[k]] = std::move(vec);
        }
    }

    EmbedConfig config_;
    std::string token_;
};

} // namespace

std::unique_ptr<EmbeddingBackend> make_mock_backend(size_t dimension, uint64_t hash_seed) {
    return std::make_unique<MockBackend>(dimension, hash_seed);
}

std::unique_ptr<EmbeddingBackend> make_http_backend(const EmbedConfig& config) {
    return std::make_unique<HttpBackend>(config);
}

std::unique_ptr<EmbeddingBackend> make_backend(const EmbedConfig& config) {
    if (config.kind == "mock") return make_mock_backend(config.dimension, config.hash_seed);
    if (config.kind == "http") return make_http_backend(config);
    throw ConfigError("unknown embedding backend kind \"" + config.kind + "\"");
}

void write_embedding_cache(const std::filesystem::path& path, const std::vector<float>& vec) {
    std::string blob;
    blob.reserve(16 + vec.size() * 4);
    blob += "DEMB";
    const uint32_t dim = static_cast<uint32_t>(vec.size());
    for (int i = 0; i < 4; ++i) blob.push_back(static_cast<char>((dim >> (8 * i)) & 0xFF));
    blob.append(8, '\0');
    for (float f : vec) {
        uint32_t bits;
        std::memcpy(&bits, &f, 4);
        for (int i = 0; i < 4; ++i) blob.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
    atomic_write_file(path, blob);
}

std::optional<std::vector<float>> read_embedding_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (blob.size() < 16 || blob.compare(0, 4, "DEMB") != 0) return std::nullopt;
    uint32_t dim = 0;
    for (int i = 0; i < 4; ++i) dim |= static_cast<uint32_t>(static_cast<unsigned char>(blob[4 + i])) << (8 * i);
    if (blob.size() != 16 + static_cast<size_t>(dim) * 4) return std::nullopt;
    std::vector<float> vec(dim);
    for (uint32_t d = 0; d < dim; ++d) {
        uint32_t bits = 0;
        for (int i = 0; i < 4; ++i)
            bits |= static_cast<uint32_t>(static_cast<unsigned char>(blob[16 + d * 4 + i])) << (8 * i);
        std::memcpy(&vec[d], &bits, 4);
    }
    return vec;
}

} // namespace lexdiv
