#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/errors.hpp"

namespace lexdiv {

class DimensionMismatchError : public Error {
public:
    DimensionMismatchError(size_t a, size_t b)
        : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ZeroVectorError : public Error {
public:
    ZeroVectorError() : Error("cosine of a zero vector") {}
};

class EmptyTextError : public Error {
public:
    EmptyTextError() : Error("text has no tokens to embed") {}
};

class BackendUnavailableError : public Error {
public:
    explicit BackendUnavailableError(const std::string& msg)
        : Error("embedding backend unavailable: " + msg) {}
};

class BackendProtocolError : public Error {
public:
    BackendProtocolError(int status, const std::string& excerpt)
        : Error("embedding backend error: status " + std::to_string(status) + ": " + excerpt),
          status(status) {}
    int status;
};

// Per-token vectors for one document, row-major.
struct EmbeddingMatrix {
    std::string doc_id;
    size_t dimension = 0;
    std::vector<std::vector<float>> rows;

    size_t row_count() const { return rows.size(); }
};

double cosine(const std::vector<float>& u, const std::vector<float>& v);

// Greedy-matching BERTScore: precision is the mean over rows of a of the
// best cosine against rows of b, recall the mirror image, F1 their harmonic
// mean (0 when P+R is 0). No IDF weighting, no baseline rescaling.
double bertscore_f1(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

struct EmbedConfig {
    std::string kind = "mock";   // mock | http
    // mock
    size_t dimension = 64;
    uint64_t hash_seed = 0;
    // http
    std::string url;             // full endpoint, e.g. http://host:1234/v1/embeddings
    std::string model = "Linq-AI-Research/Linq-Embed-Mistral";
    std::string auth_env;        // env var holding the bearer token, may be empty
    size_t batch_size = 32;
    size_t max_in_flight = 8;
    int timeout_ms = 30000;
    std::string cache_dir;       // empty disables the on-disk cache
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;

    // One vector per token of the text (library tokenization).
    virtual EmbeddingMatrix embed_tokens(const std::string& text) = 0;
    // A single document-level vector.
    virtual std::vector<float> embed_document(const std::string& text) = 0;

    virtual std::string id() const = 0;
};

// Deterministic offline backend: each token vector is derived from a 64-bit
// hash of (token, position bucket, seed) and L2-normalized; document vectors
// are the renormalized mean of token vectors. Pure in (text, dim, seed).
std::unique_ptr<EmbeddingBackend> make_mock_backend(size_t dimension, uint64_t hash_seed);

// OpenAI-compatible embeddings endpoint: POST {"model", "input": [texts]} ->
// {"data": [{"embedding": [...]}]}. Batched, bounded concurrency, optional
// on-disk cache keyed by SHA-256(model, text).
std::unique_ptr<EmbeddingBackend> make_http_backend(const EmbedConfig& config);

std::unique_ptr<EmbeddingBackend> make_backend(const EmbedConfig& config);

// Embedding cache files: 16-byte header (magic "DEMB", u32 dimension, u64
// reserved), then dimension little-endian f32 values.
void write_embedding_cache(const std::filesystem::path& path, const std::vector<float>& vec);
std::optional<std::vector<float>> read_embedding_cache(const std::filesystem::path& path);

} // namespace lexdiv
