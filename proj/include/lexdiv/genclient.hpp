#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/corpus.hpp"
#include "lexdiv/errors.hpp"
#include "lexdiv/persona.hpp"

namespace lexdiv {

class AuthError : public Error {
public:
    explicit AuthError(int status) : Error("authorization failed: HTTP " + std::to_string(status)) {}
};

class RateLimitedError : public Error {
public:
    explicit RateLimitedError(int attempts)
        : Error("rate limited after " + std::to_string(attempts) + " attempts") {}
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& msg) : Error("transport: " + msg) {}
};

class EmptyCompletionError : public Error {
public:
    explicit EmptyCompletionError(const std::string& prompt_id)
        : Error("empty completion for prompt " + prompt_id) {}
};

class IncompleteResponseSetError : public Error {
public:
    explicit IncompleteResponseSetError(const std::string& msg)
        : Error("incomplete response set: " + msg) {}
};

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_base_ms = 500; // attempt k sleeps base * 2^k
};

struct GenerationParams {
    std::string model;
    double temperature = 1.0;
    int max_new_tokens = 1024;
    int timeout_ms = 120000;
    RetryPolicy retry;
    uint64_t sample_index = 0; // part of the cache key; multiple samples never collide
};

struct GenEndpoint {
    std::string base_url; // e.g. http://127.0.0.1:8089/v1
    std::string auth_env; // env var carrying the bearer token; may be empty
    std::string cache_dir;
};

// Cache key for one request; also the record's request hash.
std::string request_hash(const PromptInstance& instance, const GenerationParams& params);

// One completion, cache-first. On a cache hit no network is touched.
std::string generate(const PromptInstance& instance, const GenerationParams& params,
                     const GenEndpoint& endpoint);

struct ResponseRecord {
    std::string prompt_id;
    std::string persona_id;            // empty for NP
    std::string condition;             // condition key, e.g. "fp-cu"
    std::optional<size_t> shuffle_index;
    std::string response;
    std::string model;
    std::string request_hash;

    // (prompt_id, persona_id, condition, shuffle_index, model)
    std::string key() const;
};

class ResponseSet {
public:
    void insert(ResponseRecord record);
    const ResponseRecord* find(const std::string& key) const;
    size_t size() const { return records_.size(); }

    // Records in canonical order (condition, shuffle_index, prompt_id).
    std::vector<const ResponseRecord*> sorted() const;

    // JSONL shards of at most max_per_shard records, canonical order,
    // named responses-NNNN.jsonl.
    void save_shards(const std::filesystem::path& dir, size_t max_per_shard = 10000) const;
    static ResponseSet load_shards(const std::filesystem::path& dir);

    // Responses for one (condition, shuffle) as a Corpus (doc id = prompt_id).
    Corpus corpus_for(const Condition& condition, std::optional<size_t> shuffle_index) const;

private:
    std::map<std::string, ResponseRecord> records_;
};

struct BatchRequest {
    std::vector<PairingPlan> plans;
    const Corpus* prompts = nullptr;
    const std::vector<PersonaRecord>* personas = nullptr;
    std::vector<Condition> conditions;
    std::map<std::string, int> cutoffs; // prompt_id -> words, required for +cu
    GenerationParams params;
    GenEndpoint endpoint;
    size_t max_in_flight = 4;
};

struct BatchOutcome {
    ResponseSet responses;
    std::vector<std::string> failed_keys; // never silently dropped
    size_t expected = 0;
    size_t generated = 0;
    size_t reused = 0;
};

// Every (plan, prompt, condition) pairing; NP conditions ignore plans. An
// existing ResponseSet (from loaded shards) is reused and only missing
// records are generated, so interrupted runs resume cleanly.
BatchOutcome run_batch(const BatchRequest& request, const ResponseSet& existing);

// The instances a batch implies, in canonical order; shared by run_batch and
// completeness checks.
std::vector<std::pair<PromptInstance, std::optional<size_t>>> plan_instances(const BatchRequest& request);

} // namespace lexdiv
