#include "lexdiv/genclient.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lexdiv/util.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace lexdiv {

using nlohmann::json;

std::string request_hash(const PromptInstance& instance, const GenerationParams& params) {
    return sha256_hex({params.model, instance.rendered_text, format_double(params.temperature, 6),
                       std::to_string(params.max_new_tokens), std::to_string(params.sample_index)});
}

namespace {

struct ParsedUrl {
    std::string host_port;
    std::string path;
};

ParsedUrl parse_base_url(const std::string& url) {
    const size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("generation base_url must include scheme: " + url);
    const size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

std::string bearer_token(const GenEndpoint& endpoint) {
    if (endpoint.auth_env.empty()) return "";
    const char* tok = std::getenv(endpoint.auth_env.c_str());
    return tok ? tok : "";
}

std::string call_chat_completions(const PromptInstance& instance, const GenerationParams& params,
                                  const GenEndpoint& endpoint) {
    if (endpoint.base_url.empty()) throw ConfigError("generation endpoint not configured");
    const ParsedUrl url = parse_base_url(endpoint.base_url);

    json body;
    body["model"] = params.model;
    body["messages"] = json::array({json{{"role", "user"}, {"content", instance.rendered_text}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_new_tokens;
    const std::string payload = body.dump();
    const std::string token = bearer_token(endpoint);

    int attempt = 0;
    while (true) {
        httplib::Client client(url.host_port);
        client.set_connection_timeout(params.timeout_ms / 1000, (params.timeout_ms % 1000) * 1000);
        client.set_read_timeout(params.timeout_ms / 1000, (params.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

        auto res = client.Post(url.path + "/chat/completions", headers, payload, "application/json");
        ++attempt;

        if (res && res->status == 200) {
            json parsed;
            try {
                parsed = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw TransportError(std::string("bad completion JSON: ") + e.what());
            }
            std::string text;
            try {
                text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception&) {
                throw TransportError("completion response missing choices[0].message.content");
            }
            if (trim(text).empty()) throw EmptyCompletionError(instance.prompt_id);
            return text;
        }

        if (res && (res->status == 401 || res->status == 403)) throw AuthError(res->status);

        const bool retryable = (!res) || res->status == 429 || res->status >= 500;
        if (!retryable)
            throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200));
        if (attempt >= params.retry.max_attempts) {
            if (res && res->status == 429) throw RateLimitedError(attempt);
            throw TransportError(res ? "HTTP " + std::to_string(res->status)
                                     : httplib::to_string(res.error()));
        }
        const int sleep_ms = params.retry.backoff_base_ms * (1 << (attempt - 1));
        std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    }
}

} // namespace

std::string generate(const PromptInstance& instance, const GenerationParams& params,
                     const GenEndpoint& endpoint) {
    std::filesystem::path cache_file;
    if (!endpoint.cache_dir.empty()) {
        std::filesystem::create_directories(endpoint.cache_dir);
        cache_file = std::filesystem::path(endpoint.cache_dir) /
                     (request_hash(instance, params) + ".txt");
        std::ifstream in(cache_file, std::ios::binary);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    }
    const std::string text = call_chat_completions(instance, params, endpoint);
    if (!cache_file.empty()) atomic_write_file(cache_file, text);
    return text;
}

std::string ResponseRecord::key() const {
    std::string k = prompt_id;
    k.push_back('\x1f');
    k += persona_id;
    k.push_back('\x1f');
    k += condition;
    k.push_back('\x1f');
    k += shuffle_index ? std::to_string(*shuffle_index) : std::string("-");
    k.push_back('\x1f');
    k += model;
    return k;
}

void ResponseSet::insert(ResponseRecord record) {
    const std::string k = record.key();
    auto [it, inserted] = records_.emplace(k, std::move(record));
    if (!inserted) throw Error("duplicate response record key: " + it->second.prompt_id + "/" +
                               it->second.condition);
}

const ResponseRecord* ResponseSet::find(const std::string& key) const {
    auto it = records_.find(key);
    return it == records_.end() ? nullptr : &it->second;
}

std::vector<const ResponseRecord*> ResponseSet::sorted() const {
    std::vector<const ResponseRecord*> out;
    out.reserve(records_.size());
    for (const auto& [_, r] : records_) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const ResponseRecord* a, const ResponseRecord* b) {
        if (a->condition != b->condition) return a->condition < b->condition;
        const size_t sa = a->shuffle_index.value_or(0), sb = b->shuffle_index.value_or(0);
        if (sa != sb) return sa < sb;
        return a->prompt_id < b->prompt_id;
    });
    return out;
}

void ResponseSet::save_shards(const std::filesystem::path& dir, size_t max_per_shard) const {
    std::filesystem::create_directories(dir);
    const auto records = sorted();
    size_t shard_no = 0;
    for (size_t start = 0; start < records.size() || shard_no == 0; start += max_per_shard) {
        std::ostringstream out;
        const size_t end = std::min(records.size(), start + max_per_shard);
        for (size_t i = start; i < end; ++i) {
            const ResponseRecord& r = *records[i];
            json line;
            line["prompt_id"] = r.prompt_id;
            if (!r.persona_id.empty()) line["persona_id"] = r.persona_id;
            line["condition"] = r.condition;
            if (r.shuffle_index) line["shuffle_index"] = *r.shuffle_index;
            line["response"] = r.response;
            line["model"] = r.model;
            line["request_hash"] = r.request_hash;
            out << line.dump() << '\n';
        }
        char name[32];
        std::snprintf(name, sizeof(name), "responses-%04zu.jsonl", shard_no);
        atomic_write_file(dir / name, out.str());
        ++shard_no;
        if (records.empty()) break;
    }
}

ResponseSet ResponseSet::load_shards(const std::filesystem::path& dir) {
    ResponseSet set;
    if (!std::filesystem::exists(dir)) return set;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("responses-", 0) == 0 && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::parse_error& e) {
                throw IoError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            ResponseRecord r;
            r.prompt_id = obj.at("prompt_id").get<std::string>();
            r.persona_id = obj.value("persona_id", "");
            r.condition = obj.at("condition").get<std::string>();
            if (obj.contains("shuffle_index")) r.shuffle_index = obj["shuffle_index"].get<size_t>();
            r.response = obj.at("response").get<std::string>();
            r.model = obj.at("model").get<std::string>();
            r.request_hash = obj.at("request_hash").get<std::string>();
            set.insert(std::move(r));
        }
    }
    return set;
}

Corpus ResponseSet::corpus_for(const Condition& condition, std::optional<size_t> shuffle_index) const {
    std::vector<Document> docs;
    for (const ResponseRecord* r : sorted()) {
        if (r->condition != condition.key()) continue;
        if (r->shuffle_index != shuffle_index) continue;
        Document d;
        d.id = r->prompt_id;
        d.text = r->response;
        d.meta["condition"] = r->condition;
        if (!r->persona_id.empty()) d.meta["persona_id"] = r->persona_id;
        docs.push_back(std::move(d));
    }
    SourceInfo src;
    src.path = "responses";
    src.note = condition.key() + (shuffle_index ? "/shuffle=" + std::to_string(*shuffle_index) : "");
    return Corpus(std::move(docs), std::move(src));
}

std::vector<std::pair<PromptInstance, std::optional<size_t>>> plan_instances(const BatchRequest& request) {
    if (!request.prompts) throw ConfigError("run_batch: prompts missing");
    std::vector<std::pair<PromptInstance, std::optional<size_t>>> out;

    std::map<std::string, const PersonaRecord*> personas_by_id;
    if (request.personas)
        for (const auto& p : *request.personas) personas_by_id[p.id] = &p;

    auto cutoff_for = [&](const std::string& prompt_id) -> int {
        auto it = request.cutoffs.find(prompt_id);
        if (it == request.cutoffs.end())
            throw ConfigError("no cutoff recorded for prompt " + prompt_id);
        return it->second;
    };

    for (const Condition& cond : request.conditions) {
        if (!cond.needs_persona()) {
            for (const auto& prompt : request.prompts->docs()) {
                std::optional<int> cut;
                if (cond.cutoff) cut = cutoff_for(prompt.id);
                out.emplace_back(render_prompt(cond, prompt, nullptr, cut), std::nullopt);
            }
            continue;
        }
        for (const PairingPlan& plan : request.plans) {
            for (const auto& prompt : request.prompts->docs()) {
                auto ait = plan.assignment.find(prompt.id);
                if (ait == plan.assignment.end())
                    throw ConfigError("plan " + std::to_string(plan.shuffle_index) +
                                      " does not cover prompt " + prompt.id);
                auto pit = personas_by_id.find(ait->second);
                if (pit == personas_by_id.end())
                    throw ConfigError("unknown persona id " + ait->second);
                std::optional<int> cut;
                if (cond.cutoff) cut = cutoff_for(prompt.id);
                out.emplace_back(render_prompt(cond, prompt, pit->second, cut), plan.shuffle_index);
            }
        }
    }
    return out;
}

BatchOutcome run_batch(const BatchRequest& request, const ResponseSet& existing) {
    const auto instances = plan_instances(request);

    BatchOutcome outcome;
    outcome.expected = instances.size();

    struct Job {
        const PromptInstance* instance;
        std::optional<size_t> shuffle_index;
        std::string hash;
    };
    std::vector<Job> jobs;
    for (const auto& [instance, shuffle_index] : instances) {
        ResponseRecord probe;
        probe.prompt_id = instance.prompt_id;
        probe.persona_id = instance.persona_id;
        probe.condition = instance.condition.key();
        probe.shuffle_index = shuffle_index;
        probe.model = request.params.model;
        const std::string hash = request_hash(instance, request.params);

        if (const ResponseRecord* prior = existing.find(probe.key())) {
            if (prior->request_hash != hash)
                throw Error("existing record for " + instance.prompt_id + "/" +
                            instance.condition.key() +
                            " was produced by a different request (hash mismatch); "
                            "refusing to mix configurations");
            outcome.responses.insert(*prior);
            ++outcome.reused;
            continue;
        }
        jobs.push_back({&instance, shuffle_index, hash});
    }

    std::mutex mu;
    size_t next = 0;
    std::vector<ResponseRecord> produced;
    std::vector<std::string> failed;
    auto worker = [&] {
        while (true) {
            size_t j;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= jobs.size()) return;
                j = next++;
            }
            const Job& job = jobs[j];
            ResponseRecord r;
            r.prompt_id = job.instance->prompt_id;
            r.persona_id = job.instance->persona_id;
            r.condition = job.instance->condition.key();
            r.shuffle_index = job.shuffle_index;
            r.model = request.params.model;
            r.request_hash = job.hash;
            try {
                r.response = generate(*job.instance, request.params, request.endpoint);
                std::lock_guard<std::mutex> lock(mu);
                produced.push_back(std::move(r));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                failed.push_back(r.key() + " : " + e.what());
            }
        }
    };
    const size_t workers = std::max<size_t>(1, std::min(request.max_in_flight, jobs.size()));
    std::vector<std::thread> threads;
    for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    for (auto& r : produced) outcome.responses.insert(std::move(r));
    outcome.generated = produced.size();
    outcome.failed_keys = std::move(failed);
    std::sort(outcome.failed_keys.begin(), outcome.failed_keys.end());
    return outcome;
}

} // namespace lexdiv
