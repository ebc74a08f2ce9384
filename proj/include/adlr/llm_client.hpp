#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "adlr/types.hpp"

namespace adlr {

struct ChatMessage {
    std::string role;  // "system" or "user"
    std::string content;
};

// One chat answer plus how it was obtained. Latency is the observed wall
// time in seconds; mock and cache-hit answers take exactly 0.0 so offline
// runs stay reproducible byte for byte.
struct LLMResponse {
    std::string content;
    double latency = 0.0;
    bool from_cache = false;
};

// Connection and sampling parameters for a chat-completion endpoint.
struct LLMConfig {
    std::string endpoint_url;  // base URL, e.g. "https://api.openai.com/v1"
    std::string model = "gpt-3.5-turbo-0125";
    std::string embedding_model = "text-embedding-3-small";
    double temperature = 0.0;
    int timeout_seconds = 60;
    int max_retries = 3;  // extra attempts after the first, on 429/5xx/connect errors
    int parallelism = 1;  // concurrent in-flight requests the pipeline may use
};

// Hex SHA-256 over kind, model, temperature and prompt; the identity of one
// request in replay files.
std::string cache_key(const std::string& kind, const std::string& model, double temperature,
                      const std::string& prompt);

// Canonical one-string form of a conversation, used to key chat requests.
std::string serialize_messages(const std::vector<ChatMessage>& messages);

std::string sha256_hex(const std::string& data);

// Abstract completion + embedding provider. Implementations must be safe to
// call from multiple threads.
class Client {
public:
    virtual ~Client() = default;
    virtual LLMResponse complete(const std::vector<ChatMessage>& messages) = 0;
    virtual Embedding embed(const std::string& text) = 0;
};

// Talks to an OpenAI-style HTTP endpoint (/chat/completions, /embeddings).
// Retries with exponential backoff on 429, 5xx and connection errors. The
// API key is read from ADLR_API_KEY, falling back to OPENAI_API_KEY.
class HttpClient : public Client {
public:
    explicit HttpClient(LLMConfig config);
    LLMResponse complete(const std::vector<ChatMessage>& messages) override;
    Embedding embed(const std::string& text) override;

private:
    std::string post_json(const std::string& path, const std::string& body);

    LLMConfig config_;
    std::string base_url_;
    std::string path_prefix_;
    std::string api_key_;
};

// Offline stand-in: responses come from a map keyed by the hex SHA-256 of
// the last user message, with "*" as the catch-all; embeddings come from
// the built-in local embedder.
class MockClient : public Client {
public:
    explicit MockClient(std::map<std::string, std::string> responses);
    static MockClient from_json_file(const std::string& path);

    LLMResponse complete(const std::vector<ChatMessage>& messages) override;
    Embedding embed(const std::string& text) override;

private:
    std::map<std::string, std::string> responses_;
};

// Recorded responses, persisted as one JSON object per line:
//   {"key": ..., "kind": "chat", "content": ..., "recorded_at": ...}
//   {"key": ..., "kind": "embedding", "vector": [...], "recorded_at": ...}
class ReplayCache {
public:
    static ReplayCache load(const std::string& path);  // missing file -> empty cache
    void save(const std::string& path) const;

    std::optional<std::string> find_text(const std::string& key) const;
    std::optional<Embedding> find_vector(const std::string& key) const;
    void put_text(const std::string& key, const std::string& content);
    void put_vector(const std::string& key, const Embedding& vector);
    std::size_t size() const { return order_.size(); }

private:
    std::map<std::string, std::string> texts_;
    std::map<std::string, Embedding> vectors_;
    std::vector<std::string> order_;  // keys in first-insertion order

    void remember(const std::string& key);
};

// Serves requests from a ReplayCache. Without an upstream client a miss
// throws CacheMissError; with one, misses are forwarded and the answer is
// recorded, so the same object covers replay, record and record-over-replay.
class CachedClient : public Client {
public:
    CachedClient(ReplayCache& cache, const LLMConfig& config, Client* upstream = nullptr);

    LLMResponse complete(const std::vector<ChatMessage>& messages) override;
    Embedding embed(const std::string& text) override;

private:
    ReplayCache& cache_;
    LLMConfig config_;
    Client* upstream_;
    std::mutex mutex_;
};

}  // namespace adlr
