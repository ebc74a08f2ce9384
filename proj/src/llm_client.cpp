#include "adlr/llm_client.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "adlr/embed.hpp"
#include "adlr/errors.hpp"
#include "adlr/timeutil.hpp"

namespace adlr {

namespace {

using nlohmann::json;

// Short, stable rendering of the sampling temperature for cache keys.
std::string temperature_tag(double temperature) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", temperature);
    return buf;
}

std::string last_user_content(const std::vector<ChatMessage>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "user") return it->content;
    }
    return "";
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw TransportError("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string serialize_messages(const std::vector<ChatMessage>& messages) {
    std::string out;
    for (const auto& m : messages) {
        if (!out.empty()) out += "\n---\n";
        out += m.role + "\n" + m.content;
    }
    return out;
}

std::string cache_key(const std::string& kind, const std::string& model, double temperature,
                      const std::string& prompt) {
    return sha256_hex(kind + "|" + model + "|" + temperature_tag(temperature) + "|" + prompt);
}

// ---------------------------------------------------------------------------
// HttpClient

HttpClient::HttpClient(LLMConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.endpoint_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL '" + config_.endpoint_url +
                          "' must start with http:// or https://");
    }
    const auto path_start = config_.endpoint_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        base_url_ = config_.endpoint_url;
    } else {
        base_url_ = config_.endpoint_url.substr(0, path_start);
        path_prefix_ = config_.endpoint_url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }

    if (const char* key = std::getenv("ADLR_API_KEY")) {
        api_key_ = key;
    } else if (const char* fallback = std::getenv("OPENAI_API_KEY")) {
        api_key_ = fallback;
    }
}

std::string HttpClient::post_json(const std::string& path, const std::string& body) {
    const std::string full_path = path_prefix_ + path;
    std::string last_error;

    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            // 0.5 s, 1 s, 2 s, ... capped at 8 s.
            const int64_t ms = std::min<int64_t>(500ll << (attempt - 1), 8000);
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        }

        // One connection per request keeps concurrent callers independent.
        httplib::Client cli(base_url_);
        cli.set_connection_timeout(config_.timeout_seconds, 0);
        cli.set_read_timeout(config_.timeout_seconds, 0);
        cli.set_write_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = cli.Post(full_path, headers, body, "application/json");
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return res->body;
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            continue;
        }
        throw TransportError("endpoint rejected request (HTTP " + std::to_string(res->status) +
                             "): " + res->body);
    }
    throw TransportError("request failed after " + std::to_string(config_.max_retries + 1) +
                         " attempts; last error: " + last_error);
}

LLMResponse HttpClient::complete(const std::vector<ChatMessage>& messages) {
    json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    body["messages"] = json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }

    const auto started = std::chrono::steady_clock::now();
    const std::string raw = post_json("/chat/completions", body.dump());
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
        const json resp = json::parse(raw);
        return {resp.at("choices").at(0).at("message").at("content").get<std::string>(),
                latency, false};
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed chat-completion response: ") + e.what());
    }
}

Embedding HttpClient::embed(const std::string& text) {
    if (text.empty()) throw ConfigError("cannot embed empty text");
    json body;
    body["model"] = config_.embedding_model;
    body["input"] = text;

    const std::string raw = post_json("/embeddings", body.dump());
    try {
        const json resp = json::parse(raw);
        Embedding e;
        e.values = resp.at("data").at(0).at("embedding").get<std::vector<double>>();
        if (e.values.empty()) throw TransportError("endpoint returned an empty embedding");
        return e;
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed embedding response: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// MockClient

MockClient::MockClient(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

MockClient MockClient::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock response file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("mock response file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("mock response file '" + path + "' must hold one JSON object");
    }
    std::map<std::string, std::string> responses;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string()) {
            throw SchemaError("mock response for key '" + key + "' must be a string");
        }
        responses[key] = value.get<std::string>();
    }
    return MockClient(std::move(responses));
}

LLMResponse MockClient::complete(const std::vector<ChatMessage>& messages) {
    const std::string key = sha256_hex(last_user_content(messages));
    if (auto it = responses_.find(key); it != responses_.end()) return {it->second, 0.0, true};
    if (auto it = responses_.find("*"); it != responses_.end()) return {it->second, 0.0, true};
    throw TransportError("mock has no response for user-prompt key " + key +
                         " and no '*' default");
}

Embedding MockClient::embed(const std::string& text) {
    if (text.empty()) throw ConfigError("cannot embed empty text");
    return embed_text_local(text);
}

// ---------------------------------------------------------------------------
// ReplayCache

void ReplayCache::remember(const std::string& key) {
    if (texts_.find(key) == texts_.end() && vectors_.find(key) == vectors_.end()) {
        order_.push_back(key);
    }
}

void ReplayCache::put_text(const std::string& key, const std::string& content) {
    remember(key);
    texts_[key] = content;
}

void ReplayCache::put_vector(const std::string& key, const Embedding& vector) {
    remember(key);
    vectors_[key] = vector;
}

std::optional<std::string> ReplayCache::find_text(const std::string& key) const {
    if (auto it = texts_.find(key); it != texts_.end()) return it->second;
    return std::nullopt;
}

std::optional<Embedding> ReplayCache::find_vector(const std::string& key) const {
    if (auto it = vectors_.find(key); it != vectors_.end()) return it->second;
    return std::nullopt;
}

ReplayCache ReplayCache::load(const std::string& path) {
    ReplayCache cache;
    std::ifstream in(path);
    if (!in) return cache;  // nothing recorded yet

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("replay file '" + path + "' line " + std::to_string(line_no) +
                             ": " + e.what());
        }
        try {
            const auto key = rec.at("key").get<std::string>();
            const auto kind = rec.at("kind").get<std::string>();
            if (kind == "chat") {
                cache.put_text(key, rec.at("content").get<std::string>());
            } else if (kind == "embedding") {
                Embedding e;
                e.values = rec.at("vector").get<std::vector<double>>();
                cache.put_vector(key, e);
            } else {
                throw SchemaError("replay file '" + path + "' line " + std::to_string(line_no) +
                                  ": unknown kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw SchemaError("replay file '" + path + "' line " + std::to_string(line_no) +
                              ": " + e.what());
        }
    }
    return cache;
}

void ReplayCache::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write replay file '" + path + "'");
    const std::string now = format_iso8601_utc(
        static_cast<double>(std::chrono::duration_cast<std::chrono::seconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count()));
    for (const auto& key : order_) {
        json rec;
        rec["key"] = key;
        if (auto it = texts_.find(key); it != texts_.end()) {
            rec["kind"] = "chat";
            rec["content"] = it->second;
        } else {
            rec["kind"] = "embedding";
            rec["vector"] = vectors_.at(key).values;
        }
        rec["recorded_at"] = now;
        out << rec.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// CachedClient

CachedClient::CachedClient(ReplayCache& cache, const LLMConfig& config, Client* upstream)
    : cache_(cache), config_(config), upstream_(upstream) {}

LLMResponse CachedClient::complete(const std::vector<ChatMessage>& messages) {
    const std::string key =
        cache_key("chat", config_.model, config_.temperature, serialize_messages(messages));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto hit = cache_.find_text(key)) return {*hit, 0.0, true};
    }
    if (!upstream_) {
        throw CacheMissError("no recorded response for chat key " + key);
    }
    const LLMResponse response = upstream_->complete(messages);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.put_text(key, response.content);
    return response;
}

Embedding CachedClient::embed(const std::string& text) {
    if (text.empty()) throw ConfigError("cannot embed empty text");
    const std::string key = cache_key("embedding", config_.embedding_model, 0.0, text);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto hit = cache_.find_vector(key)) return *hit;
    }
    if (!upstream_) {
        throw CacheMissError("no recorded response for embedding key " + key);
    }
    const Embedding vector = upstream_->embed(text);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.put_vector(key, vector);
    return vector;
}

}  // namespace adlr
