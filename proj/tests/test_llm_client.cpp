#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "adlr/embed.hpp"
#include "adlr/errors.hpp"
#include "adlr/llm_client.hpp"

using namespace adlr;
namespace fs = std::filesystem;

namespace {

// Upstream stand-in with a recognizable latency, so forwarding can be told
// apart from a cache hit.
class StubClient : public Client {
public:
    LLMResponse complete(const std::vector<ChatMessage>&) override {
        ++completions;
        return {"{cooking}", 1.5, false};
    }
    Embedding embed(const std::string&) override {
        ++embeddings;
        return Embedding{{0.6, 0.8}};
    }
    int completions = 0;
    int embeddings = 0;
};

// Runs a configured httplib server on a loopback port for one test case.
struct ServerGuard {
    explicit ServerGuard(httplib::Server& server) : server_(server) {
        port = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~ServerGuard() {
        server_.stop();
        thread_.join();
    }

    httplib::Server& server_;
    int port = 0;

private:
    std::thread thread_;
};

LLMConfig local_config(int port) {
    LLMConfig config;
    config.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    config.model = "test-model";
    config.max_retries = 3;
    config.timeout_seconds = 5;
    return config;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("llm_client") {

TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("serialize_messages joins role and content blocks") {
    CHECK(serialize_messages({{"system", "s"}, {"user", "u"}}) == "system\ns\n---\nuser\nu");
    CHECK(serialize_messages({}) == "");
    CHECK(serialize_messages({{"user", "line1\nline2"}}) == "user\nline1\nline2");
}

TEST_CASE("cache keys hash kind, model, temperature and prompt") {
    CHECK(cache_key("chat", "m", 0.0, "p") == sha256_hex("chat|m|0|p"));
    CHECK(cache_key("embedding", "m", 0.5, "p") == sha256_hex("embedding|m|0.5|p"));
    CHECK(cache_key("chat", "m", 0.0, "p") != cache_key("chat", "m2", 0.0, "p"));
    CHECK(cache_key("chat", "m", 0.0, "p") != cache_key("embedding", "m", 0.0, "p"));
}

TEST_CASE("mock answers by hash of the last user message") {
    std::map<std::string, std::string> responses;
    responses[sha256_hex("what now?")] = "{showering}";
    responses["*"] = "{cooking}";
    MockClient mock(responses);

    SUBCASE("exact key wins") {
        const LLMResponse r =
            mock.complete({{"system", "irrelevant"}, {"user", "what now?"}});
        CHECK(r.content == "{showering}");
        CHECK(r.latency == 0.0);
        CHECK(r.from_cache);
    }
    SUBCASE("the last user message is the key") {
        const LLMResponse r = mock.complete(
            {{"user", "earlier"}, {"assistant", "..."}, {"user", "what now?"}});
        CHECK(r.content == "{showering}");
    }
    SUBCASE("unknown prompts fall back to the catch-all") {
        CHECK(mock.complete({{"user", "unmapped"}}).content == "{cooking}");
    }
    SUBCASE("no catch-all means a transport error") {
        MockClient strict({{sha256_hex("only this"), "{cooking}"}});
        CHECK_THROWS_AS(strict.complete({{"user", "something else"}}), TransportError);
    }
    SUBCASE("embeddings come from the local embedder") {
        CHECK(mock.embed("hello world") == embed_text_local("hello world"));
        CHECK_THROWS_AS(mock.embed(""), ConfigError);
    }
}

TEST_CASE("mock files load and reject malformed content") {
    const fs::path good = temp_file("adlr_mock_good.json");
    {
        std::ofstream out(good);
        out << R"({"*": "{watching TV}"})";
    }
    MockClient mock = MockClient::from_json_file(good.string());
    CHECK(mock.complete({{"user", "anything"}}).content == "{watching TV}");
    fs::remove(good);

    CHECK_THROWS_AS(MockClient::from_json_file("/nonexistent/mock.json"), ConfigError);

    const fs::path bad = temp_file("adlr_mock_bad.json");
    {
        std::ofstream out(bad);
        out << "not json";
    }
    CHECK_THROWS_AS(MockClient::from_json_file(bad.string()), ParseError);
    {
        std::ofstream out(bad);
        out << "[1, 2]";
    }
    CHECK_THROWS_AS(MockClient::from_json_file(bad.string()), SchemaError);
    {
        std::ofstream out(bad);
        out << R"({"k": 42})";
    }
    CHECK_THROWS_AS(MockClient::from_json_file(bad.string()), SchemaError);
    fs::remove(bad);
}

TEST_CASE("replay cache stores, saves and loads both kinds") {
    ReplayCache cache;
    CHECK(cache.size() == 0);
    CHECK(!cache.find_text("k"));

    cache.put_text("chat-key", "the answer");
    cache.put_vector("embed-key", Embedding{{0.25, -1.0, 3.5}});
    cache.put_text("chat-key", "the newer answer");  // overwrite, no new entry
    CHECK(cache.size() == 2);
    CHECK(cache.find_text("chat-key") == std::optional<std::string>("the newer answer"));
    REQUIRE(cache.find_vector("embed-key").has_value());
    CHECK(cache.find_vector("embed-key")->values == std::vector<double>{0.25, -1.0, 3.5});
    CHECK(!cache.find_text("embed-key"));
    CHECK(!cache.find_vector("chat-key"));

    const fs::path path = temp_file("adlr_replay_roundtrip.jsonl");
    cache.save(path.string());
    const ReplayCache loaded = ReplayCache::load(path.string());
    CHECK(loaded.size() == 2);
    CHECK(loaded.find_text("chat-key") == std::optional<std::string>("the newer answer"));
    CHECK(loaded.find_vector("embed-key")->values == std::vector<double>{0.25, -1.0, 3.5});
    fs::remove(path);
}

TEST_CASE("replay cache load tolerates absence but not corruption") {
    CHECK(ReplayCache::load("/nonexistent/replay.jsonl").size() == 0);

    const fs::path path = temp_file("adlr_replay_bad.jsonl");
    {
        std::ofstream out(path);
        out << "{broken\n";
    }
    CHECK_THROWS_AS(ReplayCache::load(path.string()), ParseError);
    {
        std::ofstream out(path);
        out << R"({"key": "k", "kind": "video", "content": "x"})" << "\n";
    }
    CHECK_THROWS_AS(ReplayCache::load(path.string()), SchemaError);
    {
        std::ofstream out(path);
        out << R"({"kind": "chat", "content": "x"})" << "\n";
    }
    CHECK_THROWS_AS(ReplayCache::load(path.string()), SchemaError);
    fs::remove(path);
}

TEST_CASE("cached client replays, forwards and records") {
    LLMConfig config;
    config.model = "test-model";
    const std::vector<ChatMessage> messages{{"system", "sys"}, {"user", "usr"}};
    const std::string chat_key =
        cache_key("chat", "test-model", 0.0, serialize_messages(messages));

    SUBCASE("strict replay: miss is an error, hit costs nothing") {
        ReplayCache cache;
        CachedClient client(cache, config, nullptr);
        CHECK_THROWS_AS(client.complete(messages), CacheMissError);
        CHECK_THROWS_AS(client.embed("text"), CacheMissError);

        cache.put_text(chat_key, "{cooking}");
        const LLMResponse r = client.complete(messages);
        CHECK(r.content == "{cooking}");
        CHECK(r.latency == 0.0);
        CHECK(r.from_cache);
    }

    SUBCASE("record: misses forward upstream unchanged and are remembered") {
        ReplayCache cache;
        StubClient upstream;
        CachedClient client(cache, config, &upstream);

        const LLMResponse first = client.complete(messages);
        CHECK(first.content == "{cooking}");
        CHECK(first.latency == 1.5);
        CHECK(!first.from_cache);
        CHECK(upstream.completions == 1);
        CHECK(cache.find_text(chat_key) == std::optional<std::string>("{cooking}"));

        const LLMResponse second = client.complete(messages);
        CHECK(second.content == "{cooking}");
        CHECK(second.latency == 0.0);
        CHECK(second.from_cache);
        CHECK(upstream.completions == 1);  // cache answered, not the upstream

        const Embedding e1 = client.embed("some text");
        const Embedding e2 = client.embed("some text");
        CHECK(e1 == e2);
        CHECK(upstream.embeddings == 1);
        CHECK_THROWS_AS(client.embed(""), ConfigError);
    }

    SUBCASE("recorded responses survive a save/load cycle") {
        const fs::path path = temp_file("adlr_replay_cycle.jsonl");
        {
            ReplayCache cache;
            StubClient upstream;
            CachedClient recorder(cache, config, &upstream);
            recorder.complete(messages);
            recorder.embed("some text");
            cache.save(path.string());
        }
        ReplayCache loaded = ReplayCache::load(path.string());
        CachedClient replayer(loaded, config, nullptr);
        const LLMResponse r = replayer.complete(messages);
        CHECK(r.content == "{cooking}");
        CHECK(r.from_cache);
        CHECK(replayer.embed("some text").values == std::vector<double>{0.6, 0.8});
        fs::remove(path);
    }
}

TEST_CASE("http client speaks the chat-completion wire format") {
    httplib::Server server;
    std::string seen_body;
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                            httplib::Response& res) {
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"message":{"content":"{cooking}"}}]})",
                        "application/json");
    });
    ServerGuard guard(server);

    setenv("ADLR_API_KEY", "test-key-123", 1);
    HttpClient client(local_config(guard.port));
    unsetenv("ADLR_API_KEY");

    const LLMResponse r = client.complete({{"system", "sys"}, {"user", "usr"}});
    CHECK(r.content == "{cooking}");
    CHECK(r.latency > 0.0);
    CHECK(!r.from_cache);
    CHECK(seen_auth == "Bearer test-key-123");

    const nlohmann::json body = nlohmann::json::parse(seen_body);
    CHECK(body.at("model") == "test-model");
    CHECK(body.at("temperature") == 0.0);
    REQUIRE(body.at("messages").size() == 2);
    CHECK(body["messages"][0] == nlohmann::json({{"role", "system"}, {"content", "sys"}}));
    CHECK(body["messages"][1] == nlohmann::json({{"role", "user"}, {"content", "usr"}}));
}

TEST_CASE("http client retries 429 then succeeds") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (++calls <= 2) {
            res.status = 429;
            res.set_content("slow down", "text/plain");
            return;
        }
        res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})", "application/json");
    });
    ServerGuard guard(server);

    HttpClient client(local_config(guard.port));
    CHECK(client.complete({{"user", "u"}}).content == "ok");
    CHECK(calls == 3);
}

TEST_CASE("http client gives up after exhausting retries on 500") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    ServerGuard guard(server);

    LLMConfig config = local_config(guard.port);
    config.max_retries = 1;
    HttpClient client(config);
    CHECK_THROWS_WITH_AS(client.complete({{"user", "u"}}),
                         doctest::Contains("after 2 attempts"), TransportError);
    CHECK(calls == 2);
}

TEST_CASE("http client does not retry client errors") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 404;
        res.set_content("no such model", "text/plain");
    });
    ServerGuard guard(server);

    HttpClient client(local_config(guard.port));
    CHECK_THROWS_AS(client.complete({{"user", "u"}}), TransportError);
    CHECK(calls == 1);
}

TEST_CASE("http client requests embeddings") {
    httplib::Server server;
    std::string seen_body;
    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        res.set_content(R"({"data":[{"embedding":[0.6,0.8]}]})", "application/json");
    });
    ServerGuard guard(server);

    LLMConfig config = local_config(guard.port);
    config.embedding_model = "test-embed";
    HttpClient client(config);
    CHECK(client.embed("a text").values == std::vector<double>{0.6, 0.8});
    CHECK_THROWS_AS(client.embed(""), ConfigError);

    const nlohmann::json body = nlohmann::json::parse(seen_body);
    CHECK(body.at("model") == "test-embed");
    CHECK(body.at("input") == "a text");
}

TEST_CASE("empty embedding vectors are rejected") {
    httplib::Server server;
    server.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"data":[{"embedding":[]}]})", "application/json");
    });
    ServerGuard guard(server);

    HttpClient client(local_config(guard.port));
    CHECK_THROWS_WITH_AS(client.embed("a text"), doctest::Contains("empty embedding"),
                         TransportError);
}

TEST_CASE("malformed completion payloads become transport errors") {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"unexpected": true})", "application/json");
    });
    ServerGuard guard(server);

    HttpClient client(local_config(guard.port));
    CHECK_THROWS_AS(client.complete({{"user", "u"}}), TransportError);
}

TEST_CASE("endpoint URLs must carry a scheme") {
    LLMConfig config;
    config.endpoint_url = "localhost:8080/v1";
    CHECK_THROWS_AS(HttpClient{config}, ConfigError);
}

}  // TEST_SUITE
