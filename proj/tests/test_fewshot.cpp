#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "adlr/embed.hpp"
#include "adlr/errors.hpp"
#include "adlr/fewshot.hpp"
#include "support/oracles.hpp"

using namespace adlr;
namespace fs = std::filesystem;

namespace {

// Embedder with hand-picked vectors so similarity rankings are exact.
class PresetEmbedder : public Client {
public:
    explicit PresetEmbedder(std::map<std::string, std::vector<double>> vectors)
        : vectors_(std::move(vectors)) {}

    LLMResponse complete(const std::vector<ChatMessage>&) override {
        throw TransportError("not a chat client");
    }
    Embedding embed(const std::string& text) override {
        if (auto it = vectors_.find(text); it != vectors_.end()) return Embedding{it->second};
        throw TransportError("no preset vector for '" + text + "'");
    }

private:
    std::map<std::string, std::vector<double>> vectors_;
};

class FailingEmbedder : public Client {
public:
    LLMResponse complete(const std::vector<ChatMessage>&) override {
        throw TransportError("not a chat client");
    }
    Embedding embed(const std::string&) override { throw TransportError("embedder offline"); }
};

// Five pool entries whose similarities to (1,0,0) are pairwise distinct.
ExamplePool preset_pool() {
    PresetEmbedder embedder({{"e1", {0.0, 1.0, 0.0}},
                             {"e2", {1.0, 0.0, 0.0}},
                             {"e3", {0.8, 0.6, 0.0}},
                             {"e4", {0.6, 0.8, 0.0}},
                             {"e5", {0.6, 0.0, 0.8}}});
    const std::vector<LabeledText> items{
        {"e1", "cooking"}, {"e2", "showering"}, {"e3", "cooking"},
        {"e4", "watching TV"}, {"e5", "showering"}};
    return build_pool(items, embedder, "preset");
}

}  // namespace

TEST_SUITE("fewshot") {

TEST_CASE("build_pool collapses duplicates and keeps first-appearance order") {
    PresetEmbedder embedder({{"a", {1.0, 0.0}}, {"b", {0.0, 1.0}}});
    const std::vector<LabeledText> items{
        {"a", "cooking"}, {"b", "showering"}, {"a", "cooking"},  // exact duplicate
    };
    const ExamplePool pool = build_pool(items, embedder, "preset");
    REQUIRE(pool.size() == 2);
    CHECK(pool.embed_model_tag == "preset");
    CHECK(pool.examples[0].text == "a");
    CHECK(pool.examples[0].label == "cooking");
    CHECK(pool.examples[0].embedding.values == std::vector<double>{1.0, 0.0});
    CHECK(pool.examples[1].text == "b");
}

TEST_CASE("build_pool drops texts that carry conflicting labels") {
    PresetEmbedder embedder({{"a", {1.0, 0.0}}, {"b", {0.0, 1.0}}});
    const std::vector<LabeledText> items{
        {"a", "cooking"}, {"a", "showering"},  // same text, two labels
        {"b", "watching TV"},
    };
    Diagnostics diag;
    const ExamplePool pool = build_pool(items, embedder, "preset", &diag);
    REQUIRE(pool.size() == 1);
    CHECK(pool.examples[0].text == "b");
    REQUIRE(diag.size() == 1);
    CHECK(diag.entries[0].find("conflicting labels") != std::string::npos);
}

TEST_CASE("build_pool surfaces embedding failures with the offending text") {
    FailingEmbedder embedder;
    const std::string long_text(80, 'x');
    CHECK_THROWS_WITH_AS(
        build_pool({{long_text, "cooking"}}, embedder, "t"),
        doctest::Contains(("failed to embed pool example \"" + std::string(60, 'x') + "...\"").c_str()),
        ConfigError);
}

TEST_CASE("select_examples ranks by cosine similarity, most similar first") {
    const ExamplePool pool = preset_pool();
    const Embedding query{{1.0, 0.0, 0.0}};

    // Similarities to the query: e2 = 1.0, e3 = 0.8, e4 = 0.6, e5 = 0.6/√1.0 = 0.6
    // via unit vectors... e5 = (0.6, 0, 0.8) -> 0.6, e1 = 0. e4 and e5 tie at 0.6;
    // e4 comes first in the pool so it wins the tie.
    const auto top3 = select_examples(pool, query, 3);
    REQUIRE(top3.size() == 3);
    CHECK(top3[0].text == "e2");
    CHECK(top3[1].text == "e3");
    CHECK(top3[2].text == "e4");

    const auto top4 = select_examples(pool, query, 4);
    REQUIRE(top4.size() == 4);
    CHECK(top4[3].text == "e5");
}

TEST_CASE("selection is invariant to the query's scale") {
    const ExamplePool pool = preset_pool();
    const auto a = select_examples(pool, Embedding{{1.0, 0.0, 0.0}}, 3);
    const auto b = select_examples(pool, Embedding{{250.0, 0.0, 0.0}}, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
}

TEST_CASE("selection refuses the impossible and clamps the excessive") {
    const ExamplePool pool = preset_pool();
    const Embedding query{{1.0, 0.0, 0.0}};

    CHECK_THROWS_AS(select_examples(ExamplePool{}, query, 2), SelectionError);
    CHECK_THROWS_AS(select_examples(pool, query, 0), SelectionError);

    Diagnostics diag;
    const auto all = select_examples(pool, query, 99, &diag);
    CHECK(all.size() == pool.size());
    REQUIRE(diag.size() == 1);
    CHECK(diag.entries[0].find("using all of them") != std::string::npos);
}

TEST_CASE("selection agrees with a naive top-k scan on random data") {
    std::mt19937_64 rng(20240614);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);

    for (int round = 0; round < 50; ++round) {
        ExamplePool pool;
        pool.embed_model_tag = "random";
        const std::size_t n = 3 + rng() % 20;
        std::vector<Embedding> vectors;
        for (std::size_t i = 0; i < n; ++i) {
            Embedding e{{coord(rng), coord(rng), coord(rng), coord(rng)}};
            vectors.push_back(e);
            pool.examples.push_back({"text-" + std::to_string(i), "label", e});
        }
        const Embedding query{{coord(rng), coord(rng), coord(rng), coord(rng)}};
        const std::size_t k = 1 + rng() % n;

        std::vector<double> sims;
        for (const auto& e : vectors) {
            sims.push_back(testsupport::naive_cosine(e.values, query.values));
        }
        const auto got = select_examples(pool, query, k);
        const auto want = testsupport::naive_top_k(sims, k);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(got[i].text == "text-" + std::to_string(want[i]));
        }
    }
}

TEST_CASE("pools survive a save/load round trip") {
    const ExamplePool pool = preset_pool();
    const fs::path path = fs::temp_directory_path() / "adlr_pool_roundtrip.jsonl";
    save_pool(pool, path.string());

    const ExamplePool loaded = load_pool(path.string());
    CHECK(loaded.embed_model_tag == pool.embed_model_tag);
    REQUIRE(loaded.size() == pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        CHECK(loaded.examples[i].text == pool.examples[i].text);
        CHECK(loaded.examples[i].label == pool.examples[i].label);
        CHECK(loaded.examples[i].embedding == pool.examples[i].embedding);
    }
    fs::remove(path);
}

TEST_CASE("load_pool rejects broken files") {
    const fs::path path = fs::temp_directory_path() / "adlr_pool_bad.jsonl";

    CHECK_THROWS_AS(load_pool("/nonexistent/pool.jsonl"), ConfigError);

    {
        std::ofstream out(path);
        out << "nope\n";
    }
    CHECK_THROWS_AS(load_pool(path.string()), ParseError);

    {
        std::ofstream out(path);
        out << R"({"text": "a", "label": "x", "embedding": [1.0], "embed_model_tag": "t1"})" << "\n";
        out << R"({"text": "b", "label": "x", "embedding": [1.0], "embed_model_tag": "t2"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_pool(path.string()), doctest::Contains("mixes embedder tags"),
                         SchemaError);

    {
        std::ofstream out(path);
        out << R"({"text": "a", "label": "x", "embedding": [1.0], "embed_model_tag": "t"})" << "\n";
        out << R"({"text": "b", "label": "x", "embedding": [1.0, 2.0], "embed_model_tag": "t"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_pool(path.string()), doctest::Contains("dimension"), SchemaError);

    {
        std::ofstream out(path);
        out << R"({"text": "a", "label": "x", "embedding": [1.0], "embed_model_tag": "t"})" << "\n";
        out << R"({"text": "a", "label": "y", "embedding": [2.0], "embed_model_tag": "t"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_pool(path.string()), doctest::Contains("duplicate example text"),
                         SchemaError);

    {
        std::ofstream out(path);
        out << R"({"label": "x", "embedding": [1.0], "embed_model_tag": "t"})" << "\n";
    }
    CHECK_THROWS_AS(load_pool(path.string()), SchemaError);

    fs::remove(path);
}

}  // TEST_SUITE
