#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "adlr/errors.hpp"
#include "adlr/label_extract.hpp"
#include "adlr/llm_client.hpp"

using namespace adlr;

namespace {

const std::vector<std::string> kActivities{"cooking", "watching TV", "showering", "snacking"};

// Embedder that must not be reached when the exact path matches.
class ForbiddenEmbedder : public Client {
public:
    LLMResponse complete(const std::vector<ChatMessage>&) override {
        throw TransportError("not a chat client");
    }
    Embedding embed(const std::string& text) override {
        throw TransportError("unexpected embed call for '" + text + "'");
    }
};

MockClient local_embedder() {
    return MockClient(std::map<std::string, std::string>{{"*", "unused"}});
}

}  // namespace

TEST_SUITE("label_extract") {

TEST_CASE("a braces answer matching a candidate is exact") {
    ForbiddenEmbedder embedder;
    const ExtractedLabel got =
        extract_label("Reasoning... so the answer is {cooking}", kActivities, embedder);
    CHECK(got.label == "cooking");
    CHECK(!got.via_fallback);
}

TEST_CASE("matching ignores case and whitespace") {
    ForbiddenEmbedder embedder;
    CHECK(extract_label("{ Watching   TV }", kActivities, embedder).label == "watching TV");
    CHECK(extract_label("{COOKING}", kActivities, embedder).label == "cooking");
    CHECK(extract_label("{ watching\ttv }", kActivities, embedder).label == "watching TV");
}

TEST_CASE("the last brace group wins") {
    ForbiddenEmbedder embedder;
    const std::string raw =
        "It could be {cooking} at first glance, but on reflection I say {showering}.";
    CHECK(extract_label(raw, kActivities, embedder).label == "showering");
}

TEST_CASE("an unclosed brace reopens the group") {
    ForbiddenEmbedder embedder;
    // "{x {watching TV}" - the inner group is the one that closes.
    CHECK(extract_label("{x {watching TV}", kActivities, embedder).label == "watching TV");
}

TEST_CASE("near-miss brace content falls back to semantic matching") {
    MockClient embedder = local_embedder();
    const ExtractedLabel got =
        extract_label("I'd say {preparing midnight snack}.", kActivities, embedder);
    CHECK(got.via_fallback);
    CHECK(got.label == "snacking");
}

TEST_CASE("without braces the last non-empty line is matched semantically") {
    MockClient embedder = local_embedder();
    const std::string raw =
        "Let me think about the description.\n"
        "The subject is likely cooking dinner in the kitchen.\n"
        "   \n";
    const ExtractedLabel got = extract_label(raw, kActivities, embedder);
    CHECK(got.via_fallback);
    CHECK(got.label == "cooking");
}

TEST_CASE("empty braces defer to the last non-empty line") {
    MockClient embedder = local_embedder();
    const ExtractedLabel got =
        extract_label("the subject is showering {}", kActivities, embedder);
    CHECK(got.via_fallback);
    CHECK(got.label == "showering");
}

TEST_CASE("nothing to extract from is an error") {
    MockClient embedder = local_embedder();
    CHECK_THROWS_AS(extract_label("", kActivities, embedder), ExtractionError);
    CHECK_THROWS_AS(extract_label("   \n  \t\n", kActivities, embedder), ExtractionError);
    CHECK_THROWS_AS(extract_label("{cooking}", {}, embedder), ConfigError);
}

TEST_CASE("the exact path never needs the embedder") {
    ForbiddenEmbedder embedder;
    for (const auto& activity : kActivities) {
        const ExtractedLabel got =
            extract_label("Answer: {" + activity + "}", kActivities, embedder);
        CHECK(got.label == activity);
        CHECK(!got.via_fallback);
    }
}

TEST_CASE("full similarity ties resolve to the earliest candidate") {
    // With a zero-norm query every cosine is 0; the first candidate must win.
    class ZeroEmbedder : public Client {
    public:
        LLMResponse complete(const std::vector<ChatMessage>&) override {
            throw TransportError("not a chat client");
        }
        Embedding embed(const std::string&) override { return Embedding{{0.0, 0.0}}; }
    };
    ZeroEmbedder embedder;
    const ExtractedLabel got = extract_label("{mystery activity}", kActivities, embedder);
    CHECK(got.via_fallback);
    CHECK(got.label == "cooking");
}

}  // TEST_SUITE
