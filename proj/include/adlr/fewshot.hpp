#pragma once

#include <string>
#include <vector>

#include "adlr/llm_client.hpp"
#include "adlr/types.hpp"

namespace adlr {

struct LabeledText {
    std::string text;
    std::string label;
};

// Builds the example pool from labeled window texts: exact (text, label)
// duplicates collapse into one entry, texts observed with two or more
// different labels are dropped entirely, and each surviving text is embedded
// once. Entry order follows first appearance.
ExamplePool build_pool(const std::vector<LabeledText>& items, Client& embedder,
                       const std::string& embed_model_tag, Diagnostics* diag = nullptr);

// The k pool entries most similar to the query, most similar first; ties
// keep pool order. A k larger than the pool is clamped with a warning.
std::vector<PoolExample> select_examples(const ExamplePool& pool, const Embedding& query,
                                         std::size_t k, Diagnostics* diag = nullptr);

// One JSON object per line: {"text", "label", "embedding", "embed_model_tag"}.
void save_pool(const ExamplePool& pool, const std::string& path);
ExamplePool load_pool(const std::string& path);

}  // namespace adlr
