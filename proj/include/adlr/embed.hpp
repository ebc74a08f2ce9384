#pragma once

#include <string>

#include "adlr/types.hpp"

namespace adlr {

// Dimension and identity tag of the built-in embedder. The tag is stored in
// pool files so a pool built with one embedder is never queried with another.
inline constexpr std::size_t kLocalEmbeddingDim = 256;
inline constexpr const char* kLocalEmbedderTag = "local-trigram-256";

// Deterministic offline embedding: a hashed bag of character trigrams over
// the lowercased, space-normalized text, L2-normalized. Crude compared to a
// learned model, but stable across platforms and good enough to rank
// paraphrases of the same activity close together.
Embedding embed_text_local(const std::string& text);

// Cosine similarity; 0 when either vector has zero norm. Dimension mismatch
// throws ScoringError.
double cosine_similarity(const Embedding& a, const Embedding& b);

}  // namespace adlr
