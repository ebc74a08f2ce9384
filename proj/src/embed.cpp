#include "adlr/embed.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "adlr/errors.hpp"

namespace adlr {

namespace {

std::uint64_t fnv1a64(const char* data, std::size_t len) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

// Lowercase and collapse whitespace runs to single spaces, with one leading
// and one trailing space so word boundaries form trigrams too.
std::string normalize(const std::string& text) {
    std::string out = " ";
    bool pending_space = false;
    for (const char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = true;
            continue;
        }
        if (pending_space && out.back() != ' ') out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (out.back() != ' ') out.push_back(' ');
    return out;
}

}  // namespace

Embedding embed_text_local(const std::string& text) {
    Embedding e;
    e.values.assign(kLocalEmbeddingDim, 0.0);

    const std::string norm = normalize(text);
    if (norm.size() >= 3) {
        for (std::size_t i = 0; i + 3 <= norm.size(); ++i) {
            const std::uint64_t h = fnv1a64(norm.data() + i, 3);
            e.values[h % kLocalEmbeddingDim] += 1.0;
        }
    }

    double norm2 = 0.0;
    for (const double v : e.values) norm2 += v * v;
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : e.values) v *= inv;
    }
    return e;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        throw ScoringError("cannot compare embeddings of dimension " + std::to_string(a.dim()) +
                           " and " + std::to_string(b.dim()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace adlr
