#include "adlr/label_extract.hpp"

#include <cctype>
#include <optional>

#include "adlr/embed.hpp"
#include "adlr/errors.hpp"

namespace adlr {

namespace {

// Content of the last {...} group (no nested braces inside).
std::optional<std::string> last_brace_group(const std::string& s) {
    std::optional<std::string> found;
    std::size_t i = 0;
    while ((i = s.find('{', i)) != std::string::npos) {
        const auto next = s.find_first_of("{}", i + 1);
        if (next == std::string::npos) break;
        if (s[next] == '}') {
            found = s.substr(i + 1, next - i - 1);
            i = next + 1;
        } else {
            i = next;  // '{' immediately reopens the group
        }
    }
    return found;
}

std::optional<std::string> last_nonempty_line(const std::string& s) {
    std::size_t end = s.size();
    while (end > 0) {
        std::size_t start = s.rfind('\n', end - 1);
        start = (start == std::string::npos) ? 0 : start + 1;
        std::string line = s.substr(start, end - start);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
        if (start == 0) break;
        end = start - 1;
    }
    return std::nullopt;
}

// Lowercased with whitespace runs collapsed and edges trimmed.
std::string normalize(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (const char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

ExtractedLabel extract_label(const std::string& raw_output,
                             const std::vector<std::string>& candidates, Client& embedder) {
    if (candidates.empty()) throw ConfigError("no candidate activities to extract against");

    const auto braced = last_brace_group(raw_output);
    if (braced) {
        const std::string wanted = normalize(*braced);
        for (const auto& c : candidates) {
            if (normalize(c) == wanted) return {c, false};
        }
    }

    std::optional<std::string> query_text = braced;
    if (!query_text || normalize(*query_text).empty()) query_text = last_nonempty_line(raw_output);
    if (!query_text) {
        throw ExtractionError("model output contains nothing to extract a label from");
    }

    const Embedding query = embedder.embed(*query_text);
    std::size_t best = 0;
    double best_score = -2.0;  // below any cosine, so index 0 wins an all-tie
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double score = cosine_similarity(query, embedder.embed(candidates[i]));
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return {candidates[best], true};
}

}  // namespace adlr
