#pragma once

#include <string>
#include <vector>

#include "adlr/llm_client.hpp"

namespace adlr {

struct ExtractedLabel {
    std::string label;          // one of the candidate activities, verbatim
    bool via_fallback = false;  // true when semantic matching was needed
};

// Pulls the predicted activity out of a model's free-form answer. The last
// {...} group is compared against the candidates ignoring case and
// whitespace; if it matches none (or the answer has no braces at all), the
// brace content - or the final non-empty line - is embedded and the most
// similar candidate wins, earlier candidates taking ties. An answer with
// nothing to extract from throws ExtractionError.
ExtractedLabel extract_label(const std::string& raw_output,
                             const std::vector<std::string>& candidates, Client& embedder);

}  // namespace adlr
