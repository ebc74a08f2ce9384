#pragma once

#include <string>
#include <vector>

#include "adlr/types.hpp"

namespace adlr {

// System prompt: role, rooms, the interactions sensors can report, the
// closed activity set, and the output-format instruction, in that order.
// When examples are given they are appended as a final section, so the
// zero-shot prompt is a prefix of every few-shot prompt built from it.
std::string build_system_prompt(const HomeMetadata& meta,
                                const std::vector<PoolExample>& examples = {});

// User prompt around one rendered window. Contains the window text verbatim,
// asks for exactly one activity, and always ends with the step-by-step
// instruction.
std::string build_user_prompt(const std::string& window_text);

// Both halves of a chat request plus bookkeeping about how it was built.
struct PromptBundle {
    std::string system;
    std::string user;
    std::size_t examples_used = 0;
    std::string model_hint;  // empty means "use the client's configured model"
};

PromptBundle build_prompt_bundle(const HomeMetadata& meta, const WindowText& window_text,
                                 const std::vector<PoolExample>& examples = {},
                                 const std::string& model_hint = "");

}  // namespace adlr
