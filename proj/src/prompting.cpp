#include "adlr/prompting.hpp"

#include "adlr/window2text.hpp"

namespace adlr {

namespace {

std::string comma_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += items[i];
    }
    return out;
}

}  // namespace

std::string build_system_prompt(const HomeMetadata& meta,
                                const std::vector<PoolExample>& examples) {
    std::string prompt =
        "You are a human activity recognition system. From a description of the sensor "
        "activity observed in a smart home during a short time window, you determine the "
        "activity the subject is most likely performing.";

    prompt += "\n\nThe home has the following rooms: " + comma_list(meta.rooms) + ".";

    prompt += "\n\nThe sensors can report the following interactions:";
    for (const auto& s : meta.sensors) {
        if (const DiscretizationRanges* d = meta.find_discretization(s.sensor_id)) {
            for (const auto& r : d->ranges) {
                prompt += "\n- " + humanize_property(r.label) + " (" + s.room + ")";
            }
        } else {
            prompt += "\n- " + humanize_property(s.state_property) + " (" + s.room + ")";
        }
    }

    prompt += "\n\nThe possible activities are: " + comma_list(meta.activities) + ".";

    prompt +=
        "\n\nProvide the most likely activity enclosed in curly braces, e.g. {activity}.";

    if (!examples.empty()) {
        prompt += "\n\nHere are some examples. Each shows a description and the correct activity.";
        for (const auto& ex : examples) {
            prompt += "\n\nDescription: " + ex.text + "\nActivity: {" + ex.label + "}";
        }
    }
    return prompt;
}

std::string build_user_prompt(const std::string& window_text) {
    return "Description: " + window_text +
           "\n\nWhich single activity is the subject most likely performing? Choose exactly "
           "one of the possible activities. Reason step by step.";
}

PromptBundle build_prompt_bundle(const HomeMetadata& meta, const WindowText& window_text,
                                 const std::vector<PoolExample>& examples,
                                 const std::string& model_hint) {
    PromptBundle bundle;
    bundle.system = build_system_prompt(meta, examples);
    bundle.user = build_user_prompt(window_text.text);
    bundle.examples_used = examples.size();
    bundle.model_hint = model_hint;
    return bundle;
}

}  // namespace adlr
