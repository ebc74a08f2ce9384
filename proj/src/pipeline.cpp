#include "adlr/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "adlr/errors.hpp"
#include "adlr/fewshot.hpp"
#include "adlr/label_extract.hpp"
#include "adlr/prompting.hpp"
#include "adlr/window2text.hpp"

namespace adlr {

namespace {

using nlohmann::json;

std::string compact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    if (mode != "zero" && mode != "few") {
        throw ConfigError("mode must be 'zero' or 'few', got '" + mode + "'");
    }
    if (mode == "few" && k == 0) {
        throw ConfigError("few-shot runs need at least one example per prompt");
    }
    if (scarcity_pct != 100.0 && scarcity_pct != 50.0 && scarcity_pct != 25.0 &&
        scarcity_pct != 10.0 && scarcity_pct != 5.0) {
        throw ConfigError("scarcity percentage must be one of 100, 50, 25, 10, 5");
    }
    windowing.validate();
}

PreparedWindows prepare_windows(const std::vector<Window>& windows, const HomeMetadata& meta,
                                const RunConfig& run, Diagnostics* diag) {
    run.validate();

    PreparedWindows prepared;
    for (const auto& w : windows) {
        if (!w.truth) {
            ++prepared.unlabeled;
            continue;
        }
        if (run.skip_empty_windows && w.empty()) {
            ++prepared.empty_skipped;
            continue;
        }
        prepared.kept.push_back(w);
        prepared.texts.push_back(render_window(w, meta));
    }
    if (diag) {
        if (prepared.unlabeled > 0) {
            diag->warn(std::to_string(prepared.unlabeled) +
                       " windows overlap no annotation and are left out");
        }
        if (prepared.empty_skipped > 0) {
            diag->warn(std::to_string(prepared.empty_skipped) +
                       " labeled windows contain no sensor activity and are left out");
        }
    }

    const ChronoSplit split = chronological_split(prepared.kept.size(), run.train_frac);
    prepared.test = split.test;

    const auto sampled =
        subsample_indices(split.train.size(), run.scarcity_pct, run.seed);
    prepared.train.reserve(sampled.size());
    for (const auto i : sampled) prepared.train.push_back(split.train[i]);
    if (diag && prepared.train.size() < split.train.size()) {
        diag->warn("scarcity " + compact(run.scarcity_pct) + "%: training windows reduced from " +
                   std::to_string(split.train.size()) + " to " +
                   std::to_string(prepared.train.size()));
    }
    return prepared;
}

ExamplePool build_training_pool(const PreparedWindows& prepared, Client& client,
                                const std::string& embed_model_tag, Diagnostics* diag) {
    std::vector<LabeledText> items;
    items.reserve(prepared.train.size());
    for (const auto i : prepared.train) {
        items.push_back({prepared.texts[i].text, *prepared.kept[i].truth});
    }
    return build_pool(items, client, embed_model_tag, diag);
}

RunResult run_recognition(const std::vector<Window>& windows, const HomeMetadata& meta,
                          const RunConfig& run, const LLMConfig& llm, Client& client,
                          const ExamplePool* preloaded_pool) {
    RunResult result;
    Diagnostics& diag = result.diagnostics;

    const PreparedWindows prepared = prepare_windows(windows, meta, run, &diag);

    bool few = run.mode == "few";
    std::size_t k = run.k;
    if (few) {
        if (preloaded_pool) {
            result.pool = *preloaded_pool;
        } else {
            result.pool = build_training_pool(prepared, client, run.embed_model_tag, &diag);
        }
        if (result.pool.empty()) {
            diag.warn("example pool is empty; falling back to zero-shot prompting");
            few = false;
        } else if (k > result.pool.size()) {
            diag.warn("requested " + std::to_string(k) + " examples but the pool holds " +
                      std::to_string(result.pool.size()) + "; using all of them");
            k = result.pool.size();
        }
    }

    const std::string zero_system = build_system_prompt(meta);
    const std::size_t n = prepared.test.size();
    result.predictions.resize(n);
    result.truths.resize(n);

    auto process = [&](std::size_t i) {
        const Window& w = prepared.kept[prepared.test[i]];
        const WindowText& wt = prepared.texts[prepared.test[i]];

        std::string system = zero_system;
        if (few) {
            const Embedding query = client.embed(wt.text);
            system = build_system_prompt(meta, select_examples(result.pool, query, k));
        }
        const std::vector<ChatMessage> messages{{"system", system},
                                                {"user", build_user_prompt(wt.text)}};

        const LLMResponse response = client.complete(messages);
        const ExtractedLabel extracted = extract_label(response.content, meta.activities, client);
        result.predictions[i] = {w.t, extracted.label, response.content, extracted.via_fallback,
                                 response.latency};
        result.truths[i] = *w.truth;
    };

    const std::size_t workers =
        std::min<std::size_t>(std::max(1, llm.parallelism), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex error_mutex;
        std::exception_ptr first_error;
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error) break;
                }
                try {
                    process(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    break;
                }
            }
        };
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<std::pair<EpochSeconds, std::string>> truth_pairs;
    truth_pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth_pairs.emplace_back(result.predictions[i].window_start, result.truths[i]);
    }
    result.report = score(result.predictions, truth_pairs);

    auto& echo = result.report.config_echo;
    echo["home_id"] = meta.home_id;
    echo["mode"] = run.mode;
    echo["effective_mode"] = few ? "few" : "zero";
    echo["k"] = std::to_string(run.k);
    echo["train_frac"] = compact(run.train_frac);
    echo["scarcity_pct"] = compact(run.scarcity_pct);
    echo["seed"] = std::to_string(run.seed);
    echo["window_seconds"] = compact(run.windowing.tau);
    echo["overlap"] = compact(run.windowing.overlap);
    echo["model"] = llm.model;
    echo["windows_total"] = std::to_string(windows.size());
    echo["windows_unlabeled"] = std::to_string(prepared.unlabeled);
    echo["windows_empty_skipped"] = std::to_string(prepared.empty_skipped);
    echo["train_windows"] = std::to_string(prepared.train.size());
    echo["test_windows"] = std::to_string(prepared.test.size());
    echo["pool_size"] = std::to_string(result.pool.size());
    if (few) echo["embed_model_tag"] = run.embed_model_tag;
    return result;
}

void save_predictions(const std::vector<Prediction>& predictions,
                      const std::vector<std::string>& truths, const std::string& path) {
    if (predictions.size() != truths.size()) {
        throw ScoringError("prediction and truth counts differ");
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write predictions file '" + path + "'");
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& p = predictions[i];
        json rec;
        rec["window_start"] = p.window_start;
        rec["label"] = p.label;
        rec["truth"] = truths[i];
        rec["raw_output"] = p.raw_output;
        rec["via_fallback"] = p.via_fallback;
        rec["latency"] = p.latency;
        out << rec.dump() << '\n';
    }
}

void load_predictions(const std::string& path, std::vector<Prediction>& predictions,
                      std::vector<std::string>& truths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open predictions file '" + path + "'");
    predictions.clear();
    truths.clear();

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("predictions file '" + path + "' line " + std::to_string(line_no) +
                             ": " + e.what());
        }
        try {
            Prediction p;
            p.window_start = rec.at("window_start").get<double>();
            p.label = rec.at("label").get<std::string>();
            p.raw_output = rec.value("raw_output", "");
            p.via_fallback = rec.value("via_fallback", false);
            p.latency = rec.value("latency", 0.0);
            predictions.push_back(std::move(p));
            truths.push_back(rec.at("truth").get<std::string>());
        } catch (const json::exception& e) {
            throw SchemaError("predictions file '" + path + "' line " + std::to_string(line_no) +
                              ": " + e.what());
        }
    }
    return;
}

}  // namespace adlr
