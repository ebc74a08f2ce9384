#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adlr/embed.hpp"
#include "adlr/evaluation.hpp"
#include "adlr/llm_client.hpp"
#include "adlr/segmentation.hpp"
#include "adlr/types.hpp"

namespace adlr {

struct RunConfig {
    std::string mode = "zero";  // "zero" or "few"
    std::size_t k = 5;          // examples per few-shot prompt
    double train_frac = 0.3;    // chronological share feeding the pool
    double scarcity_pct = 100.0;  // training share kept: 100, 50, 25, 10 or 5
    std::uint64_t seed = 0;       // drives the scarcity subsample
    bool skip_empty_windows = true;
    WindowingConfig windowing;
    std::string embed_model_tag = kLocalEmbedderTag;

    void validate() const;
};

// Windows ready for recognition: unlabeled (and, by default, empty) windows
// set aside, the rest rendered and split chronologically, scarcity applied
// to the training side.
struct PreparedWindows {
    std::vector<Window> kept;
    std::vector<WindowText> texts;     // parallel to kept
    std::vector<std::size_t> train;    // indices into kept, after scarcity
    std::vector<std::size_t> test;
    std::size_t unlabeled = 0;
    std::size_t empty_skipped = 0;
};
PreparedWindows prepare_windows(const std::vector<Window>& windows, const HomeMetadata& meta,
                                const RunConfig& run, Diagnostics* diag = nullptr);

// Example pool over the (scarcity-reduced) training windows.
ExamplePool build_training_pool(const PreparedWindows& prepared, Client& client,
                                const std::string& embed_model_tag, Diagnostics* diag = nullptr);

struct RunResult {
    std::vector<Prediction> predictions;  // one per test window, in order
    std::vector<std::string> truths;      // parallel ground truth
    EvalReport report;
    ExamplePool pool;  // pool actually used; empty in zero-shot runs
    Diagnostics diagnostics;
};

// The full loop: prepare, build the pool (few-shot), prompt the model per
// test window, extract labels, score. A few-shot run whose pool comes out
// empty downgrades to zero-shot with a warning. Requests run on up to
// llm.parallelism threads; outputs stay in window order. A preloaded pool
// replaces the one built from the training windows.
RunResult run_recognition(const std::vector<Window>& windows, const HomeMetadata& meta,
                          const RunConfig& run, const LLMConfig& llm, Client& client,
                          const ExamplePool* preloaded_pool = nullptr);

// One JSON object per line: window_start (epoch seconds), label, truth,
// raw_output, via_fallback, latency seconds.
void save_predictions(const std::vector<Prediction>& predictions,
                      const std::vector<std::string>& truths, const std::string& path);
void load_predictions(const std::string& path, std::vector<Prediction>& predictions,
                      std::vector<std::string>& truths);

}  // namespace adlr
