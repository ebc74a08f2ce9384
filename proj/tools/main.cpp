// Command-line front end for the recognition pipeline:
//   ingest       raw event log -> sensor-state intervals
//   pool build   training windows (or a labeled-text file) -> few-shot example pool
//   recognize    run the model over the test split, write predictions + reports
//   evaluate     re-score an existing predictions file
//   report ecdf  response-latency ECDF from a report
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "adlr/embed.hpp"
#include "adlr/errors.hpp"
#include "adlr/evaluation.hpp"
#include "adlr/fewshot.hpp"
#include "adlr/ingest.hpp"
#include "adlr/llm_client.hpp"
#include "adlr/pipeline.hpp"
#include "adlr/segmentation.hpp"
#include "adlr/state_gen.hpp"
#include "adlr/types.hpp"

namespace {

namespace fs = std::filesystem;
using namespace adlr;

void print_diagnostics(const Diagnostics& diag) {
    for (const auto& entry : diag.entries) std::cerr << "note: " << entry << '\n';
}

std::ifstream open_input(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string("cannot open ") + what + " file '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path, const char* what) {
    std::ofstream out(path);
    if (!out) throw ConfigError(std::string("cannot write ") + what + " file '" + path + "'");
    return out;
}

// Everything recognition runs need from disk: home, paired states, windows
// with ground truth attached.
struct LoadedData {
    HomeMetadata meta;
    std::vector<Window> windows;
    Diagnostics diag;
};

LoadedData load_windows(const std::string& home_path, const std::string& events_path,
                        const std::string& annotations_path, const WindowingConfig& windowing) {
    LoadedData data;
    data.meta = load_home_metadata(home_path);

    auto events_in = open_input(events_path, "event log");
    const auto events = parse_event_stream(events_in, data.meta);
    const auto states = pair_events(events, data.meta, &data.diag);
    if (states.empty()) throw ConfigError("event log yields no sensor states");

    data.windows = segment(states, span_of_states(states), windowing, &data.diag);

    auto ann_in = open_input(annotations_path, "annotation");
    const auto annotations = load_annotations(ann_in, data.meta);
    assign_truth(data.windows, annotations);
    return data;
}

// Client selection shared by `pool build` and `recognize`. --mock beats
// --llm-endpoint as the upstream. --replay without --record is strict
// replay: any upstream is ignored and a cache miss is an error. --record
// appends live answers back to the --replay file.
struct ClientOptions {
    std::string endpoint;
    std::string model = "gpt-3.5-turbo-0125";
    std::string embedding_model;  // empty keeps the config default
    std::string mock_path;
    std::string replay_path;
    bool record = false;
    int parallelism = 1;
};

struct ClientBundle {
    LLMConfig llm;
    std::unique_ptr<Client> upstream;
    std::unique_ptr<ReplayCache> cache;
    std::unique_ptr<CachedClient> cached;
    Client* use = nullptr;
    std::string embed_tag = kLocalEmbedderTag;
    std::string record_path;

    void finish() const {
        if (!record_path.empty()) cache->save(record_path);
    }
};

void add_client_options(CLI::App* cmd, ClientOptions& opt) {
    cmd->add_option("--llm-endpoint", opt.endpoint,
                    "Chat-completion endpoint base URL, e.g. https://api.openai.com/v1");
    cmd->add_option("--model", opt.model, "Model name sent to the endpoint");
    cmd->add_option("--embedding-model", opt.embedding_model,
                    "Embedding model name sent to the endpoint");
    cmd->add_option("--mock", opt.mock_path,
                    "JSON file mapping sha256(user prompt) -> canned answer ('*' = default)");
    cmd->add_option("--replay", opt.replay_path, "Replay recorded responses from this file");
    cmd->add_flag("--record", opt.record, "Append live responses to the --replay file");
    cmd->add_option("--parallel", opt.parallelism, "Concurrent requests")
        ->check(CLI::PositiveNumber);
}

ClientBundle make_client(const ClientOptions& opt) {
    ClientBundle bundle;
    bundle.llm.endpoint_url = opt.endpoint;
    bundle.llm.model = opt.model;
    if (!opt.embedding_model.empty()) bundle.llm.embedding_model = opt.embedding_model;
    bundle.llm.parallelism = opt.parallelism;

    if (opt.record && opt.replay_path.empty()) {
        throw ConfigError("--record needs --replay <path> to know where to write");
    }
    const bool strict_replay = !opt.replay_path.empty() && !opt.record;

    if (!strict_replay) {
        if (!opt.mock_path.empty()) {
            bundle.upstream =
                std::make_unique<MockClient>(MockClient::from_json_file(opt.mock_path));
        } else if (!opt.endpoint.empty()) {
            bundle.upstream = std::make_unique<HttpClient>(bundle.llm);
            bundle.embed_tag = bundle.llm.embedding_model;
        }
        if (opt.record && !bundle.upstream) {
            throw ConfigError("--record needs an upstream: --mock or --llm-endpoint");
        }
    } else if (!opt.embedding_model.empty()) {
        // Replayed vectors carry no tag of their own; trust the caller's
        // statement of what was recorded.
        bundle.embed_tag = opt.embedding_model;
    }

    if (!opt.replay_path.empty()) {
        bundle.cache = std::make_unique<ReplayCache>(ReplayCache::load(opt.replay_path));
        bundle.cached =
            std::make_unique<CachedClient>(*bundle.cache, bundle.llm, bundle.upstream.get());
        bundle.use = bundle.cached.get();
        if (opt.record) bundle.record_path = opt.replay_path;
    } else {
        bundle.use = bundle.upstream.get();
    }

    if (!bundle.use) {
        throw ConfigError("choose a model source: --mock, --replay, or --llm-endpoint");
    }
    return bundle;
}

int run_ingest(const std::string& home_path, const std::string& events_path,
               const std::string& out_path) {
    const HomeMetadata meta = load_home_metadata(home_path);
    auto in = open_input(events_path, "event log");
    const auto events = parse_event_stream(in, meta);
    Diagnostics diag;
    const auto states = pair_events(events, meta, &diag);

    if (out_path.empty()) {
        serialize_interval_records(states, std::cout);
    } else {
        auto out = open_output(out_path, "state");
        serialize_interval_records(states, out);
    }
    print_diagnostics(diag);
    std::cerr << events.size() << " events -> " << states.size() << " states\n";
    return 0;
}

// Labeled texts for `pool build --train`: one {"text", "label"} object per line.
std::vector<LabeledText> load_labeled_texts(const std::string& path) {
    auto in = open_input(path, "training text");
    std::vector<LabeledText> items;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            items.push_back({rec.at("text").get<std::string>(),
                             rec.at("label").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("training text file '" + path + "' line " + std::to_string(line_no) +
                             ": " + e.what());
        }
    }
    return items;
}

// The report in all three shapes recognize/evaluate produce.
void write_report_artifacts(const EvalReport& report, const fs::path& dir) {
    auto json_out = open_output((dir / "report.json").string(), "report");
    write_report_json(report, json_out);
    open_output((dir / "report.txt").string(), "report table") << format_report_table(report);
    if (!report.ecdf.empty()) {
        open_output((dir / "ecdf.txt").string(), "ECDF table") << format_ecdf_table(report.ecdf);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Activity recognition over smart-home sensor logs with a chat-completion model"};
    app.require_subcommand(1);

    std::string home_path, events_path, annotations_path, out_path, report_path;
    std::string predictions_path, pool_path, train_path;
    RunConfig run;
    ClientOptions client_opt;
    double window_seconds = 16.0;
    double overlap = 0.8;

    auto add_data_options = [&](CLI::App* cmd, bool required) {
        auto* home = cmd->add_option("--home", home_path, "Home metadata JSON");
        auto* events = cmd->add_option("--events", events_path, "Sensor event log CSV");
        auto* ann =
            cmd->add_option("--annotations", annotations_path, "Ground-truth annotation CSV");
        if (required) {
            home->required();
            events->required();
            ann->required();
        }
        cmd->add_option("--window-seconds", window_seconds, "Window length in seconds");
        cmd->add_option("--overlap", overlap, "Fraction of a window shared with the next");
        cmd->add_option("--train-frac", run.train_frac,
                        "Chronological fraction of windows feeding the example pool");
        cmd->add_option("--scarcity", run.scarcity_pct,
                        "Percentage of training windows kept: 100, 50, 25, 10 or 5");
        cmd->add_option("--seed", run.seed, "Seed for the scarcity subsample");
        cmd->add_flag("--keep-empty-windows", [&run](std::int64_t) {
            run.skip_empty_windows = false;
        }, "Evaluate windows with no sensor activity too");
    };

    // ingest
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Convert a raw event log into sensor-state intervals");
    ingest_cmd->add_option("--home", home_path, "Home metadata JSON")->required();
    ingest_cmd->add_option("--events", events_path, "Sensor event log CSV")->required();
    ingest_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");

    // pool build
    auto* pool_cmd = app.add_subcommand("pool", "Example-pool operations");
    pool_cmd->require_subcommand(1);
    auto* pool_build_cmd = pool_cmd->add_subcommand(
        "build", "Build the few-shot example pool from the training split or a labeled-text file");
    add_data_options(pool_build_cmd, false);
    add_client_options(pool_build_cmd, client_opt);
    pool_build_cmd->add_option("--train", train_path,
                               "Labeled texts JSONL ({text, label} per line) instead of "
                               "--home/--events/--annotations");
    pool_build_cmd->add_option("--out", out_path, "Pool JSONL path")->required();

    // recognize
    auto* recognize_cmd =
        app.add_subcommand("recognize", "Run recognition over the test split and score it");
    add_data_options(recognize_cmd, true);
    add_client_options(recognize_cmd, client_opt);
    recognize_cmd->add_option("--mode", run.mode, "Prompting mode: zero or few")
        ->check(CLI::IsMember({"zero", "few"}));
    recognize_cmd->add_option("--k", run.k, "Examples per few-shot prompt");
    recognize_cmd->add_option("--pool", pool_path,
                              "Use this prebuilt pool instead of building one from the training "
                              "split");
    recognize_cmd->add_option("--out", out_path, "Output directory for all run artifacts")
        ->required();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Re-score an existing predictions file");
    evaluate_cmd->add_option("--predictions", predictions_path, "Predictions JSONL")->required();
    evaluate_cmd->add_option("--out", out_path, "Output directory for the report artifacts");

    // report ecdf
    auto* report_cmd = app.add_subcommand("report", "Report utilities");
    report_cmd->require_subcommand(1);
    auto* report_ecdf_cmd =
        report_cmd->add_subcommand("ecdf", "Print the response-latency ECDF from a report");
    report_ecdf_cmd->add_option("--report", report_path, "Report JSON")->required();
    report_ecdf_cmd->add_option("--out", out_path, "Output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) return run_ingest(home_path, events_path, out_path);

        if (*pool_build_cmd) {
            ClientBundle client = make_client(client_opt);
            Diagnostics diag;
            ExamplePool pool;
            if (!train_path.empty()) {
                pool = build_pool(load_labeled_texts(train_path), *client.use, client.embed_tag,
                                  &diag);
            } else {
                if (home_path.empty() || events_path.empty() || annotations_path.empty()) {
                    throw ConfigError(
                        "pool build needs either --train or all of --home/--events/--annotations");
                }
                run.windowing = {window_seconds, overlap};
                run.embed_model_tag = client.embed_tag;
                LoadedData data =
                    load_windows(home_path, events_path, annotations_path, run.windowing);
                const auto prepared = prepare_windows(data.windows, data.meta, run, &data.diag);
                pool = build_training_pool(prepared, *client.use, client.embed_tag, &data.diag);
                diag = data.diag;
            }
            save_pool(pool, out_path);
            client.finish();
            print_diagnostics(diag);
            std::cerr << "pool: " << pool.size() << " examples (" << pool.embed_model_tag
                      << ") -> " << out_path << '\n';
            return 0;
        }

        if (*recognize_cmd) {
            run.windowing = {window_seconds, overlap};
            LoadedData data = load_windows(home_path, events_path, annotations_path, run.windowing);
            ClientBundle client = make_client(client_opt);
            run.embed_model_tag = client.embed_tag;

            ExamplePool preloaded;
            const ExamplePool* pool_ptr = nullptr;
            if (!pool_path.empty()) {
                preloaded = load_pool(pool_path);
                if (preloaded.embed_model_tag != client.embed_tag) {
                    throw ConfigError("pool '" + pool_path + "' was embedded with '" +
                                      preloaded.embed_model_tag + "' but this run embeds with '" +
                                      client.embed_tag + "'");
                }
                pool_ptr = &preloaded;
            }

            RunResult result = run_recognition(data.windows, data.meta, run, client.llm,
                                               *client.use, pool_ptr);
            client.finish();

            auto& echo = result.report.config_echo;
            echo["home_path"] = home_path;
            echo["events_path"] = events_path;
            echo["annotations_path"] = annotations_path;
            if (!pool_path.empty()) echo["pool_path"] = pool_path;
            if (!client_opt.replay_path.empty()) echo["replay_path"] = client_opt.replay_path;

            const fs::path out_dir(out_path);
            fs::create_directories(out_dir);
            save_predictions(result.predictions, result.truths,
                             (out_dir / "predictions.jsonl").string());
            write_report_artifacts(result.report, out_dir);
            if (!result.pool.empty()) save_pool(result.pool, (out_dir / "pool.jsonl").string());

            print_diagnostics(data.diag);
            print_diagnostics(result.diagnostics);
            std::cout << format_report_table(result.report);
            return 0;
        }

        if (*evaluate_cmd) {
            std::vector<Prediction> predictions;
            std::vector<std::string> truths;
            load_predictions(predictions_path, predictions, truths);

            std::vector<std::pair<EpochSeconds, std::string>> truth_pairs;
            truth_pairs.reserve(predictions.size());
            for (std::size_t i = 0; i < predictions.size(); ++i) {
                truth_pairs.emplace_back(predictions[i].window_start, truths[i]);
            }

            EvalReport report = score(predictions, truth_pairs);
            report.config_echo["source"] = predictions_path;
            if (!out_path.empty()) {
                const fs::path out_dir(out_path);
                fs::create_directories(out_dir);
                write_report_artifacts(report, out_dir);
            }
            std::cout << format_report_table(report);
            return 0;
        }

        if (*report_ecdf_cmd) {
            auto in = open_input(report_path, "report");
            const EvalReport report = read_report_json(in);
            if (out_path.empty()) {
                std::cout << format_ecdf_table(report.ecdf);
            } else {
                auto out = open_output(out_path, "ECDF");
                out << format_ecdf_table(report.ecdf);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
