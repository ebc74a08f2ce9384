#include "adlr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

#include "adlr/errors.hpp"

namespace adlr {

namespace {

using nlohmann::json;

// Unbiased draw in [0, bound) from the raw 64-bit stream; kept free of
// std::uniform_int_distribution so sampled indices are reproducible
// everywhere.
std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t v = gen();
    while (v >= limit) v = gen();
    return v % bound;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

ChronoSplit chronological_split(std::size_t n, double train_frac) {
    if (n < 2) {
        throw ConfigError("need at least 2 windows to split into train and test");
    }
    if (train_frac <= 0.0 || train_frac >= 1.0) {
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    }
    const auto train_count =
        static_cast<std::size_t>(std::ceil(train_frac * static_cast<double>(n)));
    if (train_count >= n) {
        throw ConfigError("train fraction " + std::to_string(train_frac) + " leaves no windows of " +
                          std::to_string(n) + " for evaluation");
    }

    ChronoSplit split;
    for (std::size_t i = 0; i < n; ++i) {
        (i < train_count ? split.train : split.test).push_back(i);
    }
    return split;
}

std::vector<std::size_t> subsample_indices(std::size_t n, double pct, std::uint64_t seed) {
    if (pct <= 0.0 || pct > 100.0) {
        throw ConfigError("subsample percentage must lie in (0, 100]");
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    if (pct == 100.0 || n == 0) return all;

    const auto m = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(n)));
    if (m >= n) return all;

    // Partial Fisher-Yates: the first m slots end up holding the sample.
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded_draw(gen, n - i));
        std::swap(all[i], all[j]);
    }
    all.resize(m);
    std::sort(all.begin(), all.end());  // keep the windows in original order
    return all;
}

std::vector<std::pair<double, double>> ecdf(std::vector<double> values) {
    if (values.empty()) throw ScoringError("cannot compute an ECDF of zero values");
    for (double v : values) {
        if (v < 0.0 || std::isnan(v)) {
            throw ScoringError("ECDF values must be non-negative");
        }
    }
    std::vector<std::pair<double, double>> points;
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    std::size_t covered = 0;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        covered = j;
        points.emplace_back(values[i], static_cast<double>(covered) / n);
        i = j;
    }
    return points;
}

EvalReport score(const std::vector<std::string>& truths, const std::vector<std::string>& preds) {
    if (truths.empty()) throw ScoringError("nothing to score: no labeled predictions");
    if (truths.size() != preds.size()) {
        throw ScoringError("truth and prediction counts differ (" + std::to_string(truths.size()) +
                           " vs " + std::to_string(preds.size()) + ")");
    }

    EvalReport report;
    report.window_count = truths.size();

    std::map<std::string, std::size_t> predicted;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        ++report.support[truths[i]];
        ++predicted[preds[i]];
        ++report.confusion[truths[i]][preds[i]];
    }

    for (const auto& [label, support] : report.support) {
        double tp = 0.0;
        if (auto row = report.confusion.find(label); row != report.confusion.end()) {
            if (auto cell = row->second.find(label); cell != row->second.end()) {
                tp = static_cast<double>(cell->second);
            }
        }
        const double pred_count =
            predicted.count(label) ? static_cast<double>(predicted.at(label)) : 0.0;
        const double precision = pred_count > 0.0 ? tp / pred_count : 0.0;
        const double recall = tp / static_cast<double>(support);
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;

        report.per_activity_f1[label] = f1;
        report.weighted_f1 +=
            static_cast<double>(support) / static_cast<double>(report.window_count) * f1;
    }
    return report;
}

EvalReport score(const std::vector<Prediction>& predictions,
                 const std::vector<std::pair<EpochSeconds, std::string>>& truths) {
    if (predictions.empty()) throw ScoringError("nothing to score: no predictions");

    std::map<EpochSeconds, std::string> truth_by_start;
    for (const auto& [start, label] : truths) {
        if (!truth_by_start.emplace(start, label).second) {
            throw ScoringError("two truth entries share window start " + std::to_string(start));
        }
    }

    std::vector<std::string> truth_labels, pred_labels;
    std::vector<double> latencies;
    std::map<EpochSeconds, bool> matched;
    for (const auto& p : predictions) {
        auto it = truth_by_start.find(p.window_start);
        if (it == truth_by_start.end()) {
            throw ScoringError("prediction at window start " + std::to_string(p.window_start) +
                               " has no matching truth entry");
        }
        if (matched[p.window_start]) {
            throw ScoringError("two predictions share window start " +
                               std::to_string(p.window_start));
        }
        matched[p.window_start] = true;
        truth_labels.push_back(it->second);
        pred_labels.push_back(p.label);
        latencies.push_back(p.latency);
    }
    if (matched.size() != truth_by_start.size()) {
        throw ScoringError(std::to_string(truth_by_start.size() - matched.size()) +
                           " truth entries have no matching prediction");
    }

    EvalReport report = score(truth_labels, pred_labels);
    report.ecdf = ecdf(std::move(latencies));
    return report;
}

void write_report_json(const EvalReport& report, std::ostream& out) {
    json doc;
    doc["windows"] = report.window_count;
    doc["weighted_f1"] = report.weighted_f1;
    doc["per_activity_f1"] = report.per_activity_f1;
    doc["support"] = report.support;
    doc["confusion"] = report.confusion;
    doc["ecdf"] = json::array();
    for (const auto& [x, f] : report.ecdf) doc["ecdf"].push_back({x, f});
    doc["config"] = report.config_echo;
    out << doc.dump(2) << '\n';
}

EvalReport read_report_json(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("report is not valid JSON: ") + e.what());
    }
    EvalReport report;
    try {
        report.window_count = doc.at("windows").get<std::size_t>();
        report.weighted_f1 = doc.at("weighted_f1").get<double>();
        report.per_activity_f1 =
            doc.at("per_activity_f1").get<std::map<std::string, double>>();
        report.support = doc.at("support").get<std::map<std::string, std::size_t>>();
        report.confusion =
            doc.at("confusion")
                .get<std::map<std::string, std::map<std::string, std::size_t>>>();
        for (const auto& point : doc.at("ecdf")) {
            report.ecdf.emplace_back(point.at(0).get<double>(), point.at(1).get<double>());
        }
        if (doc.contains("config")) {
            report.config_echo = doc.at("config").get<std::map<std::string, std::string>>();
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("report is missing required fields: ") + e.what());
    }
    return report;
}

std::string format_report_table(const EvalReport& report) {
    // Labels the model produced that never occur in the truth: shown with a
    // dash instead of an F1 so wrong guesses outside the truth stay visible.
    std::vector<std::string> ghost_labels;
    for (const auto& [truth, row] : report.confusion) {
        for (const auto& [pred, _] : row) {
            if (report.support.count(pred) == 0 &&
                std::find(ghost_labels.begin(), ghost_labels.end(), pred) == ghost_labels.end()) {
                ghost_labels.push_back(pred);
            }
        }
    }
    std::sort(ghost_labels.begin(), ghost_labels.end());

    std::size_t width = std::string("activity").size();
    for (const auto& [label, _] : report.per_activity_f1) width = std::max(width, label.size());
    for (const auto& label : ghost_labels) width = std::max(width, label.size());

    std::string out;
    out += "activity" + std::string(width - 8, ' ') + "  support        f1\n";
    for (const auto& [label, f1] : report.per_activity_f1) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-*s  %7zu  %8.6f\n", static_cast<int>(width),
                      label.c_str(), report.support.at(label), f1);
        out += line;
    }
    for (const auto& label : ghost_labels) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-*s  %7zu  ", static_cast<int>(width), label.c_str(),
                      static_cast<std::size_t>(0));
        out += line;
        out += std::string(7, ' ') + "—\n";
    }
    char total[256];
    std::snprintf(total, sizeof(total), "%-*s  %7zu  %8.6f\n", static_cast<int>(width),
                  "weighted", report.window_count, report.weighted_f1);
    out += total;
    return out;
}

std::string format_ecdf_table(const std::vector<std::pair<double, double>>& points) {
    std::string out = "latency_seconds  cumulative_fraction\n";
    for (const auto& [x, f] : points) {
        out += std::string(15 - std::min<std::size_t>(15, fixed6(x).size()), ' ') + fixed6(x) +
               "  " + fixed6(f) + "\n";
    }
    return out;
}

}  // namespace adlr
