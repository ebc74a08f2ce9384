#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adlr/types.hpp"

namespace adlr {

// Index split of a chronologically ordered window list: the first
// ceil(train_frac * n) windows feed the example pool, the rest are evaluated.
struct ChronoSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
ChronoSplit chronological_split(std::size_t n, double train_frac);

// Uniform sample without replacement of round(pct/100 * n) indices out of
// [0, n), returned in ascending order. Deterministic for a given seed;
// pct = 100 returns every index.
std::vector<std::size_t> subsample_indices(std::size_t n, double pct, std::uint64_t seed);

// Empirical CDF: one (x, fraction of values <= x) point per distinct value,
// x ascending. Values must be non-empty and non-negative.
std::vector<std::pair<double, double>> ecdf(std::vector<double> values);

struct EvalReport {
    std::size_t window_count = 0;
    std::map<std::string, std::size_t> support;           // truth label -> count
    std::map<std::string, double> per_activity_f1;        // labels with support > 0
    double weighted_f1 = 0.0;                             // support-weighted mean F1
    std::map<std::string, std::map<std::string, std::size_t>> confusion;  // truth -> pred -> n
    std::vector<std::pair<double, double>> ecdf;          // ECDF of response latencies
    std::map<std::string, std::string> config_echo;       // run parameters, for audit
};

// Per-activity precision/recall/F1 plus the support-weighted F1 over the
// activities that actually occur. Lists must be equal-length and non-empty.
// The latency ECDF stays empty; this form has no latency information.
EvalReport score(const std::vector<std::string>& truths, const std::vector<std::string>& preds);

// Same metrics, but predictions are matched to truth labels by window start,
// so neither side depends on the other's ordering. Every prediction must
// match exactly one truth entry and vice versa. Also fills the latency ECDF
// from the predictions.
EvalReport score(const std::vector<Prediction>& predictions,
                 const std::vector<std::pair<EpochSeconds, std::string>>& truths);

// Canonical JSON form; writing is deterministic for a given report.
void write_report_json(const EvalReport& report, std::ostream& out);
EvalReport read_report_json(std::istream& in);

// Fixed-width summary for terminals. Labels that were predicted but never
// appear in the truth get a dash row so misfires stay visible.
std::string format_report_table(const EvalReport& report);

// Two columns: latency in seconds and cumulative fraction.
std::string format_ecdf_table(const std::vector<std::pair<double, double>>& points);

}  // namespace adlr
