#include "adlr/fewshot.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "adlr/embed.hpp"
#include "adlr/errors.hpp"

namespace adlr {

namespace {

using nlohmann::json;

}  // namespace

ExamplePool build_pool(const std::vector<LabeledText>& items, Client& embedder,
                       const std::string& embed_model_tag, Diagnostics* diag) {
    // First appearance order, one entry per distinct (text, label) pair.
    std::vector<LabeledText> unique;
    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, std::set<std::string>> labels_by_text;
    for (const auto& item : items) {
        labels_by_text[item.text].insert(item.label);
        if (seen.insert({item.text, item.label}).second) unique.push_back(item);
    }

    ExamplePool pool;
    pool.embed_model_tag = embed_model_tag;
    std::size_t conflicting = 0;
    for (const auto& item : unique) {
        // A text that occurs with different labels is ambiguous evidence and
        // would contradict itself as an example; drop every copy.
        if (labels_by_text[item.text].size() > 1) {
            ++conflicting;
            continue;
        }
        try {
            pool.examples.push_back({item.text, item.label, embedder.embed(item.text)});
        } catch (const Error& e) {
            std::string snippet = item.text.substr(0, 60);
            if (item.text.size() > 60) snippet += "...";
            throw ConfigError("failed to embed pool example \"" + snippet + "\": " + e.what());
        }
    }
    if (conflicting > 0 && diag) {
        diag->warn(std::to_string(conflicting) +
                   " pool entries dropped because their text carries conflicting labels");
    }
    return pool;
}

std::vector<PoolExample> select_examples(const ExamplePool& pool, const Embedding& query,
                                         std::size_t k, Diagnostics* diag) {
    if (pool.examples.empty()) throw SelectionError("cannot select examples from an empty pool");
    if (k == 0) throw SelectionError("cannot select zero examples; use the zero-shot mode");
    if (k > pool.size()) {
        if (diag) {
            diag->warn("requested " + std::to_string(k) + " examples but the pool holds " +
                       std::to_string(pool.size()) + "; using all of them");
        }
        k = pool.size();
    }

    std::vector<std::pair<double, std::size_t>> scored;  // (similarity, pool index)
    scored.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        scored.emplace_back(cosine_similarity(query, pool.examples[i].embedding), i);
    }
    // Stable sort on similarity only, so equal scores keep pool order.
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<PoolExample> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(pool.examples[scored[i].second]);
    return out;
}

void save_pool(const ExamplePool& pool, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write pool file '" + path + "'");
    for (const auto& ex : pool.examples) {
        json rec;
        rec["text"] = ex.text;
        rec["label"] = ex.label;
        rec["embedding"] = ex.embedding.values;
        rec["embed_model_tag"] = pool.embed_model_tag;
        out << rec.dump() << '\n';
    }
}

ExamplePool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pool file '" + path + "'");

    ExamplePool pool;
    std::set<std::string> texts_seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("pool file '" + path + "' line " + std::to_string(line_no) + ": " +
                             e.what());
        }
        try {
            PoolExample ex;
            ex.text = rec.at("text").get<std::string>();
            ex.label = rec.at("label").get<std::string>();
            ex.embedding.values = rec.at("embedding").get<std::vector<double>>();
            const auto tag = rec.at("embed_model_tag").get<std::string>();
            if (pool.examples.empty()) {
                pool.embed_model_tag = tag;
            } else if (tag != pool.embed_model_tag) {
                throw SchemaError("pool file '" + path + "' mixes embedder tags '" +
                                  pool.embed_model_tag + "' and '" + tag + "'");
            }
            if (!pool.examples.empty() &&
                ex.embedding.dim() != pool.examples.front().embedding.dim()) {
                throw SchemaError("pool file '" + path + "' line " + std::to_string(line_no) +
                                  ": embedding dimension differs from earlier entries");
            }
            if (!texts_seen.insert(ex.text).second) {
                throw SchemaError("pool file '" + path + "' line " + std::to_string(line_no) +
                                  ": duplicate example text");
            }
            pool.examples.push_back(std::move(ex));
        } catch (const json::exception& e) {
            throw SchemaError("pool file '" + path + "' line " + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
    return pool;
}

}  // namespace adlr
