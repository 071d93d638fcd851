#pragma once

#include "traclets/error.hpp"
#include "traclets/manifest.hpp"
#include "traclets/text.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace traclets {

struct PredictionRow {
    std::string path;
    std::string truth;
    std::string predicted;

    friend bool operator==(const PredictionRow&, const PredictionRow&) = default;
};

/// CSV with header `path,true,pred`.
inline std::vector<PredictionRow> read_predictions(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot open '" + file.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw InputError(file.string() + ": empty prediction file");
    const auto header = text::split_fields(line, ',');
    if (header != std::vector<std::string>{"path", "true", "pred"})
        throw InputError(file.string() + ": header must be 'path,true,pred'");
    std::vector<PredictionRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto f = text::split_fields(line, ',');
        if (f.size() != 3)
            throw InputError(file.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
        rows.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2])});
    }
    return rows;
}

inline void write_predictions(const std::filesystem::path& file, const std::vector<PredictionRow>& rows) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InputError("cannot write '" + file.string() + "'");
    out << "path,true,pred\n";
    for (const auto& r : rows) out << r.path << ',' << r.truth << ',' << r.predicted << '\n';
}

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::string> labels;                  ///< confusion axis order
    std::vector<std::vector<std::uint64_t>> confusion; ///< [true][pred]
};

/// Precision, recall and F1 use 0 for an empty denominator. Macro averages
/// are unweighted means over labels that occur as a truth or a prediction.
inline MetricsReport compute_metrics(const std::vector<PredictionRow>& rows,
                                     const std::set<std::string>& label_set) {
    MetricsReport r;
    r.labels.assign(label_set.begin(), label_set.end());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < r.labels.size(); ++i) index[r.labels[i]] = i;
    const auto k = r.labels.size();
    r.confusion.assign(k, std::vector<std::uint64_t>(k, 0));

    std::uint64_t correct = 0;
    for (const auto& row : rows) {
        const auto t = index.find(row.truth);
        const auto p = index.find(row.predicted);
        if (t == index.end() || p == index.end())
            throw InputError("label outside the label set in row '" + row.path + "," + row.truth +
                             "," + row.predicted + "'");
        r.confusion[t->second][p->second] += 1;
        if (t->second == p->second) ++correct;
    }
    r.accuracy = rows.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(rows.size());

    std::size_t active = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t tp = r.confusion[c][c], row_sum = 0, col_sum = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += r.confusion[c][j];
            col_sum += r.confusion[j][c];
        }
        ClassMetrics m;
        m.label = r.labels[c];
        m.support = row_sum;
        m.precision = col_sum ? static_cast<double>(tp) / static_cast<double>(col_sum) : 0.0;
        m.recall = row_sum ? static_cast<double>(tp) / static_cast<double>(row_sum) : 0.0;
        m.f1 = m.precision + m.recall > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        if (row_sum || col_sum) {
            ++active;
            r.macro_precision += m.precision;
            r.macro_recall += m.recall;
            r.macro_f1 += m.f1;
        }
        r.per_class.push_back(std::move(m));
    }
    if (active) {
        r.macro_precision /= static_cast<double>(active);
        r.macro_recall /= static_cast<double>(active);
        r.macro_f1 /= static_cast<double>(active);
    }
    return r;
}

/// Every row must name a test-split path of the manifest with that path's
/// true label, and predict a label from the manifest's label set.
inline MetricsReport evaluate(const std::vector<PredictionRow>& rows, const DatasetManifest& manifest) {
    const auto labels = manifest.labels();
    std::set<std::string> seen;
    for (const auto& row : rows) {
        const auto where = "row '" + row.path + "," + row.truth + "," + row.predicted + "'";
        const auto* entry = manifest.find_path(row.path);
        if (!entry) throw InputError("unknown path in " + where);
        if (entry->split != Split::test) throw InputError("path not in the test split in " + where);
        if (entry->label != row.truth) throw InputError("true label disagrees with manifest in " + where);
        if (!labels.contains(row.predicted)) throw InputError("unknown predicted label in " + where);
        if (!seen.insert(row.path).second) throw InputError("duplicate path in " + where);
    }
    return compute_metrics(rows, labels);
}

inline void to_json(nlohmann::json& j, const MetricsReport& r) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : r.per_class)
        classes.push_back({{"label", c.label},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support}});
    j = nlohmann::json{{"accuracy", r.accuracy},
                       {"macro", {{"precision", r.macro_precision},
                                  {"recall", r.macro_recall},
                                  {"f1", r.macro_f1}}},
                       {"per_class", classes},
                       {"labels", r.labels},
                       {"confusion", r.confusion}};
}

inline std::string format_table(const MetricsReport& r) {
    std::size_t width = 5;
    for (const auto& c : r.per_class) width = std::max(width, c.label.size());
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %9s  %6s  %6s  %7s\n", static_cast<int>(width), "class",
                  "precision", "recall", "f1", "support");
    out << buf;
    for (const auto& c : r.per_class) {
        std::snprintf(buf, sizeof buf, "%-*s  %9.2f  %6.2f  %6.2f  %7llu\n", static_cast<int>(width),
                      c.label.c_str(), c.precision, c.recall, c.f1,
                      static_cast<unsigned long long>(c.support));
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-*s  %9.2f  %6.2f  %6.2f\n", static_cast<int>(width), "macro",
                  r.macro_precision, r.macro_recall, r.macro_f1);
    out << buf;
    std::snprintf(buf, sizeof buf, "accuracy %.4f\n", r.accuracy);
    out << buf;
    return out.str();
}

} // namespace traclets
