#include "atoms/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace atoms {

namespace {

// Locale-independent fixed-point formatting.
std::string fixed(double x, int digits) {
    double scale = std::pow(10.0, digits);
    double rounded = std::round(x * scale) / scale;
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), rounded, std::chars_format::fixed,
                                   digits);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

int task_order(const std::string& task_id) {
    const auto& ids = task_ids();
    auto it = std::find(ids.begin(), ids.end(), task_id);
    return it == ids.end() ? static_cast<int>(ids.size()) : static_cast<int>(it - ids.begin());
}

}  // namespace

std::pair<double, double> wilson_interval(int correct, int n) {
    if (n <= 0) return {0.0, 0.0};
    const double z = 1.959963984540054;
    double p = static_cast<double>(correct) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ScoreTable score(const std::vector<EvalRecord>& records,
                 const std::vector<DatasetRecord>& dataset) {
    std::map<std::string, const DatasetRecord*> by_id;
    for (const auto& r : dataset) by_id[r.id()] = &r;

    std::vector<std::string> dangling;
    std::map<std::tuple<std::string, std::string, std::string>, ScoreRow> groups;
    for (const auto& rec : records) {
        auto it = by_id.find(rec.instance_id);
        if (it == by_id.end()) {
            dangling.push_back(rec.instance_id);
            continue;
        }
        auto key = std::make_tuple(it->second->task_id, rec.model, rec.mode);
        ScoreRow& row = groups[key];
        row.task_id = it->second->task_id;
        row.model = rec.model;
        row.mode = rec.mode;
        row.n += 1;
        row.correct += rec.correct ? 1 : 0;
        row.unparseable += rec.extracted.empty() ? 1 : 0;
    }
    if (!dangling.empty()) {
        std::string msg = "records reference unknown instance ids:";
        for (const auto& id : dangling) msg += " " + id;
        throw EvalError(msg);
    }

    ScoreTable table;
    for (auto& [key, row] : groups) {
        row.accuracy = row.n > 0 ? static_cast<double>(row.correct) / row.n : 0.0;
        std::tie(row.ci_low, row.ci_high) = wilson_interval(row.correct, row.n);
        table.rows.push_back(row);
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
        return std::make_tuple(task_order(a.task_id), a.model, a.mode) <
               std::make_tuple(task_order(b.task_id), b.model, b.mode);
    });
    return table;
}

std::string ScoreTable::to_text() const {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"task", "model", "mode", "n", "correct", "accuracy", "ci95", "unparseable"});
    for (const auto& r : rows) {
        cells.push_back({r.task_id, r.model, r.mode, std::to_string(r.n),
                         std::to_string(r.correct), fixed(r.accuracy, 3),
                         "[" + fixed(r.ci_low, 3) + ", " + fixed(r.ci_high, 3) + "]",
                         std::to_string(r.unparseable)});
    }
    std::vector<size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (const auto& row : cells) {
        for (size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            if (i + 1 < row.size()) out += std::string(widths[i] - row[i].size() + 2, ' ');
        }
        out += "\n";
    }
    return out;
}

std::string ScoreTable::to_csv() const {
    std::string out = "task_id,model,mode,n,correct,accuracy,ci_low,ci_high,unparseable\n";
    for (const auto& r : rows) {
        out += r.task_id + "," + r.model + "," + r.mode + "," + std::to_string(r.n) + "," +
               std::to_string(r.correct) + "," + fixed(r.accuracy, 4) + "," +
               fixed(r.ci_low, 4) + "," + fixed(r.ci_high, 4) + "," +
               std::to_string(r.unparseable) + "\n";
    }
    return out;
}

Json ScoreTable::to_json() const {
    Json arr = Json::array();
    for (const auto& r : rows) {
        arr.push_back(Json{{"task_id", r.task_id},
                           {"model", r.model},
                           {"mode", r.mode},
                           {"n", r.n},
                           {"correct", r.correct},
                           {"accuracy", r.accuracy},
                           {"ci_low", r.ci_low},
                           {"ci_high", r.ci_high},
                           {"unparseable", r.unparseable}});
    }
    return arr;
}

}  // namespace atoms
