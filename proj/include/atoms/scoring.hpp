#pragma once

#include <string>
#include <vector>

#include "atoms/evalharness.hpp"

namespace atoms {

struct ScoreRow {
    std::string task_id;
    std::string model;
    std::string mode;
    int n = 0;
    int correct = 0;
    int unparseable = 0;
    double accuracy = 0.0;
    double ci_low = 0.0;   // Wilson 95% interval
    double ci_high = 0.0;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;  // sorted by (task order, model, mode)

    std::string to_text() const;
    std::string to_csv() const;
    Json to_json() const;
};

// Wilson score interval at 95% confidence.
std::pair<double, double> wilson_interval(int correct, int n);

// Exact counting per (task, model, mode). Records referencing instance ids
// absent from the dataset are an error listing the offending ids.
ScoreTable score(const std::vector<EvalRecord>& records,
                 const std::vector<DatasetRecord>& dataset);

}  // namespace atoms
