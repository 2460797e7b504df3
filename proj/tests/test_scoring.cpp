#include "doctest.h"

#include "atoms/scoring.hpp"

using namespace atoms;

namespace {

std::vector<DatasetRecord> tiny_dataset() {
    SuiteManifest manifest;
    manifest.suite_seed = 31;
    manifest.counts = {{"reality", 4}, {"desire", 4}};
    SuiteResult result = gen_suite(manifest);
    REQUIRE(result.failures.empty());
    std::vector<DatasetRecord> records;
    for (const auto& inst : result.instances) records.push_back(record_from_instance(inst));
    return records;
}

EvalRecord make_record(const DatasetRecord& d, bool correct) {
    EvalRecord r;
    r.instance_id = d.id();
    r.mode = "zero";
    r.model = "m";
    r.extracted = correct ? std::string(1, d.gold) : "Z";
    r.correct = correct;
    r.attempts = 1;
    return r;
}

}  // namespace

TEST_CASE("wilson interval brackets the point estimate") {
    auto [lo, hi] = wilson_interval(91, 100);
    CHECK(lo < 0.91);
    CHECK(hi > 0.91);
    CHECK(lo > 0.83);  // known bracket for 91/100 at 95%
    CHECK(hi < 0.96);
    auto [zlo, zhi] = wilson_interval(0, 50);
    CHECK(zlo == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(zhi < 0.10);
    auto [flo, fhi] = wilson_interval(50, 50);
    CHECK(fhi == 1.0);
    CHECK(flo > 0.9);
}

TEST_CASE("score counts exactly and reports 91/100 as 0.91") {
    auto dataset = tiny_dataset();
    // Synthesize a 100-record run on one task row: 91 correct.
    std::vector<EvalRecord> records;
    for (int i = 0; i < 100; ++i) {
        EvalRecord r = make_record(dataset[static_cast<size_t>(i % 4)], i < 91);
        r.instance_id = dataset[static_cast<size_t>(i % 4)].id();
        records.push_back(r);
    }
    ScoreTable table = score(records, dataset);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].task_id == "reality");
    CHECK(table.rows[0].n == 100);
    CHECK(table.rows[0].correct == 91);
    CHECK(table.rows[0].accuracy == doctest::Approx(0.91));
}

TEST_CASE("tasks with no records are omitted") {
    auto dataset = tiny_dataset();
    std::vector<EvalRecord> records = {make_record(dataset[0], true)};
    ScoreTable table = score(records, dataset);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].task_id == "reality");
    CHECK(score({}, dataset).rows.empty());
}

TEST_CASE("dangling instance ids are an error that lists them") {
    auto dataset = tiny_dataset();
    EvalRecord ghost = make_record(dataset[0], true);
    ghost.instance_id = "reality-424242";
    try {
        score({ghost}, dataset);
        FAIL("expected an error");
    } catch (const EvalError& e) {
        CHECK(std::string(e.what()).find("reality-424242") != std::string::npos);
    }
}

TEST_CASE("unparseable answers count as incorrect and are tallied") {
    auto dataset = tiny_dataset();
    EvalRecord r = make_record(dataset[0], false);
    r.extracted = "";
    ScoreTable table = score({r}, dataset);
    CHECK(table.rows[0].unparseable == 1);
    CHECK(table.rows[0].correct == 0);
}

TEST_CASE("score output is deterministic and row-sorted by task order") {
    auto dataset = tiny_dataset();
    std::vector<EvalRecord> records;
    for (const auto& d : dataset) records.push_back(make_record(d, true));
    ScoreTable table = score(records, dataset);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].task_id == "reality");  // canonical order, not alphabetical
    CHECK(table.rows[1].task_id == "desire");
    CHECK(table.to_csv() == score(records, dataset).to_csv());
    CHECK(table.to_text() == score(records, dataset).to_text());

    // CSV carries one line per row plus the header.
    std::string csv = table.to_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.rfind("task_id,model,mode,n,correct,accuracy,ci_low,ci_high,unparseable\n", 0) ==
          0);
}

TEST_CASE("oracle closure: a perfect run scores 1.00 on every row") {
    auto dataset = tiny_dataset();
    ScriptedOracleClient oracle(dataset);
    EvalOptions options;
    auto records = evaluate(dataset, oracle, options);
    ScoreTable table = score(records, dataset);
    for (const auto& row : table.rows) {
        CHECK(row.accuracy == doctest::Approx(1.0));
        CHECK(row.unparseable == 0);
    }
}
