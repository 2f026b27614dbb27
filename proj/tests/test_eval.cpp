#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attrforge/error.hpp"
#include "attrforge/eval.hpp"
#include "reference_tables.hpp"
#include "test_support.hpp"

using namespace attrforge;

namespace {

struct ParsedRow {
    std::string label;
    std::size_t total, identified, correct;
    double p, r, f1;
};

std::vector<ParsedRow> parse_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::vector<ParsedRow> rows;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        ParsedRow row;
        fields >> row.label >> row.total >> row.identified >> row.correct >> row.p >> row.r >> row.f1;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("reference rows are reproduced exactly") {
    for (const auto& table : testing::kReferenceTables) {
        const auto data = testing::realize(table);
        const auto report = score(data.predictions, data.gold);
        const auto rows = parse_table(render_report(report));
        REQUIRE(rows.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& want = table[i];
            const auto& got = rows[i];
            CAPTURE(got.label);
            CHECK(got.label == to_string(want.label));
            CHECK(got.total == want.total);
            CHECK(got.identified == want.identified);
            CHECK(got.correct == want.correct);
            CHECK(std::abs(got.p - want.p) <= 0.01 + 1e-9);
            CHECK(std::abs(got.r - want.r) <= 0.01 + 1e-9);
            CHECK(std::abs(got.f1 - want.f1) <= 0.01 + 1e-9);
            // Printed values agree to the last digit.
            CHECK(std::abs(got.p - want.p) < 1e-9);
            CHECK(std::abs(got.r - want.r) < 1e-9);
            CHECK(std::abs(got.f1 - want.f1) < 1e-9);
        }
    }
}

TEST_CASE("integer rounding agrees with long double rounding") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::uint64_t den = 1 + rng() % 5000;
        const std::uint64_t num = rng() % (den + 1);
        const long double exact = 10000.0L * num / den;
        const long double floor_part = std::floor(exact);
        // Skip values within float noise of a half; those are covered below.
        if (std::fabs(exact - floor_part - 0.5L) < 1e-9L) continue;
        const auto hundredths = static_cast<std::uint64_t>(std::llround(exact));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%llu.%02llu", static_cast<unsigned long long>(hundredths / 100),
                      static_cast<unsigned long long>(hundredths % 100));
        CHECK(format_percent(num, den) == buf);
    }
    CHECK(format_percent(1, 8) == "12.50");
    CHECK(format_percent(1, 16) == "6.25");
    CHECK(format_percent(1, 80000) == "0.00");  // 0.125 hundredths
    CHECK(format_percent(1, 20000) == "0.01");  // 0.5 hundredths rounds up
    CHECK(format_percent(0, 0) == "0.00");
    CHECK(format_percent(3, 3) == "100.00");
}

TEST_CASE("counting rules") {
    Corpus gold = {testing::sentence("s1", {{"a", "n", "PER"}, {"b", "n", "LOC"}, {"c", "n", "PER"}})};
    gold[0].gold = {{AttributeLabel::BirthPlace, {0, 1}, {1, 2}}};
    const std::vector<PredictionRecord> preds = {
        {"s1", AttributeLabel::BirthPlace, {0, 1}, {1, 2}},
        {"s1", AttributeLabel::BirthPlace, {0, 1}, {1, 2}},  // duplicate credits nothing extra
        {"s1", AttributeLabel::Father, {0, 1}, {2, 3}},
    };
    const auto report = score(preds, gold);
    const auto& bp = report.per_category.at(AttributeLabel::BirthPlace);
    CHECK(bp == CategoryCounts{1, 2, 1});
    const auto& f = report.per_category.at(AttributeLabel::Father);
    CHECK(f == CategoryCounts{0, 1, 0});
    CHECK(f.precision() == 0.0);
    CHECK(f.recall() == 0.0);
    CHECK(f.f1() == 0.0);
    CHECK(bp.precision() == doctest::Approx(50.0));
    CHECK(bp.f1() == doctest::Approx(200.0 / 3.0));

    const std::vector<PredictionRecord> stray = {{"nope", AttributeLabel::Father, {0, 1}, {2, 3}}};
    CHECK_THROWS_AS(score(stray, gold), DataError);
}

TEST_CASE("prediction files round trip") {
    const std::vector<PredictionRecord> records = {
        {"s1", AttributeLabel::Father, {0, 2}, {3, 4}},
        {"s2", AttributeLabel::BirthDate, {1, 2}, {0, 1}},
    };
    const auto text = write_predictions(records);
    CHECK(text == "s1\tFather\t0-2\t3-4\ns2\tBirthDate\t1-2\t0-1\n");
    CHECK(read_predictions(text) == records);
    CHECK_THROWS_AS(read_predictions("s1\tFather\t0-2\n"), ParseError);
    CHECK_THROWS_AS(read_predictions("s1\tFather\t2-2\t2-3\n"), ParseError);
    CHECK_THROWS_AS(read_predictions("s1\tSibling\t0-1\t2-3\n"), ParseError);
}

TEST_CASE("tsv report") {
    const auto data = testing::realize(testing::kReferenceTables[0]);
    const auto tsv = render_report_tsv(score(data.predictions, data.gold));
    CHECK(tsv.starts_with("BirthDate\t219\t162\t91\t56.17\t41.55\t47.77\n"));
}
