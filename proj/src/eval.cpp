#include "attrforge/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "attrforge/error.hpp"
#include "text_util.hpp"

namespace attrforge {

std::string write_predictions(std::span<const PredictionRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += r.sentence_id;
        out += '\t';
        out += to_string(r.label);
        out += '\t';
        out += format_span(r.e1);
        out += '\t';
        out += format_span(r.e2);
        out += '\n';
    }
    return out;
}

std::vector<PredictionRecord> read_predictions(std::string_view text) {
    std::vector<PredictionRecord> out;
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 4) throw ParseError("expected 4 tab-separated columns", line_no);
        PredictionRecord r;
        r.sentence_id = std::string(cols[0]);
        if (r.sentence_id.empty()) throw ParseError("empty sentence id", line_no, 1);
        const auto label = parse_label(cols[1]);
        if (!label) throw ParseError("unknown label '" + std::string(cols[1]) + "'", line_no, 2);
        r.label = *label;
        const auto e1 = parse_span(cols[2]);
        const auto e2 = parse_span(cols[3]);
        if (!e1 || e1->empty()) throw ParseError("malformed span", line_no, 3);
        if (!e2 || e2->empty()) throw ParseError("malformed span", line_no, 4);
        r.e1 = *e1;
        r.e2 = *e2;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

double ratio_percent(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double CategoryCounts::precision() const {
    return ratio_percent(correct, identified);
}

double CategoryCounts::recall() const {
    return ratio_percent(correct, total);
}

double CategoryCounts::f1() const {
    // 2PR/(P+R) with P = c/i and R = c/t reduces to 2c/(i+t).
    if (correct == 0) return 0.0;
    return ratio_percent(2 * correct, identified + total);
}

EvalReport score(std::span<const PredictionRecord> predictions, std::span<const TaggedSentence> gold) {
    std::unordered_map<std::string_view, const TaggedSentence*> by_id;
    for (const auto& s : gold) by_id.emplace(s.id, &s);

    EvalReport report;
    for (auto label : kPositiveLabels) report.per_category[label] = {};
    for (const auto& s : gold) {
        for (const auto& g : s.gold) {
            if (g.label != AttributeLabel::Other) ++report.per_category[g.label].total;
        }
    }

    // (sentence, gold index) pairs already credited.
    std::set<std::pair<const TaggedSentence*, std::size_t>> credited;
    for (const auto& p : predictions) {
        const auto it = by_id.find(p.sentence_id);
        if (it == by_id.end()) throw DataError("unknown sentence id '" + p.sentence_id + "'");
        if (p.label == AttributeLabel::Other) continue;
        auto& counts = report.per_category[p.label];
        ++counts.identified;
        const TaggedSentence* s = it->second;
        for (std::size_t g = 0; g < s->gold.size(); ++g) {
            const auto& ann = s->gold[g];
            if (ann.label == p.label && ann.e1 == p.e1 && ann.e2 == p.e2) {
                if (credited.insert({s, g}).second) ++counts.correct;
                break;
            }
        }
    }
    return report;
}

std::string format_percent(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return "0.00";
    // round(10000 * num / den) with halves rounded up, in hundredths of a percent.
    const std::uint64_t hundredths = (20000 * num + den) / (2 * den);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%llu.%02llu",
                  static_cast<unsigned long long>(hundredths / 100),
                  static_cast<unsigned long long>(hundredths % 100));
    return buf;
}

std::string format_precision(const CategoryCounts& counts) {
    return format_percent(counts.correct, counts.identified);
}

std::string format_recall(const CategoryCounts& counts) {
    return format_percent(counts.correct, counts.total);
}

std::string format_f1(const CategoryCounts& counts) {
    if (counts.correct == 0) return "0.00";
    return format_percent(2 * counts.correct, counts.identified + counts.total);
}

std::string render_report(const EvalReport& report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %7s %11s %8s %8s %8s %8s\n", "Category", "Total",
                  "Identified", "Correct", "P", "R", "F1");
    out += buf;
    for (auto label : kPositiveLabels) {
        const auto it = report.per_category.find(label);
        if (it == report.per_category.end()) continue;
        const auto& c = it->second;
        std::snprintf(buf, sizeof(buf), "%-12s %7zu %11zu %8zu %8s %8s %8s\n",
                      std::string(to_string(label)).c_str(), c.total, c.identified, c.correct,
                      format_precision(c).c_str(), format_recall(c).c_str(), format_f1(c).c_str());
        out += buf;
    }
    return out;
}

std::string render_report_tsv(const EvalReport& report) {
    std::string out;
    for (auto label : kPositiveLabels) {
        const auto it = report.per_category.find(label);
        if (it == report.per_category.end()) continue;
        const auto& c = it->second;
        out += std::string(to_string(label)) + '\t' + std::to_string(c.total) + '\t' +
               std::to_string(c.identified) + '\t' + std::to_string(c.correct) + '\t' +
               format_precision(c) + '\t' + format_recall(c) + '\t' + format_f1(c) + '\n';
    }
    return out;
}

}  // namespace attrforge
