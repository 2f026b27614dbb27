#include <string>

#include "attrforge/error.hpp"
#include "attrforge/pipeline.hpp"
#include "text_util.hpp"

namespace attrforge {

namespace {

void write_svm(std::string& out, const SvmModel& m) {
    using detail::format_double;
    out += "params " + format_double(m.params.c) + " " + format_double(m.params.tol) + " " +
           format_double(m.params.eps) + " " + std::to_string(m.params.max_passes) + "\n";
    out += "dim " + std::to_string(m.weights.size()) + " bias " + format_double(m.bias) + " nsv " +
           std::to_string(m.n_support) + "\n";
    std::size_t nnz = 0;
    for (double w : m.weights) nnz += w != 0.0;
    out += "weights " + std::to_string(nnz);
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        if (m.weights[i] == 0.0) continue;
        out += ' ';
        out += std::to_string(i);
        out += ':';
        out += format_double(m.weights[i]);
    }
    out += '\n';
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : lines_(detail::split_lines(text)) {}

    std::string_view next() {
        if (pos_ >= lines_.size()) throw ModelFormatError("truncated model file");
        return lines_[pos_++];
    }

    // Splits the next line on whitespace and checks its leading keyword.
    std::vector<std::string_view> expect(std::string_view keyword, std::size_t min_fields) {
        const auto line = next();
        auto fields = detail::split_whitespace(line);
        if (fields.empty() || fields[0] != keyword || fields.size() < min_fields) {
            fail("expected '" + std::string(keyword) + "'");
        }
        return fields;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ModelFormatError("model file line " + std::to_string(pos_) + ": " + what);
    }

    std::size_t size_at(std::string_view text) const {
        auto v = detail::parse_size(text);
        if (!v) fail("expected a count");
        return *v;
    }

    double real_at(std::string_view text) const {
        auto v = detail::parse_double(text);
        if (!v) fail("expected a number");
        return *v;
    }

private:
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
};

SvmModel read_svm(LineReader& in) {
    SvmModel m;
    auto params = in.expect("params", 5);
    m.params.c = in.real_at(params[1]);
    m.params.tol = in.real_at(params[2]);
    m.params.eps = in.real_at(params[3]);
    m.params.max_passes = in.size_at(params[4]);
    auto dim = in.expect("dim", 6);
    if (dim[2] != "bias" || dim[4] != "nsv") in.fail("malformed dim line");
    m.weights.assign(in.size_at(dim[1]), 0.0);
    m.bias = in.real_at(dim[3]);
    m.n_support = in.size_at(dim[5]);
    auto weights = in.expect("weights", 2);
    const std::size_t nnz = in.size_at(weights[1]);
    if (weights.size() != nnz + 2) in.fail("weight count mismatch");
    for (std::size_t i = 0; i < nnz; ++i) {
        const auto entry = weights[i + 2];
        const auto colon = entry.find(':');
        if (colon == std::string_view::npos) in.fail("malformed weight entry");
        const std::size_t col = in.size_at(entry.substr(0, colon));
        if (col >= m.weights.size()) in.fail("weight column out of range");
        m.weights[col] = in.real_at(entry.substr(colon + 1));
    }
    return m;
}

}  // namespace

std::string serialize_model(const TrainedSystem& system) {
    using detail::format_double;
    std::string out(kModelHeader);
    out += '\n';

    const auto& keys = system.features.keys();
    out += "features " + std::to_string(keys.size()) + " " +
           (system.features.frozen() ? "1" : "0") + "\n";
    for (const auto& key : keys) out += key + "\n";

    const auto& kw = system.keywords;
    out += "keywords " + std::to_string(kw.size()) + " " + std::to_string(kw.params().min_frequency) +
           " " + std::to_string(kw.params().top_k_per_label) + "\n";
    for (const auto& [word, score] : kw.entries()) {
        out += word.first + "\t" + word.second + "\t" + format_double(score) + "\n";
    }

    const auto& h = system.hierarchy;
    out += "hierarchy " + std::to_string(h.config.layers.size()) + "\n";
    for (const auto& node : h.config.layers) {
        out += "layer ";
        for (std::size_t i = 0; i < node.categories.size(); ++i) {
            if (i) out += ',';
            out += node.categories[i];
        }
        out += '\n';
    }
    out += "fasttrack " + std::to_string(h.config.fast_track.size()) + "\n";
    for (const auto& rule : h.config.fast_track) {
        out += "rule " + std::to_string(rule.priority) + " " + format_fast_track_condition(rule) +
               " " + std::string(to_string(rule.target)) + "\n";
    }

    const std::size_t n_classifiers = h.pairwise.size() + (h.relevance ? 1 : 0);
    out += "classifiers " + std::to_string(n_classifiers) + "\n";
    if (h.relevance) {
        out += "classifier relevance Relevant Other\n";
        write_svm(out, *h.relevance);
    }
    for (const auto& [pair, svm] : h.pairwise) {
        out += "classifier pair " + std::string(to_string(pair.first)) + " " +
               std::string(to_string(pair.second)) + "\n";
        write_svm(out, svm);
    }
    out += "end\n";
    return out;
}

TrainedSystem deserialize_model(std::string_view bytes) {
    if (bytes.empty()) throw ModelFormatError("truncated model file: empty stream");
    LineReader in(bytes);
    const auto header = in.next();
    if (header != kModelHeader) {
        if (header.starts_with("ATTRFORGE-MODEL")) {
            throw ModelFormatError("unsupported model version '" + std::string(header) +
                                   "', expected '" + std::string(kModelHeader) + "'");
        }
        throw ModelFormatError("version mismatch: not an attrforge model file");
    }

    TrainedSystem system;
    auto features = in.expect("features", 3);
    const std::size_t n_features = in.size_at(features[1]);
    std::vector<std::string> keys;
    keys.reserve(n_features);
    for (std::size_t i = 0; i < n_features; ++i) keys.emplace_back(in.next());
    try {
        system.features = FeatureMap::from_keys(std::move(keys), features[2] == "1");
    } catch (const std::invalid_argument& e) {
        in.fail(e.what());
    }

    auto keywords = in.expect("keywords", 4);
    const std::size_t n_keywords = in.size_at(keywords[1]);
    system.keywords = KeywordTable(KeywordParams{in.size_at(keywords[2]), in.size_at(keywords[3])});
    for (std::size_t i = 0; i < n_keywords; ++i) {
        const auto cols = detail::split(in.next(), '\t');
        if (cols.size() != 3) in.fail("malformed keyword entry");
        system.keywords.set(std::string(cols[0]), std::string(cols[1]), in.real_at(cols[2]));
    }

    auto& h = system.hierarchy;
    auto hierarchy = in.expect("hierarchy", 2);
    const std::size_t n_layers = in.size_at(hierarchy[1]);
    for (std::size_t i = 0; i < n_layers; ++i) {
        auto layer = in.expect("layer", 2);
        HierarchyNode node;
        for (auto cat : detail::split(layer[1], ',')) node.categories.emplace_back(cat);
        h.config.layers.push_back(std::move(node));
    }
    auto fast = in.expect("fasttrack", 2);
    const std::size_t n_rules = in.size_at(fast[1]);
    for (std::size_t i = 0; i < n_rules; ++i) {
        auto rule = in.expect("rule", 4);
        FastTrackRule r;
        const auto priority = detail::parse_int(rule[1]);
        const auto cond = parse_fast_track_condition(rule[2]);
        const auto target = parse_label(rule[3]);
        if (!priority || !cond || !target) in.fail("malformed fast-track rule");
        r.priority = static_cast<int>(*priority);
        r.e1_ne = cond->first;
        r.e2_ne = cond->second;
        r.target = *target;
        h.config.fast_track.push_back(r);
    }
    try {
        h.config.validate();
    } catch (const std::invalid_argument& e) {
        in.fail(e.what());
    }

    auto classifiers = in.expect("classifiers", 2);
    const std::size_t n_classifiers = in.size_at(classifiers[1]);
    for (std::size_t i = 0; i < n_classifiers; ++i) {
        auto head = in.expect("classifier", 4);
        if (head[1] == "relevance") {
            h.relevance = read_svm(in);
        } else if (head[1] == "pair") {
            const auto a = parse_label(head[2]);
            const auto b = parse_label(head[3]);
            if (!a || !b || !(*a < *b)) in.fail("malformed label pair");
            h.pairwise[{*a, *b}] = read_svm(in);
        } else {
            in.fail("unknown classifier kind");
        }
    }
    in.expect("end", 1);

    const std::size_t k = h.config.k();
    if (h.pairwise.size() != k * (k - 1) / 2) in.fail("pairwise classifier count does not match leaf");
    if (h.config.has_relevance_layer() != h.relevance.has_value()) {
        in.fail("relevance classifier does not match topology");
    }
    return system;
}

}  // namespace attrforge
