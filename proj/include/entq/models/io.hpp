#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entq/errors.hpp"
#include "entq/models/lsboost.hpp"
#include "entq/models/mlp.hpp"
#include "entq/models/tree.hpp"
#include "entq/text_io.hpp"

namespace entq {

inline constexpr std::string_view kModelFormat = "entq-model-v1";

using AnyModel = std::variant<DecisionTree, LsBoost, Mlp>;

namespace detail {

// Line-based token reader; `#` lines are comments (runs embed their config
// there) and blank lines are ignored.
class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    std::vector<std::string> next(const std::string& expect_key) {
        std::vector<std::string> tokens = next_any();
        if (tokens.empty()) fail("unexpected end of file, expected '" + expect_key + "'");
        if (tokens[0] != expect_key)
            fail("expected '" + expect_key + "', found '" + tokens[0] + "'");
        return tokens;
    }

    std::vector<std::string> next_any() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const std::string_view sv = trim(line);
            if (sv.empty() || sv.front() == '#') continue;
            std::vector<std::string> tokens;
            for (const std::string_view t : split(sv, ' '))
                if (!trim(t).empty()) tokens.emplace_back(trim(t));
            return tokens;
        }
        return {};
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("load_model: line " + std::to_string(line_no_) + ": " + msg);
    }

    double num(const std::vector<std::string>& tokens, std::size_t i, const char* what) {
        if (i >= tokens.size()) fail(std::string("missing ") + what);
        return parse_double(tokens[i], what);
    }
    long long integer(const std::vector<std::string>& tokens, std::size_t i, const char* what) {
        if (i >= tokens.size()) fail(std::string("missing ") + what);
        return parse_int(tokens[i], what);
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline void write_nodes(std::ostream& out, const std::vector<TreeNode>& nodes) {
    for (const TreeNode& n : nodes)
        out << "node " << n.feature << " " << format_double(n.threshold) << " " << n.left << " "
            << n.right << " " << format_double(n.value) << "\n";
}

inline std::vector<TreeNode> read_nodes(ModelReader& r, std::size_t count) {
    std::vector<TreeNode> nodes;
    nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto t = r.next("node");
        TreeNode n;
        n.feature = static_cast<int>(r.integer(t, 1, "node feature"));
        n.threshold = r.num(t, 2, "node threshold");
        n.left = static_cast<int>(r.integer(t, 3, "node left"));
        n.right = static_cast<int>(r.integer(t, 4, "node right"));
        n.value = r.num(t, 5, "node value");
        nodes.push_back(n);
    }
    return nodes;
}

inline TreeParams read_tree_params(ModelReader& r, const char* prefix) {
    const std::string pre(prefix);
    TreeParams p;
    p.max_depth = static_cast<int>(r.integer(r.next(pre + "max_depth"), 1, "max_depth"));
    p.min_leaf = static_cast<int>(r.integer(r.next(pre + "min_leaf"), 1, "min_leaf"));
    p.min_split = static_cast<int>(r.integer(r.next(pre + "min_split"), 1, "min_split"));
    return p;
}

}  // namespace detail

inline void save_model(const DecisionTree& m, std::ostream& out) {
    out << kModelFormat << "\n";
    out << "kind tree\n";
    out << "n_features " << m.n_features() << "\n";
    out << "max_depth " << m.params().max_depth << "\n";
    out << "min_leaf " << m.params().min_leaf << "\n";
    out << "min_split " << m.params().min_split << "\n";
    out << "nodes " << m.nodes().size() << "\n";
    detail::write_nodes(out, m.nodes());
    out << "end\n";
}

inline void save_model(const LsBoost& m, std::ostream& out) {
    out << kModelFormat << "\n";
    out << "kind lsboost\n";
    out << "n_features " << m.n_features() << "\n";
    out << "n_estimators " << m.params().n_estimators << "\n";
    out << "learning_rate " << format_double(m.params().learning_rate) << "\n";
    out << "base_max_depth " << m.params().base.max_depth << "\n";
    out << "base_min_leaf " << m.params().base.min_leaf << "\n";
    out << "base_min_split " << m.params().base.min_split << "\n";
    out << "f0 " << format_double(m.f0()) << "\n";
    out << "trees " << m.trees().size() << "\n";
    for (const DecisionTree& t : m.trees()) {
        out << "tree " << t.nodes().size() << "\n";
        detail::write_nodes(out, t.nodes());
    }
    out << "end\n";
}

inline void save_model(const Mlp& m, std::ostream& out) {
    out << kModelFormat << "\n";
    out << "kind mlp\n";
    out << "n_features " << m.n_features() << "\n";
    out << "hidden";
    for (int h : m.params().hidden) out << " " << h;
    out << "\n";
    out << "activation " << m.params().activation << "\n";
    out << "epochs " << m.params().epochs << "\n";
    out << "batch_size " << m.params().batch_size << "\n";
    out << "step_size " << format_double(m.params().step_size) << "\n";
    out << "seed " << m.params().seed << "\n";
    for (std::size_t l = 0; l < m.weights().size(); ++l) {
        const std::size_t rows = m.layer_dims()[l + 1], cols = m.layer_dims()[l];
        out << "layer " << l << " " << rows << " " << cols << "\n";
        for (std::size_t r = 0; r < rows; ++r) {
            out << "w";
            for (std::size_t c = 0; c < cols; ++c)
                out << " " << format_double(m.weights()[l][r * cols + c]);
            out << "\n";
        }
        out << "b";
        for (std::size_t r = 0; r < rows; ++r) out << " " << format_double(m.biases()[l][r]);
        out << "\n";
    }
    out << "end\n";
}

inline void save_model(const AnyModel& m, std::ostream& out) {
    std::visit([&](const auto& model) { save_model(model, out); }, m);
}

template <typename ModelT>
void save_model(const ModelT& m, const std::string& path, const std::string& config_comment = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("save_model: cannot open '" + path + "'");
    if (!config_comment.empty()) out << "# " << config_comment << "\n";
    save_model(m, out);
    if (!out) throw ParseError("save_model: write failed for '" + path + "'");
}

namespace detail {

inline DecisionTree load_tree(ModelReader& r) {
    const std::size_t n_features =
        static_cast<std::size_t>(r.integer(r.next("n_features"), 1, "n_features"));
    const TreeParams p = read_tree_params(r, "");
    const std::size_t count = static_cast<std::size_t>(r.integer(r.next("nodes"), 1, "nodes"));
    std::vector<TreeNode> nodes = read_nodes(r, count);
    r.next("end");
    return DecisionTree::from_parts(n_features, p, std::move(nodes));
}

inline LsBoost load_lsboost(ModelReader& r) {
    const std::size_t n_features =
        static_cast<std::size_t>(r.integer(r.next("n_features"), 1, "n_features"));
    BoostParams p;
    p.n_estimators = static_cast<int>(r.integer(r.next("n_estimators"), 1, "n_estimators"));
    p.learning_rate = r.num(r.next("learning_rate"), 1, "learning_rate");
    p.base = read_tree_params(r, "base_");
    const double f0 = r.num(r.next("f0"), 1, "f0");
    const std::size_t count = static_cast<std::size_t>(r.integer(r.next("trees"), 1, "trees"));
    std::vector<DecisionTree> trees;
    trees.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n_nodes =
            static_cast<std::size_t>(r.integer(r.next("tree"), 1, "tree node count"));
        trees.push_back(DecisionTree::from_parts(n_features, p.base, read_nodes(r, n_nodes)));
    }
    r.next("end");
    return LsBoost::from_parts(n_features, p, f0, std::move(trees));
}

inline Mlp load_mlp(ModelReader& r) {
    const std::size_t n_features =
        static_cast<std::size_t>(r.integer(r.next("n_features"), 1, "n_features"));
    MlpParams p;
    const auto hidden = r.next("hidden");
    p.hidden.clear();
    for (std::size_t i = 1; i < hidden.size(); ++i)
        p.hidden.push_back(static_cast<int>(r.integer(hidden, i, "hidden width")));
    const auto act = r.next("activation");
    if (act.size() < 2) r.fail("missing activation");
    p.activation = act[1];
    p.epochs = static_cast<int>(r.integer(r.next("epochs"), 1, "epochs"));
    p.batch_size = static_cast<int>(r.integer(r.next("batch_size"), 1, "batch_size"));
    p.step_size = r.num(r.next("step_size"), 1, "step_size");
    p.seed = static_cast<std::uint64_t>(r.integer(r.next("seed"), 1, "seed"));

    std::vector<std::vector<double>> w, b;
    for (std::size_t l = 0; l < p.hidden.size() + 1; ++l) {
        const auto hdr = r.next("layer");
        if (static_cast<std::size_t>(r.integer(hdr, 1, "layer index")) != l)
            r.fail("layer records out of order");
        const std::size_t rows = static_cast<std::size_t>(r.integer(hdr, 2, "layer rows"));
        const std::size_t cols = static_cast<std::size_t>(r.integer(hdr, 3, "layer cols"));
        std::vector<double> wl;
        wl.reserve(rows * cols);
        for (std::size_t row = 0; row < rows; ++row) {
            const auto t = r.next("w");
            if (t.size() != cols + 1) r.fail("weight row width mismatch");
            for (std::size_t c = 0; c < cols; ++c) wl.push_back(r.num(t, c + 1, "weight"));
        }
        const auto bt = r.next("b");
        if (bt.size() != rows + 1) r.fail("bias row width mismatch");
        std::vector<double> bl;
        bl.reserve(rows);
        for (std::size_t row = 0; row < rows; ++row) bl.push_back(r.num(bt, row + 1, "bias"));
        w.push_back(std::move(wl));
        b.push_back(std::move(bl));
    }
    r.next("end");
    return Mlp::from_parts(n_features, p, std::move(w), std::move(b));
}

}  // namespace detail

inline AnyModel load_model(std::istream& in) {
    detail::ModelReader r(in);
    const auto magic = r.next_any();
    if (magic.empty()) r.fail("empty model file");
    if (magic[0] != kModelFormat)
        r.fail("unsupported format '" + magic[0] + "', expected '" + std::string(kModelFormat) +
               "'");
    const auto kind = r.next("kind");
    if (kind.size() < 2) r.fail("missing model kind");
    if (kind[1] == "tree") return detail::load_tree(r);
    if (kind[1] == "lsboost") return detail::load_lsboost(r);
    if (kind[1] == "mlp") return detail::load_mlp(r);
    r.fail("unknown model kind '" + kind[1] + "'");
}

inline AnyModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("load_model: cannot open '" + path + "'");
    return load_model(in);
}

template <typename ModelT>
ModelT load_model_as(const std::string& path) {
    AnyModel any = load_model(path);
    if (auto* m = std::get_if<ModelT>(&any)) return std::move(*m);
    throw DomainError(std::string("load_model: file '") + path + "' holds a " +
                      std::visit([](const auto& m) { return std::decay_t<decltype(m)>::kind; },
                                 any) +
                      " model, not the requested kind");
}

inline std::size_t model_n_features(const AnyModel& m) {
    return std::visit([](const auto& model) { return model.n_features(); }, m);
}

inline double model_predict(const AnyModel& m, const std::vector<double>& row) {
    return std::visit([&](const auto& model) { return model.predict(row); }, m);
}

inline const char* model_kind(const AnyModel& m) {
    return std::visit([](const auto& model) { return std::decay_t<decltype(model)>::kind; }, m);
}

}  // namespace entq
