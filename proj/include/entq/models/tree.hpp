#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "entq/errors.hpp"

namespace entq {

struct TreeParams {
    int max_depth = 12;
    int min_leaf = 5;
    int min_split = 10;
};

inline std::string describe(const TreeParams& p) {
    return "max_depth=" + std::to_string(p.max_depth) + " min_leaf=" + std::to_string(p.min_leaf) +
           " min_split=" + std::to_string(p.min_split);
}

// feature < 0 marks a leaf; the split rule is `go left iff x[feature] < threshold`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    bool is_leaf() const { return feature < 0; }
};

namespace detail {

// Fitting workspace shared across trees grown on the same rows: column-major
// feature values plus per-feature sorted row orderings.  Boosting refits
// hundreds of trees on fixed rows, so the sorts are paid once; each fit then
// costs O(depth * rows * features) via stable partition of the orderings.
class TreeBuilder {
public:
    explicit TreeBuilder(const std::vector<std::vector<double>>& x) {
        n_ = x.size();
        if (n_ == 0) throw DomainError("tree fit: empty input");
        f_ = x[0].size();
        if (f_ == 0) throw DomainError("tree fit: rows have no features");
        cols_.assign(f_, std::vector<double>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            if (x[i].size() != f_) throw DomainError("tree fit: inconsistent feature width");
            for (std::size_t f = 0; f < f_; ++f) {
                if (!std::isfinite(x[i][f])) throw DomainError("tree fit: non-finite feature");
                cols_[f][i] = x[i][f];
            }
        }
        base_order_.assign(f_, std::vector<std::uint32_t>(n_));
        for (std::size_t f = 0; f < f_; ++f) {
            std::iota(base_order_[f].begin(), base_order_[f].end(), 0u);
            const std::vector<double>& col = cols_[f];
            std::sort(base_order_[f].begin(), base_order_[f].end(),
                      [&col](std::uint32_t a, std::uint32_t b) {
                          return col[a] < col[b] || (col[a] == col[b] && a < b);
                      });
        }
    }

    std::size_t rows() const { return n_; }
    std::size_t features() const { return f_; }

    // Grows one tree on targets y.  If train_pred is given, it receives the
    // fitted tree's prediction for every training row (leaf assignment falls
    // out of the partition, saving a traversal pass for boosting).
    std::vector<TreeNode> fit(const std::vector<double>& y, const TreeParams& p,
                              std::vector<double>* train_pred = nullptr) const {
        if (y.size() != n_) throw DomainError("tree fit: feature/label row counts disagree");
        if (p.max_depth < 1 || p.min_leaf < 1 || p.min_split < 0)
            throw DomainError("tree fit: invalid params");
        for (double v : y)
            if (!std::isfinite(v)) throw DomainError("tree fit: non-finite label");

        std::vector<std::vector<std::uint32_t>> order = base_order_;
        std::vector<char> go_left(n_);
        std::vector<std::uint32_t> scratch(n_);
        std::vector<TreeNode> nodes;
        if (train_pred) train_pred->assign(n_, 0.0);

        build(y, p, order, go_left, scratch, nodes, train_pred, 0, n_, 0);
        return nodes;
    }

private:
    int build(const std::vector<double>& y, const TreeParams& p,
              std::vector<std::vector<std::uint32_t>>& order, std::vector<char>& go_left,
              std::vector<std::uint32_t>& scratch, std::vector<TreeNode>& nodes,
              std::vector<double>* train_pred, std::size_t lo, std::size_t hi, int depth) const {
        const std::size_t m = hi - lo;
        double sum = 0.0, ymin = y[order[0][lo]], ymax = ymin;
        for (std::size_t pos = lo; pos < hi; ++pos) {
            const double v = y[order[0][pos]];
            sum += v;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
        const double mean = sum / static_cast<double>(m);

        auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.value = mean;
            nodes.push_back(leaf);
            if (train_pred)
                for (std::size_t pos = lo; pos < hi; ++pos) (*train_pred)[order[0][pos]] = mean;
            return static_cast<int>(nodes.size() - 1);
        };

        if (depth >= p.max_depth || m < static_cast<std::size_t>(p.min_split) ||
            m < 2 * static_cast<std::size_t>(p.min_leaf) || ymin == ymax)
            return make_leaf();

        // Exhaustive search over (feature, midpoint threshold).  Minimizing
        // left+right SSE is equivalent to maximizing S_l^2/n_l + S_r^2/n_r;
        // strict improvement keeps the first optimum, i.e. ties break to the
        // lowest feature index and then the smallest threshold.
        const std::size_t min_leaf = static_cast<std::size_t>(p.min_leaf);
        int best_feature = -1;
        double best_threshold = 0.0, best_gain = -1.0;
        std::size_t best_left = 0;
        for (std::size_t f = 0; f < f_; ++f) {
            const std::vector<std::uint32_t>& ord = order[f];
            const std::vector<double>& col = cols_[f];
            double left_sum = 0.0;
            for (std::size_t pos = lo; pos + 1 < hi; ++pos) {
                left_sum += y[ord[pos]];
                const double v = col[ord[pos]];
                const double vnext = col[ord[pos + 1]];
                if (v == vnext) continue;
                const std::size_t n_l = pos + 1 - lo;
                const std::size_t n_r = m - n_l;
                if (n_l < min_leaf || n_r < min_leaf) continue;
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(n_l) +
                                    right_sum * right_sum / static_cast<double>(n_r);
                if (gain > best_gain) {
                    double thr = 0.5 * (v + vnext);
                    if (!(v < thr)) thr = vnext;  // guard against midpoint rounding down
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = thr;
                    best_left = n_l;
                }
            }
        }
        if (best_feature < 0) return make_leaf();  // every usable feature is constant here

        const int self = static_cast<int>(nodes.size());
        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        nodes.push_back(node);

        const std::vector<double>& split_col = cols_[static_cast<std::size_t>(best_feature)];
        for (std::size_t pos = lo; pos < hi; ++pos) {
            const std::uint32_t i = order[0][pos];
            go_left[i] = split_col[i] < best_threshold;
        }
        // Stable partition of every feature's ordering so both children keep
        // sorted segments.
        for (std::size_t f = 0; f < f_; ++f) {
            std::vector<std::uint32_t>& ord = order[f];
            std::copy(ord.begin() + lo, ord.begin() + hi, scratch.begin());
            std::size_t li = lo, ri = lo + best_left;
            for (std::size_t k = 0; k < m; ++k) {
                const std::uint32_t i = scratch[k];
                if (go_left[i])
                    ord[li++] = i;
                else
                    ord[ri++] = i;
            }
        }

        const int left = build(y, p, order, go_left, scratch, nodes, train_pred, lo,
                               lo + best_left, depth + 1);
        const int right = build(y, p, order, go_left, scratch, nodes, train_pred, lo + best_left,
                                hi, depth + 1);
        nodes[self].left = left;
        nodes[self].right = right;
        return self;
    }

    std::size_t n_ = 0;
    std::size_t f_ = 0;
    std::vector<std::vector<double>> cols_;
    std::vector<std::vector<std::uint32_t>> base_order_;
};

}  // namespace detail

// CART regression tree: variance-reduction (SSE) splitting with exhaustive
// midpoint thresholds, leaf values equal to row means.
class DecisionTree {
public:
    using Params = TreeParams;
    static constexpr const char* kind = "tree";

    DecisionTree() = default;

    static DecisionTree fit(const std::vector<std::vector<double>>& x,
                            const std::vector<double>& y, const TreeParams& p) {
        const detail::TreeBuilder builder(x);
        DecisionTree t;
        t.n_features_ = builder.features();
        t.nodes_ = builder.fit(y, p);
        t.params_ = p;
        return t;
    }

    double predict(const std::vector<double>& row) const {
        if (nodes_.empty()) throw DomainError("DecisionTree::predict: model not fitted");
        if (row.size() != n_features_) throw DomainError("DecisionTree::predict: feature width mismatch");
        return predict_unchecked(row.data());
    }

    double predict_unchecked(const double* row) const {
        const TreeNode* node = &nodes_[0];
        while (!node->is_leaf())
            node = &nodes_[static_cast<std::size_t>(
                row[node->feature] < node->threshold ? node->left : node->right)];
        return node->value;
    }

    std::size_t n_features() const { return n_features_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeParams& params() const { return params_; }

    // Reassembles a tree from serialized parts (see models/io.hpp).
    static DecisionTree from_parts(std::size_t n_features, TreeParams p,
                                   std::vector<TreeNode> nodes) {
        if (n_features == 0 || nodes.empty()) throw DomainError("DecisionTree: empty parts");
        for (const TreeNode& n : nodes) {
            if (n.is_leaf()) continue;
            if (n.feature >= static_cast<int>(n_features) || n.left < 0 || n.right < 0 ||
                n.left >= static_cast<int>(nodes.size()) || n.right >= static_cast<int>(nodes.size()))
                throw DomainError("DecisionTree: malformed node table");
        }
        DecisionTree t;
        t.n_features_ = n_features;
        t.params_ = p;
        t.nodes_ = std::move(nodes);
        return t;
    }

private:
    std::size_t n_features_ = 0;
    TreeParams params_;
    std::vector<TreeNode> nodes_;
};

}  // namespace entq
