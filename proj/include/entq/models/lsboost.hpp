#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "entq/errors.hpp"
#include "entq/models/tree.hpp"
#include "entq/text_io.hpp"

namespace entq {

struct BoostParams {
    int n_estimators = 300;
    double learning_rate = 0.1;
    TreeParams base{4, 5, 10};
};

inline std::string describe(const BoostParams& p) {
    return "n_estimators=" + std::to_string(p.n_estimators) +
           " learning_rate=" + format_double(p.learning_rate) +
           " base_depth=" + std::to_string(p.base.max_depth) +
           " min_leaf=" + std::to_string(p.base.min_leaf) +
           " min_split=" + std::to_string(p.base.min_split);
}

// Least-squares gradient boosting: F_0 = mean(y), then each stage fits a base
// tree to the current residuals and adds it with the learning rate.  No
// subsampling, so training is fully deterministic.
class LsBoost {
public:
    using Params = BoostParams;
    static constexpr const char* kind = "lsboost";

    LsBoost() = default;

    static LsBoost fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                       const BoostParams& p) {
        if (p.n_estimators < 1) throw DomainError("LsBoost::fit: n_estimators must be >= 1");
        if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0))
            throw DomainError("LsBoost::fit: learning_rate must be in (0, 1]");
        const detail::TreeBuilder builder(x);
        const std::size_t n = builder.rows();
        if (y.size() != n) throw DomainError("LsBoost::fit: feature/label row counts disagree");

        LsBoost model;
        model.n_features_ = builder.features();
        model.params_ = p;

        double sum = 0.0;
        for (double v : y) sum += v;
        model.f0_ = sum / static_cast<double>(n);

        std::vector<double> current(n, model.f0_);
        std::vector<double> residual(n);
        std::vector<double> tree_pred;
        model.trees_.reserve(static_cast<std::size_t>(p.n_estimators));
        model.stage_train_mse_.reserve(static_cast<std::size_t>(p.n_estimators) + 1);

        auto record_mse = [&]() {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = y[i] - current[i];
                acc += d * d;
            }
            model.stage_train_mse_.push_back(acc / static_cast<double>(n));
        };
        record_mse();

        for (int stage = 0; stage < p.n_estimators; ++stage) {
            for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - current[i];
            model.trees_.push_back(
                DecisionTree::from_parts(model.n_features_, p.base,
                                         builder.fit(residual, p.base, &tree_pred)));
            for (std::size_t i = 0; i < n; ++i) current[i] += p.learning_rate * tree_pred[i];
            record_mse();
        }
        return model;
    }

    double predict(const std::vector<double>& row) const {
        if (row.size() != n_features_) throw DomainError("LsBoost::predict: feature width mismatch");
        return predict_unchecked(row.data());
    }

    double predict_unchecked(const double* row) const {
        double acc = f0_;
        for (const DecisionTree& t : trees_) acc += params_.learning_rate * t.predict_unchecked(row);
        return acc;
    }

    std::size_t n_features() const { return n_features_; }
    double f0() const { return f0_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }
    const BoostParams& params() const { return params_; }

    // Training MSE after 0, 1, ..., n_estimators stages; non-increasing by
    // construction and asserted so in the tests.
    const std::vector<double>& stage_train_mse() const { return stage_train_mse_; }

    static LsBoost from_parts(std::size_t n_features, BoostParams p, double f0,
                              std::vector<DecisionTree> trees) {
        if (n_features == 0) throw DomainError("LsBoost: empty parts");
        for (const DecisionTree& t : trees)
            if (t.n_features() != n_features) throw DomainError("LsBoost: tree width mismatch");
        LsBoost m;
        m.n_features_ = n_features;
        m.params_ = p;
        m.f0_ = f0;
        m.trees_ = std::move(trees);
        return m;
    }

private:
    std::size_t n_features_ = 0;
    BoostParams params_;
    double f0_ = 0.0;
    std::vector<DecisionTree> trees_;
    std::vector<double> stage_train_mse_;
};

}  // namespace entq
