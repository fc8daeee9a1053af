#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "entq/dataset.hpp"
#include "entq/errors.hpp"
#include "entq/eval.hpp"
#include "entq/models/lsboost.hpp"
#include "entq/models/mlp.hpp"
#include "entq/models/tree.hpp"

namespace entq {

// "Fewer parameters" proxies for tie-breaking between lattice points with
// equal CV error (effectively only reachable on degenerate labels).
inline double param_count_proxy(const TreeParams& p) { return p.max_depth; }
inline double param_count_proxy(const BoostParams& p) {
    return static_cast<double>(p.n_estimators) * p.base.max_depth;
}
inline double param_count_proxy(const MlpParams& p) {
    double units = 0.0;
    for (int h : p.hidden) units += h;
    return units;
}

inline std::vector<TreeParams> default_tree_grid() {
    std::vector<TreeParams> grid;
    for (int depth : {6, 9, 12, 15}) grid.push_back(TreeParams{depth, 5, 10});
    return grid;
}

inline std::vector<BoostParams> default_boost_grid() {
    std::vector<BoostParams> grid;
    for (int n : {100, 300, 500})
        for (double lr : {0.05, 0.1, 0.2})
            for (int depth : {3, 4, 6}) grid.push_back(BoostParams{n, lr, TreeParams{depth, 5, 10}});
    return grid;
}

inline std::vector<MlpParams> default_mlp_grid(std::uint64_t seed) {
    std::vector<MlpParams> grid;
    for (const std::vector<int>& hidden : {std::vector<int>{32, 32}, std::vector<int>{64, 64}})
        for (double step : {1e-3, 3e-4}) {
            MlpParams p;
            p.hidden = hidden;
            p.step_size = step;
            p.seed = seed;
            grid.push_back(p);
        }
    return grid;
}

template <typename Model>
struct GridSearchResult {
    typename Model::Params best;
    std::size_t best_index = 0;
    MetricsReport best_report;           // CV report at the selected point
    std::vector<GridLine> table;         // one line per lattice point, lattice order
};

// Evaluates every lattice point with k-fold CV and keeps the minimum mean
// per-fold RMSE; ties prefer fewer parameters, then earlier lattice order.
// Points whose training fails anywhere are kept in the table but excluded
// from the argmin.
template <typename Model>
GridSearchResult<Model> grid_search(const std::vector<typename Model::Params>& grid,
                                    const LabeledDataset& ds, int k, std::uint64_t seed,
                                    int workers = 1) {
    if (grid.empty()) throw DomainError("grid_search: empty grid");
    GridSearchResult<Model> res;
    res.table.reserve(grid.size());
    bool have_best = false;
    double best_rmse = std::numeric_limits<double>::infinity();
    double best_proxy = std::numeric_limits<double>::infinity();
    std::vector<MetricsReport> reports(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        GridLine line;
        line.params = describe(grid[i]);
        try {
            reports[i] = cross_validate<Model>(grid[i], ds, k, seed, workers);
            double mean_rmse = 0.0;
            for (const FoldMetrics& f : reports[i].per_fold) mean_rmse += f.rmse;
            mean_rmse /= static_cast<double>(reports[i].per_fold.size());
            line.mean_fold_rmse = mean_rmse;
            const double proxy = param_count_proxy(grid[i]);
            if (!have_best || mean_rmse < best_rmse ||
                (mean_rmse == best_rmse && proxy < best_proxy)) {
                have_best = true;
                best_rmse = mean_rmse;
                best_proxy = proxy;
                res.best = grid[i];
                res.best_index = i;
            }
        } catch (const std::exception&) {
            // failed point: stays in the table without a score
        }
        res.table.push_back(std::move(line));
    }
    if (!have_best) throw NumericError("grid_search: every lattice point failed to train");
    res.best_report = std::move(reports[res.best_index]);
    res.table[res.best_index].selected = true;
    return res;
}

}  // namespace entq
