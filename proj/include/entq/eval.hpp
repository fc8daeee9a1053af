#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "entq/dataset.hpp"
#include "entq/errors.hpp"
#include "entq/parallel.hpp"
#include "entq/text_io.hpp"

namespace entq {

namespace detail {

inline void check_pair(const std::vector<double>& y, const std::vector<double>& yhat,
                       const char* who) {
    if (y.empty()) throw DomainError(std::string(who) + ": empty input");
    if (y.size() != yhat.size()) throw DomainError(std::string(who) + ": length mismatch");
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace detail

inline double rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
    detail::check_pair(y, yhat, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
}

inline double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
    detail::check_pair(y, yhat, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

inline double corrcoef(const std::vector<double>& y, const std::vector<double>& yhat) {
    detail::check_pair(y, yhat, "corrcoef");
    const double my = detail::mean(y), mh = detail::mean(yhat);
    double syy = 0.0, shh = 0.0, syh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = y[i] - my, b = yhat[i] - mh;
        syy += a * a;
        shh += b * b;
        syh += a * b;
    }
    if (syy <= 0.0 || shh <= 0.0)
        throw UndefinedMetricError("corrcoef: zero variance input");
    return syh / std::sqrt(syy * shh);
}

inline double r2(const std::vector<double>& y, const std::vector<double>& yhat) {
    detail::check_pair(y, yhat, "r2");
    const double my = detail::mean(y);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i], t = y[i] - my;
        ss_res += d * d;
        ss_tot += t * t;
    }
    if (ss_tot <= 0.0) throw UndefinedMetricError("r2: constant labels");
    return 1.0 - ss_res / ss_tot;
}

struct FoldMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> r;   // missing when variance vanishes
    std::optional<double> r2;
    std::size_t n = 0;
};

struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> r;
    std::optional<double> r2;
    std::size_t n = 0;
    std::vector<FoldMetrics> per_fold;
    std::vector<double> y_true;  // row order
    std::vector<double> y_pred;  // pooled out-of-fold predictions, row order
    std::string model_kind;
    std::string model_params;
    std::string dataset_desc;
    int folds = 0;
};

inline FoldMetrics compute_fold_metrics(const std::vector<double>& y,
                                        const std::vector<double>& yhat) {
    FoldMetrics m;
    m.rmse = rmse(y, yhat);
    m.mae = mae(y, yhat);
    m.n = y.size();
    try {
        m.r = corrcoef(y, yhat);
    } catch (const UndefinedMetricError&) {
    }
    try {
        m.r2 = r2(y, yhat);
    } catch (const UndefinedMetricError&) {
    }
    return m;
}

inline double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline std::string describe_dataset(const LabeledDataset& ds) {
    return "qubits=" + std::to_string(ds.qubits) + " rows=" + std::to_string(ds.n_rows()) +
           " seed=" + std::to_string(ds.spec.seed);
}

// Out-of-fold evaluation: train on k-1 folds, predict the held-out fold with
// predictions clamped to [0,1].  Headline metrics are pooled over the
// concatenated out-of-fold predictions; per-fold values are kept alongside.
template <typename Model>
MetricsReport cross_validate(const typename Model::Params& params, const LabeledDataset& ds,
                             int k, std::uint64_t seed, int workers = 1) {
    if (!ds.has_labels) throw DomainError("cross_validate: dataset has no labels");
    const FoldAssignment fa = kfold(ds, k, seed);
    const std::vector<std::vector<double>> x = ds.feature_matrix();
    const std::vector<double> y = ds.labels();

    std::vector<double> pooled(y.size(), 0.0);
    std::vector<FoldMetrics> per_fold(static_cast<std::size_t>(k));

    parallel_for(static_cast<std::size_t>(k), workers, [&](std::size_t f) {
        const int fold = static_cast<int>(f);
        std::vector<std::vector<double>> xtr;
        std::vector<double> ytr;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (fa.assignment[i] == fold)
                held.push_back(i);
            else {
                xtr.push_back(x[i]);
                ytr.push_back(y[i]);
            }
        }
        Model model;
        try {
            model = Model::fit(xtr, ytr, params);
        } catch (const std::exception& e) {
            throw NumericError("cross_validate: fold " + std::to_string(fold) +
                               " training failed: " + e.what());
        }
        std::vector<double> yh, yt;
        yh.reserve(held.size());
        yt.reserve(held.size());
        for (const std::size_t i : held) {
            const double v = clamp_unit(model.predict(x[i]));
            pooled[i] = v;
            yh.push_back(v);
            yt.push_back(y[i]);
        }
        per_fold[f] = compute_fold_metrics(yt, yh);
    });

    MetricsReport rep = [&] {
        const FoldMetrics pooled_m = compute_fold_metrics(y, pooled);
        MetricsReport r;
        r.rmse = pooled_m.rmse;
        r.mae = pooled_m.mae;
        r.r = pooled_m.r;
        r.r2 = pooled_m.r2;
        r.n = pooled_m.n;
        return r;
    }();
    rep.per_fold = std::move(per_fold);
    rep.y_true = y;
    rep.y_pred = std::move(pooled);
    rep.model_kind = Model::kind;
    rep.model_params = describe(params);
    rep.dataset_desc = describe_dataset(ds);
    rep.folds = k;
    return rep;
}

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : "undefined";
}

// One row of a hyperparameter lattice in the report.
struct GridLine {
    std::string params;
    std::optional<double> mean_fold_rmse;  // missing = the point failed to train
    bool selected = false;
};

inline void write_report(std::ostream& out, const MetricsReport& rep,
                         const std::vector<GridLine>* grid = nullptr) {
    out << "# format=entq-report-v1\n";
    out << "# model=" << rep.model_kind << "\n";
    out << "# params=" << rep.model_params << "\n";
    out << "# dataset=" << rep.dataset_desc << "\n";
    out << "# folds=" << rep.folds << "\n";
    out << "metric,value\n";
    out << "RMSE," << format_double(rep.rmse) << "\n";
    out << "MAE," << format_double(rep.mae) << "\n";
    out << "R," << format_optional(rep.r) << "\n";
    out << "R2," << format_optional(rep.r2) << "\n";
    out << "n," << rep.n << "\n";
    out << "fold,rmse,mae,r,r2,n\n";
    for (std::size_t f = 0; f < rep.per_fold.size(); ++f) {
        const FoldMetrics& m = rep.per_fold[f];
        out << f << "," << format_double(m.rmse) << "," << format_double(m.mae) << ","
            << format_optional(m.r) << "," << format_optional(m.r2) << "," << m.n << "\n";
    }
    if (grid) {
        out << "grid_point,mean_fold_rmse,selected\n";
        for (const GridLine& g : *grid)
            out << g.params << "," << format_optional(g.mean_fold_rmse) << ","
                << (g.selected ? "yes" : "no") << "\n";
    }
    if (!out) throw ParseError("write_report: stream write failed");
}

inline void write_report(const std::string& path, const MetricsReport& rep,
                         const std::vector<GridLine>* grid = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("write_report: cannot open '" + path + "'");
    write_report(out, rep, grid);
}

// (true, predicted) pairs with the least-squares fit of predicted on true in
// the header: enough to redraw the usual calibration scatter with any tool.
inline void scatter_report(const std::vector<double>& y, const std::vector<double>& yhat,
                           std::ostream& out) {
    detail::check_pair(y, yhat, "scatter_report");
    const double my = detail::mean(y), mh = detail::mean(yhat);
    double syy = 0.0, syh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        syy += (y[i] - my) * (y[i] - my);
        syh += (y[i] - my) * (yhat[i] - mh);
    }
    out << "# format=entq-scatter-v1\n";
    out << "# n=" << y.size() << "\n";
    if (syy > 0.0) {
        const double slope = syh / syy;
        out << "# slope=" << format_double(slope) << "\n";
        out << "# intercept=" << format_double(mh - slope * my) << "\n";
    } else {
        out << "# slope=undefined\n# intercept=undefined\n";
    }
    std::optional<double> r;
    try {
        r = corrcoef(y, yhat);
    } catch (const UndefinedMetricError&) {
    }
    out << "# r=" << format_optional(r) << "\n";
    out << "true,predicted\n";
    for (std::size_t i = 0; i < y.size(); ++i)
        out << format_double(y[i]) << "," << format_double(yhat[i]) << "\n";
    if (!out) throw ParseError("scatter_report: stream write failed");
}

inline void scatter_report(const std::vector<double>& y, const std::vector<double>& yhat,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("scatter_report: cannot open '" + path + "'");
    scatter_report(y, yhat, out);
}

}  // namespace entq
