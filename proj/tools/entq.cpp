// entq: generate labeled entanglement datasets, train regressors, predict.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "entq/entq.hpp"

namespace {

using namespace entq;

// Every artifact embeds the flags that produced it.  --workers is
// deliberately left out: worker count must never change any output byte.
std::string join_config(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += " ";
        s += p;
    }
    return s;
}

struct GenerateArgs {
    DatasetSpec spec;
    std::string out;
    int workers = 1;
};

int run_generate(const GenerateArgs& a) {
    const LabeledDataset ds = build_dataset(a.spec, a.workers);

    std::vector<std::string> cfg = {"generate",
                                    "--qubits",    std::to_string(a.spec.qubits),
                                    "--separable", std::to_string(a.spec.separable_count),
                                    "--per-bin",   std::to_string(a.spec.per_bin_count)};
    if (a.spec.qubits == 2) {
        cfg.push_back("--pure-fraction");
        cfg.push_back(format_double(a.spec.pure_fraction_per_bin));
    } else {
        cfg.push_back("--ghz-fraction");
        cfg.push_back(format_double(a.spec.ghz_fraction));
    }
    cfg.push_back("--seed");
    cfg.push_back(std::to_string(a.spec.seed));
    cfg.push_back("--max-attempts");
    cfg.push_back(std::to_string(a.spec.max_attempts_per_row));
    cfg.push_back("--out");
    cfg.push_back(a.out);

    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw ParseError("generate: cannot open '" + a.out + "'");
    out << "# config=" << join_config(cfg) << "\n";
    write_csv(ds, out);
    if (!out) throw ParseError("generate: write failed for '" + a.out + "'");

    std::map<int, std::map<std::string, std::size_t>> counts;
    for (const DataRow& row : ds.rows) ++counts[row.bin][row.cls];
    std::cout << "wrote " << ds.n_rows() << " rows to " << a.out << "\n";
    for (const auto& [bin, by_cls] : counts) {
        std::cout << "bin " << bin << ":";
        for (const auto& [cls, n] : by_cls) std::cout << " " << cls << "=" << n;
        std::cout << "\n";
    }
    return 0;
}

struct TrainArgs {
    std::string model_kind;
    std::string data;
    std::string out;
    std::string report;
    std::string scatter;
    int folds = 5;
    std::uint64_t seed = 0;
    bool grid = false;
    int workers = 1;

    TreeParams tree;
    BoostParams boost;
    MlpParams mlp;
};

std::vector<std::string> train_config(const TrainArgs& a, const std::string& params) {
    std::vector<std::string> cfg = {"train",   "--model", a.model_kind, "--data",
                                    a.data,    "--folds", std::to_string(a.folds),
                                    "--seed",  std::to_string(a.seed)};
    if (a.grid) cfg.push_back("--grid");
    cfg.push_back("[params " + params + "]");
    cfg.push_back("--out");
    cfg.push_back(a.out);
    cfg.push_back("--report");
    cfg.push_back(a.report);
    if (!a.scatter.empty()) {
        cfg.push_back("--scatter");
        cfg.push_back(a.scatter);
    }
    return cfg;
}

template <typename Model>
int train_with(const TrainArgs& a, const typename Model::Params& flag_params,
               const std::vector<typename Model::Params>& grid, const LabeledDataset& ds) {
    typename Model::Params selected = flag_params;
    MetricsReport report;
    std::vector<GridLine> table;
    if (a.grid) {
        GridSearchResult<Model> res = grid_search<Model>(grid, ds, a.folds, a.seed, a.workers);
        selected = res.best;
        report = std::move(res.best_report);
        table = std::move(res.table);
    } else {
        report = cross_validate<Model>(selected, ds, a.folds, a.seed, a.workers);
    }

    const Model final_model = Model::fit(ds.feature_matrix(), ds.labels(), selected);
    std::vector<double> train_pred;
    train_pred.reserve(ds.n_rows());
    for (const DataRow& row : ds.rows) train_pred.push_back(clamp_unit(final_model.predict(row.features)));
    const std::vector<double> y = ds.labels();
    const FoldMetrics train_metrics = compute_fold_metrics(y, train_pred);

    const std::string config = join_config(train_config(a, describe(selected)));
    save_model(final_model, a.out, "config=" + config);

    std::ofstream rep(a.report, std::ios::binary);
    if (!rep) throw ParseError("train: cannot open '" + a.report + "'");
    rep << "# config=" << config << "\n";
    write_report(rep, report, a.grid ? &table : nullptr);
    rep << "train_metric,value\n";
    rep << "RMSE," << format_double(train_metrics.rmse) << "\n";
    rep << "MAE," << format_double(train_metrics.mae) << "\n";
    rep << "R," << format_optional(train_metrics.r) << "\n";
    rep << "R2," << format_optional(train_metrics.r2) << "\n";
    if (!rep) throw ParseError("train: write failed for '" + a.report + "'");

    if (!a.scatter.empty()) {
        std::ofstream sc(a.scatter, std::ios::binary);
        if (!sc) throw ParseError("train: cannot open '" + a.scatter + "'");
        sc << "# config=" << config << "\n";
        scatter_report(y, report.y_pred, sc);
        if (!sc) throw ParseError("train: write failed for '" + a.scatter + "'");
    }

    std::cout << "selected params: " << describe(selected) << "\n";
    std::cout << "pooled CV: RMSE=" << format_double(report.rmse)
              << " MAE=" << format_double(report.mae) << " R=" << format_optional(report.r)
              << " R2=" << format_optional(report.r2) << " n=" << report.n << "\n";
    std::cout << "model written to " << a.out << ", report to " << a.report << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    const LabeledDataset ds = read_csv(a.data);
    if (!ds.has_labels) throw DomainError("train: dataset file has no label column");

    if (a.model_kind == "tree")
        return train_with<DecisionTree>(a, a.tree, default_tree_grid(), ds);
    if (a.model_kind == "lsboost")
        return train_with<LsBoost>(a, a.boost, default_boost_grid(), ds);
    MlpParams mlp = a.mlp;
    mlp.seed = a.seed;
    return train_with<Mlp>(a, mlp, default_mlp_grid(a.seed), ds);
}

struct PredictArgs {
    std::string model_file;
    std::string data;
    std::string out;
};

int run_predict(const PredictArgs& a) {
    const AnyModel model = load_model(a.model_file);
    const LabeledDataset ds = read_csv(a.data);
    if (ds.n_features() != model_n_features(model))
        throw DomainError("predict: file has " + std::to_string(ds.n_features()) +
                          " features but the model expects " +
                          std::to_string(model_n_features(model)));

    std::vector<double> pred;
    pred.reserve(ds.n_rows());
    for (const DataRow& row : ds.rows) pred.push_back(clamp_unit(model_predict(model, row.features)));

    const std::string config = join_config(
        {"predict", "--model-file", a.model_file, "--data", a.data, "--out", a.out});
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw ParseError("predict: cannot open '" + a.out + "'");
    out << "# config=" << config << "\n";
    out << "# format=entq-predictions-v1\n";
    out << "# model=" << model_kind(model) << "\n";
    out << "prediction\n";
    for (const double v : pred) out << format_double(v) << "\n";
    if (ds.has_labels) {
        const FoldMetrics m = compute_fold_metrics(ds.labels(), pred);
        out << "# RMSE=" << format_double(m.rmse) << "\n";
        out << "# MAE=" << format_double(m.mae) << "\n";
        out << "# R=" << format_optional(m.r) << "\n";
        out << "# R2=" << format_optional(m.r2) << "\n";
    }
    if (!out) throw ParseError("predict: write failed for '" + a.out + "'");
    std::cout << "wrote " << pred.size() << " predictions to " << a.out
              << (ds.has_labels ? " (metrics appended)" : "") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement regression pipeline: dataset generation, training, prediction"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* cgen = app.add_subcommand("generate", "sample states, label them, write dataset CSV");
    cgen->add_option("--qubits", gen.spec.qubits, "2 or 3")
        ->required()
        ->check(CLI::IsMember({2, 3}));
    cgen->add_option("--separable", gen.spec.separable_count, "separable rows (label 0)")
        ->required()
        ->check(CLI::NonNegativeNumber);
    cgen->add_option("--per-bin", gen.spec.per_bin_count, "entangled rows per label bin")
        ->required()
        ->check(CLI::NonNegativeNumber);
    CLI::Option* pure_frac =
        cgen->add_option("--pure-fraction", gen.spec.pure_fraction_per_bin,
                         "pure share of each entangled bin (2-qubit only)")
            ->check(CLI::Range(0.0, 1.0));
    CLI::Option* ghz_frac = cgen->add_option("--ghz-fraction", gen.spec.ghz_fraction,
                                             "GHZ-class share of each bin (3-qubit only)")
                                ->check(CLI::Range(0.0, 1.0));
    cgen->add_option("--seed", gen.spec.seed, "RNG seed")->required();
    cgen->add_option("--max-attempts", gen.spec.max_attempts_per_row,
                     "rejection attempts per row before giving up")
        ->check(CLI::PositiveNumber);
    cgen->add_option("--out", gen.out, "output CSV path")->required();
    cgen->add_option("--workers", gen.workers, "parallel row-generation threads")
        ->check(CLI::PositiveNumber);

    TrainArgs tr;
    CLI::App* ctrain = app.add_subcommand("train", "cross-validate, fit, and save a model");
    ctrain->add_option("--model", tr.model_kind, "model kind")
        ->required()
        ->check(CLI::IsMember({"tree", "lsboost", "mlp"}));
    ctrain->add_option("--data", tr.data, "dataset CSV")->required()->check(CLI::ExistingFile);
    ctrain->add_option("--folds", tr.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
    ctrain->add_option("--seed", tr.seed, "fold-assignment (and MLP) seed");
    ctrain->add_option("--out", tr.out, "model file path")->required();
    ctrain->add_option("--report", tr.report, "metrics report path")->required();
    ctrain->add_option("--scatter", tr.scatter, "scatter CSV of pooled CV predictions");
    ctrain->add_flag("--grid", tr.grid, "grid-search the default lattice instead of flag params");
    ctrain->add_option("--workers", tr.workers, "parallel fold-training threads")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--max-depth", tr.tree.max_depth, "tree: maximum depth")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--min-leaf", tr.tree.min_leaf, "tree: minimum rows per leaf")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--min-split", tr.tree.min_split, "tree: minimum rows to split")
        ->check(CLI::NonNegativeNumber);
    ctrain->add_option("--n-estimators", tr.boost.n_estimators, "lsboost: boosting stages")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--learning-rate", tr.boost.learning_rate, "lsboost: shrinkage in (0,1]");
    ctrain->add_option("--base-depth", tr.boost.base.max_depth, "lsboost: base tree depth")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--hidden", tr.mlp.hidden, "mlp: hidden layer widths")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--activation", tr.mlp.activation, "mlp: relu or tanh")
        ->check(CLI::IsMember({"relu", "tanh"}));
    ctrain->add_option("--epochs", tr.mlp.epochs, "mlp: training epochs")
        ->check(CLI::NonNegativeNumber);
    ctrain->add_option("--batch-size", tr.mlp.batch_size, "mlp: minibatch size")
        ->check(CLI::PositiveNumber);
    ctrain->add_option("--step-size", tr.mlp.step_size, "mlp: optimizer step size");

    PredictArgs pr;
    CLI::App* cpred = app.add_subcommand("predict", "apply a saved model to a feature CSV");
    cpred->add_option("--model-file", pr.model_file, "saved model")->required()->check(CLI::ExistingFile);
    cpred->add_option("--data", pr.data, "feature CSV (label column optional)")
        ->required()
        ->check(CLI::ExistingFile);
    cpred->add_option("--out", pr.out, "predictions path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cgen->parsed()) {
            if (gen.spec.qubits == 2 && ghz_frac->count() > 0)
                throw DomainError("--ghz-fraction requires --qubits 3");
            if (gen.spec.qubits == 3 && pure_frac->count() > 0)
                throw DomainError("--pure-fraction requires --qubits 2");
            return run_generate(gen);
        }
        if (ctrain->parsed()) return run_train(tr);
        return run_predict(pr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
