// Acceptance gate for the full pipeline.  Usage:
//   entq_acceptance <cli-binary> <scratch-dir>
// Runs eight end-to-end criteria, prints one PASS/FAIL line per criterion,
// and exits nonzero if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "entq/entq.hpp"

namespace fs = std::filesystem;
using namespace entq;

namespace {

struct Gate {
    int failures = 0;

    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        bool ok = false;
        std::string detail;
        try {
            std::tie(ok, detail) = body();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << ": " << name
                  << (detail.empty() ? "" : " [" + detail + "]") << std::endl;
        if (!ok) ++failures;
    }
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState bell_phi_plus() { return PureState({kInvSqrt2, 0.0, 0.0, kInvSqrt2}); }

DensityMatrix werner(double p) {
    return DensityMatrix(bell_phi_plus().projector() * cplx(p) +
                         ComplexMatrix::identity(4) * cplx(0.25 * (1.0 - p)));
}

// ---------------------------------------------------------------- criterion 1

std::pair<bool, std::string> analytic_oracles() {
    const Timer timer;
    double worst = 0.0;  // max over subchecks of gap/tolerance

    RngStream rng(9001, 0);
    double gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const PureState psi = sample_haar_pure(4, rng);
        gap = std::max(gap, std::abs(concurrence_mixed(DensityMatrix::from_pure(psi)).value -
                                     concurrence_pure(psi).value));
    }
    worst = std::max(worst, gap / 1e-8);

    gap = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double p = 0.1 * i;
        gap = std::max(gap, std::abs(concurrence_mixed(werner(p)).value -
                                     std::max(0.0, (3.0 * p - 1.0) / 2.0)));
    }
    worst = std::max(worst, gap / 1e-8);

    std::vector<cplx> g(8, 0.0);
    g[0] = g[7] = kInvSqrt2;
    std::vector<cplx> w(8, 0.0);
    w[1] = w[2] = w[4] = 1.0 / std::sqrt(3.0);
    gap = std::abs(gme_concurrence_pure(PureState(std::move(g))).value - 1.0);
    gap = std::max(gap, std::abs(gme_concurrence_pure(PureState(std::move(w))).value -
                                 2.0 * std::sqrt(2.0) / 3.0));
    worst = std::max(worst, gap / 1e-9);

    gap = 0.0;
    for (int i = 0; i < 1000; ++i)
        gap = std::max(gap, gme_concurrence_pure(sample_biseparable_3q(rng)).value);
    worst = std::max(worst, gap / 1e-9);

    gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const DensityMatrix rho = sample_wishart_mixed(4, 1 + rng.uniform_int(4), rng);
        const ComplexMatrix u = kron(sample_haar_unitary(2, rng), sample_haar_unitary(2, rng));
        gap = std::max(gap,
                       std::abs(concurrence_mixed(DensityMatrix(u * rho.matrix() * u.dagger())).value -
                                concurrence_mixed(rho).value));
        const PureState psi = sample_haar_pure(8, rng);
        const PureState rot =
            detail::apply_local_3q(sample_haar_unitary(2, rng), sample_haar_unitary(2, rng),
                                   sample_haar_unitary(2, rng), psi);
        gap = std::max(gap, std::abs(gme_concurrence_pure(rot).value -
                                     gme_concurrence_pure(psi).value));
    }
    worst = std::max(worst, gap / 1e-8);

    const double wall = timer.seconds();
    const bool ok = worst <= 1.0 && wall < 30.0;
    return {ok, "worst gap/tolerance " + fmt(worst, 3) + "; wall " + fmt(wall, 3) + "s"};
}

// ---------------------------------------------------------------- criterion 2

std::pair<bool, std::string> feature_suite() {
    const Timer timer;
    bool ok = true;

    const std::array<double, 9> bell_want = {1, 0, 0, 0, -1, 0, 0, 0, 1};
    const CorrelationFeatures2Q bell = pauli_correlations(bell_phi_plus());
    double bell_gap = 0.0;
    for (int k = 0; k < 9; ++k) bell_gap = std::max(bell_gap, std::abs(bell.t[k] - bell_want[k]));
    ok = ok && bell_gap <= 1e-10;

    std::vector<cplx> zero(8, 0.0);
    zero[0] = 1.0;
    const SvetlichnyFeatures3Q f0 = svetlichny_features(PureState(std::move(zero)));
    double zero_gap = 0.0;
    for (int k = 0; k < 8; ++k) zero_gap = std::max(zero_gap, std::abs(f0.f[k]));
    ok = ok && zero_gap <= 1e-12;

    RngStream rng(9002, 0);
    double max_pure = 0.0, max_product = 0.0;
    for (int i = 0; i < 10000; ++i)
        max_pure = std::max(max_pure,
                            std::abs(svetlichny_value(svetlichny_features(sample_haar_pure(8, rng)))));
    for (int i = 0; i < 10000; ++i)
        max_product = std::max(
            max_product,
            std::abs(svetlichny_value(svetlichny_features(sample_biseparable_3q(rng)))));
    ok = ok && max_pure <= 4.0 * std::sqrt(2.0) + 1e-6 && max_product <= 4.0 + 1e-6;

    return {ok, "bell gap " + fmt(bell_gap, 2) + "; zero gap " + fmt(zero_gap, 2) +
                    "; max |S| pure " + fmt(max_pure) + " (bound " +
                    fmt(4.0 * std::sqrt(2.0)) + "), product " + fmt(max_product) +
                    " (bound 4); wall " + fmt(timer.seconds(), 3) + "s"};
}

// ---------------------------------------------------------------- criterion 3

std::vector<std::vector<double>> random_matrix(std::size_t n, std::size_t f, RngStream& rng) {
    std::vector<std::vector<double>> x(n, std::vector<double>(f));
    for (auto& row : x)
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
    return x;
}

// Best root split by exhaustive enumeration, scored S_l^2/n_l + S_r^2/n_r.
double brute_force_best_gain(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y, std::size_t min_leaf) {
    const std::size_t n = x.size(), nf = x[0].size();
    double best = -1.0;
    for (std::size_t f = 0; f < nf; ++f) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
        for (std::size_t pos = 0; pos + 1 < n; ++pos) {
            const double v = x[idx[pos]][f], vn = x[idx[pos + 1]][f];
            if (v == vn) continue;
            const std::size_t n_l = pos + 1, n_r = n - n_l;
            if (n_l < min_leaf || n_r < min_leaf) continue;
            double thr = 0.5 * (v + vn);
            if (!(v < thr)) thr = vn;
            double sl = 0.0, sr = 0.0;
            for (std::size_t i = 0; i < n; ++i) (x[i][f] < thr ? sl : sr) += y[i];
            best = std::max(best, sl * sl / static_cast<double>(n_l) +
                                      sr * sr / static_cast<double>(n_r));
        }
    }
    return best;
}

double gain_of(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
               int feature, double thr) {
    double sl = 0.0, sr = 0.0;
    std::size_t nl = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i][static_cast<std::size_t>(feature)] < thr) {
            sl += y[i];
            ++nl;
        } else {
            sr += y[i];
        }
    }
    if (nl == 0 || nl == x.size()) return -1.0;
    return sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(x.size() - nl);
}

std::pair<bool, std::string> model_math(const fs::path& scratch) {
    const Timer timer;
    RngStream rng(9003, 0);

    // CART split optimality on 50 random instances.
    double split_slack = 0.0;
    for (int round = 0; round < 50; ++round) {
        const auto x = random_matrix(200, 4, rng);
        std::vector<double> y(200);
        for (double& v : y) v = rng.gaussian();
        const double want = brute_force_best_gain(x, y, 5);
        const DecisionTree t = DecisionTree::fit(x, y, TreeParams{1, 5, 10});
        if (t.nodes()[0].is_leaf()) return {false, "root refused to split"};
        const double got = gain_of(x, y, t.nodes()[0].feature, t.nodes()[0].threshold);
        split_slack = std::max(split_slack, want - got);
    }
    const bool split_ok = split_slack <= 1e-9;

    // Boost train-MSE monotonicity.
    const auto xb = random_matrix(150, 3, rng);
    std::vector<double> yb(150);
    for (std::size_t i = 0; i < yb.size(); ++i)
        yb[i] = std::sin(3.0 * xb[i][0]) - 0.4 * xb[i][2] + 0.05 * rng.gaussian();
    const LsBoost boost = LsBoost::fit(xb, yb, BoostParams{100, 0.3, TreeParams{3, 5, 10}});
    bool mono_ok = true;
    for (std::size_t s = 1; s < boost.stage_train_mse().size(); ++s)
        mono_ok = mono_ok &&
                  boost.stage_train_mse()[s] <= boost.stage_train_mse()[s - 1] + 1e-12;

    // MLP gradients vs central differences.
    double grad_rel = 0.0;
    const auto xg = random_matrix(5, 2, rng);
    std::vector<double> yg(5);
    for (double& v : yg) v = rng.gaussian();
    for (const char* act : {"tanh", "relu"}) {
        MlpParams p;
        p.hidden = {3};
        p.activation = act;
        p.seed = 31;
        Mlp m = Mlp::initialized(2, p);
        const Mlp::Gradients gr = m.loss_gradients(xg, yg);
        const double h = 1e-6;
        auto probe = [&](double& theta, double analytic) {
            const double keep = theta;
            theta = keep + h;
            const double up = m.mean_squared_loss(xg, yg);
            theta = keep - h;
            const double dn = m.mean_squared_loss(xg, yg);
            theta = keep;
            const double fd = (up - dn) / (2.0 * h);
            grad_rel = std::max(grad_rel, std::abs(fd - analytic) /
                                              std::max({std::abs(fd), std::abs(analytic), 1e-3}));
        };
        for (std::size_t l = 0; l < m.weights().size(); ++l) {
            for (std::size_t i = 0; i < m.weights()[l].size(); ++i)
                probe(m.weights()[l][i], gr.w[l][i]);
            for (std::size_t i = 0; i < m.biases()[l].size(); ++i)
                probe(m.biases()[l][i], gr.b[l][i]);
        }
    }
    const bool grad_ok = grad_rel < 1e-5;

    // Save/load prediction equality for all three kinds.
    const auto xs = random_matrix(80, 3, rng);
    std::vector<double> ys(80);
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = 0.3 * xs[i][0] - xs[i][1] * xs[i][2];
    MlpParams mp;
    mp.hidden = {4, 3};
    mp.epochs = 5;
    mp.batch_size = 16;
    mp.seed = 7;
    const AnyModel models[] = {
        AnyModel(DecisionTree::fit(xs, ys, TreeParams{5, 2, 4})),
        AnyModel(LsBoost::fit(xs, ys, BoostParams{20, 0.2, TreeParams{3, 2, 4}})),
        AnyModel(Mlp::fit(xs, ys, mp)),
    };
    const auto probes = random_matrix(100, 3, rng);
    bool io_ok = true;
    for (const AnyModel& m : models) {
        const fs::path path = scratch / (std::string("roundtrip_") + model_kind(m) + ".txt");
        std::visit([&](const auto& model) { save_model(model, path.string()); }, m);
        const AnyModel back = load_model(path.string());
        for (const auto& row : probes) io_ok = io_ok && model_predict(back, row) == model_predict(m, row);
    }

    const bool ok = split_ok && mono_ok && grad_ok && io_ok;
    return {ok, std::string("split slack ") + fmt(split_slack, 2) + (mono_ok ? "; mse monotone" : "; MSE NOT MONOTONE") +
                    "; grad rel err " + fmt(grad_rel, 2) + (io_ok ? "; io exact" : "; IO MISMATCH") +
                    "; wall " + fmt(timer.seconds(), 3) + "s"};
}

// ---------------------------------------------------------- criteria 4 and 5

struct DeskResult {
    LabeledDataset ds;
    double boost_rmse = -1.0;
};

std::pair<bool, std::string> desk_scale(int qubits, double rmse_max, double r_min,
                                        double minutes_max, DeskResult& out) {
    const Timer timer;
    DatasetSpec spec;
    spec.qubits = qubits;
    spec.separable_count = 2000;
    spec.per_bin_count = 1800;
    spec.seed = qubits == 2 ? 101 : 102;
    out.ds = build_dataset(spec);

    const GridSearchResult<LsBoost> res =
        grid_search<LsBoost>(default_boost_grid(), out.ds, 5, 5);
    const double rmse = res.best_report.rmse;
    const double r = res.best_report.r.value_or(0.0);
    out.boost_rmse = rmse;

    const double wall = timer.seconds();
    const bool ok = out.ds.n_rows() == 20000 && rmse <= rmse_max && r >= r_min &&
                    wall <= minutes_max * 60.0;
    return {ok, "RMSE " + fmt(rmse) + " (max " + fmt(rmse_max) + "); R " + fmt(r) + " (min " +
                    fmt(r_min) + "); " + describe(res.best) + "; wall " + fmt(wall, 3) + "s"};
}

// ---------------------------------------------------------------- criterion 6

std::pair<bool, std::string> ranking(const DeskResult& d2, const DeskResult& d3) {
    const Timer timer;
    if (d2.boost_rmse < 0.0 || d3.boost_rmse < 0.0)
        return {false, "desk-scale runs unavailable"};
    std::string detail;
    bool ok = true;
    for (const DeskResult* d : {&d2, &d3}) {
        const GridSearchResult<DecisionTree> res =
            grid_search<DecisionTree>(default_tree_grid(), d->ds, 5, 5);
        const double tree_rmse = res.best_report.rmse;
        ok = ok && d->boost_rmse < tree_rmse;
        detail += std::to_string(d->ds.qubits) + "q boost " + fmt(d->boost_rmse) + " vs tree " +
                  fmt(tree_rmse) + "; ";
    }
    return {ok, detail + "wall " + fmt(timer.seconds(), 3) + "s"};
}

// ---------------------------------------------------------------- criterion 7

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "";
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<bool, std::string> determinism(const std::string& cli, const fs::path& scratch) {
    const Timer timer;
    auto shell = [&](const std::string& args) {
        const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto at = [&](const char* name) { return (scratch / name).string(); };
    // Repeat runs use the exact same flags (including --out), capturing bytes
    // between runs; only --workers may differ, and it must not show anywhere.
    auto stable = [&](const std::vector<std::string>& runs,
                      const std::vector<const char*>& outputs, bool& invoked) {
        std::vector<std::string> first;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            if (!shell(runs[r])) {
                invoked = false;
                return false;
            }
            for (std::size_t f = 0; f < outputs.size(); ++f) {
                const std::string bytes = slurp(scratch / outputs[f]);
                if (bytes.empty()) return false;
                if (r == 0)
                    first.push_back(bytes);
                else if (bytes != first[f])
                    return false;
            }
        }
        return true;
    };

    bool invoked = true;
    const std::string gen2 = "generate --qubits 2 --separable 60 --per-bin 30"
                             " --pure-fraction 0.5 --seed 5 --out " + at("g.csv");
    const bool gen_ok = stable({gen2, gen2, gen2 + " --workers 4"}, {"g.csv"}, invoked);
    if (!invoked) return {false, "generate invocation failed"};

    const std::string gen3 = "generate --qubits 3 --separable 20 --per-bin 10"
                             " --ghz-fraction 0.5 --seed 6 --out " + at("g3.csv");
    const bool gen3_ok = stable({gen3, gen3 + " --workers 3"}, {"g3.csv"}, invoked);
    if (!invoked) return {false, "3q generate invocation failed"};

    const std::string train = "train --model lsboost --data " + at("g.csv") +
                              " --n-estimators 25 --learning-rate 0.2 --base-depth 3"
                              " --folds 3 --seed 9 --out " + at("m.txt") + " --report " +
                              at("r.txt") + " --scatter " + at("s.csv");
    const bool train_ok =
        stable({train, train, train + " --workers 2"}, {"m.txt", "r.txt", "s.csv"}, invoked);
    if (!invoked) return {false, "train invocation failed"};

    const std::string pred = "predict --model-file " + at("m.txt") + " --data " + at("g.csv") +
                             " --out " + at("p.csv");
    const bool pred_ok = stable({pred, pred}, {"p.csv"}, invoked);
    if (!invoked) return {false, "predict invocation failed"};

    const bool ok = gen_ok && gen3_ok && train_ok && pred_ok;
    return {ok, std::string("generate ") + (gen_ok && gen3_ok ? "stable" : "UNSTABLE") + "; train " +
                    (train_ok ? "stable" : "UNSTABLE") + "; predict " +
                    (pred_ok ? "stable" : "UNSTABLE") + "; wall " + fmt(timer.seconds(), 3) + "s"};
}

// ---------------------------------------------------------------- criterion 8

std::pair<bool, std::string> full_scale(const fs::path& scratch) {
    const Timer timer;
    bool ok = true;
    std::string detail;

    for (const int qubits : {2, 3}) {
        DatasetSpec spec;
        spec.qubits = qubits;
        spec.separable_count = 10000;
        spec.per_bin_count = 9000;
        spec.seed = qubits == 2 ? 111 : 112;
        const LabeledDataset ds = build_dataset(spec);

        std::map<std::pair<int, std::string>, long long> counts;
        for (const DataRow& row : ds.rows) ++counts[{row.bin, row.cls}];
        bool comp = ds.n_rows() == 100000;
        if (qubits == 2) {
            comp = comp && counts[{0, "sep_pure"}] == 5000 && counts[{0, "sep_mixed"}] == 5000;
            for (int b = 1; b <= 10; ++b)
                comp = comp && counts[{b, "pure"}] == 4500 && counts[{b, "mixed"}] == 4500;
        } else {
            comp = comp && counts[{0, "bisep"}] == 10000;
            for (int b = 1; b <= 10; ++b)
                comp = comp && counts[{b, "ghz"}] == 4500 && counts[{b, "w"}] == 4500;
        }

        const fs::path csv = scratch / ("full_scale_" + std::to_string(qubits) + "q.csv");
        write_csv(ds, csv.string());
        const LabeledDataset back = read_csv(csv.string());
        const bool io = back.n_rows() == 100000 && back.has_labels;
        fs::remove(csv);

        ok = ok && comp && io;
        detail += std::to_string(qubits) + "q rows " + std::to_string(ds.n_rows()) +
                  (comp ? " composition exact" : " COMPOSITION WRONG") +
                  (io ? ", csv ok; " : ", CSV FAILED; ");
    }
    return {ok, detail + "wall " + fmt(timer.seconds(), 3) + "s"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: entq_acceptance <cli-binary> <scratch-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argv[2];
    fs::create_directories(scratch);

    Gate gate;
    DeskResult desk2, desk3;
    gate.run("1 analytic entanglement oracles", analytic_oracles);
    gate.run("2 correlation feature suite", feature_suite);
    gate.run("3 model mathematics", [&] { return model_math(scratch); });
    gate.run("4 desk-scale 2-qubit regression",
             [&] { return desk_scale(2, 0.08, 0.97, 15.0, desk2); });
    gate.run("5 desk-scale 3-qubit regression",
             [&] { return desk_scale(3, 0.05, 0.98, 20.0, desk3); });
    gate.run("6 ensemble beats single tree", [&] { return ranking(desk2, desk3); });
    gate.run("7 end-to-end determinism", [&] { return determinism(cli, scratch); });
    gate.run("8 full-scale generation", [&] { return full_scale(scratch); });

    std::cout << (8 - gate.failures) << "/8 criteria passed" << std::endl;
    return gate.failures == 0 ? 0 : 1;
}
