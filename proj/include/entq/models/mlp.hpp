#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "entq/errors.hpp"
#include "entq/rng.hpp"
#include "entq/text_io.hpp"

namespace entq {

struct MlpParams {
    std::vector<int> hidden = {64, 64};
    std::string activation = "relu";  // "relu" or "tanh"
    int epochs = 200;                 // 0 = return the initialized net untrained
    int batch_size = 128;
    double step_size = 1e-3;
    std::uint64_t seed = 0;
};

inline std::string describe(const MlpParams& p) {
    std::string hidden;
    for (int h : p.hidden) hidden += (hidden.empty() ? "" : "x") + std::to_string(h);
    return "hidden=" + hidden + " activation=" + p.activation +
           " epochs=" + std::to_string(p.epochs) + " batch_size=" + std::to_string(p.batch_size) +
           " step_size=" + format_double(p.step_size) + " seed=" + std::to_string(p.seed);
}

// Fully connected regressor: hidden layers with relu/tanh, linear output
// unit, squared-error loss, mini-batch Adam (0.9 / 0.999, eps 1e-8), weights
// initialized uniform with fan-in scaling.  Deterministic given (data,
// params, seed).
class Mlp {
public:
    using Params = MlpParams;
    static constexpr const char* kind = "mlp";

    struct Gradients {
        std::vector<std::vector<double>> w;
        std::vector<std::vector<double>> b;
    };

    Mlp() = default;

    static Mlp fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                   const MlpParams& p) {
        const std::size_t n = x.size();
        if (n == 0) throw DomainError("Mlp::fit: empty input");
        if (y.size() != n) throw DomainError("Mlp::fit: feature/label row counts disagree");
        Mlp m = initialized(x[0].size(), p);
        for (const auto& row : x)
            if (row.size() != m.n_features_) throw DomainError("Mlp::fit: inconsistent feature width");
        if (p.epochs == 0) return m;

        RngStream rng(p.seed, 1);  // stream 0 seeds the weights
        const std::size_t batch = static_cast<std::size_t>(p.batch_size);

        Gradients grad = m.zero_gradients();
        Gradients adam_m = m.zero_gradients();
        Gradients adam_v = m.zero_gradients();
        const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        std::uint64_t step = 0;

        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;

        for (int epoch = 0; epoch < p.epochs; ++epoch) {
            for (std::size_t i = n; i > 1; --i)
                std::swap(perm[i - 1], perm[rng.uniform_int(i)]);

            for (std::size_t start = 0; start < n; start += batch) {
                const std::size_t stop = std::min(n, start + batch);
                const double inv = 1.0 / static_cast<double>(stop - start);
                m.clear(grad);
                double loss = 0.0;
                for (std::size_t k = start; k < stop; ++k) {
                    const std::size_t i = perm[k];
                    loss += m.accumulate_row_gradient(x[i], y[i], inv, grad);
                }
                if (!std::isfinite(loss * inv))
                    throw NumericError("Mlp::fit: training diverged at epoch " +
                                       std::to_string(epoch));

                ++step;
                const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(step));
                const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(step));
                for (std::size_t l = 0; l < m.w_.size(); ++l) {
                    adam_update(m.w_[l], grad.w[l], adam_m.w[l], adam_v.w[l], p.step_size, beta1,
                                beta2, eps, corr1, corr2);
                    adam_update(m.b_[l], grad.b[l], adam_m.b[l], adam_v.b[l], p.step_size, beta1,
                                beta2, eps, corr1, corr2);
                }
            }
        }
        return m;
    }

    // The net as initialized from the seed, before any training step.
    static Mlp initialized(std::size_t n_features, const MlpParams& p) {
        if (n_features == 0) throw DomainError("Mlp: need at least one feature");
        validate(p);
        Mlp m;
        m.n_features_ = n_features;
        m.params_ = p;
        m.relu_ = (p.activation == "relu");
        m.dims_.push_back(n_features);
        for (int h : p.hidden) m.dims_.push_back(static_cast<std::size_t>(h));
        m.dims_.push_back(1);

        RngStream rng(p.seed, 0);
        for (std::size_t l = 0; l + 1 < m.dims_.size(); ++l) {
            const std::size_t fan_in = m.dims_[l], fan_out = m.dims_[l + 1];
            const double limit = std::sqrt(3.0 / static_cast<double>(fan_in));
            std::vector<double> w(fan_out * fan_in);
            for (double& v : w) v = rng.uniform(-limit, limit);
            m.w_.push_back(std::move(w));
            m.b_.push_back(std::vector<double>(fan_out, 0.0));
        }
        return m;
    }

    double predict(const std::vector<double>& row) const {
        if (row.size() != n_features_) throw DomainError("Mlp::predict: feature width mismatch");
        std::vector<double> a(row), next;
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            forward_layer(l, a, next);
            if (l + 2 < dims_.size()) activate(next);
            a.swap(next);
        }
        return a[0];
    }

    // Mean squared loss over a batch; used by the gradient check.
    double mean_squared_loss(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y) const {
        if (x.empty() || x.size() != y.size()) throw DomainError("Mlp::mean_squared_loss: bad batch");
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = predict(x[i]) - y[i];
            acc += d * d;
        }
        return acc / static_cast<double>(x.size());
    }

    // Analytic gradient of mean_squared_loss with respect to every parameter.
    Gradients loss_gradients(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y) const {
        if (x.empty() || x.size() != y.size()) throw DomainError("Mlp::loss_gradients: bad batch");
        Gradients g = zero_gradients();
        const double inv = 1.0 / static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) accumulate_row_gradient(x[i], y[i], inv, g);
        return g;
    }

    std::size_t n_features() const { return n_features_; }
    const MlpParams& params() const { return params_; }
    const std::vector<std::size_t>& layer_dims() const { return dims_; }
    const std::vector<std::vector<double>>& weights() const { return w_; }
    const std::vector<std::vector<double>>& biases() const { return b_; }
    std::vector<std::vector<double>>& weights() { return w_; }
    std::vector<std::vector<double>>& biases() { return b_; }

    static Mlp from_parts(std::size_t n_features, const MlpParams& p,
                          std::vector<std::vector<double>> w, std::vector<std::vector<double>> b) {
        Mlp m = initialized(n_features, p);
        if (w.size() != m.w_.size() || b.size() != m.b_.size())
            throw DomainError("Mlp: layer count mismatch");
        for (std::size_t l = 0; l < w.size(); ++l)
            if (w[l].size() != m.w_[l].size() || b[l].size() != m.b_[l].size())
                throw DomainError("Mlp: layer size mismatch");
        m.w_ = std::move(w);
        m.b_ = std::move(b);
        return m;
    }

private:
    static void validate(const MlpParams& p) {
        if (p.hidden.empty()) throw DomainError("Mlp: need at least one hidden layer");
        for (int h : p.hidden)
            if (h < 1) throw DomainError("Mlp: hidden widths must be >= 1");
        if (p.epochs < 0) throw DomainError("Mlp: epochs must be >= 0");
        if (p.batch_size < 1) throw DomainError("Mlp: batch_size must be >= 1");
        if (!(p.step_size > 0.0)) throw DomainError("Mlp: step_size must be positive");
        if (p.activation != "relu" && p.activation != "tanh")
            throw DomainError("Mlp: activation must be relu or tanh");
    }

    void forward_layer(std::size_t l, const std::vector<double>& in,
                       std::vector<double>& out) const {
        const std::size_t rows = dims_[l + 1], cols = dims_[l];
        const std::vector<double>& w = w_[l];
        out.assign(rows, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = b_[l][r];
            const double* wr = &w[r * cols];
            for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * in[c];
            out[r] = acc;
        }
    }

    void activate(std::vector<double>& v) const {
        if (relu_)
            for (double& z : v) z = z > 0.0 ? z : 0.0;
        else
            for (double& z : v) z = std::tanh(z);
    }

    Gradients zero_gradients() const {
        Gradients g;
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            g.w.push_back(std::vector<double>(dims_[l + 1] * dims_[l], 0.0));
            g.b.push_back(std::vector<double>(dims_[l + 1], 0.0));
        }
        return g;
    }

    void clear(Gradients& g) const {
        for (auto& v : g.w) std::fill(v.begin(), v.end(), 0.0);
        for (auto& v : g.b) std::fill(v.begin(), v.end(), 0.0);
    }

    // Adds the gradient of scale * (prediction - y)^2 to g; returns the
    // squared error of the row.
    double accumulate_row_gradient(const std::vector<double>& row, double y, double scale,
                                   Gradients& g) const {
        const std::size_t layers = w_.size();
        std::vector<std::vector<double>> pre(layers);   // pre-activations
        std::vector<std::vector<double>> act(layers + 1);
        act[0] = row;
        for (std::size_t l = 0; l < layers; ++l) {
            forward_layer(l, act[l], pre[l]);
            act[l + 1] = pre[l];
            if (l + 1 < layers) activate(act[l + 1]);
        }
        const double err = act[layers][0] - y;

        std::vector<double> delta{2.0 * scale * err};
        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t rows = dims_[l + 1], cols = dims_[l];
            for (std::size_t r = 0; r < rows; ++r) {
                g.b[l][r] += delta[r];
                double* gw = &g.w[l][r * cols];
                const double d = delta[r];
                const std::vector<double>& in = act[l];
                for (std::size_t c = 0; c < cols; ++c) gw[c] += d * in[c];
            }
            if (l == 0) break;
            std::vector<double> prev(cols, 0.0);
            const std::vector<double>& w = w_[l];
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = delta[r];
                const double* wr = &w[r * cols];
                for (std::size_t c = 0; c < cols; ++c) prev[c] += d * wr[c];
            }
            // Through the activation of layer l-1.
            const std::vector<double>& z = pre[l - 1];
            if (relu_)
                for (std::size_t c = 0; c < cols; ++c) prev[c] = z[c] > 0.0 ? prev[c] : 0.0;
            else
                for (std::size_t c = 0; c < cols; ++c) {
                    const double t = std::tanh(z[c]);
                    prev[c] *= 1.0 - t * t;
                }
            delta.swap(prev);
        }
        return err * err;
    }

    static void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                            std::vector<double>& m1, std::vector<double>& m2, double step,
                            double beta1, double beta2, double eps, double corr1, double corr2) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i];
            m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i];
            const double mhat = m1[i] / corr1;
            const double vhat = m2[i] / corr2;
            param[i] -= step * mhat / (std::sqrt(vhat) + eps);
        }
    }

    std::size_t n_features_ = 0;
    MlpParams params_;
    bool relu_ = true;
    std::vector<std::size_t> dims_;           // feature width, hidden..., 1
    std::vector<std::vector<double>> w_;      // layer l: dims_[l+1] x dims_[l], row-major
    std::vector<std::vector<double>> b_;
};

}  // namespace entq
