#pragma once

#include "crnoma/rng.hpp"

#include <memory>
#include <vector>

namespace crnoma {

enum class OutAct { identity, tanh_out };

// Differentiable map used by the feed-forward agents. Training passes are
// batched: train_forward caches activations for the batch, train_backward
// consumes output gradients, accumulates parameter gradients and optionally
// reports input gradients (needed for d(critic)/d(action)).
class Net {
 public:
    virtual ~Net() = default;
    virtual int in() const = 0;
    virtual int out() const = 0;
    virtual std::vector<double>& w() = 0;
    virtual const std::vector<double>& w() const = 0;
    virtual void forward(const double* x, double* y) const = 0;
    virtual void train_forward(const std::vector<double>& x_rows, int batch,
                               std::vector<double>& y_rows) = 0;
    virtual void train_backward(const std::vector<double>& dy_rows, std::vector<double>& gw,
                                std::vector<double>* dx_rows) = 0;
    virtual std::unique_ptr<Net> clone() const = 0;
};

struct MlpSpec {
    int in = 1;
    std::vector<int> hidden = {64, 64, 64};
    int out = 1;
    OutAct out_act = OutAct::identity;
};

// Fully connected rectifier network. Weights live in one flat vector, layer
// by layer (matrix row-major, then bias). Hidden layers use ReLU; tanh
// outputs get a small-magnitude final layer so initial actions sit near zero.
class Mlp final : public Net {
 public:
    Mlp(const MlpSpec& spec, Rng& rng);

    int in() const override { return spec_.in; }
    int out() const override { return spec_.out; }
    std::vector<double>& w() override { return w_; }
    const std::vector<double>& w() const override { return w_; }
    const MlpSpec& spec() const { return spec_; }

    void forward(const double* x, double* y) const override;
    void train_forward(const std::vector<double>& x_rows, int batch,
                       std::vector<double>& y_rows) override;
    void train_backward(const std::vector<double>& dy_rows, std::vector<double>& gw,
                        std::vector<double>* dx_rows) override;
    std::unique_ptr<Net> clone() const override { return std::make_unique<Mlp>(*this); }

 private:
    struct Layout {
        int in = 0, out = 0;
        std::size_t w_off = 0, b_off = 0;
    };
    void layer_forward(int l, const double* x, double* y, bool last) const;

    MlpSpec spec_;
    std::vector<Layout> layers_;
    std::vector<double> w_;
    // batch caches: activations per layer boundary, rows-major
    std::vector<std::vector<double>> acts_;
    int cached_batch_ = 0;
};

// Gated recurrent cell plus a one-hidden-layer dense head. The head can take
// `extra` inputs appended to the cell state (the critic's current action).
// Parameters are flat: r, z, n gate blocks (W, U, b_input, b_hidden each),
// then the head layers.
class GruNet {
 public:
    struct Spec {
        int in = 1;
        int hidden = 64;
        int extra = 0;
        int head_hidden = 64;
        int out = 1;
        OutAct out_act = OutAct::identity;
    };

    GruNet(const Spec& spec, Rng& rng);

    const Spec& spec() const { return spec_; }
    std::vector<double>& w() { return w_; }
    const std::vector<double>& w() const { return w_; }

    // inference step; h_out must not alias h_prev
    void step(const double* x, const double* extra, const double* h_prev, double* h_out,
              double* y) const;

    struct StepCache {
        std::vector<double> x, extra, h_prev, r, z, n, s; // s = U_n h + b_hn
        std::vector<double> head_in, head_act, y;
    };
    void step_cached(const double* x, const double* extra, const double* h_prev,
                     double* h_out, double* y, StepCache& c) const;

    // dy: gradient at the head output (may be null); dh_in: gradient flowing
    // into h_out from later steps (may be null). Accumulates into gw; writes
    // dh_prev (required) and optionally d_extra and dx.
    void step_backward(const StepCache& c, const double* dy, const double* dh_in,
                       double* dh_prev, double* d_extra, double* dx,
                       std::vector<double>& gw) const;

 private:
    struct Off;
    Spec spec_;
    std::vector<double> w_;
    std::size_t off_[16]; // block offsets (gate matrices, biases, head layers)
};

// Single-step view of a recurrent net: each row is evaluated from a zero
// cell state. Input rows are [cell_input, extra]. Lets the feed-forward
// update rules drive recurrent parameters.
class GruStepNet final : public Net {
 public:
    explicit GruStepNet(GruNet net);

    int in() const override;
    int out() const override;
    std::vector<double>& w() override { return net_.w(); }
    const std::vector<double>& w() const override { return net_.w(); }
    GruNet& inner() { return net_; }

    void forward(const double* x, double* y) const override;
    void train_forward(const std::vector<double>& x_rows, int batch,
                       std::vector<double>& y_rows) override;
    void train_backward(const std::vector<double>& dy_rows, std::vector<double>& gw,
                        std::vector<double>* dx_rows) override;
    std::unique_ptr<Net> clone() const override { return std::make_unique<GruStepNet>(*this); }

 private:
    GruNet net_;
    std::vector<GruNet::StepCache> caches_;
    int cached_batch_ = 0;
};

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m, v;
    long t = 0;

    void step(std::vector<double>& w, const std::vector<double>& g);
};

void soft_update(std::vector<double>& target, const std::vector<double>& main, double tau);

bool has_nan(const std::vector<double>& v);

} // namespace crnoma
