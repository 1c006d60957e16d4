#include "crnoma/nn.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace crnoma {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y[rows] = M[rows x cols] * x + y
inline void matvec_add(const double* m, int rows, int cols, const double* x, double* y) {
    for (int i = 0; i < rows; ++i) {
        const double* row = m + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] += acc;
    }
}

// x_grad[cols] += M^T[cols x rows] * d
inline void matvec_t_add(const double* m, int rows, int cols, const double* d, double* x_grad) {
    for (int i = 0; i < rows; ++i) {
        const double* row = m + static_cast<std::size_t>(i) * cols;
        double di = d[i];
        for (int j = 0; j < cols; ++j) x_grad[j] += row[j] * di;
    }
}

// G[rows x cols] += d (outer) x
inline void outer_add(double* g, int rows, int cols, const double* d, const double* x) {
    for (int i = 0; i < rows; ++i) {
        double* row = g + static_cast<std::size_t>(i) * cols;
        double di = d[i];
        for (int j = 0; j < cols; ++j) row[j] += di * x[j];
    }
}

void fill_uniform(double* p, std::size_t n, double scale, Rng& rng) {
    for (std::size_t i = 0; i < n; ++i) p[i] = rng.uniform(-scale, scale);
}

constexpr double kSmallFinalInit = 3e-3;

} // namespace

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : spec_(spec) {
    if (spec.in < 1 || spec.out < 1 || spec.hidden.empty())
        throw std::invalid_argument("Mlp: need input, output and at least one hidden layer");
    std::vector<int> dims;
    dims.push_back(spec.in);
    for (int h : spec.hidden) {
        if (h < 1) throw std::invalid_argument("Mlp: hidden width must be >= 1");
        dims.push_back(h);
    }
    dims.push_back(spec.out);

    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layout lay;
        lay.in = dims[l];
        lay.out = dims[l + 1];
        lay.w_off = total;
        total += static_cast<std::size_t>(lay.in) * lay.out;
        lay.b_off = total;
        total += static_cast<std::size_t>(lay.out);
        layers_.push_back(lay);
    }
    w_.resize(total);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        bool last = (l + 1 == layers_.size());
        double scale = (last && spec_.out_act == OutAct::tanh_out)
                           ? kSmallFinalInit
                           : 1.0 / std::sqrt(static_cast<double>(layers_[l].in));
        std::size_t count = layers_[l].b_off + layers_[l].out - layers_[l].w_off;
        fill_uniform(w_.data() + layers_[l].w_off, count, scale, rng);
    }
}

void Mlp::layer_forward(int l, const double* x, double* y, bool last) const {
    const Layout& lay = layers_[static_cast<std::size_t>(l)];
    const double* b = w_.data() + lay.b_off;
    for (int i = 0; i < lay.out; ++i) y[i] = b[i];
    matvec_add(w_.data() + lay.w_off, lay.out, lay.in, x, y);
    if (!last) {
        for (int i = 0; i < lay.out; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
    } else if (spec_.out_act == OutAct::tanh_out) {
        for (int i = 0; i < lay.out; ++i) y[i] = std::tanh(y[i]);
    }
}

void Mlp::forward(const double* x, double* y) const {
    std::vector<double> a(x, x + spec_.in), b;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        b.assign(static_cast<std::size_t>(layers_[l].out), 0.0);
        layer_forward(static_cast<int>(l), a.data(), b.data(), l + 1 == layers_.size());
        a.swap(b);
    }
    std::memcpy(y, a.data(), sizeof(double) * static_cast<std::size_t>(spec_.out));
}

void Mlp::train_forward(const std::vector<double>& x_rows, int batch, std::vector<double>& y_rows) {
    if (x_rows.size() != static_cast<std::size_t>(batch) * spec_.in)
        throw std::invalid_argument("Mlp::train_forward: input shape mismatch");
    acts_.assign(layers_.size() + 1, {});
    acts_[0] = x_rows;
    cached_batch_ = batch;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layout& lay = layers_[l];
        acts_[l + 1].assign(static_cast<std::size_t>(batch) * lay.out, 0.0);
        for (int r = 0; r < batch; ++r) {
            layer_forward(static_cast<int>(l),
                          acts_[l].data() + static_cast<std::size_t>(r) * lay.in,
                          acts_[l + 1].data() + static_cast<std::size_t>(r) * lay.out,
                          l + 1 == layers_.size());
        }
    }
    y_rows = acts_.back();
}

void Mlp::train_backward(const std::vector<double>& dy_rows, std::vector<double>& gw,
                         std::vector<double>* dx_rows) {
    if (cached_batch_ == 0) throw std::logic_error("Mlp::train_backward before train_forward");
    if (dy_rows.size() != static_cast<std::size_t>(cached_batch_) * spec_.out)
        throw std::invalid_argument("Mlp::train_backward: gradient shape mismatch");
    gw.resize(w_.size(), 0.0);
    if (dx_rows) dx_rows->assign(static_cast<std::size_t>(cached_batch_) * spec_.in, 0.0);

    std::vector<double> d, dprev;
    for (int r = 0; r < cached_batch_; ++r) {
        const std::size_t last = layers_.size() - 1;
        d.assign(static_cast<std::size_t>(layers_[last].out), 0.0);
        const double* y = acts_[last + 1].data() + static_cast<std::size_t>(r) * layers_[last].out;
        const double* dy = dy_rows.data() + static_cast<std::size_t>(r) * spec_.out;
        for (int i = 0; i < layers_[last].out; ++i) {
            double g = dy[i];
            if (spec_.out_act == OutAct::tanh_out) g *= 1.0 - y[i] * y[i];
            d[static_cast<std::size_t>(i)] = g;
        }
        for (std::size_t l = layers_.size(); l-- > 0;) {
            const Layout& lay = layers_[l];
            const double* x_in = acts_[l].data() + static_cast<std::size_t>(r) * lay.in;
            outer_add(gw.data() + lay.w_off, lay.out, lay.in, d.data(), x_in);
            for (int i = 0; i < lay.out; ++i) gw[lay.b_off + static_cast<std::size_t>(i)] += d[i];
            if (l > 0) {
                dprev.assign(static_cast<std::size_t>(lay.in), 0.0);
                matvec_t_add(w_.data() + lay.w_off, lay.out, lay.in, d.data(), dprev.data());
                const double* act = acts_[l].data() + static_cast<std::size_t>(r) * lay.in;
                for (int j = 0; j < lay.in; ++j)
                    if (act[j] <= 0.0) dprev[static_cast<std::size_t>(j)] = 0.0;
                d.swap(dprev);
            } else if (dx_rows) {
                matvec_t_add(w_.data() + lay.w_off, lay.out, lay.in, d.data(),
                             dx_rows->data() + static_cast<std::size_t>(r) * lay.in);
            }
        }
    }
}

struct GruNet::Off {
    enum : int { wr, ur, bir, bhr, wz, uz, biz, bhz, wn, un, bin, bhn, v1, c1, v2, c2 };
};

GruNet::GruNet(const Spec& spec, Rng& rng) : spec_(spec) {
    if (spec.in < 1 || spec.hidden < 1 || spec.head_hidden < 1 || spec.out < 1 || spec.extra < 0)
        throw std::invalid_argument("GruNet: invalid spec");
    const std::size_t I = static_cast<std::size_t>(spec.in);
    const std::size_t H = static_cast<std::size_t>(spec.hidden);
    const std::size_t E = static_cast<std::size_t>(spec.extra);
    const std::size_t HH = static_cast<std::size_t>(spec.head_hidden);
    const std::size_t O = static_cast<std::size_t>(spec.out);

    std::size_t sizes[16] = {H * I, H * H, H, H, H * I, H * H, H, H,
                             H * I, H * H, H, H, HH * (H + E), HH, O * HH, O};
    std::size_t total = 0;
    for (int i = 0; i < 16; ++i) {
        off_[i] = total;
        total += sizes[i];
    }
    w_.resize(total);

    double cell_scale = 1.0 / std::sqrt(static_cast<double>(H));
    for (int i = Off::wr; i <= Off::bhn; ++i) fill_uniform(w_.data() + off_[i], sizes[i], cell_scale, rng);
    double head_scale = 1.0 / std::sqrt(static_cast<double>(H + E));
    fill_uniform(w_.data() + off_[Off::v1], sizes[Off::v1], head_scale, rng);
    fill_uniform(w_.data() + off_[Off::c1], sizes[Off::c1], head_scale, rng);
    double out_scale = spec.out_act == OutAct::tanh_out ? kSmallFinalInit
                                                        : 1.0 / std::sqrt(static_cast<double>(HH));
    fill_uniform(w_.data() + off_[Off::v2], sizes[Off::v2], out_scale, rng);
    fill_uniform(w_.data() + off_[Off::c2], sizes[Off::c2], out_scale, rng);
}

void GruNet::step(const double* x, const double* extra, const double* h_prev, double* h_out,
                  double* y) const {
    StepCache c;
    step_cached(x, extra, h_prev, h_out, y, c);
}

void GruNet::step_cached(const double* x, const double* extra, const double* h_prev,
                         double* h_out, double* y, StepCache& c) const {
    const int I = spec_.in, H = spec_.hidden, E = spec_.extra;
    const int HH = spec_.head_hidden, O = spec_.out;
    const double* W = w_.data();

    c.x.assign(x, x + I);
    c.extra.assign(extra, extra + E);
    c.h_prev.assign(h_prev, h_prev + H);
    c.r.assign(static_cast<std::size_t>(H), 0.0);
    c.z.assign(static_cast<std::size_t>(H), 0.0);
    c.n.assign(static_cast<std::size_t>(H), 0.0);
    c.s.assign(static_cast<std::size_t>(H), 0.0);

    for (int i = 0; i < H; ++i) c.r[i] = W[off_[Off::bir] + i] + W[off_[Off::bhr] + i];
    matvec_add(W + off_[Off::wr], H, I, x, c.r.data());
    matvec_add(W + off_[Off::ur], H, H, h_prev, c.r.data());
    for (int i = 0; i < H; ++i) c.r[i] = sigmoid(c.r[i]);

    for (int i = 0; i < H; ++i) c.z[i] = W[off_[Off::biz] + i] + W[off_[Off::bhz] + i];
    matvec_add(W + off_[Off::wz], H, I, x, c.z.data());
    matvec_add(W + off_[Off::uz], H, H, h_prev, c.z.data());
    for (int i = 0; i < H; ++i) c.z[i] = sigmoid(c.z[i]);

    for (int i = 0; i < H; ++i) c.s[i] = W[off_[Off::bhn] + i];
    matvec_add(W + off_[Off::un], H, H, h_prev, c.s.data());
    for (int i = 0; i < H; ++i) c.n[i] = W[off_[Off::bin] + i] + c.r[i] * c.s[i];
    matvec_add(W + off_[Off::wn], H, I, x, c.n.data());
    for (int i = 0; i < H; ++i) c.n[i] = std::tanh(c.n[i]);

    for (int i = 0; i < H; ++i) h_out[i] = (1.0 - c.z[i]) * c.n[i] + c.z[i] * c.h_prev[i];

    c.head_in.assign(static_cast<std::size_t>(H + E), 0.0);
    for (int i = 0; i < H; ++i) c.head_in[i] = h_out[i];
    for (int i = 0; i < E; ++i) c.head_in[H + i] = extra[i];

    c.head_act.assign(static_cast<std::size_t>(HH), 0.0);
    for (int i = 0; i < HH; ++i) c.head_act[i] = W[off_[Off::c1] + i];
    matvec_add(W + off_[Off::v1], HH, H + E, c.head_in.data(), c.head_act.data());
    for (int i = 0; i < HH; ++i) c.head_act[i] = c.head_act[i] > 0.0 ? c.head_act[i] : 0.0;

    c.y.assign(static_cast<std::size_t>(O), 0.0);
    for (int i = 0; i < O; ++i) c.y[i] = W[off_[Off::c2] + i];
    matvec_add(W + off_[Off::v2], O, HH, c.head_act.data(), c.y.data());
    if (spec_.out_act == OutAct::tanh_out)
        for (int i = 0; i < O; ++i) c.y[i] = std::tanh(c.y[i]);
    for (int i = 0; i < O; ++i) y[i] = c.y[i];
}

void GruNet::step_backward(const StepCache& c, const double* dy, const double* dh_in,
                           double* dh_prev, double* d_extra, double* dx,
                           std::vector<double>& gw) const {
    const int I = spec_.in, H = spec_.hidden, E = spec_.extra;
    const int HH = spec_.head_hidden, O = spec_.out;
    const double* W = w_.data();
    gw.resize(w_.size(), 0.0);

    std::vector<double> dh(static_cast<std::size_t>(H), 0.0);
    if (dh_in)
        for (int i = 0; i < H; ++i) dh[i] = dh_in[i];

    if (dy) {
        std::vector<double> dy_pre(static_cast<std::size_t>(O));
        for (int i = 0; i < O; ++i) {
            double g = dy[i];
            if (spec_.out_act == OutAct::tanh_out) g *= 1.0 - c.y[i] * c.y[i];
            dy_pre[i] = g;
        }
        outer_add(gw.data() + off_[Off::v2], O, HH, dy_pre.data(), c.head_act.data());
        for (int i = 0; i < O; ++i) gw[off_[Off::c2] + i] += dy_pre[i];

        std::vector<double> d_hact(static_cast<std::size_t>(HH), 0.0);
        matvec_t_add(W + off_[Off::v2], O, HH, dy_pre.data(), d_hact.data());
        for (int i = 0; i < HH; ++i)
            if (c.head_act[i] <= 0.0) d_hact[i] = 0.0;

        outer_add(gw.data() + off_[Off::v1], HH, H + E, d_hact.data(), c.head_in.data());
        for (int i = 0; i < HH; ++i) gw[off_[Off::c1] + i] += d_hact[i];

        std::vector<double> d_headin(static_cast<std::size_t>(H + E), 0.0);
        matvec_t_add(W + off_[Off::v1], HH, H + E, d_hact.data(), d_headin.data());
        for (int i = 0; i < H; ++i) dh[i] += d_headin[i];
        if (d_extra)
            for (int i = 0; i < E; ++i) d_extra[i] = d_headin[H + i];
    } else if (d_extra) {
        for (int i = 0; i < E; ++i) d_extra[i] = 0.0;
    }

    std::vector<double> dz_pre(static_cast<std::size_t>(H)), dn_pre(static_cast<std::size_t>(H)),
        dr_pre(static_cast<std::size_t>(H)), ds(static_cast<std::size_t>(H));
    for (int i = 0; i < H; ++i) {
        double dz = dh[i] * (c.h_prev[i] - c.n[i]);
        dz_pre[i] = dz * c.z[i] * (1.0 - c.z[i]);
        double dn = dh[i] * (1.0 - c.z[i]);
        dn_pre[i] = dn * (1.0 - c.n[i] * c.n[i]);
        double dr = dn_pre[i] * c.s[i];
        dr_pre[i] = dr * c.r[i] * (1.0 - c.r[i]);
        ds[i] = dn_pre[i] * c.r[i];
    }

    for (int i = 0; i < H; ++i) dh_prev[i] = dh[i] * c.z[i];
    matvec_t_add(W + off_[Off::uz], H, H, dz_pre.data(), dh_prev);
    matvec_t_add(W + off_[Off::ur], H, H, dr_pre.data(), dh_prev);
    matvec_t_add(W + off_[Off::un], H, H, ds.data(), dh_prev);

    if (dx) {
        for (int i = 0; i < I; ++i) dx[i] = 0.0;
        matvec_t_add(W + off_[Off::wz], H, I, dz_pre.data(), dx);
        matvec_t_add(W + off_[Off::wr], H, I, dr_pre.data(), dx);
        matvec_t_add(W + off_[Off::wn], H, I, dn_pre.data(), dx);
    }

    outer_add(gw.data() + off_[Off::wz], H, I, dz_pre.data(), c.x.data());
    outer_add(gw.data() + off_[Off::uz], H, H, dz_pre.data(), c.h_prev.data());
    outer_add(gw.data() + off_[Off::wr], H, I, dr_pre.data(), c.x.data());
    outer_add(gw.data() + off_[Off::ur], H, H, dr_pre.data(), c.h_prev.data());
    outer_add(gw.data() + off_[Off::wn], H, I, dn_pre.data(), c.x.data());
    outer_add(gw.data() + off_[Off::un], H, H, ds.data(), c.h_prev.data());
    for (int i = 0; i < H; ++i) {
        gw[off_[Off::biz] + i] += dz_pre[i];
        gw[off_[Off::bhz] + i] += dz_pre[i];
        gw[off_[Off::bir] + i] += dr_pre[i];
        gw[off_[Off::bhr] + i] += dr_pre[i];
        gw[off_[Off::bin] + i] += dn_pre[i];
        gw[off_[Off::bhn] + i] += ds[i];
    }
}

GruStepNet::GruStepNet(GruNet net) : net_(std::move(net)) {}

int GruStepNet::in() const { return net_.spec().in + net_.spec().extra; }
int GruStepNet::out() const { return net_.spec().out; }

void GruStepNet::forward(const double* x, double* y) const {
    const int H = net_.spec().hidden;
    std::vector<double> h0(static_cast<std::size_t>(H), 0.0), h1(static_cast<std::size_t>(H));
    net_.step(x, x + net_.spec().in, h0.data(), h1.data(), y);
}

void GruStepNet::train_forward(const std::vector<double>& x_rows, int batch,
                               std::vector<double>& y_rows) {
    const int n_in = in(), n_out = out(), H = net_.spec().hidden;
    if (x_rows.size() != static_cast<std::size_t>(batch) * n_in)
        throw std::invalid_argument("GruStepNet::train_forward: input shape mismatch");
    caches_.assign(static_cast<std::size_t>(batch), {});
    cached_batch_ = batch;
    y_rows.assign(static_cast<std::size_t>(batch) * n_out, 0.0);
    std::vector<double> h0(static_cast<std::size_t>(H), 0.0), h1(static_cast<std::size_t>(H));
    for (int r = 0; r < batch; ++r) {
        const double* x = x_rows.data() + static_cast<std::size_t>(r) * n_in;
        net_.step_cached(x, x + net_.spec().in, h0.data(), h1.data(),
                         y_rows.data() + static_cast<std::size_t>(r) * n_out,
                         caches_[static_cast<std::size_t>(r)]);
    }
}

void GruStepNet::train_backward(const std::vector<double>& dy_rows, std::vector<double>& gw,
                                std::vector<double>* dx_rows) {
    if (cached_batch_ == 0)
        throw std::logic_error("GruStepNet::train_backward before train_forward");
    const int n_in = in(), n_out = out(), H = net_.spec().hidden, I = net_.spec().in;
    gw.resize(net_.w().size(), 0.0);
    if (dx_rows) dx_rows->assign(static_cast<std::size_t>(cached_batch_) * n_in, 0.0);
    std::vector<double> dh_prev(static_cast<std::size_t>(H));
    for (int r = 0; r < cached_batch_; ++r) {
        double* dx = dx_rows ? dx_rows->data() + static_cast<std::size_t>(r) * n_in : nullptr;
        double* d_extra = dx ? dx + I : nullptr;
        net_.step_backward(caches_[static_cast<std::size_t>(r)],
                           dy_rows.data() + static_cast<std::size_t>(r) * n_out, nullptr,
                           dh_prev.data(), d_extra, dx, gw);
    }
}

void Adam::step(std::vector<double>& w, const std::vector<double>& g) {
    if (w.size() != g.size()) throw std::invalid_argument("Adam::step: shape mismatch");
    if (m.empty()) {
        m.assign(w.size(), 0.0);
        v.assign(w.size(), 0.0);
    }
    if (m.size() != w.size()) throw std::invalid_argument("Adam::step: stale state");
    ++t;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        w[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

void soft_update(std::vector<double>& target, const std::vector<double>& main, double tau) {
    if (target.size() != main.size()) throw std::invalid_argument("soft_update: shape mismatch");
    for (std::size_t i = 0; i < target.size(); ++i)
        target[i] += tau * (main[i] - target[i]);
}

bool has_nan(const std::vector<double>& v) {
    for (double x : v)
        if (std::isnan(x) || std::isinf(x)) return true;
    return false;
}

} // namespace crnoma
