// Release gate: nine end-to-end checks with pinned tolerances. Each check
// prints exactly one line ("criterion N (<name>): PASS/FAIL — details") and
// the process exit code is the number of failed checks.
//
// Usage: crnoma_acceptance [1..9|all]
//
// Every expected value comes from an oracle coded in this file by direct
// substitution (or from an exhaustive grid / Monte Carlo estimate), never
// from the library code under test.

#include "crnoma/agents.hpp"
#include "crnoma/battery.hpp"
#include "crnoma/config.hpp"
#include "crnoma/env.hpp"
#include "crnoma/metrics.hpp"
#include "crnoma/nn.hpp"
#include "crnoma/phy.hpp"
#include "crnoma/rng.hpp"
#include "crnoma/runner.hpp"
#include "crnoma/uncertainty.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace crnoma;

namespace {

struct Outcome {
    bool pass = false;
    std::string note;
};

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string strf(const char* fmt, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

// Relative gap; 0 when both values are 0.
double rel_gap(double a, double b) {
    const double d = std::abs(a - b);
    if (d == 0.0) return 0.0;
    return d / std::max(std::abs(a), std::abs(b));
}

// Relative gap with the denominator floored at 1 so near-zero quantities are
// compared absolutely.
double rel_gap1(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------------------
// random instance generators shared by the formula-level checks

double log_uniform(Rng& rng, double e_lo, double e_hi) {
    return std::pow(10.0, rng.uniform(e_lo, e_hi));
}

LinkGains random_gains(Rng& rng) {
    LinkGains g;
    g.pap_pue = log_uniform(rng, -12.0, -3.0);
    g.pap_sap = log_uniform(rng, -12.0, -3.0);
    g.pap_eve = log_uniform(rng, -12.0, -3.0);
    g.sap_pue = log_uniform(rng, -12.0, -3.0);
    g.sap_sue = log_uniform(rng, -12.0, -3.0);
    g.sap_eve = log_uniform(rng, -12.0, -3.0);
    return g;
}

PowerAllocation random_alloc(Rng& rng, int salt) {
    PowerAllocation a;
    a.p_pp = rng.uniform(0.0, 3.0);
    a.p_sp = rng.uniform(0.0, 1.5);
    a.p_ss = rng.uniform(0.0, 1.5);
    a.beta = rng.uniform(0.001, 0.999);
    // sprinkle exact zeros and a centered split to hit boundary branches
    if (salt % 9 == 0) a.p_pp = 0.0;
    if (salt % 11 == 0) a.p_ss = 0.0;
    if (salt % 13 == 0) a.p_sp = 0.0;
    if (salt % 17 == 0) a.beta = 0.5;
    return a;
}

NoiseConfig random_noise(Rng& rng) {
    NoiseConfig n;
    n.pp = log_uniform(rng, -16.0, -13.0);
    n.ps = log_uniform(rng, -16.0, -13.0);
    n.pe = log_uniform(rng, -16.0, -13.0);
    n.sp = log_uniform(rng, -16.0, -13.0);
    n.ss = log_uniform(rng, -16.0, -13.0);
    n.se = log_uniform(rng, -16.0, -13.0);
    return n;
}

PhyConstants random_phy(Rng& rng, int salt) {
    PhyConstants c;
    c.slot_s = (salt % 2 == 0) ? 1e-3 : rng.uniform(0.05, 1.5);
    c.eta2_sap = rng.uniform(0.1, 1.0);
    c.amp_eff = rng.uniform(0.5, 1.0);
    c.circuit_energy_j = rng.uniform(0.0, 0.2);
    return c;
}

// ---------------------------------------------------------------------------
// criterion 1: per-slot rates, secrecy, harvest and energy against an
// evaluator written by direct substitution into the per-link expressions
// (no shared helpers with the library).

struct RefSlot {
    double e_s = 0.0;
    double r_pap_sap = 0.0, r_mrc_pue = 0.0, r_sap_sue = 0.0;
    double r_mrc_eve = 0.0, r_sap2_eve = 0.0;
    double pue = 0.0, secrecy = 0.0, energy = 0.0;
};

RefSlot reference_slot(const LinkGains& h, const PowerAllocation& q, const NoiseConfig& s2,
                       const PhyConstants& k) {
    const double dp = (1.0 - q.beta) / 2.0;
    // relay decode order: the stronger of the two SAP links is decoded free
    // of in-cell interference, the weaker sees the other stream as noise
    const bool pue_stronger = h.sap_pue >= h.sap_sue;
    const double g_pp = q.p_pp * h.pap_pue / s2.pp;
    const double g_pe = q.p_pp * h.pap_eve / s2.pe;
    const double g_s1e = q.p_sp * h.sap_eve / s2.se;
    const double g_s2e = q.p_ss * h.sap_eve / s2.ss;
    double g_sp, g_ssue;
    if (pue_stronger) {
        g_sp = q.p_sp * h.sap_pue / s2.sp;
        g_ssue = q.p_ss * h.sap_sue / (q.p_sp * h.sap_sue + s2.ss);
    } else {
        g_sp = q.p_sp * h.sap_pue / (q.p_ss * h.sap_pue + s2.sp);
        g_ssue = q.p_ss * h.sap_sue / s2.ss;
    }
    RefSlot o;
    o.e_s = k.slot_s * q.beta * k.eta2_sap * q.p_pp * h.pap_sap;
    o.r_pap_sap = dp * std::log2(1.0 + q.p_pp * h.pap_sap / s2.ps);
    o.r_mrc_pue = dp * std::log2(1.0 + g_pp + g_sp);
    o.r_sap_sue = dp * std::log2(1.0 + g_ssue);
    o.r_mrc_eve = dp * std::log2(1.0 + g_pe + g_s1e);
    o.r_sap2_eve = dp * std::log2(1.0 + g_s2e);
    o.pue = std::min(o.r_pap_sap, o.r_mrc_pue);
    const double primary = o.pue - o.r_mrc_eve;
    const double secondary = o.r_sap_sue - o.r_sap2_eve;
    o.secrecy = std::max(0.0, primary) + std::max(0.0, secondary);
    o.energy = k.slot_s * k.amp_eff * ((q.beta + dp) * q.p_pp + dp * (q.p_sp + q.p_ss)) -
               k.amp_eff * o.e_s + k.circuit_energy_j;
    return o;
}

Outcome criterion1() {
    Stopwatch sw;
    Rng rng(0xF1DE1);
    const double tol = 1e-9;
    double worst = 0.0;
    long checks = 0;
    auto check = [&](double got, double want) {
        worst = std::max(worst, rel_gap(got, want));
        ++checks;
    };
    for (int i = 0; i < 1000; ++i) {
        LinkGains g = random_gains(rng);
        if (i % 13 == 0) g.sap_pue = g.sap_sue; // decode-order tie
        PowerAllocation a = random_alloc(rng, i);
        NoiseConfig n = random_noise(rng);
        PhyConstants c = random_phy(rng, i);
        RefSlot ref = reference_slot(g, a, n, c);
        RateBundle b = link_rates(g, a, n);
        const double e_s = harvested_energy_sap(a.p_pp, a.beta, g.pap_sap, c);
        check(b.r_pap_sap, ref.r_pap_sap);
        check(b.r_mrc_pue, ref.r_mrc_pue);
        check(b.r_sap_sue, ref.r_sap_sue);
        check(b.r_mrc_eve, ref.r_mrc_eve);
        check(b.r_sap2_eve, ref.r_sap2_eve);
        check(pue_rate(b), ref.pue);
        check(secrecy_rate(b), ref.secrecy);
        check(e_s, ref.e_s);
        check(energy_consumption(a, e_s, c), ref.energy);
    }
    const double el = sw.s();
    const bool pass = worst <= tol && el < 5.0;
    return {pass, strf("1000 instances, %ld comparisons, max relative gap %.2e (tol %.0e), %.2f s",
                       checks, worst, tol, el)};
}

// ---------------------------------------------------------------------------
// criterion 2: the two interference-coupled worst-case rate terms, closed
// corner substitution against a 33-points-per-dimension grid minimum.

Outcome criterion2() {
    Stopwatch sw;
    Rng rng(0xACC2);
    const double tol = 1e-6;
    const int grid_n = 33;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        LinkGains est = random_gains(rng);
        LinkGains delta;
        auto radius = [&](double g) {
            // every tenth instance overshoots so the box clips at zero gain
            const double f = (i % 10 == 0) ? rng.uniform(1.0, 1.8) : rng.uniform(0.0, 0.9);
            return f * g;
        };
        delta.pap_pue = radius(est.pap_pue);
        delta.pap_sap = radius(est.pap_sap);
        delta.pap_eve = radius(est.pap_eve);
        delta.sap_pue = radius(est.sap_pue);
        delta.sap_sue = radius(est.sap_sue);
        delta.sap_eve = radius(est.sap_eve);
        PowerAllocation a = random_alloc(rng, i);
        NoiseConfig n = random_noise(rng);
        for (WcExpr e : {WcExpr::sue_scn1, WcExpr::mrc_scn2}) {
            const double closed = worst_case_component(e, est, delta, a, n);
            const double grid = grid_min_oracle(e, est, delta, a, n, grid_n);
            worst = std::max(worst, rel_gap(closed, grid));
        }
    }
    const double el = sw.s();
    const bool pass = worst <= tol && el < 30.0;
    return {pass, strf("200 instances x 2 expressions, %d-point grid, max relative gap %.2e (tol %.0e), %.2f s",
                       grid_n, worst, tol, el)};
}

// ---------------------------------------------------------------------------
// criterion 3: for each error family, points that satisfy the margined
// energy-budget check must violate the true budget with probability at most
// the configured threshold. The error samplers below are coded from the
// inverse CDFs and share nothing with the library.

double sample_unit_error_ref(ErrorClass cls, std::mt19937_64& eng) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    switch (cls) {
    case ErrorClass::bounded:
        return -1.0 + 2.0 * u;
    case ErrorClass::unimodal: // triangle on [-1,1] peaked at -1
        return 1.0 - 2.0 * std::sqrt(1.0 - u);
    case ErrorClass::symmetric_unimodal: // symmetric triangle on [-1,1]
        return u < 0.5 ? -1.0 + std::sqrt(2.0 * u) : 1.0 - std::sqrt(2.0 * (1.0 - u));
    }
    return 0.0;
}

Outcome criterion3() {
    Stopwatch sw;
    const int n_mc = 100000;
    const std::array<double, 3> xis{0.01, 0.05, 0.1};
    const std::array<ErrorClass, 3> classes{ErrorClass::bounded, ErrorClass::unimodal,
                                            ErrorClass::symmetric_unimodal};
    const std::array<const char*, 3> cname{"bounded", "unimodal", "sym-unimodal"};
    bool ok = true;
    std::string bad;
    double worst_ratio = 0.0;      // max empirical violation / allowed bound
    double min_boundary = 1.0;     // sampler liveliness at the unmargined boundary
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        const ErrorClass cls = classes[ci];
        const BernsteinParams p = table1_params(cls);
        std::mt19937_64 eng(0xC3ULL * 1000003ULL + ci);
        // sanity: with no margin at all, sitting exactly on the estimated
        // budget must be violated whenever the error is negative
        long neg = 0;
        for (int i = 0; i < n_mc; ++i)
            if (sample_unit_error_ref(cls, eng) < 0.0) ++neg;
        const double boundary = static_cast<double>(neg) / n_mc;
        min_boundary = std::min(min_boundary, boundary);
        if (boundary < 0.4) {
            ok = false;
            bad += strf(" [%s sampler boundary rate %.3f < 0.4]", cname[ci], boundary);
        }
        for (double xi : xis) {
            Rng scene_rng(substream_seed(0xACC3, ci, static_cast<std::uint64_t>(xi * 1000)));
            for (int s = 0; s < 20; ++s) {
                const double eps = scene_rng.uniform(0.1, 2.0);
                const double margin = bernstein_margin(eps, xi, p);
                // scene 0 sits exactly on the margined boundary (the worst
                // admissible point); the rest keep extra slack
                const double slack = (s == 0) ? 0.0 : scene_rng.uniform(0.0, 0.3) * eps;
                const double b_est = margin + scene_rng.uniform(0.5, 8.0);
                const double spend = b_est - margin - slack; // passes the margined check
                long viol = 0;
                for (int i = 0; i < n_mc; ++i) {
                    const double b_true = b_est + sample_unit_error_ref(cls, eng) * eps;
                    if (b_true < spend) ++viol;
                }
                const double vhat = static_cast<double>(viol) / n_mc;
                const double bound = xi + 3.0 * std::sqrt(xi * (1.0 - xi) / n_mc);
                worst_ratio = std::max(worst_ratio, vhat / bound);
                if (vhat > bound) {
                    ok = false;
                    bad += strf(" [%s xi=%.2f scene %d: violation %.4f > %.4f]", cname[ci], xi,
                                s, vhat, bound);
                }
            }
        }
    }
    const double el = sw.s();
    ok = ok && el < 60.0;
    return {ok, strf("max violation/bound ratio %.3f, min boundary violation rate %.2f, "
                     "%d samples per scene, %.1f s%s",
                     worst_ratio, min_boundary, n_mc, el, bad.c_str())};
}

// ---------------------------------------------------------------------------
// criterion 4: with zero uncertainty every objective evaluator must produce
// the same numbers.

Outcome criterion4() {
    Rng rng(0xC0114);
    const double tol = 1e-12;
    const std::array<ErrorClass, 3> classes{ErrorClass::bounded, ErrorClass::unimodal,
                                            ErrorClass::symmetric_unimodal};
    const std::array<double, 3> xiv{0.01, 0.05, 0.1};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        LinkGains est = random_gains(rng);
        if (i % 7 == 0) est.sap_pue = est.sap_sue;
        PowerAllocation a = random_alloc(rng, i);
        NoiseConfig n = random_noise(rng);
        PhyConstants c = random_phy(rng, i);
        const Scenario s = select_scenario(est.sap_pue, est.sap_sue);
        const ErrorClass cls = classes[i % 3];
        XiThresholds xi;
        xi.obj_nom = xi.obj_den = xi.c1 = xi.c2 = xi.c3 = xi.c4 = xi.c5 = xiv[(i / 3) % 3];
        const LinkGains zero{};
        const ObjectiveEval e0 = exact_objective(est, s, a, n, c);
        const ObjectiveEval w0 = worst_case_objective(est, zero, s, a, n, c);
        Rng mc(substream_seed(0xC4BEEF, static_cast<std::uint64_t>(i)));
        const ObjectiveEval st = stochastic_objective(est, zero, xi, cls, s, a, n, c, mc, 64);
        const ObjectiveEval b0 =
            bernstein_objective(est, zero, xi, cls, (i % 2 == 0), s, a, n, c);
        const ObjectiveEval* evs[] = {&e0, &w0, &st, &b0};
        for (int u = 0; u < 4; ++u) {
            for (int v = u + 1; v < 4; ++v) {
                worst = std::max(worst, rel_gap1(evs[u]->secrecy, evs[v]->secrecy));
                worst = std::max(worst, rel_gap1(evs[u]->energy, evs[v]->energy));
                worst = std::max(worst, rel_gap1(evs[u]->value, evs[v]->value));
                worst = std::max(worst, rel_gap1(evs[u]->pue_min_rate, evs[v]->pue_min_rate));
            }
        }
    }
    const bool pass = worst <= tol;
    return {pass, strf("100 instances x 4 evaluators x 4 fields, max relative gap %.2e (tol %.0e)",
                       worst, tol)};
}

// ---------------------------------------------------------------------------
// criterion 5: analytic gradients of every trainable network against central
// finite differences, parameters and inputs alike.

struct FdTally {
    double worst = 0.0;
    long checked = 0;
    long skipped = 0; // rectifier kink inside the difference stencil
    long failed = 0;
    std::string first_fail;
};

// Central-difference cross-check with a kink filter: disagreements are only
// accepted as non-smooth points when the two step sizes also disagree with
// each other; a stable-but-wrong difference stays a failure.
void fd_probe(const std::function<double(double)>& fd_at, double ad, double tol, FdTally& t,
              const std::string& tag, long idx) {
    ++t.checked;
    const double fd1 = fd_at(1e-6);
    const double r1 = rel_gap1(ad, fd1);
    if (r1 <= tol) {
        t.worst = std::max(t.worst, r1);
        return;
    }
    const double fd2 = fd_at(1e-4);
    const double r2 = rel_gap1(ad, fd2);
    if (r2 <= tol) {
        t.worst = std::max(t.worst, r2);
        return;
    }
    if (rel_gap1(fd1, fd2) > 1e-3) {
        ++t.skipped;
        return;
    }
    ++t.failed;
    if (t.first_fail.empty())
        t.first_fail = strf("%s[%ld] analytic %.6e vs fd %.6e", tag.c_str(), idx, ad, fd2);
}

void check_net_gradients(Net& net, int batch, Rng& drng, double tol, FdTally& t,
                         const std::string& tag) {
    std::vector<double> x(static_cast<std::size_t>(batch) * net.in());
    for (double& v : x) v = drng.uniform(-1.0, 1.0);
    std::vector<double> coef(static_cast<std::size_t>(batch) * net.out());
    for (double& v : coef) v = drng.uniform(-1.0, 1.0);

    std::vector<double> y;
    net.train_forward(x, batch, y);
    std::vector<double> gw(net.w().size(), 0.0);
    std::vector<double> dx;
    net.train_backward(coef, gw, &dx);

    auto loss_of = [&](const std::vector<double>& xin) {
        std::vector<double> yy;
        net.train_forward(xin, batch, yy);
        double L = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) L += coef[i] * yy[i];
        return L;
    };

    std::vector<double>& w = net.w();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double keep = w[i];
        auto fd_at = [&](double h) {
            w[i] = keep + h;
            const double lp = loss_of(x);
            w[i] = keep - h;
            const double lm = loss_of(x);
            w[i] = keep;
            return (lp - lm) / (2.0 * h);
        };
        fd_probe(fd_at, gw[i], tol, t, tag + "/w", static_cast<long>(i));
    }
    std::vector<double> xm = x;
    for (std::size_t i = 0; i < xm.size(); ++i) {
        const double keep = xm[i];
        auto fd_at = [&](double h) {
            xm[i] = keep + h;
            const double lp = loss_of(xm);
            xm[i] = keep - h;
            const double lm = loss_of(xm);
            xm[i] = keep;
            return (lp - lm) / (2.0 * h);
        };
        fd_probe(fd_at, dx[i], tol, t, tag + "/x", static_cast<long>(i));
    }
}

// Three-step unrolled recurrent pass: gradients accumulated through the
// hidden-state chain against finite differences of the whole-sequence loss.
void check_gru_unrolled(double tol, FdTally& t) {
    const GruNet::Spec spec{10, 64, 4, 64, 1, OutAct::identity};
    Rng wrng(0xF00D);
    GruNet net(spec, wrng);
    const int T = 3, H = spec.hidden, IN = spec.in, EX = spec.extra, OD = spec.out;
    Rng drng(0xDA7A);
    std::vector<std::vector<double>> xs(T, std::vector<double>(IN));
    std::vector<std::vector<double>> exs(T, std::vector<double>(EX));
    for (auto& row : xs)
        for (double& v : row) v = drng.uniform(-1.0, 1.0);
    for (auto& row : exs)
        for (double& v : row) v = drng.uniform(-1.0, 1.0);
    std::vector<double> coef(static_cast<std::size_t>(T) * OD);
    for (double& v : coef) v = drng.uniform(-1.0, 1.0);

    auto seq_loss = [&]() {
        std::vector<double> h(H, 0.0), h2(H), y(OD);
        double L = 0.0;
        for (int s = 0; s < T; ++s) {
            net.step(xs[s].data(), exs[s].data(), h.data(), h2.data(), y.data());
            h.swap(h2);
            for (int j = 0; j < OD; ++j) L += coef[static_cast<std::size_t>(s) * OD + j] * y[j];
        }
        return L;
    };

    std::vector<GruNet::StepCache> caches(T);
    {
        std::vector<double> h(H, 0.0), h2(H), y(OD);
        for (int s = 0; s < T; ++s) {
            net.step_cached(xs[s].data(), exs[s].data(), h.data(), h2.data(), y.data(),
                            caches[s]);
            h.swap(h2);
        }
    }
    std::vector<double> gw(net.w().size(), 0.0);
    std::vector<std::vector<double>> dxs(T, std::vector<double>(IN));
    std::vector<std::vector<double>> dexs(T, std::vector<double>(EX));
    std::vector<double> dh_next;
    std::vector<double> dh_prev(H);
    for (int s = T - 1; s >= 0; --s) {
        net.step_backward(caches[s], coef.data() + static_cast<std::size_t>(s) * OD,
                          dh_next.empty() ? nullptr : dh_next.data(), dh_prev.data(),
                          dexs[s].data(), dxs[s].data(), gw);
        dh_next = dh_prev;
    }

    std::vector<double>& w = net.w();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double keep = w[i];
        auto fd_at = [&](double h) {
            w[i] = keep + h;
            const double lp = seq_loss();
            w[i] = keep - h;
            const double lm = seq_loss();
            w[i] = keep;
            return (lp - lm) / (2.0 * h);
        };
        fd_probe(fd_at, gw[i], tol, t, "unroll/w", static_cast<long>(i));
    }
    for (int s = 0; s < T; ++s) {
        for (int i = 0; i < IN; ++i) {
            const double keep = xs[s][i];
            auto fd_at = [&](double h) {
                xs[s][i] = keep + h;
                const double lp = seq_loss();
                xs[s][i] = keep - h;
                const double lm = seq_loss();
                xs[s][i] = keep;
                return (lp - lm) / (2.0 * h);
            };
            fd_probe(fd_at, dxs[s][i], tol, t, "unroll/x", s * IN + i);
        }
        for (int i = 0; i < EX; ++i) {
            const double keep = exs[s][i];
            auto fd_at = [&](double h) {
                exs[s][i] = keep + h;
                const double lp = seq_loss();
                exs[s][i] = keep - h;
                const double lm = seq_loss();
                exs[s][i] = keep;
                return (lp - lm) / (2.0 * h);
            };
            fd_probe(fd_at, dexs[s][i], tol, t, "unroll/extra", s * EX + i);
        }
    }
}

Outcome criterion5() {
    Stopwatch sw;
    const double tol = 1e-4;
    FdTally t;
    Rng wrng(0x5EED5);
    Rng drng(0xDA7A5);
    {
        Mlp actor(MlpSpec{6, {64, 64, 64}, 4, OutAct::tanh_out}, wrng);
        check_net_gradients(actor, 3, drng, tol, t, "mlp-actor");
    }
    {
        Mlp critic(MlpSpec{10, {64, 64, 64}, 1, OutAct::identity}, wrng);
        check_net_gradients(critic, 3, drng, tol, t, "mlp-critic");
    }
    {
        GruStepNet actor(GruNet(GruNet::Spec{10, 64, 0, 64, 4, OutAct::tanh_out}, wrng));
        check_net_gradients(actor, 3, drng, tol, t, "gru-actor");
    }
    {
        GruStepNet critic(GruNet(GruNet::Spec{10, 64, 4, 64, 1, OutAct::identity}, wrng));
        check_net_gradients(critic, 3, drng, tol, t, "gru-critic");
    }
    check_gru_unrolled(tol, t);
    const double el = sw.s();
    // a handful of probes may land on a rectifier kink; a systematic error
    // would show up as outright failures or a large skip share
    const bool skips_ok = t.skipped * 100 <= t.checked; // at most 1%
    const bool pass = t.failed == 0 && skips_ok && el < 60.0;
    std::string note = strf("%ld probes, max relative gap %.2e (tol %.0e), %ld kink skips, "
                            "%ld failures, %.1f s",
                            t.checked, t.worst, tol, t.skipped, t.failed, el);
    if (!t.first_fail.empty()) note += " first: " + t.first_fail;
    return {pass, note};
}

// ---------------------------------------------------------------------------
// criterion 6: degenerate-setting reductions. With the local-critic weight
// zeroed, the shared-reward learner must track the per-agent-critic learner
// exactly; with the truncation window at one step, the recurrent learner
// must track the feed-forward update on its own cell treated as a flat net.

std::vector<JointTransition> make_batch(int n, Rng& rng) {
    std::vector<JointTransition> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        JointTransition& tr = out[static_cast<std::size_t>(t)];
        for (double& v : tr.o_pap) v = rng.uniform(0.0, 2.0);
        for (double& v : tr.o_sap) v = rng.uniform(0.0, 2.0);
        for (double& v : tr.a_pap) v = rng.uniform(-1.0, 1.0);
        for (double& v : tr.a_sap) v = rng.uniform(-1.0, 1.0);
        tr.r_g = rng.uniform(-1.0, 1.0);
        tr.r_pap = rng.uniform(-1.0, 0.0);
        tr.r_sap = rng.uniform(-1.0, 1.0);
        for (double& v : tr.n_pap) v = rng.uniform(0.0, 2.0);
        for (double& v : tr.n_sap) v = rng.uniform(0.0, 2.0);
        tr.done = (t == n - 1);
    }
    return out;
}

std::vector<const JointTransition*> ptrs(const std::vector<JointTransition>& v) {
    std::vector<const JointTransition*> out;
    out.reserve(v.size());
    for (const JointTransition& tr : v) out.push_back(&tr);
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// One flat transition row per step: actor input is the observation plus the
// previous joint action (zeros at the episode start), mirroring how the
// recurrent learner feeds its cell at window length one.
void append_flat(DdpgCore::Flat& f, const JointEpisode& ep) {
    for (std::size_t t = 0; t < ep.size(); ++t) {
        const JointTransition& tr = ep[t];
        f.obs.insert(f.obs.end(), tr.o_pap.begin(), tr.o_pap.end());
        f.obs.insert(f.obs.end(), tr.o_sap.begin(), tr.o_sap.end());
        if (t == 0) {
            f.obs.insert(f.obs.end(), 4, 0.0);
        } else {
            const JointTransition& pv = ep[t - 1];
            f.obs.insert(f.obs.end(), pv.a_pap.begin(), pv.a_pap.end());
            f.obs.insert(f.obs.end(), pv.a_sap.begin(), pv.a_sap.end());
        }
        f.act.insert(f.act.end(), tr.a_pap.begin(), tr.a_pap.end());
        f.act.insert(f.act.end(), tr.a_sap.begin(), tr.a_sap.end());
        f.next.insert(f.next.end(), tr.n_pap.begin(), tr.n_pap.end());
        f.next.insert(f.next.end(), tr.n_sap.begin(), tr.n_sap.end());
        f.next.insert(f.next.end(), tr.a_pap.begin(), tr.a_pap.end());
        f.next.insert(f.next.end(), tr.a_sap.begin(), tr.a_sap.end());
        f.r.push_back(tr.r_g);
        f.done.push_back(tr.done ? 1 : 0);
        ++f.n;
    }
}

Outcome criterion6() {
    const double tol = 1e-10;
    AgentConfig cfg;
    cfg.hidden_width = 8;
    cfg.hidden_layers = 2;
    cfg.batch_size = 8;
    cfg.actor_lr = 1e-3;
    cfg.critic_lr = 1e-3;
    cfg.tau = 0.01;
    cfg.gamma = 0.95;
    const std::array<double, 6> unit{1, 1, 1, 1, 1, 1};

    double worst_a = 0.0;
    {
        AgentConfig c2 = cfg;
        c2.local_weight = 0.0;
        MaddpgAgent maddpg(c2, unit, 77);
        MasrddpgAgent masr(c2, unit, 77);
        for (int i = 0; i < 2; ++i) {
            maddpg.critic(i).w() = masr.global_critic().w();
            maddpg.critic_target(i).w() = masr.global_critic_target().w();
        }
        Rng brng(17);
        std::vector<JointTransition> batch = make_batch(12, brng);
        std::vector<const JointTransition*> view = ptrs(batch);
        for (int round = 0; round < 3; ++round) {
            maddpg.update_from_batch(view);
            masr.update_from_batch(view, false);
        }
        for (int i = 0; i < 2; ++i) {
            worst_a = std::max(worst_a, max_abs_diff(maddpg.actor(i).w(), masr.actor(i).w()));
            worst_a = std::max(worst_a,
                               max_abs_diff(maddpg.actor_target(i).w(), masr.actor_target(i).w()));
            worst_a = std::max(worst_a,
                               max_abs_diff(maddpg.critic(i).w(), masr.global_critic().w()));
        }
        worst_a = std::max(worst_a, max_abs_diff(maddpg.critic_target(0).w(),
                                                 masr.global_critic_target().w()));
    }

    double worst_b = 0.0;
    {
        AgentConfig c3 = cfg;
        c3.unroll_length = 1;
        RdpgAgent rdpg(c3, unit, 83);
        DdpgCore core(std::make_unique<GruStepNet>(rdpg.actor_net()),
                      std::make_unique<GruStepNet>(rdpg.critic_net()), c3);
        Rng erng(19);
        JointEpisode ep1 = make_batch(4, erng);
        JointEpisode ep2 = make_batch(3, erng);
        std::vector<const JointEpisode*> eview{&ep1, &ep2};
        DdpgCore::Flat f;
        f.obs_dim = 10;
        f.act_dim = 4;
        append_flat(f, ep1);
        append_flat(f, ep2);
        for (int round = 0; round < 3; ++round) {
            rdpg.update_from_episodes(eview);
            core.update(f);
        }
        worst_b = std::max(worst_b, max_abs_diff(rdpg.actor_net().w(), core.actor().w()));
        worst_b = std::max(worst_b, max_abs_diff(rdpg.critic_net().w(), core.critic().w()));
        worst_b =
            std::max(worst_b, max_abs_diff(rdpg.actor_target_net().w(), core.actor_target().w()));
        worst_b = std::max(worst_b,
                           max_abs_diff(rdpg.critic_target_net().w(), core.critic_target().w()));
    }

    const bool pass = worst_a <= tol && worst_b <= tol;
    return {pass, strf("zero-local-weight reduction max |delta| %.2e, one-step-window reduction "
                       "max |delta| %.2e (tol %.0e)",
                       worst_a, worst_b, tol)};
}

// ---------------------------------------------------------------------------
// criterion 7: the trained policy must clearly beat a uniform-random policy
// on the shared return.

Outcome criterion7() {
    Stopwatch sw;
    ExperimentConfig cfg = preset_config("desk");
    cfg.name = "gate-learning";
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.agent = AgentKind::ddpg;
    RunArtifacts trained = run_experiment(cfg);
    ExperimentConfig rnd = cfg;
    rnd.agent = AgentKind::uniform_random;
    RunArtifacts baseline = run_experiment(rnd);
    const SeedStats a = run_stats(trained, MetricField::ret_g);
    const SeedStats b = run_stats(baseline, MetricField::ret_g);
    const double gap = a.mean - b.mean;
    const double need = 2.0 * pooled_se(a, b);
    const double el = sw.s();
    const bool pass = gap > need && el < 1200.0;
    return {pass, strf("trained return %.1f (se %.1f) vs random %.1f (se %.1f), gap %.1f needs "
                       "> %.1f, 5 seeds, %.0f s",
                       a.mean, a.se, b.mean, b.se, gap, need, el)};
}

// ---------------------------------------------------------------------------
// criterion 8: qualitative trends. (a) achieved secrecy must not grow when
// channel uncertainty grows, for every learner; (b) moving the eavesdropper
// farther away must not reduce secrecy; (c) larger battery capacity must not
// reduce either secrecy or delivered energy throughput.

ExperimentConfig trend_base(AgentKind m) {
    ExperimentConfig cfg = preset_config("desk");
    cfg.name = "gate-trend";
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.agent = m;
    return cfg;
}

Outcome criterion8() {
    Stopwatch sw;
    const std::array<AgentKind, 4> methods{AgentKind::ddpg, AgentKind::maddpg,
                                           AgentKind::masrddpg, AgentKind::rdpg};
    bool ok = true;
    std::string note;

    for (AgentKind m : methods) {
        ExperimentConfig cfg = trend_base(m);
        cfg.env.model.variant = Variant::worst_case;
        SweepArtifacts s = sweep_experiment(cfg, "uncertainty", {"0", "0.1", "0.2"});
        std::array<SeedStats, 3> st;
        for (int k = 0; k < 3; ++k) st[k] = run_stats(s.cells[k], MetricField::avg_secrecy);
        int soft = 0;
        bool hard = false;
        for (int k = 0; k + 1 < 3; ++k) {
            const double rise = st[k + 1].mean - st[k].mean;
            if (rise <= 0.0) continue;
            if (rise <= pooled_se(st[k], st[k + 1])) ++soft; // within noise, tolerated once
            else hard = true;
        }
        const bool mok = !hard && soft <= 1;
        ok = ok && mok;
        note += strf("%s unc %.2f/%.2f/%.2f%s; ", to_string(m).c_str(), st[0].mean, st[1].mean,
                     st[2].mean, mok ? "" : " VIOLATED");
    }

    for (AgentKind m : methods) {
        ExperimentConfig cfg = trend_base(m);
        SweepArtifacts s = sweep_experiment(cfg, "eve-position", {"A", "C"});
        const SeedStats sa = run_stats(s.cells[0], MetricField::avg_secrecy);
        const SeedStats sc = run_stats(s.cells[1], MetricField::avg_secrecy);
        const bool mok = sc.mean >= sa.mean;
        ok = ok && mok;
        note += strf("%s eve %.2f->%.2f%s; ", to_string(m).c_str(), sa.mean, sc.mean,
                     mok ? "" : " VIOLATED");
    }

    {
        ExperimentConfig cfg = trend_base(AgentKind::ddpg);
        SweepArtifacts s = sweep_experiment(cfg, "battery-max", {"10", "15", "20"});
        std::array<SeedStats, 3> sec, en;
        for (int k = 0; k < 3; ++k) {
            sec[k] = run_stats(s.cells[k], MetricField::avg_secrecy);
            en[k] = run_stats(s.cells[k], MetricField::energy);
        }
        bool mok = true;
        for (int k = 0; k + 1 < 3; ++k)
            mok = mok && sec[k + 1].mean >= sec[k].mean && en[k + 1].mean >= en[k].mean;
        ok = ok && mok;
        note += strf("ddpg cap secrecy %.2f/%.2f/%.2f energy %.2f/%.2f/%.2f%s; ", sec[0].mean,
                     sec[1].mean, sec[2].mean, en[0].mean, en[1].mean, en[2].mean,
                     mok ? "" : " VIOLATED");
    }

    note += strf("%.0f s", sw.s());
    return {ok, note};
}

// ---------------------------------------------------------------------------
// criterion 9: battery bookkeeping. Final level must equal the initial level
// plus all credits minus all debits, both for the raw recursion (capacity
// clip disabled via enormous caps) and for whole environment episodes
// reconstructed from the step diagnostics.

Outcome criterion9() {
    Stopwatch sw;
    const double tol = 1e-12;
    double worst = 0.0;

    Rng rng(0x9A77E);
    for (int ep = 0; ep < 10000; ++ep) {
        BatteryState st;
        st.cap_pap_j = st.cap_sap_j = 1e18; // the clip can never bind
        st.pap_j = rng.uniform(5.0, 40.0);
        st.sap_j = rng.uniform(5.0, 40.0);
        const double b0p = st.pap_j, b0s = st.sap_j;
        PhyConstants c;
        c.slot_s = (ep % 2 == 0) ? 1e-3 : rng.uniform(0.05, 1.0);
        c.eta1_pap = rng.uniform(0.1, 1.0);
        c.eta1_sap = rng.uniform(0.1, 1.0);
        c.pap_op_energy_j = rng.uniform(0.0, 0.3);
        c.sap_op_energy_j = rng.uniform(0.0, 0.3);
        double cr_p = 0.0, db_p = 0.0, cr_s = 0.0, db_s = 0.0;
        const int len = 1 + static_cast<int>(rng.below(40));
        for (int t = 0; t < len; ++t) {
            PowerAllocation a = random_alloc(rng, t);
            const double e_re = static_cast<double>(rng.below(3)) * 0.5;
            const double e_s = rng.uniform(0.0, 0.01);
            st = step_batteries(st, a, e_re, e_s, c).state;
            cr_p += c.eta1_pap * e_re;
            db_p += c.slot_s * (a.beta + (1.0 - a.beta) / 2.0) * a.p_pp + c.pap_op_energy_j;
            cr_s += c.eta1_sap * e_s;
            db_s += c.slot_s * (1.0 - a.beta) / 2.0 * (a.p_sp + a.p_ss) + c.sap_op_energy_j;
        }
        worst = std::max(worst, rel_gap1(st.pap_j, b0p + cr_p - db_p));
        worst = std::max(worst, rel_gap1(st.sap_j, b0s + cr_s - db_s));
    }
    const double worst_raw = worst;

    ExperimentConfig base = preset_config("desk");
    EnvConfig ec = base.env;
    ec.cap_pap_j = ec.cap_sap_j = 1e9; // far above any reachable level
    ec.slots_per_episode = 25;
    ec.model.variant = Variant::exact;
    ec.model.level = 0.0;
    Environment env(ec, 0xE9);
    Rng arng(0x5EED);
    long episodes_done = 0;
    for (int ep = 0; ep < 10000; ++ep) {
        env.reset();
        const BatteryState b0 = env.battery();
        double cr_p = 0.0, db_p = 0.0, cr_s = 0.0, db_s = 0.0;
        bool done = false;
        while (!done) {
            AgentAction act;
            for (double& v : act.pap) v = arng.uniform(-1.0, 1.0);
            for (double& v : act.sap) v = arng.uniform(-1.0, 1.0);
            const Environment::StepResult sr = env.step(act);
            const PowerAllocation& a = sr.info.alloc;
            cr_p += ec.phy.eta1_pap * sr.info.e_re;
            db_p += ec.phy.slot_s * (a.beta + (1.0 - a.beta) / 2.0) * a.p_pp +
                    ec.phy.pap_op_energy_j;
            cr_s += ec.phy.eta1_sap * sr.info.e_s;
            db_s += ec.phy.slot_s * (1.0 - a.beta) / 2.0 * (a.p_sp + a.p_ss) +
                    ec.phy.sap_op_energy_j;
            done = sr.done;
        }
        const BatteryState be = env.battery();
        worst = std::max(worst, rel_gap1(be.pap_j, b0.pap_j + cr_p - db_p));
        worst = std::max(worst, rel_gap1(be.sap_j, b0.sap_j + cr_s - db_s));
        ++episodes_done;
    }

    const bool pass = worst <= tol;
    return {pass, strf("raw recursion max gap %.2e, %ld environment episodes max gap %.2e "
                       "(tol %.0e), %.1f s",
                       worst_raw, episodes_done, worst, tol, sw.s())};
}

} // namespace

int main(int argc, char** argv) {
    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "per-slot rate/secrecy/energy formulas vs direct substitution", criterion1},
        {2, "worst-case closed forms vs grid minimum", criterion2},
        {3, "margined constraints keep violations within threshold", criterion3},
        {4, "all objective evaluators collapse at zero uncertainty", criterion4},
        {5, "analytic gradients vs finite differences", criterion5},
        {6, "degenerate-setting reductions between learners", criterion6},
        {7, "trained policy beats the random baseline", criterion7},
        {8, "trends across uncertainty, eavesdropper distance, battery size", criterion8},
        {9, "battery energy-balance identity", criterion9},
    };
    int only = 0;
    if (argc > 1) {
        const std::string arg = argv[1];
        if (arg != "all") {
            only = std::atoi(arg.c_str());
            if (only < 1 || only > 9) {
                std::fprintf(stderr, "usage: %s [1..9|all]\n", argv[0]);
                return 2;
            }
        }
    }
    int failures = 0;
    for (const Entry& e : entries) {
        if (only != 0 && e.id != only) continue;
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o = {false, strf("exception: %s", ex.what())};
        }
        std::printf("criterion %d (%s): %s — %s\n", e.id, e.name, o.pass ? "PASS" : "FAIL",
                    o.note.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures;
}
