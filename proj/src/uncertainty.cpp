#include "crnoma/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace crnoma {

BernsteinParams table1_params(ErrorClass cls) {
    switch (cls) {
    case ErrorClass::bounded: return {1.0, 0.0};
    case ErrorClass::unimodal: return {0.5, 1.0 / std::sqrt(12.0)};
    case ErrorClass::symmetric_unimodal: return {0.0, 1.0 / std::sqrt(3.0)};
    }
    throw std::invalid_argument("unknown error class");
}

double bernstein_margin(double eps, double xi, BernsteinParams p) {
    if (eps < 0.0) throw std::domain_error("bernstein_margin: eps must be >= 0");
    if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("bernstein_margin: xi outside (0,1)");
    return p.chi_plus * eps + std::sqrt(2.0 * std::log(1.0 / xi)) * p.tau * eps;
}

namespace {

inline double clip0(double x) { return x > 0.0 ? x : 0.0; }

ObjectiveEval eval_at(const LinkGains& rate_gains, double h_for_harvest, Scenario s,
                      const PowerAllocation& a, const NoiseConfig& n, const PhyConstants& c) {
    ObjectiveEval o;
    RateBundle b = rates_from_gains(rate_gains, a, n, s);
    o.secrecy = secrecy_rate(b);
    double e_s = harvested_energy_sap(a.p_pp, a.beta, h_for_harvest, c);
    o.energy = energy_consumption(a, e_s, c);
    o.value = objective_log_ratio(o.secrecy, o.energy, c);
    o.pue_min_rate = pue_rate(b);
    return o;
}

} // namespace

ObjectiveEval exact_objective(const LinkGains& gains, Scenario s, const PowerAllocation& a,
                              const NoiseConfig& n, const PhyConstants& c) {
    return eval_at(gains, gains.pap_sap, s, a, n, c);
}

LinkGains worst_case_gains(const LinkGains& est, const LinkGains& delta) {
    LinkGains g;
    g.pap_pue = clip0(est.pap_pue - delta.pap_pue);
    g.pap_sap = clip0(est.pap_sap - delta.pap_sap);
    g.sap_pue = clip0(est.sap_pue - delta.sap_pue);
    g.sap_sue = clip0(est.sap_sue - delta.sap_sue);
    g.pap_eve = est.pap_eve + delta.pap_eve;
    g.sap_eve = est.sap_eve + delta.sap_eve;
    return g;
}

ObjectiveEval worst_case_objective(const LinkGains& est, const LinkGains& delta, Scenario s,
                                   const PowerAllocation& a, const NoiseConfig& n,
                                   const PhyConstants& c) {
    LinkGains g = worst_case_gains(est, delta);
    return eval_at(g, g.pap_sap, s, a, n, c);
}

LinkGains bernstein_gains(const LinkGains& est, const LinkGains& eps, double xi,
                          ErrorClass cls, bool conservative) {
    BernsteinParams p = table1_params(cls);
    double sign = conservative ? -1.0 : 1.0;
    LinkGains g;
    g.pap_pue = clip0(est.pap_pue + sign * bernstein_margin(eps.pap_pue, xi, p));
    g.pap_sap = clip0(est.pap_sap + sign * bernstein_margin(eps.pap_sap, xi, p));
    g.sap_pue = clip0(est.sap_pue + sign * bernstein_margin(eps.sap_pue, xi, p));
    g.sap_sue = clip0(est.sap_sue + sign * bernstein_margin(eps.sap_sue, xi, p));
    g.pap_eve = est.pap_eve + bernstein_margin(eps.pap_eve, xi, p);
    g.sap_eve = est.sap_eve + bernstein_margin(eps.sap_eve, xi, p);
    return g;
}

ObjectiveEval bernstein_objective(const LinkGains& est, const LinkGains& eps,
                                  const XiThresholds& xi, ErrorClass cls, bool conservative,
                                  Scenario s, const PowerAllocation& a, const NoiseConfig& n,
                                  const PhyConstants& c) {
    BernsteinParams p = table1_params(cls);
    LinkGains num = bernstein_gains(est, eps, xi.obj_nom, cls, conservative);
    RateBundle b = rates_from_gains(num, a, n, s);

    double sign = conservative ? -1.0 : 1.0;
    double h_den = clip0(est.pap_sap + sign * bernstein_margin(eps.pap_sap, xi.obj_den, p));

    ObjectiveEval o;
    o.secrecy = secrecy_rate(b);
    o.energy = energy_consumption(a, harvested_energy_sap(a.p_pp, a.beta, h_den, c), c);
    o.value = objective_log_ratio(o.secrecy, o.energy, c);

    LinkGains qos = bernstein_gains(est, eps, xi.c5, cls, conservative);
    o.pue_min_rate = pue_rate(rates_from_gains(qos, a, n, s));
    return o;
}

namespace {

// kth smallest (1-indexed) with k = floor(q * n), clamped to [1, n]
double lower_quantile(std::vector<double>& v, double q) {
    auto n = static_cast<long>(v.size());
    long k = static_cast<long>(std::floor(q * static_cast<double>(n)));
    k = std::clamp(k, 1L, n);
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    return v[static_cast<std::size_t>(k - 1)];
}

double upper_quantile(std::vector<double>& v, double q) {
    auto n = static_cast<long>(v.size());
    long k = static_cast<long>(std::floor(q * static_cast<double>(n)));
    k = std::clamp(k, 1L, n);
    std::nth_element(v.begin(), v.begin() + (n - k), v.end());
    return v[static_cast<std::size_t>(n - k)];
}

} // namespace

ObjectiveEval stochastic_objective(const LinkGains& est, const LinkGains& delta,
                                   const XiThresholds& xi, ErrorClass cls, Scenario s,
                                   const PowerAllocation& a, const NoiseConfig& n,
                                   const PhyConstants& c, Rng& rng, int n_mc) {
    if (n_mc < 1) throw std::domain_error("stochastic_objective: n_mc must be >= 1");
    std::vector<double> rs, es, qs;
    rs.reserve(static_cast<std::size_t>(n_mc));
    es.reserve(static_cast<std::size_t>(n_mc));
    qs.reserve(static_cast<std::size_t>(n_mc));
    for (int i = 0; i < n_mc; ++i) {
        LinkGains g;
        g.pap_pue = clip0(est.pap_pue + delta.pap_pue * draw_unit_error(cls, rng));
        g.pap_sap = clip0(est.pap_sap + delta.pap_sap * draw_unit_error(cls, rng));
        g.sap_pue = clip0(est.sap_pue + delta.sap_pue * draw_unit_error(cls, rng));
        g.sap_sue = clip0(est.sap_sue + delta.sap_sue * draw_unit_error(cls, rng));
        g.pap_eve = clip0(est.pap_eve + delta.pap_eve * draw_unit_error(cls, rng));
        g.sap_eve = clip0(est.sap_eve + delta.sap_eve * draw_unit_error(cls, rng));
        RateBundle b = rates_from_gains(g, a, n, s);
        rs.push_back(secrecy_rate(b));
        es.push_back(energy_consumption(a, harvested_energy_sap(a.p_pp, a.beta, g.pap_sap, c), c));
        qs.push_back(pue_rate(b));
    }
    ObjectiveEval o;
    o.secrecy = lower_quantile(rs, xi.obj_nom);
    o.energy = upper_quantile(es, xi.obj_den);
    o.value = objective_log_ratio(o.secrecy, o.energy, c);
    o.pue_min_rate = lower_quantile(qs, xi.c5);
    o.degenerate = o.secrecy <= c.floor_rate;
    return o;
}

namespace {

double expr_value(WcExpr e, double h_pue, double h_spue, double h_sue,
                  const PowerAllocation& a, const NoiseConfig& n) {
    switch (e) {
    case WcExpr::sue_scn1:
        return std::log2(1.0 + a.p_ss * h_sue / (a.p_sp * h_sue + n.ss));
    case WcExpr::sue_scn2:
        return std::log2(1.0 + a.p_ss * h_sue / n.ss);
    case WcExpr::mrc_scn1:
        return std::log2(1.0 + a.p_pp * h_pue / n.pp + a.p_sp * h_spue / n.sp);
    case WcExpr::mrc_scn2:
        return std::log2(1.0 + a.p_pp * h_pue / n.pp +
                         a.p_sp * h_spue / (a.p_ss * h_spue + n.sp));
    }
    throw std::invalid_argument("unknown expression");
}

} // namespace

double worst_case_component(WcExpr e, const LinkGains& est, const LinkGains& delta,
                            const PowerAllocation& a, const NoiseConfig& n) {
    LinkGains g = worst_case_gains(est, delta);
    return expr_value(e, g.pap_pue, g.sap_pue, g.sap_sue, a, n);
}

double grid_min_oracle(WcExpr e, const LinkGains& est, const LinkGains& delta,
                       const PowerAllocation& a, const NoiseConfig& n, int grid_n) {
    if (grid_n < 9) throw std::domain_error("grid_min_oracle: need >= 9 grid points");
    auto axis = [grid_n](double mid, double half, int i) {
        double lo = clip0(mid - half), hi = mid + half;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    };
    double best = std::numeric_limits<double>::infinity();
    bool two_dim = (e == WcExpr::mrc_scn1 || e == WcExpr::mrc_scn2);
    for (int i = 0; i < grid_n; ++i) {
        double h_sue = axis(est.sap_sue, delta.sap_sue, i);
        double h_pue = axis(est.pap_pue, delta.pap_pue, i);
        if (!two_dim) {
            best = std::min(best, expr_value(e, est.pap_pue, est.sap_pue, h_sue, a, n));
            continue;
        }
        for (int j = 0; j < grid_n; ++j) {
            double h_spue = axis(est.sap_pue, delta.sap_pue, j);
            best = std::min(best, expr_value(e, h_pue, h_spue, est.sap_sue, a, n));
        }
    }
    return best;
}

double violation_probability_mc(ConstraintId id, const ConstraintScene& sc,
                                ErrorClass cls, const NoiseConfig& n, const PhyConstants& c,
                                Rng& rng, int n_mc) {
    if (n_mc < 1) throw std::domain_error("violation_probability_mc: n_mc must be >= 1");
    long violations = 0;
    for (int i = 0; i < n_mc; ++i) {
        switch (id) {
        case ConstraintId::c1: {
            double b = sc.b_pap_est + sc.delta_b_pap * draw_unit_error(cls, rng);
            if (b - pap_transmit_energy(sc.alloc, c) < 0.0) ++violations;
            break;
        }
        case ConstraintId::c2: {
            double b = sc.b_sap_est + sc.delta_b_sap * draw_unit_error(cls, rng);
            double h = sc.est.pap_sap + sc.delta.pap_sap * draw_unit_error(cls, rng);
            double e_s = harvested_energy_sap(sc.alloc.p_pp, sc.alloc.beta, h, c);
            if (b + c.eta1_sap * e_s - sap_transmit_energy(sc.alloc, c) < 0.0) ++violations;
            break;
        }
        case ConstraintId::c3: {
            double b = sc.b_pap_est + sc.delta_b_pap * draw_unit_error(cls, rng);
            if (b + c.eta1_pap * sc.e_re - pap_transmit_energy(sc.alloc, c) > sc.cap_pap)
                ++violations;
            break;
        }
        case ConstraintId::c4: {
            double b = sc.b_sap_est + sc.delta_b_sap * draw_unit_error(cls, rng);
            double h0 = sc.est.pap_sap + sc.delta.pap_sap * draw_unit_error(cls, rng);
            double h1 = sc.est.pap_sap + sc.delta.pap_sap * draw_unit_error(cls, rng);
            double e2 = harvested_energy_sap(sc.alloc.p_pp, sc.alloc.beta, h0, c) +
                        harvested_energy_sap(sc.alloc.p_pp, sc.alloc.beta, h1, c);
            if (b + c.eta1_sap * e2 - sap_transmit_energy(sc.alloc, c) > sc.cap_sap)
                ++violations;
            break;
        }
        case ConstraintId::c5: {
            LinkGains g = sc.est;
            g.pap_pue = clip0(sc.est.pap_pue + sc.delta.pap_pue * draw_unit_error(cls, rng));
            g.pap_sap = clip0(sc.est.pap_sap + sc.delta.pap_sap * draw_unit_error(cls, rng));
            g.sap_pue = clip0(sc.est.sap_pue + sc.delta.sap_pue * draw_unit_error(cls, rng));
            g.sap_sue = clip0(sc.est.sap_sue + sc.delta.sap_sue * draw_unit_error(cls, rng));
            if (pue_rate(rates_from_gains(g, sc.alloc, n, sc.scenario)) < sc.r_min_slot)
                ++violations;
            break;
        }
        }
    }
    return static_cast<double>(violations) / static_cast<double>(n_mc);
}

ConstraintInputs constraint_inputs(const UncertaintyModel& m, double b_pap, double b_sap,
                                   double delta_b_pap, double delta_b_sap, double h_pap_sap,
                                   double delta_h_pap_sap) {
    ConstraintInputs ci;
    switch (m.variant) {
    case Variant::exact:
        ci.b_pap_c1 = ci.b_pap_c3 = b_pap;
        ci.b_sap_c2 = ci.b_sap_c4 = b_sap;
        ci.h_c2 = ci.h_c4 = h_pap_sap;
        break;
    case Variant::worst_case:
        ci.b_pap_c1 = b_pap - delta_b_pap;
        ci.b_sap_c2 = b_sap - delta_b_sap;
        ci.b_pap_c3 = b_pap + delta_b_pap;
        ci.b_sap_c4 = b_sap + delta_b_sap;
        ci.h_c2 = ci.h_c4 = clip0(h_pap_sap - delta_h_pap_sap);
        break;
    case Variant::bernstein: {
        BernsteinParams p = table1_params(m.error_class);
        double sgn = m.conservative_signs ? -1.0 : 1.0;
        ci.b_pap_c1 = b_pap + sgn * bernstein_margin(delta_b_pap, m.xi.c1, p);
        ci.b_sap_c2 = b_sap + sgn * bernstein_margin(delta_b_sap, m.xi.c2, p);
        ci.h_c2 = clip0(h_pap_sap + sgn * bernstein_margin(delta_h_pap_sap, m.xi.c2, p));
        ci.b_pap_c3 = b_pap + bernstein_margin(delta_b_pap, m.xi.c3, p);
        ci.b_sap_c4 = b_sap + bernstein_margin(delta_b_sap, m.xi.c4, p);
        ci.h_c4 = h_pap_sap + bernstein_margin(delta_h_pap_sap, m.xi.c4, p);
        break;
    }
    case Variant::stochastic: {
        // deterministic reformulation at the per-symbol adverse quantile
        auto qlo = [&](double xi) { return unit_error_quantile(m.error_class, xi); };
        auto qhi = [&](double xi) { return unit_error_quantile(m.error_class, 1.0 - xi); };
        ci.b_pap_c1 = b_pap + delta_b_pap * qlo(m.xi.c1);
        ci.b_sap_c2 = b_sap + delta_b_sap * qlo(m.xi.c2);
        ci.h_c2 = clip0(h_pap_sap + delta_h_pap_sap * qlo(m.xi.c2));
        ci.b_pap_c3 = b_pap + delta_b_pap * qhi(m.xi.c3);
        ci.b_sap_c4 = b_sap + delta_b_sap * qhi(m.xi.c4);
        ci.h_c4 = h_pap_sap + delta_h_pap_sap * qhi(m.xi.c4);
        break;
    }
    }
    return ci;
}

} // namespace crnoma
