#include "crnoma/phy.hpp"

#include <algorithm>
#include <cmath>

namespace crnoma {

NoiseConfig NoiseConfig::from_density_dbm(double dbm_per_hz, double bandwidth_hz) {
    double watts = std::pow(10.0, dbm_per_hz / 10.0) * 1e-3 * bandwidth_hz;
    NoiseConfig n;
    n.pp = n.ps = n.pe = n.sp = n.ss = n.se = watts;
    return n;
}

Scenario select_scenario(double h_sap_pue, double h_sap_sue) {
    return h_sap_pue >= h_sap_sue ? Scenario::scn1 : Scenario::scn2;
}

double harvested_energy_sap(double p_pp, double beta, double h_pap_sap,
                            const PhyConstants& c) {
    return c.slot_s * beta * c.eta2_sap * p_pp * h_pap_sap;
}

namespace {

inline double snr(double p, double h, double sigma2) { return p * h / sigma2; }

inline double sinr(double p, double h, double p_int, double sigma2) {
    return p * h / (p_int * h + sigma2);
}

inline double rate(double beta, double x) { return data_phase(beta) * std::log2(1.0 + x); }

} // namespace

RateBundle rates_from_gains(const LinkGains& g, const PowerAllocation& a,
                            const NoiseConfig& n, Scenario s) {
    RateBundle b;
    b.scenario = s;
    b.snr_pap_pue = snr(a.p_pp, g.pap_pue, n.pp);
    b.snr_pap_eve = snr(a.p_pp, g.pap_eve, n.pe);
    b.snr_sap1_eve = snr(a.p_sp, g.sap_eve, n.se);
    b.snr_sap2_eve = snr(a.p_ss, g.sap_eve, n.ss);
    if (s == Scenario::scn1) {
        b.snr_sap_pue = snr(a.p_sp, g.sap_pue, n.sp);
        b.snr_sap_sue = sinr(a.p_ss, g.sap_sue, a.p_sp, n.ss);
    } else {
        b.snr_sap_pue = sinr(a.p_sp, g.sap_pue, a.p_ss, n.sp);
        b.snr_sap_sue = snr(a.p_ss, g.sap_sue, n.ss);
    }
    b.r_pap_sap = rate(a.beta, snr(a.p_pp, g.pap_sap, n.ps));
    b.r_mrc_pue = rate(a.beta, b.snr_pap_pue + b.snr_sap_pue);
    b.r_sap_sue = rate(a.beta, b.snr_sap_sue);
    b.r_mrc_eve = rate(a.beta, b.snr_pap_eve + b.snr_sap1_eve);
    b.r_sap2_eve = rate(a.beta, b.snr_sap2_eve);
    return b;
}

RateBundle link_rates(const LinkGains& true_gains, const PowerAllocation& a,
                      const NoiseConfig& n) {
    return rates_from_gains(true_gains, a, n,
                            select_scenario(true_gains.sap_pue, true_gains.sap_sue));
}

double pue_rate(const RateBundle& b) { return std::min(b.r_pap_sap, b.r_mrc_pue); }

double secrecy_rate(const RateBundle& b) {
    double primary = std::min(b.r_pap_sap, b.r_mrc_pue) - b.r_mrc_eve;
    double secondary = b.r_sap_sue - b.r_sap2_eve;
    return std::max(0.0, primary) + std::max(0.0, secondary);
}

double energy_consumption(const PowerAllocation& a, double e_s, const PhyConstants& c) {
    double tx = (a.beta + data_phase(a.beta)) * a.p_pp + data_phase(a.beta) * (a.p_sp + a.p_ss);
    return c.slot_s * c.amp_eff * tx - c.amp_eff * e_s + c.circuit_energy_j;
}

double pap_transmit_energy(const PowerAllocation& a, const PhyConstants& c) {
    return c.slot_s * (a.beta + data_phase(a.beta)) * a.p_pp;
}

double sap_transmit_energy(const PowerAllocation& a, const PhyConstants& c) {
    return c.slot_s * data_phase(a.beta) * (a.p_sp + a.p_ss);
}

double objective_log_ratio(double secrecy, double energy, const PhyConstants& c) {
    double r = std::max(secrecy, c.floor_rate);
    double e = std::max(energy, c.floor_energy);
    return std::log2(r / e);
}

} // namespace crnoma
