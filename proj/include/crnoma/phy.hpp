#pragma once

#include "crnoma/geometry.hpp"

namespace crnoma {

// Transmit powers in watts plus the energy-transfer time share beta.
struct PowerAllocation {
    double p_pp = 0.0; // PAP power (energy phase + own data phase)
    double p_sp = 0.0; // SAP power spent relaying the PAP message
    double p_ss = 0.0; // SAP power spent on its own message
    double beta = 0.5; // fraction of the slot used for wireless energy transfer
};

// Noise variances in watts at each receiver, one per link.
struct NoiseConfig {
    double pp = 2e-15; // PUE, direct phase
    double ps = 2e-15; // SAP
    double pe = 2e-15; // eavesdropper, direct phase
    double sp = 2e-15; // PUE, relay phase
    double ss = 2e-15; // SUE
    double se = 2e-15; // eavesdropper, relay phase

    // density in dBm/Hz times bandwidth in Hz
    static NoiseConfig from_density_dbm(double dbm_per_hz, double bandwidth_hz);
};

struct PhyConstants {
    double slot_s = 1e-3;          // T_s
    double eta2_sap = 0.5;         // RF-harvest conversion efficiency at the SAP
    double eta2_pap = 0.6;         // renewable conversion efficiency at the PAP
    double eta1_pap = 0.5;         // battery-to-power storage efficiency, PAP
    double eta1_sap = 0.5;         // battery-to-power storage efficiency, SAP
    double amp_eff = 0.9;          // power amplifier efficiency
    double circuit_energy_j = 0.1; // fixed circuit energy per slot
    double pap_op_energy_j = 0.0;  // constant operating drain, PAP battery
    double sap_op_energy_j = 0.0;  // constant operating drain, SAP battery
    double floor_rate = 1e-6;      // numerator floor for the log-ratio objective
    double floor_energy = 1e-6;    // denominator floor for the log-ratio objective
};

// Which receiver performs successive interference cancellation in the relay
// phase. scn1 when the SAP->PUE gain is at least the SAP->SUE gain (ties
// resolve to scn1), scn2 otherwise.
enum class Scenario { scn1, scn2 };

Scenario select_scenario(double h_sap_pue, double h_sap_sue);

// Fraction of the slot carrying data in each transmission phase.
inline double data_phase(double beta) { return (1.0 - beta) / 2.0; }

// RF energy harvested by the SAP during the energy-transfer phase.
double harvested_energy_sap(double p_pp, double beta, double h_pap_sap,
                            const PhyConstants& c);

// Per-slot SNRs and spectral efficiencies (bit/s/Hz). Every rate carries the
// data-phase prefactor.
struct RateBundle {
    Scenario scenario = Scenario::scn1;
    double snr_pap_pue = 0.0;
    double snr_sap_pue = 0.0; // SINR in scn2
    double snr_sap_sue = 0.0; // SINR in scn1
    double snr_pap_eve = 0.0;
    double snr_sap1_eve = 0.0; // relayed PAP message at the eavesdropper
    double snr_sap2_eve = 0.0; // SUE message at the eavesdropper
    double r_pap_sap = 0.0;
    double r_mrc_pue = 0.0;
    double r_sap_sue = 0.0;
    double r_mrc_eve = 0.0;
    double r_sap2_eve = 0.0;
};

// Evaluate the rate stack on an explicit gain set with a fixed scenario.
// Exact, worst-case and margin-based evaluations all route through this one
// function so that zero uncertainty reproduces the exact path bit for bit.
RateBundle rates_from_gains(const LinkGains& g, const PowerAllocation& a,
                            const NoiseConfig& n, Scenario s);

// Convenience wrapper that also picks the scenario from the supplied gains.
RateBundle link_rates(const LinkGains& true_gains, const PowerAllocation& a,
                      const NoiseConfig& n);

// Rate actually delivered to the PUE: decode-and-forward bottleneck.
double pue_rate(const RateBundle& b);

// Sum of the two non-negative secrecy terms.
double secrecy_rate(const RateBundle& b);

// Total energy drawn from the grid perspective in one slot; may be small or
// negative in extreme configurations, callers floor it before dividing.
double energy_consumption(const PowerAllocation& a, double e_s, const PhyConstants& c);

// Battery drain per slot at each transmitter (no amplifier efficiency, the
// battery supplies the radiated energy directly).
double pap_transmit_energy(const PowerAllocation& a, const PhyConstants& c);
double sap_transmit_energy(const PowerAllocation& a, const PhyConstants& c);

// log2 of secrecy over energy with both terms floored away from zero.
double objective_log_ratio(double secrecy, double energy, const PhyConstants& c);

} // namespace crnoma
