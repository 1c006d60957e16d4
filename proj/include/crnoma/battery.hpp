#pragma once

#include "crnoma/phy.hpp"
#include "crnoma/rng.hpp"

namespace crnoma {

struct BatteryState {
    double pap_j = 0.0;
    double sap_j = 0.0;
    double cap_pap_j = 20.0;
    double cap_sap_j = 20.0;
    double init_pap_j = 0.0;
    double init_sap_j = 0.0;
};

// Renewable arrival at the PAP: 0, 1 or 2 harvest units per slot, uniformly.
double draw_harvest_arrival(double unit_j, Rng& rng);

struct BatteryStepResult {
    BatteryState state;       // levels clipped at capacity, possibly negative
    bool depleted = false;    // any balance fell below zero
};

// One-slot battery transition. The SAP spends its RF harvest in the same
// slot; the PAP's renewable arrival is credited here and so becomes usable
// only from the next slot on.
BatteryStepResult step_batteries(const BatteryState& state, const PowerAllocation& a,
                                 double e_re, double e_s, const PhyConstants& c);

struct CausalityResult {
    bool c1_ok = true; // PAP spend covered by stored energy
    bool c2_ok = true; // SAP spend covered by stored energy plus same-slot harvest
    bool ok() const { return c1_ok && c2_ok; }
};

// Energy-causality check. Callers pass battery lower bounds and a worst-case
// harvest when evaluating under a robust model; exact values otherwise.
CausalityResult check_causality(double b_pap, double b_sap, const PowerAllocation& a,
                                double e_s, const PhyConstants& c);

struct OverflowResult {
    bool c3_ok = true; // PAP battery stays within capacity
    bool c4_ok = true; // SAP battery stays within capacity
    bool ok() const { return c3_ok && c4_ok; }
};

// Overflow check. e_s_horizon is the harvest credited over the current and
// next slot (callers approximate the look-ahead with the current draw).
// Robust models pass upper battery bounds.
OverflowResult check_overflow(double b_pap, double b_sap, double cap_pap, double cap_sap,
                              const PowerAllocation& a, double e_re, double e_s_horizon,
                              const PhyConstants& c);

} // namespace crnoma
