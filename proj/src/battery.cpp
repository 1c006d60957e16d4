#include "crnoma/battery.hpp"

#include <algorithm>

namespace crnoma {

double draw_harvest_arrival(double unit_j, Rng& rng) {
    return static_cast<double>(rng.below(3)) * unit_j;
}

BatteryStepResult step_batteries(const BatteryState& state, const PowerAllocation& a,
                                 double e_re, double e_s, const PhyConstants& c) {
    BatteryStepResult r;
    r.state = state;
    double pap = state.pap_j + c.eta1_pap * e_re - pap_transmit_energy(a, c) - c.pap_op_energy_j;
    double sap = state.sap_j + c.eta1_sap * e_s - sap_transmit_energy(a, c) - c.sap_op_energy_j;
    r.state.pap_j = std::min(state.cap_pap_j, pap);
    r.state.sap_j = std::min(state.cap_sap_j, sap);
    r.depleted = r.state.pap_j < 0.0 || r.state.sap_j < 0.0;
    return r;
}

CausalityResult check_causality(double b_pap, double b_sap, const PowerAllocation& a,
                                double e_s, const PhyConstants& c) {
    CausalityResult r;
    r.c1_ok = b_pap - pap_transmit_energy(a, c) >= 0.0;
    r.c2_ok = b_sap + c.eta1_sap * e_s - sap_transmit_energy(a, c) >= 0.0;
    return r;
}

OverflowResult check_overflow(double b_pap, double b_sap, double cap_pap, double cap_sap,
                              const PowerAllocation& a, double e_re, double e_s_horizon,
                              const PhyConstants& c) {
    OverflowResult r;
    r.c3_ok = b_pap + c.eta1_pap * e_re - pap_transmit_energy(a, c) <= cap_pap;
    r.c4_ok = b_sap + c.eta1_sap * e_s_horizon - sap_transmit_energy(a, c) <= cap_sap;
    return r;
}

} // namespace crnoma
