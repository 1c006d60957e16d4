#pragma once

#include "crnoma/error_class.hpp"
#include "crnoma/phy.hpp"
#include "crnoma/rng.hpp"

namespace crnoma {

enum class Variant { exact, worst_case, stochastic, bernstein };

// Violation thresholds, one per chance-constrained quantity.
struct XiThresholds {
    double obj_nom = 0.05;
    double obj_den = 0.05;
    double c1 = 0.05;
    double c2 = 0.05;
    double c3 = 0.05;
    double c4 = 0.05;
    double c5 = 0.05;
};

struct UncertaintyModel {
    Variant variant = Variant::exact;
    double level = 0.0; // relative half-width applied to nominals and capacities
    ErrorClass error_class = ErrorClass::bounded;
    XiThresholds xi;
    int n_mc = 1000;                // samples per step for the stochastic objective
    bool conservative_signs = true; // margin legitimate links downward instead of
                                    // the printed upward substitution
};

struct BernsteinParams {
    double chi_plus = 1.0;
    double tau = 0.0;
};

// (chi+, tau) for each distribution class of the normalized error.
BernsteinParams table1_params(ErrorClass cls);

// Safe-approximation margin: chi+ * eps + sqrt(2 ln(1/xi)) * tau * eps.
double bernstein_margin(double eps, double xi, BernsteinParams p);

// Outcome of evaluating the robust objective of one slot under a model.
struct ObjectiveEval {
    double secrecy = 0.0;      // numerator before flooring
    double energy = 0.0;       // denominator before flooring
    double value = 0.0;        // log2(floored ratio)
    double pue_min_rate = 0.0; // guaranteed PUE rate under the model, with prefactor
    bool degenerate = false;   // sampled numerator collapsed to the floor
};

ObjectiveEval exact_objective(const LinkGains& gains, Scenario s, const PowerAllocation& a,
                              const NoiseConfig& n, const PhyConstants& c);

// Legitimate links at their lower bound (clipped at zero), eavesdropper links
// at their upper bound.
LinkGains worst_case_gains(const LinkGains& est, const LinkGains& delta);

ObjectiveEval worst_case_objective(const LinkGains& est, const LinkGains& delta, Scenario s,
                                   const PowerAllocation& a, const NoiseConfig& n,
                                   const PhyConstants& c);

// Margin every channel by its Bernstein bound at threshold xi. Eavesdropper
// links always move up; legitimate links move down when `conservative` and up
// (the printed substitution) otherwise.
LinkGains bernstein_gains(const LinkGains& est, const LinkGains& eps, double xi,
                          ErrorClass cls, bool conservative);

ObjectiveEval bernstein_objective(const LinkGains& est, const LinkGains& eps,
                                  const XiThresholds& xi, ErrorClass cls, bool conservative,
                                  Scenario s, const PowerAllocation& a, const NoiseConfig& n,
                                  const PhyConstants& c);

// Chance-constrained objective: u is the empirical xi_obj_nom-quantile of the
// sampled secrecy rate, v the empirical (1-xi_obj_den)-quantile of the sampled
// energy, pue_min_rate the xi_c5-quantile of the sampled PUE rate. All three
// are taken from one joint sample of the channel errors.
ObjectiveEval stochastic_objective(const LinkGains& est, const LinkGains& delta,
                                   const XiThresholds& xi, ErrorClass cls, Scenario s,
                                   const PowerAllocation& a, const NoiseConfig& n,
                                   const PhyConstants& c, Rng& rng, int n_mc);

// Expressions whose box minima have closed forms (lower-corner substitution).
enum class WcExpr { sue_scn1, sue_scn2, mrc_scn1, mrc_scn2 };

// Closed-form minimum: expression evaluated at the margined lower corner.
// No data-phase prefactor, matching the raw log terms.
double worst_case_component(WcExpr e, const LinkGains& est, const LinkGains& delta,
                            const PowerAllocation& a, const NoiseConfig& n);

// Brute-force minimum of the same expression over the uncertainty box,
// `grid_n` points per uncertain dimension. Test oracle.
double grid_min_oracle(WcExpr e, const LinkGains& est, const LinkGains& delta,
                       const PowerAllocation& a, const NoiseConfig& n, int grid_n);

enum class ConstraintId { c1, c2, c3, c4, c5 };

// Frozen single-slot situation for constraint-violation probes.
struct ConstraintScene {
    double b_pap_est = 0.0;
    double b_sap_est = 0.0;
    double delta_b_pap = 0.0;
    double delta_b_sap = 0.0;
    LinkGains est;
    LinkGains delta;
    PowerAllocation alloc;
    double e_re = 0.0;
    double cap_pap = 20.0;
    double cap_sap = 20.0;
    double r_min_slot = 0.0;
    Scenario scenario = Scenario::scn1;
};

// Empirical probability that the named constraint is violated when every
// uncertain symbol is redrawn from the class sampler. Battery and harvest
// expressions use the raw linear error model; rate expressions clip sampled
// gains at zero before the logs.
double violation_probability_mc(ConstraintId id, const ConstraintScene& scene,
                                ErrorClass cls, const NoiseConfig& n, const PhyConstants& c,
                                Rng& rng, int n_mc);

// Effective battery levels and harvest channel used by the per-slot
// constraint checks under each model variant.
struct ConstraintInputs {
    double b_pap_c1 = 0.0;
    double b_sap_c2 = 0.0;
    double h_c2 = 0.0;
    double b_pap_c3 = 0.0;
    double b_sap_c4 = 0.0;
    double h_c4 = 0.0;
};

ConstraintInputs constraint_inputs(const UncertaintyModel& m, double b_pap, double b_sap,
                                   double delta_b_pap, double delta_b_sap, double h_pap_sap,
                                   double delta_h_pap_sap);

} // namespace crnoma
