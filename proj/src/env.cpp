#include "crnoma/env.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace crnoma {

namespace {

inline double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

inline double unit_range(double raw) { return (clamp1(raw) + 1.0) / 2.0; }

constexpr double kBetaEps = 1e-3;
constexpr double kPowerFloor = 1e-4; // watts, local-reward denominator floor

} // namespace

PowerAllocation map_action(const AgentAction& a, double p_max_pap, double p_max_sap) {
    PowerAllocation al;
    al.p_pp = unit_range(a.pap[0]) * p_max_pap;
    al.beta = std::clamp(unit_range(a.pap[1]), kBetaEps, 1.0 - kBetaEps);
    al.p_sp = unit_range(a.sap[0]) * p_max_sap;
    al.p_ss = unit_range(a.sap[1]) * p_max_sap;
    double total = al.p_sp + al.p_ss;
    if (total > p_max_sap && total > 0.0) {
        double scale = p_max_sap / total;
        al.p_sp *= scale;
        al.p_ss *= scale;
    }
    return al;
}

double sap_local_reward(const RateBundle& b, const PowerAllocation& a, double penalties) {
    double numerator = std::max(0.0, b.r_sap_sue - b.r_sap2_eve);
    double denominator = data_phase(a.beta) * std::max(a.p_ss, kPowerFloor);
    return numerator / denominator + penalties;
}

Environment::Environment(const EnvConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      nominal_(crnoma::nominal_gains(cfg.distances, cfg.path_loss_exponent)),
      delta_ch_(uncertainty_bounds(nominal_, cfg.model.level)),
      delta_b_pap_(cfg.model.level * cfg.cap_pap_j),
      delta_b_sap_(cfg.model.level * cfg.cap_sap_j),
      base_seed_(seed),
      rng_(seed),
      mc_rng_(seed) {}

Observation Environment::reset(std::uint64_t seed) {
    base_seed_ = seed;
    episode_ = 0;
    return reset();
}

Observation Environment::reset() {
    ++episode_;
    rng_.reseed(substream_seed(base_seed_, episode_));
    mc_rng_.reseed(substream_seed(base_seed_, episode_, 0x6d63));

    battery_.cap_pap_j = cfg_.cap_pap_j;
    battery_.cap_sap_j = cfg_.cap_sap_j;
    battery_.pap_j = std::min(rng_.uniform(cfg_.init_lo_j, cfg_.init_hi_j), cfg_.cap_pap_j);
    battery_.sap_j = std::min(rng_.uniform(cfg_.init_lo_j, cfg_.init_hi_j), cfg_.cap_sap_j);
    battery_.init_pap_j = battery_.pap_j;
    battery_.init_sap_j = battery_.sap_j;

    slot_ = 0;
    terminated_ = false;
    draw_slot_randomness();
    return make_observation();
}

void Environment::draw_slot_randomness() {
    channels_ = draw_channel_set(nominal_, cfg_.fading, delta_ch_, cfg_.model.error_class, rng_);
    double ep = delta_b_pap_ * draw_unit_error(cfg_.model.error_class, rng_);
    double es = delta_b_sap_ * draw_unit_error(cfg_.model.error_class, rng_);
    b_pap_est_ = std::clamp(battery_.pap_j - ep, 0.0, cfg_.cap_pap_j);
    b_sap_est_ = std::clamp(battery_.sap_j - es, 0.0, cfg_.cap_sap_j);
}

Observation Environment::make_observation() {
    Observation o;
    o.pap = {channels_.est_pap_pue, channels_.est_pap_sap, b_pap_est_};
    o.sap = {channels_.est_sap_pue, channels_.est_sap_sue, b_sap_est_};
    return o;
}

std::array<double, 6> Environment::observation_scale() const {
    return {1.0 / nominal_.pap_pue, 1.0 / nominal_.pap_sap, 1.0 / cfg_.cap_pap_j,
            1.0 / nominal_.sap_pue, 1.0 / nominal_.sap_sue, 1.0 / cfg_.cap_sap_j};
}

double Environment::model_objective(const PowerAllocation& alloc, Scenario s, ObjectiveEval* out) {
    LinkGains est = estimated_gains(channels_, nominal_);
    ObjectiveEval eval;
    switch (cfg_.model.variant) {
    case Variant::exact:
        eval = exact_objective(channels_.gain, s, alloc, cfg_.noise, cfg_.phy);
        break;
    case Variant::worst_case:
        eval = worst_case_objective(est, delta_ch_, s, alloc, cfg_.noise, cfg_.phy);
        break;
    case Variant::bernstein:
        eval = bernstein_objective(est, delta_ch_, cfg_.model.xi, cfg_.model.error_class,
                                   cfg_.model.conservative_signs, s, alloc, cfg_.noise, cfg_.phy);
        break;
    case Variant::stochastic:
        eval = stochastic_objective(est, delta_ch_, cfg_.model.xi, cfg_.model.error_class, s,
                                    alloc, cfg_.noise, cfg_.phy, mc_rng_, cfg_.model.n_mc);
        break;
    }
    if (out) *out = eval;
    return eval.value;
}

Environment::StepResult Environment::step(const AgentAction& action) {
    if (terminated_) throw std::logic_error("step() on a terminated environment; call reset()");

    Observation obs_before = make_observation();
    PowerAllocation alloc = map_action(action, cfg_.p_max_pap, cfg_.p_max_sap);
    Scenario scenario = select_scenario(channels_.gain.sap_pue, channels_.gain.sap_sue);

    RateBundle bundle = rates_from_gains(channels_.gain, alloc, cfg_.noise, scenario);
    double e_s = harvested_energy_sap(alloc.p_pp, alloc.beta, channels_.gain.pap_sap, cfg_.phy);
    double e_re = draw_harvest_arrival(cfg_.harvest_unit_j, rng_);

    StepResult r;
    r.info.alloc = alloc;
    r.info.secrecy = secrecy_rate(bundle);
    r.info.energy = energy_consumption(alloc, e_s, cfg_.phy);
    r.info.pue_rate = pue_rate(bundle);
    r.info.e_s = e_s;
    r.info.e_re = e_re;

    ObjectiveEval eval;
    r.reward.r_g = model_objective(alloc, scenario, &eval);

    bool exact = cfg_.model.variant == Variant::exact;
    double bp = exact ? battery_.pap_j : b_pap_est_;
    double bs = exact ? battery_.sap_j : b_sap_est_;
    double h_ps = exact ? channels_.gain.pap_sap : channels_.est_pap_sap;
    ConstraintInputs ci = constraint_inputs(cfg_.model, bp, bs, delta_b_pap_, delta_b_sap_,
                                            h_ps, delta_ch_.pap_sap);
    double e_s_c2 = harvested_energy_sap(alloc.p_pp, alloc.beta, ci.h_c2, cfg_.phy);
    double e_s_c4 = 2.0 * harvested_energy_sap(alloc.p_pp, alloc.beta, ci.h_c4, cfg_.phy);
    CausalityResult caus = check_causality(ci.b_pap_c1, ci.b_sap_c2, alloc, e_s_c2, cfg_.phy);
    OverflowResult over = check_overflow(ci.b_pap_c3, ci.b_sap_c4, cfg_.cap_pap_j,
                                         cfg_.cap_sap_j, alloc, e_re, e_s_c4, cfg_.phy);
    bool c5_ok = eval.pue_min_rate >= cfg_.r_min_slot;
    bool c6_ok = alloc.p_pp <= cfg_.p_max_pap * (1.0 + 1e-12);
    bool c7_ok = alloc.p_sp + alloc.p_ss <= cfg_.p_max_sap * (1.0 + 1e-12);

    r.info.viol[0] = !caus.c1_ok;
    r.info.viol[1] = !caus.c2_ok;
    r.info.viol[2] = !over.c3_ok;
    r.info.viol[3] = !over.c4_ok;
    r.info.viol[4] = !c5_ok;

    double k = cfg_.penalty;
    double pap_pen = -k * (!caus.c1_ok + !over.c3_ok + !c6_ok + !c5_ok);
    double sap_pen = -k * (!caus.c2_ok + !over.c4_ok + !c7_ok + !c5_ok);
    r.reward.r_pap = pap_pen;
    r.reward.r_sap_tot = sap_local_reward(bundle, alloc, sap_pen);

    BatteryStepResult bstep = step_batteries(battery_, alloc, e_re, e_s, cfg_.phy);
    battery_ = bstep.state;
    r.info.depleted = bstep.depleted;

    ++slot_;
    r.done = bstep.depleted || slot_ >= cfg_.slots_per_episode;
    terminated_ = r.done;

    draw_slot_randomness();
    r.obs = make_observation();

    if (trace_) {
        nlohmann::json j{
            {"slot", slot_ - 1},
            {"obs_pap", obs_before.pap},
            {"obs_sap", obs_before.sap},
            {"action_pap", action.pap},
            {"action_sap", action.sap},
            {"p_pp", alloc.p_pp},
            {"p_sp", alloc.p_sp},
            {"p_ss", alloc.p_ss},
            {"beta", alloc.beta},
            {"r_g", r.reward.r_g},
            {"r_pap", r.reward.r_pap},
            {"r_sap_tot", r.reward.r_sap_tot},
            {"secrecy", r.info.secrecy},
            {"energy", r.info.energy},
            {"done", r.done},
        };
        *trace_ << j.dump() << '\n';
    }
    return r;
}

} // namespace crnoma
