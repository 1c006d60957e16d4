#pragma once

#include "crnoma/battery.hpp"
#include "crnoma/geometry.hpp"
#include "crnoma/phy.hpp"
#include "crnoma/uncertainty.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace crnoma {

struct EnvConfig {
    LinkDistances distances;
    double path_loss_exponent = 3.5;
    FadingConfig fading;
    NoiseConfig noise;
    PhyConstants phy;
    UncertaintyModel model;
    double p_max_pap = 3.0;
    double p_max_sap = 3.0;
    double cap_pap_j = 20.0;
    double cap_sap_j = 20.0;
    double init_lo_j = 4.0;
    double init_hi_j = 20.0;
    double harvest_unit_j = 0.5;
    int slots_per_episode = 200;
    double penalty = 1.0;     // magnitude subtracted per violated constraint
    double r_min_slot = 0.5;  // per-slot PUE rate requirement, bit/s/Hz
};

// What each agent is allowed to see: its two channel estimates and its own
// battery reading. No eavesdropper gain, no cross-agent battery.
struct Observation {
    std::array<double, 3> pap{}; // {est PAP->PUE, est PAP->SAP, est B_p}
    std::array<double, 3> sap{}; // {est SAP->PUE, est SAP->SUE, est B_s}
};

// Raw actor outputs in [-1, 1] per agent.
struct AgentAction {
    std::array<double, 2> pap{}; // {p_pp, beta}
    std::array<double, 2> sap{}; // {p_sp, p_ss}
};

struct RewardBundle {
    double r_g = 0.0;       // shared objective term
    double r_pap = 0.0;     // PAP local reward: penalties only
    double r_sap_tot = 0.0; // SAP local reward: SUE secrecy efficiency + penalties
};

struct Transition {
    Observation obs;
    AgentAction act;
    RewardBundle reward;
    Observation next;
    bool done = false;
};

using EpisodeHistory = std::vector<Transition>;

// Per-slot diagnostics for metric aggregation (true-channel quantities).
struct StepInfo {
    PowerAllocation alloc;
    double secrecy = 0.0;       // true secrecy rate, bit/s/Hz
    double energy = 0.0;        // true energy consumption, J
    double pue_rate = 0.0;      // true delivered PUE rate
    double e_s = 0.0;           // RF harvest at the SAP
    double e_re = 0.0;          // renewable arrival at the PAP
    bool viol[5] = {};          // C1..C5 under the active model
    bool depleted = false;
};

// Affine action map: powers scale to [0, P_max]; beta clamps just inside
// (0, 1); SAP powers rescale proportionally when their sum exceeds the cap.
PowerAllocation map_action(const AgentAction& a, double p_max_pap, double p_max_sap);

// SUE secrecy rate per unit of SUE transmit energy share, plus penalties.
double sap_local_reward(const RateBundle& b, const PowerAllocation& a, double penalties);

class Environment {
 public:
    Environment(const EnvConfig& cfg, std::uint64_t seed);

    Observation reset();                  // next episode of the current seed stream
    Observation reset(std::uint64_t seed);

    struct StepResult {
        Observation obs;
        RewardBundle reward;
        bool done = false;
        StepInfo info;
    };
    StepResult step(const AgentAction& action);

    int slot() const { return slot_; }
    bool terminated() const { return terminated_; }
    const EnvConfig& config() const { return cfg_; }
    const LinkGains& nominal_gains() const { return nominal_; }
    BatteryState battery() const { return battery_; }

    // per-field multipliers that bring observations to O(1) for the learners
    std::array<double, 6> observation_scale() const;

    // optional JSONL transition trace (one record per step)
    void set_trace(std::ostream* out) { trace_ = out; }

 private:
    Observation make_observation();
    void draw_slot_randomness();
    double model_objective(const PowerAllocation& alloc, Scenario s, ObjectiveEval* out);

    EnvConfig cfg_;
    LinkGains nominal_;
    LinkGains delta_ch_;
    double delta_b_pap_ = 0.0;
    double delta_b_sap_ = 0.0;
    std::uint64_t base_seed_ = 0;
    std::uint64_t episode_ = 0;
    Rng rng_;
    Rng mc_rng_; // stochastic-objective sampling stream, kept separate so the
                 // trajectory does not depend on n_mc
    ChannelSet channels_;
    BatteryState battery_;
    double b_pap_est_ = 0.0;
    double b_sap_est_ = 0.0;
    int slot_ = 0;
    bool terminated_ = true;
    std::ostream* trace_ = nullptr;
};

} // namespace crnoma
