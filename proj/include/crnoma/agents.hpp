#pragma once

#include "crnoma/env.hpp"
#include "crnoma/nn.hpp"
#include "crnoma/replay.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace crnoma {

enum class AgentKind { uniform_random, ddpg, maddpg, masrddpg, rdpg };

AgentKind parse_agent_kind(const std::string& s);
std::string to_string(AgentKind kind);

struct AgentConfig {
    double gamma = 0.99;
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double tau = 0.001;
    int batch_size = 64;
    std::size_t buffer_capacity = 1000000;
    std::size_t episode_capacity = 10000;
    int hidden_width = 64;
    int hidden_layers = 3;
    int updates_per_episode = 32;
    int warmup_transitions = 1000;
    int unroll_length = 8;          // recurrent truncation window
    int episodes_per_update = 4;    // recurrent minibatch, in episodes
    int rdpg_updates_per_episode = 2;
    int local_update_period = 1;    // episodes between local-critic updates
    double local_weight = 1.0;      // local-critic share in the actor ascent
    double noise_theta = 0.15;
    double noise_sigma0 = 0.2;
    double noise_sigma_final = 0.05;
};

// Mean-reverting exploration noise; sigma is set per episode by the agent.
struct OuNoise {
    int dim = 0;
    double theta = 0.15;
    double sigma = 0.2;
    std::vector<double> x;

    void reset() { x.assign(static_cast<std::size_t>(dim), 0.0); }
    void sample(Rng& rng, double* out) {
        if (x.size() != static_cast<std::size_t>(dim)) reset();
        for (int i = 0; i < dim; ++i) {
            x[i] += theta * (0.0 - x[i]) + sigma * rng.gaussian();
            out[i] = x[i];
        }
    }
};

double noise_sigma_at(const AgentConfig& cfg, double progress);

// One stored step, observations already normalized to O(1).
struct JointTransition {
    std::array<double, 3> o_pap{}, o_sap{};
    std::array<double, 2> a_pap{}, a_sap{};
    double r_g = 0.0, r_pap = 0.0, r_sap = 0.0;
    std::array<double, 3> n_pap{}, n_sap{};
    bool done = false;
};

using JointEpisode = std::vector<JointTransition>;

struct EpisodeMetrics {
    int episode = 0;
    double ret_g = 0.0; // summed shared reward
    double ret_pap = 0.0;
    double ret_sap = 0.0;
    double avg_secrecy = 0.0; // per-slot mean over the fixed horizon
    double energy_j = 0.0;
    double pfee = 0.0;
    std::array<long, 5> violations{};
    int slots = 0; // slots actually executed
};

class Agent {
 public:
    virtual ~Agent() = default;
    virtual AgentAction act(const Observation& obs, bool explore) = 0;
    virtual void begin_episode(double progress) = 0;
    virtual void observe(const Observation& obs, const AgentAction& action,
                         const RewardBundle& reward, const Observation& next, bool done) = 0;
    virtual void end_episode() = 0;
    virtual std::vector<std::pair<std::string, std::vector<double>*>> named_params() = 0;
    virtual AgentKind kind() const = 0;
};

// Single-agent deterministic policy-gradient updater, generic over the
// network type so the same arithmetic drives flat and recurrent parameters.
class DdpgCore {
 public:
    struct Flat {
        int n = 0;
        int obs_dim = 0, act_dim = 0;
        std::vector<double> obs, act, next; // row-major
        std::vector<double> r;
        std::vector<unsigned char> done;
    };

    DdpgCore(std::unique_ptr<Net> actor, std::unique_ptr<Net> critic, const AgentConfig& cfg);

    void policy(const double* obs, double* action) const { actor_->forward(obs, action); }
    void update(const Flat& batch);
    void update_critic(const Flat& batch);
    void update_actor(const Flat& batch);
    void soft_targets();
    double critic_loss(const Flat& batch); // half mean squared Bellman error

    Net& actor() { return *actor_; }
    Net& critic() { return *critic_; }
    Net& actor_target() { return *actor_t_; }
    Net& critic_target() { return *critic_t_; }

 private:
    std::vector<double> targets(const Flat& batch);

    std::unique_ptr<Net> actor_, critic_, actor_t_, critic_t_;
    Adam actor_opt_, critic_opt_;
    double gamma_, tau_;
};

class UniformRandomAgent final : public Agent {
 public:
    explicit UniformRandomAgent(std::uint64_t seed) : rng_(seed) {}

    AgentAction act(const Observation&, bool) override;
    void begin_episode(double) override {}
    void observe(const Observation&, const AgentAction&, const RewardBundle&,
                 const Observation&, bool) override {}
    void end_episode() override {}
    std::vector<std::pair<std::string, std::vector<double>*>> named_params() override {
        return {};
    }
    AgentKind kind() const override { return AgentKind::uniform_random; }

 private:
    Rng rng_;
};

// One agent over the concatenated observation, controlling all four raw dims.
class DdpgAgent final : public Agent {
 public:
    DdpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
              std::uint64_t seed);

    AgentAction act(const Observation& obs, bool explore) override;
    void begin_episode(double progress) override;
    void observe(const Observation& obs, const AgentAction& action, const RewardBundle& reward,
                 const Observation& next, bool done) override;
    void end_episode() override;
    std::vector<std::pair<std::string, std::vector<double>*>> named_params() override;
    AgentKind kind() const override { return AgentKind::ddpg; }

    void update_from_batch(const std::vector<const JointTransition*>& batch);
    double critic_loss_on(const std::vector<const JointTransition*>& batch);
    DdpgCore& core() { return core_; }
    const RingBuffer<JointTransition>& buffer() const { return buffer_; }

    static DdpgCore::Flat flat_joint(const std::vector<const JointTransition*>& batch);

 private:
    AgentConfig cfg_;
    std::array<double, 6> scale_;
    DdpgCore core_;
    RingBuffer<JointTransition> buffer_;
    OuNoise noise_;
    Rng rng_;
};

// Per-agent actors with one centralized critic per agent, both regressed on
// the shared reward; other-agent actions come from the batch in the ascent.
class MaddpgAgent final : public Agent {
 public:
    MaddpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
                std::uint64_t seed);

    AgentAction act(const Observation& obs, bool explore) override;
    void begin_episode(double progress) override;
    void observe(const Observation& obs, const AgentAction& action, const RewardBundle& reward,
                 const Observation& next, bool done) override;
    void end_episode() override;
    std::vector<std::pair<std::string, std::vector<double>*>> named_params() override;
    AgentKind kind() const override { return AgentKind::maddpg; }

    void update_from_batch(const std::vector<const JointTransition*>& batch);
    void update_critics(const std::vector<const JointTransition*>& batch);
    void update_actors(const std::vector<const JointTransition*>& batch);
    void soft_targets();
    double critic_loss_on(int agent, const std::vector<const JointTransition*>& batch);

    Net& actor(int i) { return *actors_[i]; }
    Net& actor_target(int i) { return *actor_ts_[i]; }
    Net& critic(int i) { return *critics_[i]; }
    Net& critic_target(int i) { return *critic_ts_[i]; }
    const RingBuffer<JointTransition>& buffer() const { return buffer_; }

 private:
    AgentConfig cfg_;
    std::array<double, 6> scale_;
    std::array<std::unique_ptr<Net>, 2> actors_, actor_ts_, critics_, critic_ts_;
    std::array<Adam, 2> actor_opts_, critic_opts_;
    RingBuffer<JointTransition> buffer_;
    OuNoise noise_;
    Rng rng_;
};

// Shared-reward global critic plus per-agent local critics on the
// decomposed rewards; actors ascend the global value plus a weighted local
// value. Local networks update only every local_update_period episodes.
class MasrddpgAgent final : public Agent {
 public:
    MasrddpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
                  std::uint64_t seed);

    AgentAction act(const Observation& obs, bool explore) override;
    void begin_episode(double progress) override;
    void observe(const Observation& obs, const AgentAction& action, const RewardBundle& reward,
                 const Observation& next, bool done) override;
    void end_episode() override;
    std::vector<std::pair<std::string, std::vector<double>*>> named_params() override;
    AgentKind kind() const override { return AgentKind::masrddpg; }

    void update_from_batch(const std::vector<const JointTransition*>& batch, bool update_locals);
    void update_global_critic(const std::vector<const JointTransition*>& batch);
    void update_local_critics(const std::vector<const JointTransition*>& batch);
    void update_actors(const std::vector<const JointTransition*>& batch);
    void soft_targets(bool include_locals);
    double global_critic_loss(const std::vector<const JointTransition*>& batch);

    Net& actor(int i) { return *actors_[i]; }
    Net& actor_target(int i) { return *actor_ts_[i]; }
    Net& global_critic() { return *global_; }
    Net& global_critic_target() { return *global_t_; }
    Net& local_critic(int i) { return *locals_[i]; }
    Net& local_critic_target(int i) { return *local_ts_[i]; }
    const RingBuffer<JointTransition>& buffer() const { return buffer_; }

 private:
    AgentConfig cfg_;
    std::array<double, 6> scale_;
    std::array<std::unique_ptr<Net>, 2> actors_, actor_ts_;
    std::unique_ptr<Net> global_, global_t_;
    std::array<std::unique_ptr<Net>, 2> locals_, local_ts_;
    std::array<Adam, 2> actor_opts_, local_opts_;
    Adam global_opt_;
    RingBuffer<JointTransition> buffer_;
    OuNoise noise_;
    Rng rng_;
    long episode_count_ = 0;
};

// Recurrent actor and critic over histories (o_1, a_1, ..., o_t); training
// truncates backpropagation to fixed windows restarted from a zero state,
// with bootstrap targets evaluated over the one-step-shifted window.
class RdpgAgent final : public Agent {
 public:
    RdpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
              std::uint64_t seed);

    AgentAction act(const Observation& obs, bool explore) override;
    void begin_episode(double progress) override;
    void observe(const Observation& obs, const AgentAction& action, const RewardBundle& reward,
                 const Observation& next, bool done) override;
    void end_episode() override;
    std::vector<std::pair<std::string, std::vector<double>*>> named_params() override;
    AgentKind kind() const override { return AgentKind::rdpg; }

    void update_from_episodes(const std::vector<const JointEpisode*>& episodes);
    void update_critic(const std::vector<const JointEpisode*>& episodes);
    void update_actor(const std::vector<const JointEpisode*>& episodes);
    void soft_targets();
    double critic_loss(const std::vector<const JointEpisode*>& episodes);

    GruNet& actor_net() { return actor_; }
    GruNet& critic_net() { return critic_; }
    GruNet& actor_target_net() { return actor_t_; }
    GruNet& critic_target_net() { return critic_t_; }
    const RingBuffer<JointEpisode>& buffer() const { return ebuf_; }

 private:
    static constexpr int kObs = 6, kAct = 4, kCell = kObs + kAct;

    void history_input(const JointEpisode& ep, int t, double* x) const;
    void next_history_input(const JointEpisode& ep, int t, double* x) const;

    AgentConfig cfg_;
    std::array<double, 6> scale_;
    GruNet actor_, critic_, actor_t_, critic_t_;
    Adam actor_opt_, critic_opt_;
    RingBuffer<JointEpisode> ebuf_;
    JointEpisode current_;
    std::vector<double> h_; // rollout hidden state
    std::array<double, 4> a_prev_{};
    OuNoise noise_;
    Rng rng_;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg,
                                  const std::array<double, 6>& obs_scale, std::uint64_t seed);

struct TrainResult {
    std::vector<EpisodeMetrics> trace;
};

// Full loop: act, step, store, update after each episode. Throws on
// non-finite parameters.
TrainResult train_agent(Environment& env, Agent& agent, int episodes);

} // namespace crnoma
