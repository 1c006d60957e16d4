#include "crnoma/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace crnoma {

namespace {

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

std::array<double, 3> scaled_pap(const Observation& o, const std::array<double, 6>& s) {
    return {o.pap[0] * s[0], o.pap[1] * s[1], o.pap[2] * s[2]};
}

std::array<double, 3> scaled_sap(const Observation& o, const std::array<double, 6>& s) {
    return {o.sap[0] * s[3], o.sap[1] * s[4], o.sap[2] * s[5]};
}

JointTransition make_stored(const Observation& obs, const AgentAction& a,
                            const RewardBundle& r, const Observation& next, bool done,
                            const std::array<double, 6>& s) {
    JointTransition t;
    t.o_pap = scaled_pap(obs, s);
    t.o_sap = scaled_sap(obs, s);
    t.a_pap = a.pap;
    t.a_sap = a.sap;
    t.r_g = r.r_g;
    t.r_pap = r.r_pap;
    t.r_sap = r.r_sap_tot;
    t.n_pap = scaled_pap(next, s);
    t.n_sap = scaled_sap(next, s);
    t.done = done;
    return t;
}

// column views of a sampled batch, row-major per field
struct Cols {
    int n = 0;
    std::vector<double> o_pap, o_sap, a_pap, a_sap, n_pap, n_sap;
    std::vector<double> r_g, r_pap, r_sap;
    std::vector<unsigned char> done;
};

Cols split_batch(const std::vector<const JointTransition*>& batch) {
    Cols c;
    c.n = static_cast<int>(batch.size());
    c.o_pap.reserve(batch.size() * 3);
    c.o_sap.reserve(batch.size() * 3);
    c.n_pap.reserve(batch.size() * 3);
    c.n_sap.reserve(batch.size() * 3);
    c.a_pap.reserve(batch.size() * 2);
    c.a_sap.reserve(batch.size() * 2);
    for (const JointTransition* t : batch) {
        c.o_pap.insert(c.o_pap.end(), t->o_pap.begin(), t->o_pap.end());
        c.o_sap.insert(c.o_sap.end(), t->o_sap.begin(), t->o_sap.end());
        c.a_pap.insert(c.a_pap.end(), t->a_pap.begin(), t->a_pap.end());
        c.a_sap.insert(c.a_sap.end(), t->a_sap.begin(), t->a_sap.end());
        c.n_pap.insert(c.n_pap.end(), t->n_pap.begin(), t->n_pap.end());
        c.n_sap.insert(c.n_sap.end(), t->n_sap.begin(), t->n_sap.end());
        c.r_g.push_back(t->r_g);
        c.r_pap.push_back(t->r_pap);
        c.r_sap.push_back(t->r_sap);
        c.done.push_back(t->done ? 1 : 0);
    }
    return c;
}

// out row = concatenation of the listed blocks' rows
std::vector<double> hcat(int n, std::initializer_list<std::pair<const std::vector<double>*, int>> parts) {
    int width = 0;
    for (const auto& p : parts) width += p.second;
    std::vector<double> out(static_cast<std::size_t>(n) * width);
    for (int r = 0; r < n; ++r) {
        double* dst = out.data() + static_cast<std::size_t>(r) * width;
        for (const auto& p : parts) {
            const double* src = p.first->data() + static_cast<std::size_t>(r) * p.second;
            std::memcpy(dst, src, sizeof(double) * static_cast<std::size_t>(p.second));
            dst += p.second;
        }
    }
    return out;
}

// rows[:, off:off+w]
std::vector<double> slice_cols(const std::vector<double>& rows, int n, int width, int off, int w) {
    std::vector<double> out(static_cast<std::size_t>(n) * w);
    for (int r = 0; r < n; ++r)
        std::memcpy(out.data() + static_cast<std::size_t>(r) * w,
                    rows.data() + static_cast<std::size_t>(r) * width + off,
                    sizeof(double) * static_cast<std::size_t>(w));
    return out;
}

MlpSpec actor_spec(const AgentConfig& cfg, int in, int out) {
    MlpSpec s;
    s.in = in;
    s.out = out;
    s.out_act = OutAct::tanh_out;
    s.hidden.assign(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_width);
    return s;
}

MlpSpec critic_spec(const AgentConfig& cfg, int in) {
    MlpSpec s;
    s.in = in;
    s.out = 1;
    s.out_act = OutAct::identity;
    s.hidden.assign(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_width);
    return s;
}

std::unique_ptr<Net> make_mlp(const MlpSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    return std::make_unique<Mlp>(spec, rng);
}

GruNet make_gru(const GruNet::Spec& spec, std::uint64_t seed) {
    Rng rng(seed);
    return GruNet(spec, rng);
}

GruNet::Spec gru_actor_spec(const AgentConfig& cfg, int cell_in, int act_dim) {
    GruNet::Spec s;
    s.in = cell_in;
    s.hidden = cfg.hidden_width;
    s.extra = 0;
    s.head_hidden = cfg.hidden_width;
    s.out = act_dim;
    s.out_act = OutAct::tanh_out;
    return s;
}

GruNet::Spec gru_critic_spec(const AgentConfig& cfg, int cell_in, int act_dim) {
    GruNet::Spec s;
    s.in = cell_in;
    s.hidden = cfg.hidden_width;
    s.extra = act_dim;
    s.head_hidden = cfg.hidden_width;
    s.out = 1;
    s.out_act = OutAct::identity;
    return s;
}

} // namespace

AgentKind parse_agent_kind(const std::string& s) {
    if (s == "random") return AgentKind::uniform_random;
    if (s == "ddpg") return AgentKind::ddpg;
    if (s == "maddpg") return AgentKind::maddpg;
    if (s == "masrddpg") return AgentKind::masrddpg;
    if (s == "rdpg") return AgentKind::rdpg;
    throw std::invalid_argument("unknown agent kind: " + s);
}

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::uniform_random: return "random";
        case AgentKind::ddpg: return "ddpg";
        case AgentKind::maddpg: return "maddpg";
        case AgentKind::masrddpg: return "masrddpg";
        case AgentKind::rdpg: return "rdpg";
    }
    return "unknown";
}

double noise_sigma_at(const AgentConfig& cfg, double progress) {
    double p = std::clamp(progress, 0.0, 1.0);
    if (p >= 0.5) return cfg.noise_sigma_final;
    return cfg.noise_sigma0 + (cfg.noise_sigma_final - cfg.noise_sigma0) * (p / 0.5);
}

DdpgCore::DdpgCore(std::unique_ptr<Net> actor, std::unique_ptr<Net> critic,
                   const AgentConfig& cfg)
    : actor_(std::move(actor)), critic_(std::move(critic)), gamma_(cfg.gamma), tau_(cfg.tau) {
    if (critic_->in() != actor_->in() + actor_->out() || critic_->out() != 1)
        throw std::invalid_argument("DdpgCore: critic shape must be [obs, action] -> scalar");
    actor_t_ = actor_->clone();
    critic_t_ = critic_->clone();
    actor_opt_.lr = cfg.actor_lr;
    critic_opt_.lr = cfg.critic_lr;
}

std::vector<double> DdpgCore::targets(const Flat& f) {
    const int B = f.n, od = f.obs_dim, ad = f.act_dim;
    std::vector<double> a_next;
    actor_t_->train_forward(f.next, B, a_next);
    std::vector<double> cin = hcat(B, {{&f.next, od}, {&a_next, ad}});
    std::vector<double> qn;
    critic_t_->train_forward(cin, B, qn);
    std::vector<double> y(static_cast<std::size_t>(B));
    for (int r = 0; r < B; ++r) y[r] = f.r[r] + (f.done[r] ? 0.0 : gamma_ * qn[r]);
    return y;
}

void DdpgCore::update_critic(const Flat& f) {
    const int B = f.n;
    std::vector<double> y = targets(f);
    std::vector<double> cin = hcat(B, {{&f.obs, f.obs_dim}, {&f.act, f.act_dim}});
    std::vector<double> q;
    critic_->train_forward(cin, B, q);
    std::vector<double> dy(static_cast<std::size_t>(B));
    for (int r = 0; r < B; ++r) dy[r] = (q[r] - y[r]) / B;
    std::vector<double> gw;
    critic_->train_backward(dy, gw, nullptr);
    critic_opt_.step(critic_->w(), gw);
}

void DdpgCore::update_actor(const Flat& f) {
    const int B = f.n, od = f.obs_dim, ad = f.act_dim;
    std::vector<double> pi;
    actor_->train_forward(f.obs, B, pi);
    std::vector<double> cin = hcat(B, {{&f.obs, od}, {&pi, ad}});
    std::vector<double> q;
    critic_->train_forward(cin, B, q);
    std::vector<double> dy(static_cast<std::size_t>(B), -1.0 / B);
    std::vector<double> gw_scratch, dx;
    critic_->train_backward(dy, gw_scratch, &dx);
    std::vector<double> da = slice_cols(dx, B, od + ad, od, ad);
    std::vector<double> ga;
    actor_->train_backward(da, ga, nullptr);
    actor_opt_.step(actor_->w(), ga);
}

void DdpgCore::soft_targets() {
    soft_update(actor_t_->w(), actor_->w(), tau_);
    soft_update(critic_t_->w(), critic_->w(), tau_);
}

void DdpgCore::update(const Flat& f) {
    update_critic(f);
    update_actor(f);
    soft_targets();
}

double DdpgCore::critic_loss(const Flat& f) {
    const int B = f.n;
    std::vector<double> y = targets(f);
    std::vector<double> cin = hcat(B, {{&f.obs, f.obs_dim}, {&f.act, f.act_dim}});
    std::vector<double> q;
    critic_->train_forward(cin, B, q);
    double loss = 0.0;
    for (int r = 0; r < B; ++r) {
        double e = q[r] - y[r];
        loss += 0.5 * e * e;
    }
    return loss / B;
}

AgentAction UniformRandomAgent::act(const Observation&, bool) {
    AgentAction a;
    for (double& v : a.pap) v = rng_.uniform(-1.0, 1.0);
    for (double& v : a.sap) v = rng_.uniform(-1.0, 1.0);
    return a;
}

DdpgAgent::DdpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
                     std::uint64_t seed)
    : cfg_(cfg), scale_(obs_scale),
      core_(make_mlp(actor_spec(cfg, 6, 4), substream_seed(seed, 0)),
            make_mlp(critic_spec(cfg, 10), substream_seed(seed, 2)), cfg),
      buffer_(cfg.buffer_capacity), rng_(substream_seed(seed, 100)) {
    noise_.dim = 4;
    noise_.theta = cfg.noise_theta;
    noise_.sigma = cfg.noise_sigma0;
    noise_.reset();
}

AgentAction DdpgAgent::act(const Observation& obs, bool explore) {
    std::array<double, 3> op = scaled_pap(obs, scale_), os = scaled_sap(obs, scale_);
    double x[6] = {op[0], op[1], op[2], os[0], os[1], os[2]};
    double a[4];
    core_.policy(x, a);
    if (explore) {
        double n[4];
        noise_.sample(rng_, n);
        for (int i = 0; i < 4; ++i) a[i] = clamp1(a[i] + n[i]);
    }
    AgentAction out;
    out.pap = {a[0], a[1]};
    out.sap = {a[2], a[3]};
    return out;
}

void DdpgAgent::begin_episode(double progress) {
    noise_.sigma = noise_sigma_at(cfg_, progress);
    noise_.reset();
}

void DdpgAgent::observe(const Observation& obs, const AgentAction& action,
                        const RewardBundle& reward, const Observation& next, bool done) {
    buffer_.push(make_stored(obs, action, reward, next, done, scale_));
}

void DdpgAgent::end_episode() {
    std::size_t need = std::max<std::size_t>(static_cast<std::size_t>(cfg_.batch_size),
                                             static_cast<std::size_t>(cfg_.warmup_transitions));
    if (buffer_.size() < need) return;
    for (int u = 0; u < cfg_.updates_per_episode; ++u)
        update_from_batch(buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), rng_));
}

void DdpgAgent::update_from_batch(const std::vector<const JointTransition*>& batch) {
    core_.update(flat_joint(batch));
}

double DdpgAgent::critic_loss_on(const std::vector<const JointTransition*>& batch) {
    return core_.critic_loss(flat_joint(batch));
}

DdpgCore::Flat DdpgAgent::flat_joint(const std::vector<const JointTransition*>& batch) {
    DdpgCore::Flat f;
    f.n = static_cast<int>(batch.size());
    f.obs_dim = 6;
    f.act_dim = 4;
    f.obs.reserve(batch.size() * 6);
    f.act.reserve(batch.size() * 4);
    f.next.reserve(batch.size() * 6);
    for (const JointTransition* t : batch) {
        f.obs.insert(f.obs.end(), t->o_pap.begin(), t->o_pap.end());
        f.obs.insert(f.obs.end(), t->o_sap.begin(), t->o_sap.end());
        f.act.insert(f.act.end(), t->a_pap.begin(), t->a_pap.end());
        f.act.insert(f.act.end(), t->a_sap.begin(), t->a_sap.end());
        f.next.insert(f.next.end(), t->n_pap.begin(), t->n_pap.end());
        f.next.insert(f.next.end(), t->n_sap.begin(), t->n_sap.end());
        f.r.push_back(t->r_g);
        f.done.push_back(t->done ? 1 : 0);
    }
    return f;
}

std::vector<std::pair<std::string, std::vector<double>*>> DdpgAgent::named_params() {
    return {{"actor", &core_.actor().w()},
            {"critic", &core_.critic().w()},
            {"actor_target", &core_.actor_target().w()},
            {"critic_target", &core_.critic_target().w()}};
}

MaddpgAgent::MaddpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
                         std::uint64_t seed)
    : cfg_(cfg), scale_(obs_scale), buffer_(cfg.buffer_capacity),
      rng_(substream_seed(seed, 100)) {
    for (int i = 0; i < 2; ++i) {
        actors_[i] = make_mlp(actor_spec(cfg, 3, 2), substream_seed(seed, static_cast<std::uint64_t>(i)));
        critics_[i] = make_mlp(critic_spec(cfg, 10), substream_seed(seed, 2 + static_cast<std::uint64_t>(i)));
        actor_ts_[i] = actors_[i]->clone();
        critic_ts_[i] = critics_[i]->clone();
        actor_opts_[i].lr = cfg.actor_lr;
        critic_opts_[i].lr = cfg.critic_lr;
    }
    noise_.dim = 4;
    noise_.theta = cfg.noise_theta;
    noise_.sigma = cfg.noise_sigma0;
    noise_.reset();
}

AgentAction MaddpgAgent::act(const Observation& obs, bool explore) {
    std::array<double, 3> op = scaled_pap(obs, scale_), os = scaled_sap(obs, scale_);
    double a[4];
    actors_[0]->forward(op.data(), a);
    actors_[1]->forward(os.data(), a + 2);
    if (explore) {
        double n[4];
        noise_.sample(rng_, n);
        for (int i = 0; i < 4; ++i) a[i] = clamp1(a[i] + n[i]);
    }
    AgentAction out;
    out.pap = {a[0], a[1]};
    out.sap = {a[2], a[3]};
    return out;
}

void MaddpgAgent::begin_episode(double progress) {
    noise_.sigma = noise_sigma_at(cfg_, progress);
    noise_.reset();
}

void MaddpgAgent::observe(const Observation& obs, const AgentAction& action,
                          const RewardBundle& reward, const Observation& next, bool done) {
    buffer_.push(make_stored(obs, action, reward, next, done, scale_));
}

void MaddpgAgent::end_episode() {
    std::size_t need = std::max<std::size_t>(static_cast<std::size_t>(cfg_.batch_size),
                                             static_cast<std::size_t>(cfg_.warmup_transitions));
    if (buffer_.size() < need) return;
    for (int u = 0; u < cfg_.updates_per_episode; ++u)
        update_from_batch(buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), rng_));
}

void MaddpgAgent::update_from_batch(const std::vector<const JointTransition*>& batch) {
    update_critics(batch);
    update_actors(batch);
    soft_targets();
}

void MaddpgAgent::update_critics(const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    std::vector<double> ap, as;
    actor_ts_[0]->train_forward(c.n_pap, B, ap);
    actor_ts_[1]->train_forward(c.n_sap, B, as);
    std::vector<double> tin = hcat(B, {{&c.n_pap, 3}, {&c.n_sap, 3}, {&ap, 2}, {&as, 2}});
    std::vector<double> cin = hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&c.a_pap, 2}, {&c.a_sap, 2}});
    for (int i = 0; i < 2; ++i) {
        std::vector<double> qn;
        critic_ts_[i]->train_forward(tin, B, qn);
        std::vector<double> q;
        critics_[i]->train_forward(cin, B, q);
        std::vector<double> dy(static_cast<std::size_t>(B));
        for (int r = 0; r < B; ++r) {
            double y = c.r_g[r] + (c.done[r] ? 0.0 : cfg_.gamma * qn[r]);
            dy[r] = (q[r] - y) / B;
        }
        std::vector<double> gw;
        critics_[i]->train_backward(dy, gw, nullptr);
        critic_opts_[i].step(critics_[i]->w(), gw);
    }
}

void MaddpgAgent::update_actors(const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    for (int i = 0; i < 2; ++i) {
        const std::vector<double>& obs_i = i == 0 ? c.o_pap : c.o_sap;
        std::vector<double> pi;
        actors_[i]->train_forward(obs_i, B, pi);
        std::vector<double> cin =
            i == 0 ? hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&pi, 2}, {&c.a_sap, 2}})
                   : hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&c.a_pap, 2}, {&pi, 2}});
        std::vector<double> q;
        critics_[i]->train_forward(cin, B, q);
        std::vector<double> dy(static_cast<std::size_t>(B), -1.0 / B);
        std::vector<double> gw_scratch, dx;
        critics_[i]->train_backward(dy, gw_scratch, &dx);
        std::vector<double> da = slice_cols(dx, B, 10, 6 + 2 * i, 2);
        std::vector<double> ga;
        actors_[i]->train_backward(da, ga, nullptr);
        actor_opts_[i].step(actors_[i]->w(), ga);
    }
}

void MaddpgAgent::soft_targets() {
    for (int i = 0; i < 2; ++i) {
        soft_update(actor_ts_[i]->w(), actors_[i]->w(), cfg_.tau);
        soft_update(critic_ts_[i]->w(), critics_[i]->w(), cfg_.tau);
    }
}

double MaddpgAgent::critic_loss_on(int agent, const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    std::vector<double> ap, as;
    actor_ts_[0]->train_forward(c.n_pap, B, ap);
    actor_ts_[1]->train_forward(c.n_sap, B, as);
    std::vector<double> tin = hcat(B, {{&c.n_pap, 3}, {&c.n_sap, 3}, {&ap, 2}, {&as, 2}});
    std::vector<double> qn;
    critic_ts_[agent]->train_forward(tin, B, qn);
    std::vector<double> cin = hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&c.a_pap, 2}, {&c.a_sap, 2}});
    std::vector<double> q;
    critics_[agent]->train_forward(cin, B, q);
    double loss = 0.0;
    for (int r = 0; r < B; ++r) {
        double y = c.r_g[r] + (c.done[r] ? 0.0 : cfg_.gamma * qn[r]);
        double e = q[r] - y;
        loss += 0.5 * e * e;
    }
    return loss / B;
}

std::vector<std::pair<std::string, std::vector<double>*>> MaddpgAgent::named_params() {
    return {{"actor_pap", &actors_[0]->w()},           {"actor_sap", &actors_[1]->w()},
            {"critic_pap", &critics_[0]->w()},         {"critic_sap", &critics_[1]->w()},
            {"actor_target_pap", &actor_ts_[0]->w()},  {"actor_target_sap", &actor_ts_[1]->w()},
            {"critic_target_pap", &critic_ts_[0]->w()}, {"critic_target_sap", &critic_ts_[1]->w()}};
}

MasrddpgAgent::MasrddpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
                             std::uint64_t seed)
    : cfg_(cfg), scale_(obs_scale), buffer_(cfg.buffer_capacity),
      rng_(substream_seed(seed, 100)) {
    for (int i = 0; i < 2; ++i) {
        actors_[i] = make_mlp(actor_spec(cfg, 3, 2), substream_seed(seed, static_cast<std::uint64_t>(i)));
        locals_[i] = make_mlp(critic_spec(cfg, 5), substream_seed(seed, 4 + static_cast<std::uint64_t>(i)));
        actor_ts_[i] = actors_[i]->clone();
        local_ts_[i] = locals_[i]->clone();
        actor_opts_[i].lr = cfg.actor_lr;
        local_opts_[i].lr = cfg.critic_lr;
    }
    global_ = make_mlp(critic_spec(cfg, 10), substream_seed(seed, 2));
    global_t_ = global_->clone();
    global_opt_.lr = cfg.critic_lr;
    noise_.dim = 4;
    noise_.theta = cfg.noise_theta;
    noise_.sigma = cfg.noise_sigma0;
    noise_.reset();
}

AgentAction MasrddpgAgent::act(const Observation& obs, bool explore) {
    std::array<double, 3> op = scaled_pap(obs, scale_), os = scaled_sap(obs, scale_);
    double a[4];
    actors_[0]->forward(op.data(), a);
    actors_[1]->forward(os.data(), a + 2);
    if (explore) {
        double n[4];
        noise_.sample(rng_, n);
        for (int i = 0; i < 4; ++i) a[i] = clamp1(a[i] + n[i]);
    }
    AgentAction out;
    out.pap = {a[0], a[1]};
    out.sap = {a[2], a[3]};
    return out;
}

void MasrddpgAgent::begin_episode(double progress) {
    noise_.sigma = noise_sigma_at(cfg_, progress);
    noise_.reset();
}

void MasrddpgAgent::observe(const Observation& obs, const AgentAction& action,
                            const RewardBundle& reward, const Observation& next, bool done) {
    buffer_.push(make_stored(obs, action, reward, next, done, scale_));
}

void MasrddpgAgent::end_episode() {
    ++episode_count_;
    std::size_t need = std::max<std::size_t>(static_cast<std::size_t>(cfg_.batch_size),
                                             static_cast<std::size_t>(cfg_.warmup_transitions));
    if (buffer_.size() < need) return;
    bool locals = cfg_.local_update_period > 0 && episode_count_ % cfg_.local_update_period == 0;
    for (int u = 0; u < cfg_.updates_per_episode; ++u)
        update_from_batch(buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), rng_), locals);
}

void MasrddpgAgent::update_from_batch(const std::vector<const JointTransition*>& batch,
                                      bool update_locals) {
    update_global_critic(batch);
    if (update_locals) update_local_critics(batch);
    update_actors(batch);
    soft_targets(update_locals);
}

void MasrddpgAgent::update_global_critic(const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    std::vector<double> ap, as;
    actor_ts_[0]->train_forward(c.n_pap, B, ap);
    actor_ts_[1]->train_forward(c.n_sap, B, as);
    std::vector<double> tin = hcat(B, {{&c.n_pap, 3}, {&c.n_sap, 3}, {&ap, 2}, {&as, 2}});
    std::vector<double> qn;
    global_t_->train_forward(tin, B, qn);
    std::vector<double> cin = hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&c.a_pap, 2}, {&c.a_sap, 2}});
    std::vector<double> q;
    global_->train_forward(cin, B, q);
    std::vector<double> dy(static_cast<std::size_t>(B));
    for (int r = 0; r < B; ++r) {
        double y = c.r_g[r] + (c.done[r] ? 0.0 : cfg_.gamma * qn[r]);
        dy[r] = (q[r] - y) / B;
    }
    std::vector<double> gw;
    global_->train_backward(dy, gw, nullptr);
    global_opt_.step(global_->w(), gw);
}

void MasrddpgAgent::update_local_critics(const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    for (int i = 0; i < 2; ++i) {
        const std::vector<double>& n_i = i == 0 ? c.n_pap : c.n_sap;
        const std::vector<double>& o_i = i == 0 ? c.o_pap : c.o_sap;
        const std::vector<double>& a_i = i == 0 ? c.a_pap : c.a_sap;
        const std::vector<double>& r_i = i == 0 ? c.r_pap : c.r_sap;
        std::vector<double> an;
        actor_ts_[i]->train_forward(n_i, B, an);
        std::vector<double> tin = hcat(B, {{&n_i, 3}, {&an, 2}});
        std::vector<double> qn;
        local_ts_[i]->train_forward(tin, B, qn);
        std::vector<double> cin = hcat(B, {{&o_i, 3}, {&a_i, 2}});
        std::vector<double> q;
        locals_[i]->train_forward(cin, B, q);
        std::vector<double> dy(static_cast<std::size_t>(B));
        for (int r = 0; r < B; ++r) {
            double y = r_i[r] + (c.done[r] ? 0.0 : cfg_.gamma * qn[r]);
            dy[r] = (q[r] - y) / B;
        }
        std::vector<double> gw;
        locals_[i]->train_backward(dy, gw, nullptr);
        local_opts_[i].step(locals_[i]->w(), gw);
    }
}

void MasrddpgAgent::update_actors(const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    for (int i = 0; i < 2; ++i) {
        const std::vector<double>& obs_i = i == 0 ? c.o_pap : c.o_sap;
        std::vector<double> pi;
        actors_[i]->train_forward(obs_i, B, pi);
        std::vector<double> gin =
            i == 0 ? hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&pi, 2}, {&c.a_sap, 2}})
                   : hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&c.a_pap, 2}, {&pi, 2}});
        std::vector<double> q;
        global_->train_forward(gin, B, q);
        std::vector<double> dy(static_cast<std::size_t>(B), -1.0 / B);
        std::vector<double> gw_scratch, dxg;
        global_->train_backward(dy, gw_scratch, &dxg);
        std::vector<double> da = slice_cols(dxg, B, 10, 6 + 2 * i, 2);
        if (cfg_.local_weight != 0.0) {
            std::vector<double> lin = hcat(B, {{&obs_i, 3}, {&pi, 2}});
            std::vector<double> ql;
            locals_[i]->train_forward(lin, B, ql);
            std::vector<double> dyl(static_cast<std::size_t>(B), -cfg_.local_weight / B);
            std::vector<double> gl_scratch, dxl;
            locals_[i]->train_backward(dyl, gl_scratch, &dxl);
            std::vector<double> dal = slice_cols(dxl, B, 5, 3, 2);
            for (std::size_t k = 0; k < da.size(); ++k) da[k] += dal[k];
        }
        std::vector<double> ga;
        actors_[i]->train_backward(da, ga, nullptr);
        actor_opts_[i].step(actors_[i]->w(), ga);
    }
}

void MasrddpgAgent::soft_targets(bool include_locals) {
    for (int i = 0; i < 2; ++i) soft_update(actor_ts_[i]->w(), actors_[i]->w(), cfg_.tau);
    soft_update(global_t_->w(), global_->w(), cfg_.tau);
    if (include_locals)
        for (int i = 0; i < 2; ++i) soft_update(local_ts_[i]->w(), locals_[i]->w(), cfg_.tau);
}

double MasrddpgAgent::global_critic_loss(const std::vector<const JointTransition*>& batch) {
    Cols c = split_batch(batch);
    const int B = c.n;
    std::vector<double> ap, as;
    actor_ts_[0]->train_forward(c.n_pap, B, ap);
    actor_ts_[1]->train_forward(c.n_sap, B, as);
    std::vector<double> tin = hcat(B, {{&c.n_pap, 3}, {&c.n_sap, 3}, {&ap, 2}, {&as, 2}});
    std::vector<double> qn;
    global_t_->train_forward(tin, B, qn);
    std::vector<double> cin = hcat(B, {{&c.o_pap, 3}, {&c.o_sap, 3}, {&c.a_pap, 2}, {&c.a_sap, 2}});
    std::vector<double> q;
    global_->train_forward(cin, B, q);
    double loss = 0.0;
    for (int r = 0; r < B; ++r) {
        double y = c.r_g[r] + (c.done[r] ? 0.0 : cfg_.gamma * qn[r]);
        double e = q[r] - y;
        loss += 0.5 * e * e;
    }
    return loss / B;
}

std::vector<std::pair<std::string, std::vector<double>*>> MasrddpgAgent::named_params() {
    return {{"actor_pap", &actors_[0]->w()},
            {"actor_sap", &actors_[1]->w()},
            {"global_critic", &global_->w()},
            {"local_critic_pap", &locals_[0]->w()},
            {"local_critic_sap", &locals_[1]->w()},
            {"actor_target_pap", &actor_ts_[0]->w()},
            {"actor_target_sap", &actor_ts_[1]->w()},
            {"global_critic_target", &global_t_->w()},
            {"local_critic_target_pap", &local_ts_[0]->w()},
            {"local_critic_target_sap", &local_ts_[1]->w()}};
}

RdpgAgent::RdpgAgent(const AgentConfig& cfg, const std::array<double, 6>& obs_scale,
                     std::uint64_t seed)
    : cfg_(cfg), scale_(obs_scale),
      actor_(make_gru(gru_actor_spec(cfg, kCell, kAct), substream_seed(seed, 0))),
      critic_(make_gru(gru_critic_spec(cfg, kCell, kAct), substream_seed(seed, 2))),
      actor_t_(actor_), critic_t_(critic_), ebuf_(cfg.episode_capacity),
      rng_(substream_seed(seed, 100)) {
    actor_opt_.lr = cfg.actor_lr;
    critic_opt_.lr = cfg.critic_lr;
    noise_.dim = kAct;
    noise_.theta = cfg.noise_theta;
    noise_.sigma = cfg.noise_sigma0;
    noise_.reset();
    h_.assign(static_cast<std::size_t>(cfg.hidden_width), 0.0);
}

AgentAction RdpgAgent::act(const Observation& obs, bool explore) {
    std::array<double, 3> op = scaled_pap(obs, scale_), os = scaled_sap(obs, scale_);
    double x[kCell] = {op[0], op[1], op[2], os[0], os[1], os[2],
                       a_prev_[0], a_prev_[1], a_prev_[2], a_prev_[3]};
    std::vector<double> hn(h_.size());
    double a[kAct];
    actor_.step(x, nullptr, h_.data(), hn.data(), a);
    h_ = hn;
    if (explore) {
        double n[kAct];
        noise_.sample(rng_, n);
        for (int i = 0; i < kAct; ++i) a[i] = clamp1(a[i] + n[i]);
    }
    a_prev_ = {a[0], a[1], a[2], a[3]};
    AgentAction out;
    out.pap = {a[0], a[1]};
    out.sap = {a[2], a[3]};
    return out;
}

void RdpgAgent::begin_episode(double progress) {
    noise_.sigma = noise_sigma_at(cfg_, progress);
    noise_.reset();
    std::fill(h_.begin(), h_.end(), 0.0);
    a_prev_ = {0.0, 0.0, 0.0, 0.0};
    current_.clear();
}

void RdpgAgent::observe(const Observation& obs, const AgentAction& action,
                        const RewardBundle& reward, const Observation& next, bool done) {
    current_.push_back(make_stored(obs, action, reward, next, done, scale_));
}

void RdpgAgent::end_episode() {
    if (!current_.empty()) {
        ebuf_.push(std::move(current_));
        current_ = {};
    }
    const std::size_t m = static_cast<std::size_t>(cfg_.episodes_per_update);
    if (ebuf_.size() < m) return;
    for (int u = 0; u < cfg_.rdpg_updates_per_episode; ++u)
        update_from_episodes(ebuf_.sample(m, rng_));
}

void RdpgAgent::history_input(const JointEpisode& ep, int t, double* x) const {
    const JointTransition& tr = ep[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) x[i] = tr.o_pap[i];
    for (int i = 0; i < 3; ++i) x[3 + i] = tr.o_sap[i];
    if (t > 0) {
        const JointTransition& prev = ep[static_cast<std::size_t>(t - 1)];
        x[6] = prev.a_pap[0];
        x[7] = prev.a_pap[1];
        x[8] = prev.a_sap[0];
        x[9] = prev.a_sap[1];
    } else {
        for (int i = 6; i < kCell; ++i) x[i] = 0.0;
    }
}

void RdpgAgent::next_history_input(const JointEpisode& ep, int t, double* x) const {
    const JointTransition& tr = ep[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) x[i] = tr.n_pap[i];
    for (int i = 0; i < 3; ++i) x[3 + i] = tr.n_sap[i];
    x[6] = tr.a_pap[0];
    x[7] = tr.a_pap[1];
    x[8] = tr.a_sap[0];
    x[9] = tr.a_sap[1];
}

void RdpgAgent::update_from_episodes(const std::vector<const JointEpisode*>& episodes) {
    update_critic(episodes);
    update_actor(episodes);
    soft_targets();
}

void RdpgAgent::update_critic(const std::vector<const JointEpisode*>& episodes) {
    const int H = cfg_.hidden_width, L = std::max(1, cfg_.unroll_length);
    std::size_t total = 0;
    for (const JointEpisode* ep : episodes) total += ep->size();
    if (total == 0) return;
    const double inv_m = 1.0 / static_cast<double>(total);

    std::vector<double> gw(critic_.w().size(), 0.0);
    std::vector<double> ha(H), hb(H), hc(H), hd(H), x(kCell), dh(H), dh_prev(H);
    double abar[kAct];
    for (const JointEpisode* ep : episodes) {
        const int T = static_cast<int>(ep->size());
        for (int t0 = 0; t0 < T; t0 += L) {
            const int t1 = std::min(t0 + L, T);
            const int W = t1 - t0;
            std::vector<double> y(static_cast<std::size_t>(W));
            std::fill(ha.begin(), ha.end(), 0.0);
            std::fill(hc.begin(), hc.end(), 0.0);
            for (int s = t0 + 1; s <= t1; ++s) {
                next_history_input(*ep, s - 1, x.data());
                actor_t_.step(x.data(), nullptr, ha.data(), hb.data(), abar);
                ha.swap(hb);
                double qbar;
                critic_t_.step(x.data(), abar, hc.data(), hd.data(), &qbar);
                hc.swap(hd);
                const JointTransition& tr = (*ep)[static_cast<std::size_t>(s - 1)];
                y[static_cast<std::size_t>(s - 1 - t0)] =
                    tr.r_g + (tr.done ? 0.0 : cfg_.gamma * qbar);
            }
            std::vector<GruNet::StepCache> caches(static_cast<std::size_t>(W));
            std::vector<double> q(static_cast<std::size_t>(W));
            std::fill(ha.begin(), ha.end(), 0.0);
            for (int t = t0; t < t1; ++t) {
                history_input(*ep, t, x.data());
                const JointTransition& tr = (*ep)[static_cast<std::size_t>(t)];
                double at[kAct] = {tr.a_pap[0], tr.a_pap[1], tr.a_sap[0], tr.a_sap[1]};
                critic_.step_cached(x.data(), at, ha.data(), hb.data(),
                                    &q[static_cast<std::size_t>(t - t0)],
                                    caches[static_cast<std::size_t>(t - t0)]);
                ha.swap(hb);
            }
            bool have_dh = false;
            for (int k = W - 1; k >= 0; --k) {
                double dy = (q[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k)]) * inv_m;
                critic_.step_backward(caches[static_cast<std::size_t>(k)], &dy,
                                      have_dh ? dh.data() : nullptr, dh_prev.data(), nullptr,
                                      nullptr, gw);
                dh.swap(dh_prev);
                have_dh = true;
            }
        }
    }
    critic_opt_.step(critic_.w(), gw);
}

void RdpgAgent::update_actor(const std::vector<const JointEpisode*>& episodes) {
    const int H = cfg_.hidden_width, L = std::max(1, cfg_.unroll_length);
    std::size_t total = 0;
    for (const JointEpisode* ep : episodes) total += ep->size();
    if (total == 0) return;
    const double inv_m = 1.0 / static_cast<double>(total);

    std::vector<double> ga(actor_.w().size(), 0.0);
    std::vector<double> gw_scratch;
    std::vector<double> ha(H), hb(H), x(kCell), dh(H), dh_prev(H);
    for (const JointEpisode* ep : episodes) {
        const int T = static_cast<int>(ep->size());
        for (int t0 = 0; t0 < T; t0 += L) {
            const int t1 = std::min(t0 + L, T);
            const int W = t1 - t0;
            std::vector<GruNet::StepCache> acaches(static_cast<std::size_t>(W));
            std::vector<GruNet::StepCache> ccaches(static_cast<std::size_t>(W));
            std::vector<double> pi(static_cast<std::size_t>(W) * kAct);
            std::fill(ha.begin(), ha.end(), 0.0);
            for (int t = t0; t < t1; ++t) {
                history_input(*ep, t, x.data());
                actor_.step_cached(x.data(), nullptr, ha.data(), hb.data(),
                                   pi.data() + static_cast<std::size_t>(t - t0) * kAct,
                                   acaches[static_cast<std::size_t>(t - t0)]);
                ha.swap(hb);
            }
            std::fill(ha.begin(), ha.end(), 0.0);
            for (int t = t0; t < t1; ++t) {
                history_input(*ep, t, x.data());
                double qpi;
                critic_.step_cached(x.data(), pi.data() + static_cast<std::size_t>(t - t0) * kAct,
                                    ha.data(), hb.data(), &qpi,
                                    ccaches[static_cast<std::size_t>(t - t0)]);
                ha.swap(hb);
            }
            // action gradients flow only through the critic head, so no
            // backward chaining is needed on the critic side
            std::vector<double> dext(static_cast<std::size_t>(W) * kAct);
            for (int k = 0; k < W; ++k) {
                double dy = -inv_m;
                critic_.step_backward(ccaches[static_cast<std::size_t>(k)], &dy, nullptr,
                                      dh_prev.data(),
                                      dext.data() + static_cast<std::size_t>(k) * kAct, nullptr,
                                      gw_scratch);
            }
            bool have_dh = false;
            for (int k = W - 1; k >= 0; --k) {
                actor_.step_backward(acaches[static_cast<std::size_t>(k)],
                                     dext.data() + static_cast<std::size_t>(k) * kAct,
                                     have_dh ? dh.data() : nullptr, dh_prev.data(), nullptr,
                                     nullptr, ga);
                dh.swap(dh_prev);
                have_dh = true;
            }
        }
    }
    actor_opt_.step(actor_.w(), ga);
}

void RdpgAgent::soft_targets() {
    soft_update(actor_t_.w(), actor_.w(), cfg_.tau);
    soft_update(critic_t_.w(), critic_.w(), cfg_.tau);
}

double RdpgAgent::critic_loss(const std::vector<const JointEpisode*>& episodes) {
    const int H = cfg_.hidden_width, L = std::max(1, cfg_.unroll_length);
    std::size_t total = 0;
    for (const JointEpisode* ep : episodes) total += ep->size();
    if (total == 0) return 0.0;

    double loss = 0.0;
    std::vector<double> ha(H), hb(H), hc(H), hd(H), x(kCell);
    double abar[kAct];
    for (const JointEpisode* ep : episodes) {
        const int T = static_cast<int>(ep->size());
        for (int t0 = 0; t0 < T; t0 += L) {
            const int t1 = std::min(t0 + L, T);
            std::vector<double> y(static_cast<std::size_t>(t1 - t0));
            std::fill(ha.begin(), ha.end(), 0.0);
            std::fill(hc.begin(), hc.end(), 0.0);
            for (int s = t0 + 1; s <= t1; ++s) {
                next_history_input(*ep, s - 1, x.data());
                actor_t_.step(x.data(), nullptr, ha.data(), hb.data(), abar);
                ha.swap(hb);
                double qbar;
                critic_t_.step(x.data(), abar, hc.data(), hd.data(), &qbar);
                hc.swap(hd);
                const JointTransition& tr = (*ep)[static_cast<std::size_t>(s - 1)];
                y[static_cast<std::size_t>(s - 1 - t0)] =
                    tr.r_g + (tr.done ? 0.0 : cfg_.gamma * qbar);
            }
            std::fill(ha.begin(), ha.end(), 0.0);
            for (int t = t0; t < t1; ++t) {
                history_input(*ep, t, x.data());
                const JointTransition& tr = (*ep)[static_cast<std::size_t>(t)];
                double at[kAct] = {tr.a_pap[0], tr.a_pap[1], tr.a_sap[0], tr.a_sap[1]};
                double qt;
                critic_.step(x.data(), at, ha.data(), hb.data(), &qt);
                ha.swap(hb);
                double e = qt - y[static_cast<std::size_t>(t - t0)];
                loss += 0.5 * e * e;
            }
        }
    }
    return loss / static_cast<double>(total);
}

std::vector<std::pair<std::string, std::vector<double>*>> RdpgAgent::named_params() {
    return {{"actor", &actor_.w()},
            {"critic", &critic_.w()},
            {"actor_target", &actor_t_.w()},
            {"critic_target", &critic_t_.w()}};
}

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg,
                                  const std::array<double, 6>& obs_scale, std::uint64_t seed) {
    switch (kind) {
        case AgentKind::uniform_random:
            return std::make_unique<UniformRandomAgent>(substream_seed(seed, 100));
        case AgentKind::ddpg:
            return std::make_unique<DdpgAgent>(cfg, obs_scale, seed);
        case AgentKind::maddpg:
            return std::make_unique<MaddpgAgent>(cfg, obs_scale, seed);
        case AgentKind::masrddpg:
            return std::make_unique<MasrddpgAgent>(cfg, obs_scale, seed);
        case AgentKind::rdpg:
            return std::make_unique<RdpgAgent>(cfg, obs_scale, seed);
    }
    throw std::invalid_argument("make_agent: unknown kind");
}

TrainResult train_agent(Environment& env, Agent& agent, int episodes) {
    TrainResult out;
    out.trace.reserve(static_cast<std::size_t>(episodes));
    const int horizon = env.config().slots_per_episode;
    for (int e = 0; e < episodes; ++e) {
        agent.begin_episode(episodes > 0 ? static_cast<double>(e) / episodes : 0.0);
        Observation obs = env.reset();
        EpisodeMetrics m;
        m.episode = e;
        while (true) {
            AgentAction a = agent.act(obs, true);
            Environment::StepResult sr = env.step(a);
            agent.observe(obs, a, sr.reward, sr.obs, sr.done);
            m.ret_g += sr.reward.r_g;
            m.ret_pap += sr.reward.r_pap;
            m.ret_sap += sr.reward.r_sap_tot;
            m.avg_secrecy += sr.info.secrecy;
            m.energy_j += sr.info.energy;
            m.pfee += objective_log_ratio(sr.info.secrecy, sr.info.energy, env.config().phy);
            for (int k = 0; k < 5; ++k) m.violations[static_cast<std::size_t>(k)] += sr.info.viol[k];
            ++m.slots;
            obs = sr.obs;
            if (sr.done) break;
        }
        m.avg_secrecy /= horizon;
        agent.end_episode();
        for (const auto& [name, w] : agent.named_params())
            if (has_nan(*w))
                throw std::runtime_error("training diverged: non-finite parameters in " + name +
                                         " at episode " + std::to_string(e));
        out.trace.push_back(m);
    }
    return out;
}

} // namespace crnoma
