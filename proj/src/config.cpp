#include "crnoma/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace crnoma {

namespace {

class Reader {
 public:
    Reader(const nlohmann::json& j, std::string path, std::vector<std::string>& errs)
        : j_(j), path_(std::move(path)), errs_(errs) {
        if (!j_.is_object()) errs_.push_back(path_ + ": expected an object");
    }

    bool present(const char* key) { return j_.is_object() && j_.contains(key); }

    bool get(const char* key, double& dst) {
        if (!mark(key)) return false;
        const auto& v = j_.at(key);
        if (!v.is_number()) {
            errs_.push_back(field(key) + ": expected a number");
            return false;
        }
        dst = v.get<double>();
        return true;
    }

    bool get(const char* key, int& dst) {
        if (!mark(key)) return false;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) {
            errs_.push_back(field(key) + ": expected an integer");
            return false;
        }
        dst = v.get<int>();
        return true;
    }

    bool get(const char* key, std::size_t& dst) {
        if (!mark(key)) return false;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            errs_.push_back(field(key) + ": expected a non-negative integer");
            return false;
        }
        dst = v.get<std::size_t>();
        return true;
    }

    bool get(const char* key, bool& dst) {
        if (!mark(key)) return false;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) {
            errs_.push_back(field(key) + ": expected a boolean");
            return false;
        }
        dst = v.get<bool>();
        return true;
    }

    bool get(const char* key, std::string& dst) {
        if (!mark(key)) return false;
        const auto& v = j_.at(key);
        if (!v.is_string()) {
            errs_.push_back(field(key) + ": expected a string");
            return false;
        }
        dst = v.get<std::string>();
        return true;
    }

    bool get(const char* key, std::vector<std::uint64_t>& dst) {
        if (!mark(key)) return false;
        const auto& v = j_.at(key);
        if (!v.is_array()) {
            errs_.push_back(field(key) + ": expected an array of seeds");
            return false;
        }
        std::vector<std::uint64_t> tmp;
        for (const auto& e : v) {
            if (!e.is_number_integer() || e.get<long long>() < 0) {
                errs_.push_back(field(key) + ": seeds must be non-negative integers");
                return false;
            }
            tmp.push_back(e.get<std::uint64_t>());
        }
        dst = std::move(tmp);
        return true;
    }

    const nlohmann::json* child(const char* key) {
        if (!mark(key)) return nullptr;
        const auto& v = j_.at(key);
        if (!v.is_object()) {
            errs_.push_back(field(key) + ": expected an object");
            return nullptr;
        }
        return &v;
    }

    std::string field(const char* key) const { return path_ + "." + key; }

    void finish() {
        if (!j_.is_object()) return;
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                errs_.push_back(path_ + ": unknown key \"" + item.key() + "\"");
    }

 private:
    bool mark(const char* key) {
        seen_.insert(key);
        return present(key);
    }

    const nlohmann::json& j_;
    std::string path_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
};

template <typename Enum>
void get_enum(Reader& r, const char* key, Enum& dst,
              std::initializer_list<std::pair<const char*, Enum>> table,
              std::vector<std::string>& errs) {
    std::string s;
    if (!r.get(key, s)) return;
    for (const auto& [name, value] : table) {
        if (s == name) {
            dst = value;
            return;
        }
    }
    std::string allowed;
    for (const auto& [name, value] : table) {
        if (!allowed.empty()) allowed += ", ";
        allowed += name;
    }
    errs.push_back(r.field(key) + ": must be one of {" + allowed + "}");
}

void read_distances(const nlohmann::json& j, const std::string& path, LinkDistances& d,
                    std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    r.get("pap_pue", d.pap_pue);
    r.get("pap_sap", d.pap_sap);
    r.get("pap_eve", d.pap_eve);
    r.get("sap_pue", d.sap_pue);
    r.get("sap_sue", d.sap_sue);
    r.get("sap_eve", d.sap_eve);
    r.finish();
}

void read_fading(const nlohmann::json& j, const std::string& path, FadingConfig& f,
                 std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    get_enum(r, "family", f.family,
             {{"rayleigh", FadingFamily::rayleigh_power}, {"none", FadingFamily::none}}, errs);
    r.get("mean", f.mean);
    r.get("iid_per_slot", f.iid_per_slot);
    r.finish();
}

void read_noise(const nlohmann::json& j, const std::string& path, NoiseConfig& n,
                std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    r.get("pp", n.pp);
    r.get("ps", n.ps);
    r.get("pe", n.pe);
    r.get("sp", n.sp);
    r.get("ss", n.ss);
    r.get("se", n.se);
    r.finish();
}

void read_phy(const nlohmann::json& j, const std::string& path, PhyConstants& c,
              std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    r.get("slot_s", c.slot_s);
    r.get("eta2_sap", c.eta2_sap);
    r.get("eta2_pap", c.eta2_pap);
    r.get("eta1_pap", c.eta1_pap);
    r.get("eta1_sap", c.eta1_sap);
    r.get("amp_eff", c.amp_eff);
    r.get("circuit_energy_j", c.circuit_energy_j);
    r.get("pap_op_energy_j", c.pap_op_energy_j);
    r.get("sap_op_energy_j", c.sap_op_energy_j);
    r.get("floor_rate", c.floor_rate);
    r.get("floor_energy", c.floor_energy);
    r.finish();
}

void read_xi(const nlohmann::json& j, const std::string& path, XiThresholds& x,
             std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    r.get("obj_nom", x.obj_nom);
    r.get("obj_den", x.obj_den);
    r.get("c1", x.c1);
    r.get("c2", x.c2);
    r.get("c3", x.c3);
    r.get("c4", x.c4);
    r.get("c5", x.c5);
    r.finish();
}

void read_uncertainty(const nlohmann::json& j, const std::string& path, UncertaintyModel& m,
                      std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    get_enum(r, "variant", m.variant,
             {{"exact", Variant::exact},
              {"worst_case", Variant::worst_case},
              {"stochastic", Variant::stochastic},
              {"bernstein", Variant::bernstein}},
             errs);
    r.get("level", m.level);
    get_enum(r, "error_class", m.error_class,
             {{"bounded", ErrorClass::bounded},
              {"unimodal", ErrorClass::unimodal},
              {"symmetric_unimodal", ErrorClass::symmetric_unimodal}},
             errs);
    if (const nlohmann::json* xi = r.child("xi")) read_xi(*xi, path + ".xi", m.xi, errs);
    r.get("n_mc", m.n_mc);
    r.get("conservative_signs", m.conservative_signs);
    r.finish();
}

void read_env(const nlohmann::json& j, const std::string& path, EnvConfig& e,
              std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    if (const nlohmann::json* d = r.child("distances"))
        read_distances(*d, path + ".distances", e.distances, errs);
    r.get("path_loss_exponent", e.path_loss_exponent);
    if (const nlohmann::json* f = r.child("fading")) read_fading(*f, path + ".fading", e.fading, errs);
    if (const nlohmann::json* n = r.child("noise")) read_noise(*n, path + ".noise", e.noise, errs);
    if (const nlohmann::json* p = r.child("phy")) read_phy(*p, path + ".phy", e.phy, errs);
    if (const nlohmann::json* u = r.child("uncertainty"))
        read_uncertainty(*u, path + ".uncertainty", e.model, errs);
    r.get("p_max_pap", e.p_max_pap);
    r.get("p_max_sap", e.p_max_sap);
    r.get("cap_pap_j", e.cap_pap_j);
    r.get("cap_sap_j", e.cap_sap_j);
    r.get("init_lo_j", e.init_lo_j);
    r.get("init_hi_j", e.init_hi_j);
    r.get("harvest_unit_j", e.harvest_unit_j);
    r.get("slots_per_episode", e.slots_per_episode);
    r.get("penalty", e.penalty);
    r.get("r_min_slot", e.r_min_slot);
    r.finish();
}

void read_training(const nlohmann::json& j, const std::string& path, AgentConfig& a,
                   std::vector<std::string>& errs) {
    Reader r(j, path, errs);
    r.get("gamma", a.gamma);
    r.get("actor_lr", a.actor_lr);
    r.get("critic_lr", a.critic_lr);
    r.get("tau", a.tau);
    r.get("batch_size", a.batch_size);
    r.get("buffer_capacity", a.buffer_capacity);
    r.get("episode_capacity", a.episode_capacity);
    r.get("hidden_width", a.hidden_width);
    r.get("hidden_layers", a.hidden_layers);
    r.get("updates_per_episode", a.updates_per_episode);
    r.get("warmup_transitions", a.warmup_transitions);
    r.get("unroll_length", a.unroll_length);
    r.get("episodes_per_update", a.episodes_per_update);
    r.get("rdpg_updates_per_episode", a.rdpg_updates_per_episode);
    r.get("local_update_period", a.local_update_period);
    r.get("local_weight", a.local_weight);
    r.get("noise_theta", a.noise_theta);
    r.get("noise_sigma0", a.noise_sigma0);
    r.get("noise_sigma_final", a.noise_sigma_final);
    r.finish();
}

void check_range(bool ok, const std::string& what, std::vector<std::string>& errs) {
    if (!ok) errs.push_back(what);
}

void validate(const ExperimentConfig& c, std::vector<std::string>& errs) {
    check_range(c.preset == "desk" || c.preset == "paper",
                "preset: must be \"desk\" or \"paper\"", errs);
    check_range(c.scenario == "A" || c.scenario == "B" || c.scenario == "C" ||
                    c.scenario == "custom",
                "scenario: must be one of {A, B, C, custom}", errs);
    check_range(c.episodes >= 1, "episodes: must be >= 1", errs);
    check_range(!c.seeds.empty(), "seeds: must not be empty", errs);

    const EnvConfig& e = c.env;
    check_range(e.distances.pap_pue > 0 && e.distances.pap_sap > 0 && e.distances.pap_eve > 0 &&
                    e.distances.sap_pue > 0 && e.distances.sap_sue > 0 && e.distances.sap_eve > 0,
                "env.distances: all distances must be positive", errs);
    check_range(e.path_loss_exponent > 0, "env.path_loss_exponent: must be positive", errs);
    check_range(e.fading.mean > 0, "env.fading.mean: must be positive", errs);
    check_range(e.noise.pp > 0 && e.noise.ps > 0 && e.noise.pe > 0 && e.noise.sp > 0 &&
                    e.noise.ss > 0 && e.noise.se > 0,
                "env.noise: all variances must be positive", errs);
    check_range(e.phy.slot_s > 0, "env.phy.slot_s: must be positive", errs);
    check_range(e.model.level >= 0, "env.uncertainty.level: must be >= 0", errs);
    check_range(e.model.n_mc >= 1, "env.uncertainty.n_mc: must be >= 1", errs);
    const XiThresholds& x = e.model.xi;
    for (double v : {x.obj_nom, x.obj_den, x.c1, x.c2, x.c3, x.c4, x.c5})
        check_range(v > 0 && v < 1, "env.uncertainty.xi: thresholds must lie in (0, 1)", errs);
    check_range(e.p_max_pap > 0 && e.p_max_sap > 0, "env.p_max: must be positive", errs);
    check_range(e.cap_pap_j > 0 && e.cap_sap_j > 0, "env.cap: must be positive", errs);
    check_range(e.init_lo_j >= 0 && e.init_hi_j >= e.init_lo_j,
                "env.init battery range: need 0 <= lo <= hi", errs);
    check_range(e.harvest_unit_j >= 0, "env.harvest_unit_j: must be >= 0", errs);
    check_range(e.slots_per_episode >= 1, "env.slots_per_episode: must be >= 1", errs);
    check_range(e.r_min_slot >= 0, "env.r_min_slot: must be >= 0", errs);

    const AgentConfig& a = c.training;
    check_range(a.gamma > 0 && a.gamma < 1, "training.gamma: must lie in (0, 1)", errs);
    check_range(a.actor_lr >= 0 && a.critic_lr >= 0, "training learning rates: must be >= 0",
                errs);
    check_range(a.tau >= 0 && a.tau <= 1, "training.tau: must lie in [0, 1]", errs);
    check_range(a.batch_size >= 1, "training.batch_size: must be >= 1", errs);
    check_range(a.buffer_capacity >= 1, "training.buffer_capacity: must be >= 1", errs);
    check_range(a.episode_capacity >= 1, "training.episode_capacity: must be >= 1", errs);
    check_range(a.hidden_width >= 1 && a.hidden_layers >= 1,
                "training network shape: need width >= 1 and layers >= 1", errs);
    check_range(a.updates_per_episode >= 0, "training.updates_per_episode: must be >= 0", errs);
    check_range(a.warmup_transitions >= 0, "training.warmup_transitions: must be >= 0", errs);
    check_range(a.unroll_length >= 1, "training.unroll_length: must be >= 1", errs);
    check_range(a.episodes_per_update >= 1, "training.episodes_per_update: must be >= 1", errs);
    check_range(a.rdpg_updates_per_episode >= 0,
                "training.rdpg_updates_per_episode: must be >= 0", errs);
    check_range(a.local_update_period >= 1, "training.local_update_period: must be >= 1", errs);
    check_range(a.noise_sigma0 >= 0 && a.noise_sigma_final >= 0,
                "training noise sigmas: must be >= 0", errs);
}

} // namespace

ExperimentConfig preset_config(const std::string& preset) {
    ExperimentConfig c;
    c.preset = preset;
    // Per-slot operating drains sized against the mean harvest credit
    // (0.25 J/slot at the PAP) so batteries drift downward and can deplete
    // within an episode; without them transmit energies (~mJ) never move a
    // multi-joule battery and the capacity settings would be inert.
    c.env.phy.pap_op_energy_j = 0.35;
    c.env.phy.sap_op_energy_j = 0.01;
    if (preset == "desk") {
        c.episodes = 200;
        c.env.slots_per_episode = 200;
        c.training.hidden_width = 64;
        c.training.updates_per_episode = 32;
        c.training.rdpg_updates_per_episode = 2;
        c.training.warmup_transitions = 1000;
    } else if (preset == "paper") {
        c.episodes = 100;
        c.env.slots_per_episode = 2000;
        c.training.hidden_width = 512;
        c.training.updates_per_episode = 2000;
        c.training.rdpg_updates_per_episode = 8;
        c.training.warmup_transitions = 2000;
    } else {
        throw ConfigError("preset: must be \"desk\" or \"paper\"");
    }
    apply_scenario(c, c.scenario);
    return c;
}

void apply_scenario(ExperimentConfig& cfg, const std::string& scenario) {
    cfg.scenario = scenario;
    if (scenario == "custom") return;
    LinkDistances d; // shared baseline geometry
    if (scenario == "A") {
        d.pap_eve = 80.0;
        d.sap_eve = 100.0;
    } else if (scenario == "B") {
        d.pap_eve = 160.0;
        d.sap_eve = 200.0;
    } else if (scenario == "C") {
        d.pap_eve = 320.0;
        d.sap_eve = 400.0;
    } else {
        throw ConfigError("scenario: must be one of {A, B, C, custom}");
    }
    cfg.env.distances = d;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    const EnvConfig& e = c.env;
    const AgentConfig& a = c.training;
    nlohmann::json j;
    j["name"] = c.name;
    j["preset"] = c.preset;
    j["scenario"] = c.scenario;
    j["env"] = {
        {"distances",
         {{"pap_pue", e.distances.pap_pue},
          {"pap_sap", e.distances.pap_sap},
          {"pap_eve", e.distances.pap_eve},
          {"sap_pue", e.distances.sap_pue},
          {"sap_sue", e.distances.sap_sue},
          {"sap_eve", e.distances.sap_eve}}},
        {"path_loss_exponent", e.path_loss_exponent},
        {"fading",
         {{"family", e.fading.family == FadingFamily::rayleigh_power ? "rayleigh" : "none"},
          {"mean", e.fading.mean},
          {"iid_per_slot", e.fading.iid_per_slot}}},
        {"noise",
         {{"pp", e.noise.pp},
          {"ps", e.noise.ps},
          {"pe", e.noise.pe},
          {"sp", e.noise.sp},
          {"ss", e.noise.ss},
          {"se", e.noise.se}}},
        {"phy",
         {{"slot_s", e.phy.slot_s},
          {"eta2_sap", e.phy.eta2_sap},
          {"eta2_pap", e.phy.eta2_pap},
          {"eta1_pap", e.phy.eta1_pap},
          {"eta1_sap", e.phy.eta1_sap},
          {"amp_eff", e.phy.amp_eff},
          {"circuit_energy_j", e.phy.circuit_energy_j},
          {"pap_op_energy_j", e.phy.pap_op_energy_j},
          {"sap_op_energy_j", e.phy.sap_op_energy_j},
          {"floor_rate", e.phy.floor_rate},
          {"floor_energy", e.phy.floor_energy}}},
        {"uncertainty",
         {{"variant",
           e.model.variant == Variant::exact
               ? "exact"
               : e.model.variant == Variant::worst_case
                     ? "worst_case"
                     : e.model.variant == Variant::stochastic ? "stochastic" : "bernstein"},
          {"level", e.model.level},
          {"error_class",
           e.model.error_class == ErrorClass::bounded
               ? "bounded"
               : e.model.error_class == ErrorClass::unimodal ? "unimodal" : "symmetric_unimodal"},
          {"xi",
           {{"obj_nom", e.model.xi.obj_nom},
            {"obj_den", e.model.xi.obj_den},
            {"c1", e.model.xi.c1},
            {"c2", e.model.xi.c2},
            {"c3", e.model.xi.c3},
            {"c4", e.model.xi.c4},
            {"c5", e.model.xi.c5}}},
          {"n_mc", e.model.n_mc},
          {"conservative_signs", e.model.conservative_signs}}},
        {"p_max_pap", e.p_max_pap},
        {"p_max_sap", e.p_max_sap},
        {"cap_pap_j", e.cap_pap_j},
        {"cap_sap_j", e.cap_sap_j},
        {"init_lo_j", e.init_lo_j},
        {"init_hi_j", e.init_hi_j},
        {"harvest_unit_j", e.harvest_unit_j},
        {"slots_per_episode", e.slots_per_episode},
        {"penalty", e.penalty},
        {"r_min_slot", e.r_min_slot}};
    j["agent"] = to_string(c.agent);
    j["training"] = {{"gamma", a.gamma},
                     {"actor_lr", a.actor_lr},
                     {"critic_lr", a.critic_lr},
                     {"tau", a.tau},
                     {"batch_size", a.batch_size},
                     {"buffer_capacity", a.buffer_capacity},
                     {"episode_capacity", a.episode_capacity},
                     {"hidden_width", a.hidden_width},
                     {"hidden_layers", a.hidden_layers},
                     {"updates_per_episode", a.updates_per_episode},
                     {"warmup_transitions", a.warmup_transitions},
                     {"unroll_length", a.unroll_length},
                     {"episodes_per_update", a.episodes_per_update},
                     {"rdpg_updates_per_episode", a.rdpg_updates_per_episode},
                     {"local_update_period", a.local_update_period},
                     {"local_weight", a.local_weight},
                     {"noise_theta", a.noise_theta},
                     {"noise_sigma0", a.noise_sigma0},
                     {"noise_sigma_final", a.noise_sigma_final}};
    j["episodes"] = c.episodes;
    j["seeds"] = c.seeds;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    std::vector<std::string> errs;
    if (!j.is_object()) throw ConfigError("config: document root must be an object");

    std::string preset = "desk";
    if (j.contains("preset")) {
        if (!j.at("preset").is_string()) throw ConfigError("preset: expected a string");
        preset = j.at("preset").get<std::string>();
        if (preset != "desk" && preset != "paper")
            throw ConfigError("preset: must be \"desk\" or \"paper\"");
    }
    ExperimentConfig c = preset_config(preset);

    Reader r(j, "config", errs);
    r.get("name", c.name);
    std::string ignore_preset;
    r.get("preset", ignore_preset);
    std::string scenario = c.scenario;
    r.get("scenario", scenario);
    if (scenario == "A" || scenario == "B" || scenario == "C") apply_scenario(c, scenario);
    else c.scenario = scenario;
    if (const nlohmann::json* e = r.child("env")) read_env(*e, "env", c.env, errs);
    std::string kind;
    if (r.get("agent", kind)) {
        try {
            c.agent = parse_agent_kind(kind);
        } catch (const std::invalid_argument& ex) {
            errs.push_back(std::string("agent: ") + ex.what());
        }
    }
    if (const nlohmann::json* t = r.child("training")) read_training(*t, "training", c.training, errs);
    r.get("episodes", c.episodes);
    r.get("seeds", c.seeds);
    r.finish();

    validate(c, errs);
    if (!errs.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration:";
        for (const std::string& e : errs) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

void save_config_file(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open config file for writing: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

} // namespace crnoma
