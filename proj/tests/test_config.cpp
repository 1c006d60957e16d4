#include "crnoma/config.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

using namespace crnoma;
using nlohmann::json;

namespace {

bool message_contains(const std::function<void()>& f, const std::string& needle) {
    try {
        f();
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("desk preset keeps runs small") {
    ExperimentConfig c = preset_config("desk");
    CHECK(c.preset == "desk");
    CHECK(c.episodes == 200);
    CHECK(c.env.slots_per_episode == 200);
    CHECK(c.training.hidden_width == 64);
    CHECK(c.training.updates_per_episode == 32);
    CHECK(c.training.rdpg_updates_per_episode == 2);
    CHECK(c.training.warmup_transitions == 1000);
    CHECK(c.scenario == "B");
}

TEST_CASE("paper preset uses the full-scale settings") {
    ExperimentConfig c = preset_config("paper");
    CHECK(c.episodes == 100);
    CHECK(c.env.slots_per_episode == 2000);
    CHECK(c.training.hidden_width == 512);
    CHECK(c.training.updates_per_episode == 2000);
    CHECK(c.training.rdpg_updates_per_episode == 8);
    CHECK(c.training.warmup_transitions == 2000);
}

TEST_CASE("unknown preset name throws") {
    CHECK_THROWS_AS(preset_config("huge"), ConfigError);
}

TEST_CASE("eavesdropper position presets set the expected geometry") {
    ExperimentConfig c = preset_config("desk");

    apply_scenario(c, "A");
    CHECK(c.env.distances.pap_eve == 80.0);
    CHECK(c.env.distances.sap_eve == 100.0);

    apply_scenario(c, "B");
    CHECK(c.env.distances.pap_eve == 160.0);
    CHECK(c.env.distances.sap_eve == 200.0);

    apply_scenario(c, "C");
    CHECK(c.env.distances.pap_eve == 320.0);
    CHECK(c.env.distances.sap_eve == 400.0);

    // the legitimate geometry is shared across positions
    for (const char* s : {"A", "B", "C"}) {
        apply_scenario(c, s);
        CHECK(c.env.distances.pap_pue == 80.0);
        CHECK(c.env.distances.pap_sap == 50.0);
        CHECK(c.env.distances.sap_pue == 25.0);
        CHECK(c.env.distances.sap_sue == 25.0);
    }

    c.env.distances.pap_eve = 123.0;
    apply_scenario(c, "custom"); // leaves distances untouched
    CHECK(c.env.distances.pap_eve == 123.0);

    CHECK_THROWS_AS(apply_scenario(c, "D"), ConfigError);
}

TEST_CASE("serialization round-trips exactly") {
    ExperimentConfig c = preset_config("desk");
    c.name = "roundtrip";
    c.agent = AgentKind::rdpg;
    c.seeds = {3, 14, 15};
    c.env.model.variant = Variant::worst_case;
    c.env.model.level = 0.1;
    c.env.model.error_class = ErrorClass::symmetric_unimodal;
    c.env.model.xi.c5 = 0.02;
    c.env.fading.family = FadingFamily::none;
    c.training.local_weight = 0.25;
    apply_scenario(c, "C");

    json j1 = config_to_json(c);
    ExperimentConfig back = config_from_json(j1);
    json j2 = config_to_json(back);
    CHECK(j1 == j2);
}

TEST_CASE("empty document yields the desk preset") {
    ExperimentConfig c = config_from_json(json::object());
    json a = config_to_json(c);
    json b = config_to_json(preset_config("desk"));
    CHECK(a == b);
}

TEST_CASE("document overlays the chosen preset") {
    json j = {{"preset", "paper"}, {"training", {{"hidden_width", 32}}}};
    ExperimentConfig c = config_from_json(j);
    CHECK(c.training.hidden_width == 32);         // overlay wins
    CHECK(c.episodes == 100);                     // preset default retained
    CHECK(c.env.slots_per_episode == 2000);
    CHECK(c.training.updates_per_episode == 2000);
}

TEST_CASE("explicit distances override the scenario preset") {
    json j = {{"scenario", "A"}, {"env", {{"distances", {{"pap_eve", 999.0}}}}}};
    ExperimentConfig c = config_from_json(j);
    CHECK(c.env.distances.pap_eve == 999.0); // explicit value wins
    CHECK(c.env.distances.sap_eve == 100.0); // rest of scenario A stays
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK(message_contains([] { config_from_json({{"typo_key", 1}}); },
                           "unknown key \"typo_key\""));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"phy", {{"slot_seconds", 1.0}}}}}}); },
        "env.phy: unknown key \"slot_seconds\""));
    CHECK(message_contains(
        [] { config_from_json({{"training", {{"learning_rate", 0.1}}}}); },
        "training: unknown key \"learning_rate\""));
}

TEST_CASE("agent names parse and bad ones are reported") {
    for (const char* name : {"random", "ddpg", "maddpg", "masrddpg", "rdpg"}) {
        ExperimentConfig c = config_from_json({{"agent", name}});
        CHECK(to_string(c.agent) == name);
    }
    CHECK(message_contains([] { config_from_json({{"agent", "dqn"}}); }, "agent:"));
}

TEST_CASE("range violations are rejected") {
    CHECK(message_contains([] { config_from_json({{"episodes", 0}}); }, "episodes"));
    CHECK(message_contains([] { config_from_json({{"seeds", json::array()}}); }, "seeds"));
    CHECK(message_contains([] { config_from_json({{"training", {{"gamma", 1.5}}}}); },
                           "gamma"));
    CHECK(message_contains([] { config_from_json({{"training", {{"tau", -0.1}}}}); }, "tau"));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"uncertainty", {{"level", -0.2}}}}}}); },
        "level"));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"uncertainty", {{"n_mc", 0}}}}}}); }, "n_mc"));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"uncertainty", {{"xi", {{"c1", 1.5}}}}}}}}); },
        "xi"));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"distances", {{"pap_pue", -5.0}}}}}}); },
        "distances"));
    CHECK(message_contains([] { config_from_json({{"scenario", "Z"}}); }, "scenario"));
}

TEST_CASE("type mismatches are reported with the field path") {
    CHECK(message_contains([] { config_from_json({{"episodes", "many"}}); },
                           "expected an integer"));
    CHECK(message_contains([] { config_from_json({{"seeds", {1, -2}}}); },
                           "non-negative integers"));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"p_max_pap", "big"}}}}); }, "expected a number"));
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"fading", {{"iid_per_slot", 1}}}}}}); },
        "expected a boolean"));
}

TEST_CASE("all diagnostics are collected in one pass") {
    json j = {{"episodes", 0}, {"typo", 1}, {"training", {{"gamma", 2.0}}}};
    try {
        config_from_json(j);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("episodes") != std::string::npos);
        CHECK(msg.find("typo") != std::string::npos);
        CHECK(msg.find("gamma") != std::string::npos);
    }
}

TEST_CASE("enumeration fields accept only the documented values") {
    ExperimentConfig c = config_from_json(
        {{"env",
          {{"uncertainty", {{"variant", "bernstein"}, {"error_class", "unimodal"}}},
           {"fading", {{"family", "none"}}}}}});
    CHECK(c.env.model.variant == Variant::bernstein);
    CHECK(c.env.model.error_class == ErrorClass::unimodal);
    CHECK(c.env.fading.family == FadingFamily::none);
    CHECK(message_contains(
        [] { config_from_json({{"env", {{"uncertainty", {{"variant", "fuzzy"}}}}}}); },
        "must be one of"));
}

TEST_CASE("config files save and load faithfully") {
    const std::string path = "tmp_config_roundtrip.json";
    ExperimentConfig c = preset_config("desk");
    c.name = "disk";
    c.seeds = {9, 10};
    c.env.model.variant = Variant::stochastic;
    c.env.model.n_mc = 128;
    save_config_file(path, c);
    ExperimentConfig back = load_config_file(path);
    CHECK(config_to_json(back) == config_to_json(c));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_config_file("does_not_exist_anywhere.json"), ConfigError);

    const std::string bad = "tmp_config_bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(message_contains([&] { (void)load_config_file(bad); }, "not valid JSON"));
    std::remove(bad.c_str());
}

} // TEST_SUITE
