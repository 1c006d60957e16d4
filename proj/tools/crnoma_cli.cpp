#include "crnoma/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::string> split_csv(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& arg : args) {
        std::stringstream ss(arg);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::string preset;
    std::vector<std::uint64_t> seeds;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
    cmd->add_option("--preset", o.preset, "scale preset")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", o.seeds, "override the seed list")->delimiter(',');
}

crnoma::ExperimentConfig load_config(const CommonOpts& o) {
    nlohmann::json doc = nlohmann::json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw crnoma::ConfigError("cannot open config file: " + o.config_path);
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw crnoma::ConfigError("config is not valid JSON: " + std::string(e.what()));
        }
    }
    if (!o.preset.empty()) doc["preset"] = o.preset;
    auto cfg = crnoma::config_from_json(doc);
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    return cfg;
}

void print_stats(const char* label, const crnoma::RunArtifacts& a) {
    auto sec = crnoma::run_stats(a, crnoma::MetricField::avg_secrecy);
    auto en = crnoma::run_stats(a, crnoma::MetricField::energy);
    auto pfee = crnoma::run_stats(a, crnoma::MetricField::pfee);
    std::printf("%s: secrecy %.4f +/- %.4f bit/s/Hz, energy %.4f +/- %.4f J, pfee %.4f +/- %.4f (%d seeds)\n",
                label, sec.mean, sec.se, en.mean, en.se, pfee.mean, pfee.se, sec.n);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-harvesting cognitive-radio NOMA training harness"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_o, cmp_o;
    std::vector<std::string> axis_values, methods;
    std::string axis;

    auto* run_cmd = app.add_subcommand("run", "train one configuration across its seed list");
    add_common(run_cmd, run_o);

    auto* sweep_cmd = app.add_subcommand("sweep", "train across an axis of config values");
    add_common(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--axis", axis, "uncertainty | eve-position | battery-max")->required();
    sweep_cmd->add_option("--values", axis_values, "comma-separated axis values")->required();

    auto* cmp_cmd = app.add_subcommand("compare", "train several methods on one configuration");
    add_common(cmp_cmd, cmp_o);
    cmp_cmd->add_option("--methods", methods, "comma-separated agent kinds (at least two)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto cfg = load_config(run_o);
            auto art = crnoma::run_experiment(cfg);
            crnoma::write_run_outputs(run_o.out_dir, cfg, art);
            print_stats(cfg.name.c_str(), art);
            std::printf("wrote %s/{config.json,metrics.csv,summary.json,checkpoint.bin,checkpoint.json}\n",
                        run_o.out_dir.c_str());
        } else if (sweep_cmd->parsed()) {
            auto cfg = load_config(sweep_o);
            auto values = split_csv(axis_values);
            if (values.empty()) throw crnoma::ConfigError("sweep requires a non-empty --values list");
            auto art = crnoma::sweep_experiment(cfg, axis, values);
            crnoma::write_sweep_outputs(sweep_o.out_dir, cfg, axis, art);
            for (std::size_t i = 0; i < values.size(); ++i)
                print_stats((axis + "=" + values[i]).c_str(), art.cells[i]);
            std::printf("wrote %s/{config.json,metrics.csv,sweep.json}\n", sweep_o.out_dir.c_str());
        } else {
            auto cfg = load_config(cmp_o);
            auto names = split_csv(methods);
            auto art = crnoma::compare_methods(cfg, names);
            crnoma::write_compare_outputs(cmp_o.out_dir, cfg, names, art);
            for (std::size_t i = 0; i < names.size(); ++i)
                print_stats(names[i].c_str(), art.method_runs[i]);
            for (const auto& row : art.report)
                std::printf("%s vs %s: diff %.4f (pooled se %.4f) verdict %+d\n",
                            row.method_a.c_str(), row.method_b.c_str(), row.diff, row.pooled,
                            row.verdict);
            std::printf("wrote %s/{config.json,metrics.csv,compare.json}\n", cmp_o.out_dir.c_str());
        }
    } catch (const crnoma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
