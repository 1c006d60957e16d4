#include "crnoma/runner.hpp"

#include "crnoma/checkpoint.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace crnoma {

namespace {

constexpr std::uint64_t kAgentStream = 0xA6E47;

std::vector<double> per_seed_final(const RunArtifacts& a, MetricField f) {
    std::vector<double> v;
    v.reserve(a.runs.size());
    for (const SeedRun& r : a.runs) v.push_back(final_window_mean(r.trace, kFinalWindowFrac, f));
    return v;
}

nlohmann::json stats_json(const SeedStats& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"se", s.se}, {"n", s.n}};
}

void flatten_rows(const ExperimentConfig& cfg, RunArtifacts& a) {
    for (const SeedRun& r : a.runs) {
        std::string id = run_id_of(cfg, r.seed);
        for (const EpisodeMetrics& m : r.trace) {
            MetricRecord rec = to_record(id, r.seed, m);
            if (!record_fields_finite(rec))
                throw std::runtime_error("non-finite metric value in run " + id);
            a.rows.push_back(std::move(rec));
        }
    }
}

void write_csv(const std::string& path, const std::vector<MetricRecord>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << metrics_csv_header() << '\n';
    for (const MetricRecord& r : rows) append_metrics_csv(out, r);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

nlohmann::json final_window_json(const RunArtifacts& a) {
    nlohmann::json per_seed = nlohmann::json::array();
    for (const SeedRun& r : a.runs) {
        per_seed.push_back(
            {{"seed", r.seed},
             {"ret_g", final_window_mean(r.trace, kFinalWindowFrac, MetricField::ret_g)},
             {"avg_secrecy",
              final_window_mean(r.trace, kFinalWindowFrac, MetricField::avg_secrecy)},
             {"energy_j", final_window_mean(r.trace, kFinalWindowFrac, MetricField::energy)},
             {"pfee", final_window_mean(r.trace, kFinalWindowFrac, MetricField::pfee)}});
    }
    return {{"final_window_frac", kFinalWindowFrac},
            {"ret_g", stats_json(run_stats(a, MetricField::ret_g))},
            {"avg_secrecy", stats_json(run_stats(a, MetricField::avg_secrecy))},
            {"energy_j", stats_json(run_stats(a, MetricField::energy))},
            {"pfee", stats_json(run_stats(a, MetricField::pfee))},
            {"per_seed", per_seed}};
}

void save_first_seed_checkpoint(const std::string& out_dir, const RunArtifacts& a) {
    if (a.runs.empty() || a.runs.front().params.empty()) return;
    std::vector<ParamBlock> blocks;
    for (const auto& [name, data] : a.runs.front().params) blocks.push_back({name, &data});
    save_checkpoint(out_dir + "/checkpoint.bin", out_dir + "/checkpoint.json", blocks);
}

} // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(n, hw == 0 ? 1 : hw);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string run_id_of(const ExperimentConfig& cfg, std::uint64_t seed) {
    return cfg.name + ":" + to_string(cfg.agent) + ":s" + std::to_string(seed);
}

SeedRun run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
    Environment env(cfg.env, seed);
    std::unique_ptr<Agent> agent =
        make_agent(cfg.agent, cfg.training, env.observation_scale(), substream_seed(seed, kAgentStream));
    TrainResult tr = train_agent(env, *agent, cfg.episodes);
    SeedRun out;
    out.seed = seed;
    out.trace = std::move(tr.trace);
    for (const auto& [name, w] : agent->named_params()) out.params.emplace_back(name, *w);
    return out;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    RunArtifacts a;
    a.runs.resize(cfg.seeds.size());
    parallel_for(cfg.seeds.size(),
                 [&](std::size_t i) { a.runs[i] = run_single(cfg, cfg.seeds[i]); });
    flatten_rows(cfg, a);
    return a;
}

SeedStats run_stats(const RunArtifacts& a, MetricField f) {
    return across_seeds(per_seed_final(a, f));
}

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const std::string& value) {
    ExperimentConfig cfg = base;
    cfg.name = base.name + "/" + axis + "=" + value;
    if (axis == "uncertainty") {
        try {
            cfg.env.model.level = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("sweep value for uncertainty must be a number, got \"" + value + "\"");
        }
        if (cfg.env.model.level < 0) throw ConfigError("uncertainty level must be >= 0");
    } else if (axis == "eve-position") {
        if (value != "A" && value != "B" && value != "C")
            throw ConfigError("sweep value for eve-position must be A, B or C");
        apply_scenario(cfg, value);
    } else if (axis == "battery-max") {
        double cap = 0.0;
        try {
            cap = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("sweep value for battery-max must be a number, got \"" + value + "\"");
        }
        if (cap <= 0) throw ConfigError("battery-max must be positive");
        cfg.env.cap_pap_j = cap;
        cfg.env.cap_sap_j = cap;
    } else {
        throw ConfigError("unknown sweep axis \"" + axis +
                          "\" (expected uncertainty, eve-position or battery-max)");
    }
    return cfg;
}

SweepArtifacts sweep_experiment(const ExperimentConfig& base, const std::string& axis,
                                const std::vector<std::string>& values) {
    if (values.empty()) throw ConfigError("sweep: value list must not be empty");
    std::vector<ExperimentConfig> cell_cfgs;
    cell_cfgs.reserve(values.size());
    for (const std::string& v : values) cell_cfgs.push_back(apply_axis(base, axis, v));

    const std::size_t n_seeds = base.seeds.size();
    SweepArtifacts a;
    a.cells.resize(values.size());
    for (std::size_t c = 0; c < values.size(); ++c) a.cells[c].runs.resize(n_seeds);

    // one worker per (value, seed) pair
    parallel_for(values.size() * n_seeds, [&](std::size_t i) {
        std::size_t c = i / n_seeds, s = i % n_seeds;
        a.cells[c].runs[s] = run_single(cell_cfgs[c], base.seeds[s]);
    });

    for (std::size_t c = 0; c < values.size(); ++c) {
        flatten_rows(cell_cfgs[c], a.cells[c]);
        a.rows.insert(a.rows.end(), a.cells[c].rows.begin(), a.cells[c].rows.end());
        const struct {
            MetricField f;
            const char* name;
        } fields[] = {{MetricField::avg_secrecy, "avg_secrecy"},
                      {MetricField::energy, "energy_j"},
                      {MetricField::pfee, "pfee"},
                      {MetricField::ret_g, "ret_g"}};
        for (const auto& fd : fields) {
            SeedStats st = run_stats(a.cells[c], fd.f);
            a.table.push_back({axis, values[c], fd.name, st.mean, st.sd, st.se, st.n});
        }
    }
    return a;
}

CompareArtifacts compare_methods(const ExperimentConfig& base,
                                 const std::vector<std::string>& methods) {
    if (methods.size() < 2) throw ConfigError("compare: need at least two methods");
    std::vector<ExperimentConfig> cfgs;
    cfgs.reserve(methods.size());
    for (const std::string& m : methods) {
        ExperimentConfig cfg = base;
        try {
            cfg.agent = parse_agent_kind(m);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("compare: ") + e.what());
        }
        cfgs.push_back(std::move(cfg));
    }

    const std::size_t n_seeds = base.seeds.size();
    CompareArtifacts a;
    a.method_runs.resize(methods.size());
    for (auto& mr : a.method_runs) mr.runs.resize(n_seeds);
    parallel_for(methods.size() * n_seeds, [&](std::size_t i) {
        std::size_t m = i / n_seeds, s = i % n_seeds;
        a.method_runs[m].runs[s] = run_single(cfgs[m], base.seeds[s]);
    });

    std::vector<SeedStats> stats(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        flatten_rows(cfgs[m], a.method_runs[m]);
        a.rows.insert(a.rows.end(), a.method_runs[m].rows.begin(), a.method_runs[m].rows.end());
        stats[m] = run_stats(a.method_runs[m], MetricField::avg_secrecy);
    }

    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            CompareRow row;
            row.method_a = methods[i];
            row.method_b = methods[j];
            row.mean_a = stats[i].mean;
            row.mean_b = stats[j].mean;
            row.diff = stats[i].mean - stats[j].mean;
            row.pooled = pooled_se(stats[i], stats[j]);
            row.verdict = std::abs(row.diff) > 2.0 * row.pooled ? (row.diff > 0 ? 1 : -1) : 0;
            a.report.push_back(std::move(row));
        }
    }
    return a;
}

void write_run_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                       const RunArtifacts& a) {
    std::filesystem::create_directories(out_dir);
    save_config_file(out_dir + "/config.json", cfg);
    write_csv(out_dir + "/metrics.csv", a.rows);
    nlohmann::json summary = {{"name", cfg.name},
                              {"agent", to_string(cfg.agent)},
                              {"episodes", cfg.episodes},
                              {"seeds", cfg.seeds},
                              {"final_window", final_window_json(a)}};
    write_json_file(out_dir + "/summary.json", summary);
    save_first_seed_checkpoint(out_dir, a);
}

void write_sweep_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                         const std::string& axis, const SweepArtifacts& a) {
    std::filesystem::create_directories(out_dir);
    save_config_file(out_dir + "/config.json", cfg);
    write_csv(out_dir + "/metrics.csv", a.rows);
    nlohmann::json table = nlohmann::json::array();
    for (const SweepRow& r : a.table)
        table.push_back({{"axis", r.axis},
                         {"value", r.value},
                         {"field", r.field},
                         {"mean", r.mean},
                         {"sd", r.sd},
                         {"se", r.se},
                         {"seeds", r.seeds}});
    nlohmann::json summary = {{"name", cfg.name},
                              {"agent", to_string(cfg.agent)},
                              {"axis", axis},
                              {"final_window_frac", kFinalWindowFrac},
                              {"table", table}};
    write_json_file(out_dir + "/summary.json", summary);
}

void write_compare_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                           const std::vector<std::string>& methods, const CompareArtifacts& a) {
    std::filesystem::create_directories(out_dir);
    save_config_file(out_dir + "/config.json", cfg);
    write_csv(out_dir + "/metrics.csv", a.rows);
    nlohmann::json report = nlohmann::json::array();
    for (const CompareRow& r : a.report)
        report.push_back({{"method_a", r.method_a},
                          {"method_b", r.method_b},
                          {"mean_a", r.mean_a},
                          {"mean_b", r.mean_b},
                          {"diff", r.diff},
                          {"pooled_se", r.pooled},
                          {"verdict", r.verdict}});
    nlohmann::json summary = {{"name", cfg.name},
                              {"methods", methods},
                              {"metric", "avg_secrecy"},
                              {"final_window_frac", kFinalWindowFrac},
                              {"report", report}};
    write_json_file(out_dir + "/summary.json", summary);
}

} // namespace crnoma
