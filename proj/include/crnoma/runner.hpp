#pragma once

#include "crnoma/config.hpp"
#include "crnoma/metrics.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace crnoma {

// reported means use the last fifth of the episodes
inline constexpr double kFinalWindowFrac = 0.2;

// index-parallel map over [0, n); exceptions are collected and rethrown
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<EpisodeMetrics> trace;
    std::vector<std::pair<std::string, std::vector<double>>> params;
};

SeedRun run_single(const ExperimentConfig& cfg, std::uint64_t seed);

std::string run_id_of(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunArtifacts {
    std::vector<SeedRun> runs;      // one per configured seed, in order
    std::vector<MetricRecord> rows; // flattened per-episode records
};

RunArtifacts run_experiment(const ExperimentConfig& cfg);

// final-window statistic across this run set's seeds
SeedStats run_stats(const RunArtifacts& a, MetricField f);

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const std::string& value);

struct SweepRow {
    std::string axis;
    std::string value;
    std::string field; // "avg_secrecy" | "energy_j" | "pfee" | "ret_g"
    double mean = 0.0;
    double sd = 0.0;
    double se = 0.0;
    int seeds = 0;
};

struct SweepArtifacts {
    std::vector<MetricRecord> rows;
    std::vector<SweepRow> table;
    std::vector<RunArtifacts> cells; // one per axis value, in order
};

SweepArtifacts sweep_experiment(const ExperimentConfig& base, const std::string& axis,
                                const std::vector<std::string>& values);

struct CompareRow {
    std::string method_a, method_b;
    double mean_a = 0.0, mean_b = 0.0;
    double diff = 0.0;      // mean_a - mean_b on final-window secrecy
    double pooled = 0.0;    // pooled standard error of the difference
    int verdict = 0;        // sign of diff when |diff| > 2 pooled, else 0
};

struct CompareArtifacts {
    std::vector<MetricRecord> rows;
    std::vector<CompareRow> report;
    std::vector<RunArtifacts> method_runs; // parallel to the methods list
};

CompareArtifacts compare_methods(const ExperimentConfig& base,
                                 const std::vector<std::string>& methods);

void write_run_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                       const RunArtifacts& a);
void write_sweep_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                         const std::string& axis, const SweepArtifacts& a);
void write_compare_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                           const std::vector<std::string>& methods, const CompareArtifacts& a);

} // namespace crnoma
