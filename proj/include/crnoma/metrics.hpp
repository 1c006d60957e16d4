#pragma once

#include "crnoma/agents.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace crnoma {

// One CSV row per (run, episode).
struct MetricRecord {
    std::string run_id;
    std::uint64_t seed = 0;
    int episode = 0;
    double ret_g = 0.0;
    double ret_pap = 0.0;
    double ret_sap = 0.0;
    double avg_secrecy = 0.0;
    double energy_j = 0.0;
    double pfee = 0.0;
    std::array<long, 5> violations{};
    int slots = 0;
};

MetricRecord to_record(const std::string& run_id, std::uint64_t seed, const EpisodeMetrics& m);

std::string metrics_csv_header();
// fixed column order, %.17g floats, "\n" terminators: byte-stable output
void append_metrics_csv(std::ostream& out, const MetricRecord& r);
bool record_fields_finite(const MetricRecord& r);

// metric selectors for aggregation
enum class MetricField { ret_g, avg_secrecy, energy, pfee };
double metric_value(const MetricRecord& r, MetricField f);
double metric_value(const EpisodeMetrics& m, MetricField f);

// mean of the last ceil(frac * n) episodes of one run's trace
double final_window_mean(const std::vector<EpisodeMetrics>& trace, double frac, MetricField f);
double final_window_mean(const std::vector<double>& per_episode, double frac);

struct SeedStats {
    double mean = 0.0;
    double sd = 0.0; // sample standard deviation
    double se = 0.0; // sd / sqrt(n)
    int n = 0;
};

SeedStats across_seeds(const std::vector<double>& per_seed_values);
double pooled_se(const SeedStats& a, const SeedStats& b);

} // namespace crnoma
