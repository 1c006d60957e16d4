#include "crnoma/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace crnoma {

namespace {

void put_g17(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

} // namespace

MetricRecord to_record(const std::string& run_id, std::uint64_t seed, const EpisodeMetrics& m) {
    MetricRecord r;
    r.run_id = run_id;
    r.seed = seed;
    r.episode = m.episode;
    r.ret_g = m.ret_g;
    r.ret_pap = m.ret_pap;
    r.ret_sap = m.ret_sap;
    r.avg_secrecy = m.avg_secrecy;
    r.energy_j = m.energy_j;
    r.pfee = m.pfee;
    r.violations = m.violations;
    r.slots = m.slots;
    return r;
}

std::string metrics_csv_header() {
    return "run_id,seed,episode,ret_g,ret_pap,ret_sap,avg_secrecy,energy_j,pfee,"
           "viol_c1,viol_c2,viol_c3,viol_c4,viol_c5,slots";
}

void append_metrics_csv(std::ostream& out, const MetricRecord& r) {
    out << r.run_id << ',' << r.seed << ',' << r.episode << ',';
    put_g17(out, r.ret_g);
    out << ',';
    put_g17(out, r.ret_pap);
    out << ',';
    put_g17(out, r.ret_sap);
    out << ',';
    put_g17(out, r.avg_secrecy);
    out << ',';
    put_g17(out, r.energy_j);
    out << ',';
    put_g17(out, r.pfee);
    for (long v : r.violations) out << ',' << v;
    out << ',' << r.slots << '\n';
}

bool record_fields_finite(const MetricRecord& r) {
    for (double v : {r.ret_g, r.ret_pap, r.ret_sap, r.avg_secrecy, r.energy_j, r.pfee})
        if (!std::isfinite(v)) return false;
    return true;
}

double metric_value(const MetricRecord& r, MetricField f) {
    switch (f) {
        case MetricField::ret_g: return r.ret_g;
        case MetricField::avg_secrecy: return r.avg_secrecy;
        case MetricField::energy: return r.energy_j;
        case MetricField::pfee: return r.pfee;
    }
    return 0.0;
}

double metric_value(const EpisodeMetrics& m, MetricField f) {
    switch (f) {
        case MetricField::ret_g: return m.ret_g;
        case MetricField::avg_secrecy: return m.avg_secrecy;
        case MetricField::energy: return m.energy_j;
        case MetricField::pfee: return m.pfee;
    }
    return 0.0;
}

double final_window_mean(const std::vector<double>& per_episode, double frac) {
    if (per_episode.empty()) throw std::invalid_argument("final_window_mean: empty trace");
    if (frac <= 0.0 || frac > 1.0)
        throw std::invalid_argument("final_window_mean: frac must lie in (0, 1]");
    std::size_t n = per_episode.size();
    std::size_t w = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n)));
    if (w == 0) w = 1;
    double sum = 0.0;
    for (std::size_t i = n - w; i < n; ++i) sum += per_episode[i];
    return sum / static_cast<double>(w);
}

double final_window_mean(const std::vector<EpisodeMetrics>& trace, double frac, MetricField f) {
    std::vector<double> v;
    v.reserve(trace.size());
    for (const EpisodeMetrics& m : trace) v.push_back(metric_value(m, f));
    return final_window_mean(v, frac);
}

SeedStats across_seeds(const std::vector<double>& per_seed_values) {
    SeedStats s;
    s.n = static_cast<int>(per_seed_values.size());
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double v : per_seed_values) sum += v;
    s.mean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : per_seed_values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
        s.se = s.sd / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

double pooled_se(const SeedStats& a, const SeedStats& b) {
    return std::sqrt(a.se * a.se + b.se * b.se);
}

} // namespace crnoma
