#pragma once

#include "crnoma/error_class.hpp"
#include "crnoma/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace crnoma {

// Large-scale gain d^-lambda. Distance must be strictly positive.
double path_gain(double distance_m, double exponent);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(Vec2 a, Vec2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// The six link distances of the two-hop topology. Canonical geometry input:
// presets pin these directly, so tabulated distances that are not jointly
// planar-realizable remain usable.
struct LinkDistances {
    double pap_pue = 80.0;
    double pap_sap = 50.0;
    double pap_eve = 160.0;
    double sap_pue = 25.0;
    double sap_sue = 25.0;
    double sap_eve = 200.0;
};

// Optional planar layout; collapses to LinkDistances.
struct NodeLayout {
    Vec2 pap, sap, pue, sue, eve;
    LinkDistances to_distances() const;
};

// One value per directed link, reused for nominal gains, uncertainty bounds
// and margined gains alike.
struct LinkGains {
    double pap_pue = 0.0;
    double pap_sap = 0.0;
    double pap_eve = 0.0;
    double sap_pue = 0.0;
    double sap_sue = 0.0;
    double sap_eve = 0.0;
};

// Mean large-scale gains d^-lambda for every link. The energy-harvest link
// reuses pap_sap: harvest and relay decoding see the same channel.
LinkGains nominal_gains(const LinkDistances& d, double exponent);

// Absolute uncertainty radii: relative level times the nominal mean gain of
// each link (so every link is perturbed at the same relative scale).
LinkGains uncertainty_bounds(const LinkGains& nominal, double relative_level);

enum class FadingFamily {
    rayleigh_power, // unit-mean exponential power gain
    none,           // deterministic fade of 1 (tests)
};

struct FadingConfig {
    FadingFamily family = FadingFamily::rayleigh_power;
    double mean = 1.0;
    bool iid_per_slot = true;
};

// Channel state for one slot. True gains drive physics; estimates are what
// the agents and robust evaluators are allowed to see. Eavesdropper links
// carry true gains only; nobody estimates them.
struct ChannelSet {
    LinkGains gain;     // true per-slot gains (fade * d^-lambda)
    double est_pap_pue = 0.0;
    double est_pap_sap = 0.0;
    double est_sap_pue = 0.0;
    double est_sap_sue = 0.0;
};

// Draw true gains and imperfect estimates. Estimate = true gain minus an
// error drawn from `cls` scaled by the link's bound, clipped at zero; the
// clip keeps |gain - estimate| <= bound because a clipped gain was below the
// error itself.
ChannelSet draw_channel_set(const LinkGains& nominal, const FadingConfig& fading,
                            const LinkGains& bounds, ErrorClass cls, Rng& rng);

// Estimated gains as a LinkGains, with the unobservable eavesdropper links
// filled from the nominal means (the only estimate anyone can hold for them).
LinkGains estimated_gains(const ChannelSet& ch, const LinkGains& nominal);

} // namespace crnoma
