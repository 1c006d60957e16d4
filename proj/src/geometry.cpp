#include "crnoma/geometry.hpp"

#include <algorithm>

namespace crnoma {

double path_gain(double distance_m, double exponent) {
    if (!(distance_m > 0.0)) throw std::domain_error("path_gain: distance must be > 0");
    return std::pow(distance_m, -exponent);
}

LinkDistances NodeLayout::to_distances() const {
    LinkDistances d;
    d.pap_pue = dist(pap, pue);
    d.pap_sap = dist(pap, sap);
    d.pap_eve = dist(pap, eve);
    d.sap_pue = dist(sap, pue);
    d.sap_sue = dist(sap, sue);
    d.sap_eve = dist(sap, eve);
    return d;
}

LinkGains nominal_gains(const LinkDistances& d, double exponent) {
    LinkGains g;
    g.pap_pue = path_gain(d.pap_pue, exponent);
    g.pap_sap = path_gain(d.pap_sap, exponent);
    g.pap_eve = path_gain(d.pap_eve, exponent);
    g.sap_pue = path_gain(d.sap_pue, exponent);
    g.sap_sue = path_gain(d.sap_sue, exponent);
    g.sap_eve = path_gain(d.sap_eve, exponent);
    return g;
}

LinkGains uncertainty_bounds(const LinkGains& nominal, double relative_level) {
    if (relative_level < 0.0) throw std::domain_error("uncertainty level must be >= 0");
    LinkGains b;
    b.pap_pue = relative_level * nominal.pap_pue;
    b.pap_sap = relative_level * nominal.pap_sap;
    b.pap_eve = relative_level * nominal.pap_eve;
    b.sap_pue = relative_level * nominal.sap_pue;
    b.sap_sue = relative_level * nominal.sap_sue;
    b.sap_eve = relative_level * nominal.sap_eve;
    return b;
}

namespace {

double draw_fade(const FadingConfig& f, Rng& rng) {
    switch (f.family) {
    case FadingFamily::rayleigh_power: return f.mean * rng.exponential();
    case FadingFamily::none: return f.mean;
    }
    throw std::invalid_argument("unknown fading family");
}

double estimate_of(double gain, double bound, ErrorClass cls, Rng& rng) {
    double err = bound * draw_unit_error(cls, rng);
    return std::max(0.0, gain - err);
}

} // namespace

ChannelSet draw_channel_set(const LinkGains& nominal, const FadingConfig& fading,
                            const LinkGains& bounds, ErrorClass cls, Rng& rng) {
    ChannelSet ch;
    ch.gain.pap_pue = nominal.pap_pue * draw_fade(fading, rng);
    ch.gain.pap_sap = nominal.pap_sap * draw_fade(fading, rng);
    ch.gain.pap_eve = nominal.pap_eve * draw_fade(fading, rng);
    ch.gain.sap_pue = nominal.sap_pue * draw_fade(fading, rng);
    ch.gain.sap_sue = nominal.sap_sue * draw_fade(fading, rng);
    ch.gain.sap_eve = nominal.sap_eve * draw_fade(fading, rng);
    ch.est_pap_pue = estimate_of(ch.gain.pap_pue, bounds.pap_pue, cls, rng);
    ch.est_pap_sap = estimate_of(ch.gain.pap_sap, bounds.pap_sap, cls, rng);
    ch.est_sap_pue = estimate_of(ch.gain.sap_pue, bounds.sap_pue, cls, rng);
    ch.est_sap_sue = estimate_of(ch.gain.sap_sue, bounds.sap_sue, cls, rng);
    return ch;
}

LinkGains estimated_gains(const ChannelSet& ch, const LinkGains& nominal) {
    LinkGains g;
    g.pap_pue = ch.est_pap_pue;
    g.pap_sap = ch.est_pap_sap;
    g.sap_pue = ch.est_sap_pue;
    g.sap_sue = ch.est_sap_sue;
    g.pap_eve = nominal.pap_eve;
    g.sap_eve = nominal.sap_eve;
    return g;
}

} // namespace crnoma
