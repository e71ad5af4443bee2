#pragma once

#include <functional>

#include "coxnet/cox.hpp"
#include "coxnet/rng.hpp"

namespace coxnet {

/// Dual-slope power-law path loss: d^-alpha on the same road, d^-beta
/// across roads. The pure power law is evaluated for all d > 0.
double path_loss(double d, bool same_road, double alpha, double beta);

/// Rayleigh fading power: H ~ Exp(1).
double sample_fading(Rng& rng);

struct LinkBudget {
    double serving_power = 0.0;       // relative to p_s
    double interference_power = 0.0;  // relative to p_s
    double sir = 0.0;                 // +inf when there is no interferer

    bool infinite() const { return interference_power == 0.0; }
};

/// Per-transmitter fading draw; (kind, line_index, index within that line's
/// list) identifies the link. Lets tests pin H deterministically.
using FadingFn = std::function<double(EntityKind, std::size_t, std::size_t)>;

/// SIR of the palm user at the origin served by `serving` (band W1).
/// The denominator sums over every other RSU and relay, full buffer; the
/// slope of each term is alpha on the palm line and beta elsewhere. Powers
/// enter as (1, gamma), so the SIR depends on (p_s, p_r) only through their
/// ratio and joint power scaling leaves every sample bit-identical.
LinkBudget sir_user(const Realization& real, const NetworkConfig& cfg,
                    const NearestResult& serving, const FadingFn& fading);
LinkBudget sir_user(const Realization& real, const NetworkConfig& cfg,
                    const NearestResult& serving, Rng& rng);

/// SIR of the palm relay at the origin served by its nearest RSU (band W2).
/// Only RSUs interfere; relays are silent on W2.
LinkBudget sir_relay(const Realization& real, const NetworkConfig& cfg,
                     const NearestResult& serving_rsu, const FadingFn& fading);
LinkBudget sir_relay(const Realization& real, const NetworkConfig& cfg,
                     const NearestResult& serving_rsu, Rng& rng);

}  // namespace coxnet
