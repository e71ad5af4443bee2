#include "coxnet/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coxnet {

double path_loss(double d, bool same_road, double alpha, double beta) {
    if (!(d > 0.0)) throw std::invalid_argument("path_loss: d must be > 0");
    return std::pow(d, same_road ? -alpha : -beta);
}

double sample_fading(Rng& rng) {
    // Inverse-CDF; uniform() < 1 so the log argument stays positive.
    return -std::log1p(-rng.uniform());
}

namespace {

bool same_point(const Transmitter& tx, EntityKind kind, std::size_t line, double coord) {
    return tx.kind == kind && tx.line_index == line && tx.coord == coord;
}

LinkBudget sir_from(const Realization& real, const NetworkConfig& cfg,
                    const NearestResult& serving, bool relays_interfere,
                    const FadingFn& fading) {
    const double gamma = cfg.gamma();
    const double serving_rel_power = serving.tx.kind == EntityKind::rsu ? 1.0 : gamma;

    LinkBudget budget;
    const double h0 = fading(serving.tx.kind, serving.tx.line_index, 0);
    budget.serving_power =
        serving_rel_power * h0 *
        path_loss(serving.distance, serving.same_line, cfg.alpha, cfg.beta);

    double interference = 0.0;
    for (std::size_t i = 0; i < real.points.size(); ++i) {
        const bool same_road = real.is_palm_line(i);
        const double line_r = real.lines.lines[i].r;
        auto add = [&](const std::vector<double>& coords, EntityKind kind, double rel_power) {
            for (std::size_t j = 0; j < coords.size(); ++j) {
                const double t = coords[j];
                if (same_point(serving.tx, kind, i, t)) continue;
                if (same_road && t == 0.0 && kind == EntityKind::relay &&
                    real.palm_kind == PalmKind::typical_relay)
                    continue;  // the receiver itself
                const double d = std::hypot(line_r, t);
                interference += rel_power * fading(kind, i, j + 1) *
                                path_loss(d, same_road, cfg.alpha, cfg.beta);
            }
        };
        add(real.points[i].rsus, EntityKind::rsu, 1.0);
        if (relays_interfere) add(real.points[i].relays, EntityKind::relay, gamma);
    }
    budget.interference_power = interference;
    budget.sir = interference > 0.0 ? budget.serving_power / interference
                                    : std::numeric_limits<double>::infinity();
    return budget;
}

FadingFn rng_fading(Rng& rng) {
    return [&rng](EntityKind, std::size_t, std::size_t) { return sample_fading(rng); };
}

}  // namespace

LinkBudget sir_user(const Realization& real, const NetworkConfig& cfg,
                    const NearestResult& serving, const FadingFn& fading) {
    return sir_from(real, cfg, serving, true, fading);
}

LinkBudget sir_user(const Realization& real, const NetworkConfig& cfg,
                    const NearestResult& serving, Rng& rng) {
    return sir_from(real, cfg, serving, true, rng_fading(rng));
}

LinkBudget sir_relay(const Realization& real, const NetworkConfig& cfg,
                     const NearestResult& serving_rsu, const FadingFn& fading) {
    if (serving_rsu.tx.kind != EntityKind::rsu)
        throw std::invalid_argument("sir_relay: serving transmitter must be an RSU");
    return sir_from(real, cfg, serving_rsu, false, fading);
}

LinkBudget sir_relay(const Realization& real, const NetworkConfig& cfg,
                     const NearestResult& serving_rsu, Rng& rng) {
    return sir_relay(real, cfg, serving_rsu, rng_fading(rng));
}

}  // namespace coxnet
