#include "coxnet/cox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace coxnet {

namespace {

// Substream tags for derive_seed.
enum : std::uint64_t {
    kStreamLines = 1,
    kStreamPalmLine = 2,
    kStreamRsu = 3,
    kStreamRelay = 4,
    kStreamUser = 5,
};
constexpr std::uint64_t kPalmLineKey = ~std::uint64_t{0};

constexpr double kTieEps = 1e-12;

int kind_rank(EntityKind k) { return k == EntityKind::rsu ? 0 : 1; }

}  // namespace

void NetworkConfig::validate() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("NetworkConfig: " + msg); };
    if (!std::isfinite(lambda_l) || lambda_l < 0.0) bad("lambda_l must be finite and >= 0");
    if (!std::isfinite(mu_s) || mu_s < 0.0) bad("mu_s must be finite and >= 0");
    if (!std::isfinite(mu_r) || mu_r < 0.0) bad("mu_r must be finite and >= 0");
    if (!std::isfinite(mu_u) || mu_u < 0.0) bad("mu_u must be finite and >= 0");
    if (!std::isfinite(p_s) || p_s <= 0.0) bad("p_s must be finite and > 0");
    if (!std::isfinite(p_r) || p_r <= 0.0) bad("p_r must be finite and > 0");
    if (!std::isfinite(alpha) || alpha <= 2.0) bad("alpha must satisfy 2 < alpha <= beta");
    if (!std::isfinite(beta) || beta < alpha) bad("beta must satisfy 2 < alpha <= beta");
    if (!std::isfinite(w1_mhz) || w1_mhz < 0.0) bad("w1_mhz must be finite and >= 0");
    if (!std::isfinite(w2_mhz) || w2_mhz < 0.0) bad("w2_mhz must be finite and >= 0");
}

const char* to_string(EntityKind k) {
    switch (k) {
        case EntityKind::rsu: return "rsu";
        case EntityKind::relay: return "relay";
        case EntityKind::user: return "user";
    }
    return "?";
}

std::vector<double> sample_ppp_on_segment(double intensity, double halfspan, Rng& rng) {
    if (!std::isfinite(intensity) || intensity < 0.0)
        throw std::invalid_argument("sample_ppp_on_segment: intensity must be finite and >= 0");
    if (!std::isfinite(halfspan) || halfspan <= 0.0)
        throw std::invalid_argument("sample_ppp_on_segment: halfspan must be finite and > 0");

    std::vector<double> coords;
    const double mean = 2.0 * halfspan * intensity;
    if (mean > 0.0) {
        std::poisson_distribution<long> count(mean);
        const long n = count(rng);
        coords.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) coords.push_back((2.0 * rng.uniform() - 1.0) * halfspan);
        std::sort(coords.begin(), coords.end());
    }
    return coords;
}

Realization build_realization(const NetworkConfig& cfg, double window_radius,
                              PalmKind palm_kind, std::uint64_t seed,
                              const BuildOptions& opts) {
    cfg.validate();
    if (!std::isfinite(window_radius) || window_radius <= 0.0)
        throw std::invalid_argument("build_realization: window_radius must be > 0");

    Realization real;
    real.palm_kind = palm_kind;

    {
        Rng line_rng(derive_seed(seed, {kStreamLines}));
        real.lines = sample_line_process(cfg.lambda_l, window_radius, line_rng);
    }
    if (palm_kind != PalmKind::none) {
        Rng palm_rng(derive_seed(seed, {kStreamPalmLine}));
        real.lines = palm_condition_line(std::move(real.lines), palm_rng);
    }

    real.points.resize(real.lines.lines.size());
    for (std::size_t i = 0; i < real.lines.lines.size(); ++i) {
        const bool palm = real.is_palm_line(i);
        const std::uint64_t line_key = palm ? kPalmLineKey : static_cast<std::uint64_t>(i);
        const Line& line = real.lines.lines[i];
        // Populate the full chord through the window (plus guard).
        const double chord_sq = window_radius * window_radius - line.r * line.r;
        const double halfspan = std::sqrt(std::max(chord_sq, 0.0)) + opts.guard_km;
        LinePopulation& pop = real.points[i];
        if (halfspan <= 0.0) continue;
        {
            Rng rng(derive_seed(seed, {kStreamRsu, line_key}));
            pop.rsus = sample_ppp_on_segment(cfg.mu_s, halfspan, rng);
        }
        {
            Rng rng(derive_seed(seed, {kStreamRelay, line_key}));
            pop.relays = sample_ppp_on_segment(cfg.mu_r, halfspan, rng);
        }
        if (opts.include_users) {
            Rng rng(derive_seed(seed, {kStreamUser, line_key}));
            pop.users = sample_ppp_on_segment(cfg.mu_u, halfspan, rng);
        }
        if (palm) {
            // Palm entity at the origin, on the line through the origin.
            if (palm_kind == PalmKind::typical_user && opts.include_users) {
                pop.users.insert(std::lower_bound(pop.users.begin(), pop.users.end(), 0.0), 0.0);
            } else if (palm_kind == PalmKind::typical_relay) {
                pop.relays.insert(std::lower_bound(pop.relays.begin(), pop.relays.end(), 0.0), 0.0);
            }
        }
    }
    return real;
}

namespace {

// Scans one sorted coordinate list for the point closest to the origin on
// line i and challenges the current best.
void challenge_line(const Realization& real, std::size_t i, const std::vector<double>& coords,
                    EntityKind kind, bool skip_palm_origin, bool& found, NearestResult& best) {
    if (coords.empty()) return;
    const double line_r = real.lines.lines[i].r;
    auto it = std::lower_bound(coords.begin(), coords.end(), 0.0);
    // Candidates: the coordinates bracketing 0.
    for (int step = 0; step < 2; ++step) {
        auto cand = (step == 0) ? it : (it == coords.begin() ? coords.end() : std::prev(it));
        if (cand == coords.end()) continue;
        const double t = *cand;
        if (skip_palm_origin && real.is_palm_line(i) && t == 0.0) continue;
        const double d = std::hypot(line_r, t);
        if (!found) {
            found = true;
            best = {{kind, i, t, d}, d, real.is_palm_line(i)};
            continue;
        }
        const bool tie = std::abs(d - best.distance) <= kTieEps;
        bool better;
        if (!tie) {
            better = d < best.distance;
        } else {
            better = std::tuple(kind_rank(kind), i, t) <
                     std::tuple(kind_rank(best.tx.kind), best.tx.line_index, best.tx.coord);
        }
        if (better) best = {{kind, i, t, d}, d, real.is_palm_line(i)};
    }
}

NearestResult nearest_of(const Realization& real, bool include_relays) {
    bool found = false;
    NearestResult best;
    for (std::size_t i = 0; i < real.points.size(); ++i) {
        if (found && std::abs(real.lines.lines[i].r) > best.distance + kTieEps) continue;
        challenge_line(real, i, real.points[i].rsus, EntityKind::rsu, false, found, best);
        if (include_relays)
            challenge_line(real, i, real.points[i].relays, EntityKind::relay,
                           real.palm_kind == PalmKind::typical_relay, found, best);
    }
    if (!found) throw std::runtime_error("nearest_transmitter: realization holds no transmitter");
    return best;
}

}  // namespace

NearestResult nearest_transmitter(const Realization& real) { return nearest_of(real, true); }

NearestResult nearest_rsu(const Realization& real) { return nearest_of(real, false); }

void dump_realization(const Realization& real, std::ostream& os) {
    os << "entity_kind,line_index,x_km,y_km\n";
    for (std::size_t i = 0; i < real.points.size(); ++i) {
        const Line& line = real.lines.lines[i];
        auto emit = [&](const std::vector<double>& coords, EntityKind kind) {
            for (double t : coords) {
                const Vec2 p = point_on_line(line, t);
                os << to_string(kind) << ',' << i << ',' << p.x << ',' << p.y << '\n';
            }
        };
        emit(real.points[i].rsus, EntityKind::rsu);
        emit(real.points[i].relays, EntityKind::relay);
        emit(real.points[i].users, EntityKind::user);
    }
}

}  // namespace coxnet
