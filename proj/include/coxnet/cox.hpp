#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coxnet/geometry.hpp"
#include "coxnet/rng.hpp"

namespace coxnet {

/// All model parameters. Densities are per km, powers are relative linear
/// units, bandwidths are MHz. The SIR depends on the powers only through
/// gamma = p_r / p_s.
struct NetworkConfig {
    double lambda_l = 0.0;  // roads per km
    double mu_s = 0.0;      // RSUs per km of road
    double mu_r = 0.0;      // relays per km of road
    double mu_u = 0.0;      // users per km of road
    double p_s = 1.0;       // RSU transmit power
    double p_r = 1.0;       // relay transmit power
    double alpha = 2.5;     // same-road path-loss exponent, 2 < alpha <= beta
    double beta = 3.5;      // cross-road path-loss exponent
    double w1_mhz = 10.0;   // bandwidth serving users (RSU->user, relay->user)
    double w2_mhz = 10.0;   // bandwidth reserved for RSU->relay links

    double gamma() const { return p_r / p_s; }
    double total_bandwidth_mhz() const { return w1_mhz + w2_mhz; }

    /// Throws std::invalid_argument naming the offending field if any model
    /// invariant is violated (densities >= 0, powers > 0, 2 < alpha <= beta,
    /// bandwidths >= 0).
    void validate() const;
};

enum class PalmKind { none, typical_user, typical_relay };
enum class EntityKind { rsu, relay, user };

const char* to_string(EntityKind k);

/// Points of one line, as sorted 1-D coordinates (km along the line,
/// measured from the foot of the perpendicular).
struct LinePopulation {
    std::vector<double> rsus;
    std::vector<double> relays;
    std::vector<double> users;
};

/// One sampled network snapshot: the line sample plus per-line point
/// processes, populated over each line's full chord through the window.
/// Under Palm conditioning the palm line carries a user (or relay) at
/// coordinate 0.
struct Realization {
    LineProcessSample lines;
    std::vector<LinePopulation> points;  // parallel to lines.lines
    PalmKind palm_kind = PalmKind::none;

    bool is_palm_line(std::size_t line_index) const {
        return lines.palm_line && *lines.palm_line == line_index;
    }
    std::size_t line_count() const { return lines.lines.size(); }
};

struct Transmitter {
    EntityKind kind = EntityKind::rsu;
    std::size_t line_index = 0;
    double coord = 0.0;     // km along the line
    double distance = 0.0;  // km from the origin

    Vec2 position(const Realization& real) const {
        return point_on_line(real.lines.lines[line_index], coord);
    }
};

struct BuildOptions {
    bool include_users = true;  // users never transmit; estimators that do not
                                // need them skip the sampling
    double guard_km = 0.0;      // extra populated span beyond the window chord
};

/// Homogeneous 1-D Poisson process on [-halfspan, halfspan]: Poisson count
/// with mean 2 * halfspan * intensity, iid uniform positions, sorted.
std::vector<double> sample_ppp_on_segment(double intensity, double halfspan, Rng& rng);

/// Builds a full realization from one master seed. Per-line, per-process
/// substreams are derived by counter, so the result is reproducible and the
/// Palm insertion never perturbs the non-palm lines.
Realization build_realization(const NetworkConfig& cfg, double window_radius,
                              PalmKind palm_kind, std::uint64_t seed,
                              const BuildOptions& opts = {});

struct NearestResult {
    Transmitter tx;
    double distance = 0.0;
    bool same_line = false;  // event E: serving transmitter on the palm line
};

/// Global argmin over all RSUs and relays as seen from the origin.
/// Deterministic tie-break within 1e-12 km: RSU before relay, then lower
/// line index, then lower coordinate. Throws std::runtime_error when the
/// realization holds no transmitter.
NearestResult nearest_transmitter(const Realization& real);

/// Same argmin restricted to RSUs (relay association per the relay tier).
NearestResult nearest_rsu(const Realization& real);

/// CSV dump (entity_kind, line_index, x_km, y_km) for plotting.
void dump_realization(const Realization& real, std::ostream& os);

}  // namespace coxnet
