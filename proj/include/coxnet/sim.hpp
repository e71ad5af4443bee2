#pragma once

#include <cstdint>
#include <vector>

#include "coxnet/channel.hpp"
#include "coxnet/cox.hpp"

namespace coxnet {

struct McOptions {
    long n_reps = 10000;
    double window_radius_km = 0.0;  // 0 selects the default heuristic
    std::uint64_t seed = 1;
    int threads = 1;  // results are identical for any thread count
};

/// 15 / min(mu_s + mu_r, lambda_l) km, clamped to [10, 50] km.
double default_window_radius(const NetworkConfig& cfg);

double wilson_halfwidth(long successes, long n);

/// Palm association statistics of the typical user. Joint counts sum to the
/// marginals exactly; p_as + p_ar = 1 by construction.
struct AssociationStats {
    long n = 0;
    long n_as_e = 0, n_as_ec = 0, n_ar_e = 0, n_ar_ec = 0;
    double p_as = 0.0, p_ar = 0.0;
    double p_as_e = 0.0, p_as_ec = 0.0, p_ar_e = 0.0, p_ar_ec = 0.0;
    double ci_halfwidth = 0.0;  // 95% Wilson on p_as
    double mean_assoc_distance_km = 0.0;
};

AssociationStats estimate_association(const NetworkConfig& cfg, const McOptions& mc);

enum class CurveKind { user_total, user_given_as, user_given_ar, relay };

const char* to_string(CurveKind k);

struct CoverageCurve {
    CurveKind kind = CurveKind::user_total;
    std::vector<double> taus_db;
    std::vector<double> taus_linear;
    std::vector<double> probs;
    std::vector<double> ci_halfwidths;
    long n = 0;  // samples in the conditioning class
};

struct UserCoverageEstimate {
    CoverageCurve total;
    CoverageCurve given_as;
    CoverageCurve given_ar;
    AssociationStats assoc;
};

/// One Palm SIR sample per replication, classified by association kind and
/// the same-line event; curves share the samples across the tau grid, so
/// each empirical curve is exactly nonincreasing and the law of total
/// probability holds as a count identity.
UserCoverageEstimate estimate_user_coverage(const NetworkConfig& cfg,
                                            const std::vector<double>& taus_db,
                                            const McOptions& mc);

/// Typical-relay SIR against its nearest RSU; interference from RSUs only.
CoverageCurve estimate_relay_coverage(const NetworkConfig& cfg,
                                      const std::vector<double>& taus_db,
                                      const McOptions& mc);

/// Mean loads by two routes: the mass-transport form mu_u p_hat / mu over
/// Palm association replications, and a direct counting estimator that
/// associates every user in the inner half-window of stationary snapshots.
struct LoadStats {
    long n = 0;
    // Mass-transport estimates (Palm ratio).
    double mt_users_per_rsu = 0.0, mt_users_per_rsu_ci = 0.0;
    double mt_users_per_relay = 0.0, mt_users_per_relay_ci = 0.0;
    // Direct counting estimates.
    double count_users_per_rsu = 0.0, count_users_per_rsu_ci = 0.0;
    double count_users_per_relay = 0.0, count_users_per_relay_ci = 0.0;
    double count_relays_per_rsu = 0.0, count_relays_per_rsu_ci = 0.0;
    bool window_warning = false;  // inner window under 4x the association distance
};

LoadStats estimate_loads(const NetworkConfig& cfg, const McOptions& mc);

/// Raw per-replication user SIR sample (exposed for reuse by the
/// experiment runner and tests).
struct UserSirSample {
    double sir = 0.0;
    bool assoc_rsu = false;
    bool same_line = false;
    double distance_km = 0.0;
};

UserSirSample sample_user_sir(const NetworkConfig& cfg, double window_radius,
                              std::uint64_t rep_seed);
double sample_relay_sir(const NetworkConfig& cfg, double window_radius,
                        std::uint64_t rep_seed);

}  // namespace coxnet
