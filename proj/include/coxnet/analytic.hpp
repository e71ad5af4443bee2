#pragma once

#include <functional>

#include "coxnet/cox.hpp"
#include "coxnet/quad.hpp"

namespace coxnet {

/// Tolerance plumbing for the nested integrals. Inner integrals run at
/// rel 1e-7 / abs 1e-10, outer ones at rel 1e-6; the interpolation budget
/// stays an order of magnitude under the inner tolerances.
struct AnalyticOptions {
    QuadSpec inner{1e-7, 1e-10, 40, Transform::inverse};
    QuadSpec outer{1e-6, 1e-9, 30, Transform::inverse};
    QuadSpec spectral{1e-5, 1e-6, 30, Transform::inverse};
    double interp_tol = 1e-10;      // Chebyshev budget for memoized kernels
    double kill_threshold = 1e-12;  // outer truncation on the void envelope
    double coverage_floor = 1e-5;   // spectral-integral truncation
    double xi_cap = 64.0;           // hard cap on the spectral upper limit

    AnalyticOptions scaled(double factor) const {
        AnalyticOptions o = *this;
        o.inner = inner.scaled(factor);
        o.outer = outer.scaled(factor);
        o.spectral = spectral.scaled(factor);
        o.interp_tol *= factor;
        return o;
    }
};

/// Joint SIR coverage terms of the typical user, split by the association
/// kind (RSU vs relay) and the same-line event. total is their sum.
struct CoverageComponents {
    double e_as = 0.0;   // same line, RSU-served
    double e_ar = 0.0;   // same line, relay-served
    double ec_as = 0.0;  // cross line, RSU-served
    double ec_ar = 0.0;  // cross line, relay-served
    double total = 0.0;

    static CoverageComponents assemble(double e_as, double e_ar, double ec_as, double ec_ar) {
        CoverageComponents c{e_as, e_ar, ec_as, ec_ar, 0.0};
        c.total = ((e_as + e_ar) + (ec_as + ec_ar));
        return c;
    }
};

struct MeanLoads {
    double users_per_rsu = 0.0;    // mu_u P(A_s) / mu_s
    double users_per_relay = 0.0;  // mu_u P(A_r) / mu_r
    double relays_per_rsu = 0.0;   // mu_r / mu_s
};

struct ThroughputReport {
    double t_total_mbps = 0.0;
    double t_s_mbps = 0.0;  // normalized rate of RSU-associated users
    double t_r_mbps = 0.0;  // min of the two relay branches
    double backhaul_branch_mbps = 0.0;
    double access_branch_mbps = 0.0;
    bool backhaul_limited = false;
    double u_bar_s = 0.0, u_bar_r = 0.0, r_bar_s = 0.0;
    double se_rsu_user = 0.0;   // E[log2(1+SIR_{s->u})], bits/s/Hz
    double se_relay_user = 0.0; // E[log2(1+SIR_{r->u})]
    double se_rsu_relay = 0.0;  // E[log2(1+SIR_{s->r})]
    double p_as = 0.0, p_ar = 0.0;
};

enum class AssocKind { rsu, relay };

/// Probability that the typical user is associated with an RSU: same-line
/// nearest-point term plus the cross-line angular term, both under the
/// line-process void functional. P(A_r) = 1 - P(A_s).
double assoc_prob_rsu(const NetworkConfig& cfg, const AnalyticOptions& opts = {});

/// Mass-transport mean loads. Requires mu_s > 0 and mu_r > 0.
MeanLoads mean_loads(const NetworkConfig& cfg, const AnalyticOptions& opts = {});

/// SIR coverage of the typical user at linear threshold tau, as the four
/// joint terms (power ratio enters through gamma).
CoverageComponents user_coverage(const NetworkConfig& cfg, double tau,
                                 const AnalyticOptions& opts = {});

/// Equal-power (gamma = 1) total coverage via the merged kernels; fast path
/// that depends on mu_s and mu_r only through their sum.
double user_coverage_equal_power(const NetworkConfig& cfg, double tau,
                                 const AnalyticOptions& opts = {});

/// SIR coverage of the typical relay fed by its nearest RSU; interference
/// from RSUs only, so only (lambda_l, mu_s, alpha, beta, tau) enter.
double relay_coverage(const NetworkConfig& cfg, double tau, const AnalyticOptions& opts = {});

/// Conditional user coverage given the association kind.
double cond_coverage(const NetworkConfig& cfg, double tau, AssocKind which,
                     const AnalyticOptions& opts = {});

/// Integral of a nonincreasing coverage function over the spectral axis:
/// E[log2(1+SIR)] when fed xi |-> P(SIR > 2^xi - 1). Truncated where the
/// coverage drops below opts.coverage_floor.
double spectral_integral(const std::function<double(double)>& coverage_of_xi,
                         const AnalyticOptions& opts = {});

/// Mean user throughput: RSU branch plus the min of the relay backhaul and
/// access branches, weighted by the association split and normalized by the
/// mass-transport mean loads.
ThroughputReport throughput(const NetworkConfig& cfg, const AnalyticOptions& opts = {});

/// Multiplicative throughput gain over the no-relay network in the
/// equal-power, wide-backhaul regime.
double throughput_gain(const NetworkConfig& cfg, const AnalyticOptions& opts = {});

/// dB <-> linear helpers for SIR thresholds.
double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace coxnet
