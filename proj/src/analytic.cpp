#include "coxnet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace coxnet {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 1.5707963267948966;
// Beyond this the exponential factor underflows any tolerance in use.
constexpr double kExpCut = 700.0;

// The recurring interference functional
//   I(s; w, L) = int_L^inf du / (1 + (w^2 + u^2)^{beta/2} / s),
// the Laplace-transform exponent contributed by one road at perpendicular
// distance w whose points beyond the chord coordinate L interfere.
// Split at the half-power point u* (where the integrand is 1/2) so the
// adaptive rule works on unit-scale pieces whatever the magnitude of s.
double interference_integral(double s, double w, double L, double beta,
                             const QuadSpec& spec, const char* kernel) {
    if (s <= 0.0) return 0.0;
    const double w2 = w * w;
    auto g = [w2, beta, s](double u) {
        return 1.0 / (1.0 + std::pow(w2 + u * u, 0.5 * beta) / s);
    };

    const double s2b = std::pow(s, 2.0 / beta);
    const double ustar_sq = s2b - w2;

    if (ustar_sq <= L * L) {
        // Decaying from the lower limit on; integrate on the natural scale.
        const double scale = std::max(L, w);
        auto gs = [&g, scale](double y) { return scale * g(scale * y); };
        return require_converged(integrate_semi_infinite(gs, L / scale, spec), kernel);
    }

    // Plateau up to u*, then decay.
    const double ustar = std::sqrt(ustar_sq);
    const double plateau =
        require_converged(integrate_finite(g, L, ustar, spec), kernel);
    auto gt = [&g, ustar](double y) { return ustar * g(ustar * y); };
    const double tail = require_converged(integrate_semi_infinite(gt, 1.0, spec), kernel);
    return plateau + tail;
}

// One point process on the shared roads, with its power slot: the factor
// exp(-2 mu int tau r^k u^-a / (slot + tau r^k u^-a)) normalizes to
// s = tau r^k / slot inside the interference functional.
struct SlotPop {
    double mu = 0.0;
    double slot = 1.0;
};

struct EngineParams {
    double lambda_l = 0.0;
    double alpha = 2.5;
    double beta = 3.5;
    double tau = 1.0;
    double mu_void = 0.0;          // total competing intensity per road
    std::vector<SlotPop> pops;     // zero-intensity entries omitted
};

// Piecewise outer integration in log-r, pre-split around the knee scale so
// a spike that is narrow on the linear axis (large tau) is never missed.
template <class F>
double integrate_outer_log(F&& f, double r_lo, double r_hi, double r_knee,
                           const QuadSpec& spec, const char* kernel) {
    const double x_lo = std::log(r_lo);
    const double x_hi = std::log(r_hi);
    std::vector<double> cuts{x_lo};
    const double xk = std::log(std::clamp(r_knee, r_lo, r_hi));
    for (double c : {xk - 3.5, xk, xk + 3.5})
        if (c > cuts.back() + 0.5 && c < x_hi - 0.5) cuts.push_back(c);
    cuts.push_back(x_hi);

    auto g = [&f](double x) {
        const double r = std::exp(x);
        return f(r) * r;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += require_converged(integrate_finite(g, cuts[i], cuts[i + 1], spec), kernel);
    return total;
}

class CoverageEngine {
public:
    CoverageEngine(const EngineParams& p, const AnalyticOptions& opts)
        : p_(p), opts_(opts) {
        if (p_.mu_void <= 0.0)
            throw std::invalid_argument("coverage engine: no transmitter population");
        for (const SlotPop& pop : p_.pops)
            chat_alpha_.push_back(same_line_coeff(p_.tau / pop.slot));
        r_max_ = solve_r_max();
    }

    // int_0^inf 2 exp(-2 r mu_void - sum_k 2 mu_k r chat_k)
    //           exp(-2 lambda (V_near + V_far)) dr,
    // exclusive of the association-density prefactor.
    double same_line_integral() {
        double knee = 2.0 * p_.mu_void;
        for (std::size_t k = 0; k < p_.pops.size(); ++k)
            knee += 2.0 * p_.pops[k].mu * chat_alpha_[k];
        auto f = [this](double r) { return integrand(r, false); };
        return integrate_outer_log(f, r_floor(), r_max_, 1.0 / knee, opts_.outer,
                                   "coverage outer integral (same line)");
    }

    // Cross-line analogue carrying the angular kernel, exclusive of the
    // association-density prefactor c.
    double cross_line_integral() {
        // The serving attenuation r^beta makes the same-line coefficient
        // r-dependent; estimate the knee at the void scale.
        const double r0 = 1.0 / (2.0 * p_.mu_void);
        double knee = 2.0 * p_.mu_void;
        for (const SlotPop& pop : p_.pops)
            knee += 2.0 * pop.mu *
                    same_line_coeff(p_.tau * std::pow(r0, p_.beta - p_.alpha) / pop.slot);
        auto f = [this](double r) { return integrand(r, true); };
        return integrate_outer_log(f, r_floor(), r_max_, 1.0 / knee, opts_.outer,
                                   "coverage outer integral (cross line)");
    }

private:
    EngineParams p_;
    AnalyticOptions opts_;
    std::vector<double> chat_alpha_;
    double r_max_ = 0.0;

    double r_floor() const { return std::min(1e-9, r_max_ * 1e-12); }

    // int_1^inf dw / (1 + w^alpha / t): same-road interference coefficient
    // per unit association distance.
    double same_line_coeff(double t) const {
        return interference_integral(t, 0.0, 1.0, p_.alpha, opts_.inner,
                                     "same-line interference coefficient");
    }

    // Void functional of the line process at tau -> 0:
    // int_0^r (1 - e^{-2 mu_void sqrt(r^2-v^2)}) dv, via v = r cos(theta).
    double void_chord_integral(double r) const {
        const double m = p_.mu_void;
        auto f = [m, r](double theta) {
            const double sin_t = std::sin(theta);
            return (1.0 - std::exp(-2.0 * m * r * sin_t)) * r * sin_t;
        };
        return require_converged(integrate_finite(f, 0.0, kHalfPi, opts_.inner),
                                 "void chord integral");
    }

    double solve_r_max() const {
        const double kill = std::log(1.0 / opts_.kill_threshold);  // ~27.6
        double r = 1.0 / (2.0 * p_.mu_void);
        while (r < 1e4) {
            const double exponent =
                2.0 * p_.mu_void * r + 2.0 * p_.lambda_l * void_chord_integral(r);
            if (exponent > kill) break;
            r *= 2.0;
        }
        return std::min(r, 1e4);
    }

    double integrand(double r, bool cross_line) {
        const double serving_pow = std::pow(r, cross_line ? p_.beta : p_.alpha);

        // Same-line (palm road) factor: nearest-point void plus the
        // interference beyond the association distance.
        double exponent = 2.0 * p_.mu_void * r;
        for (std::size_t k = 0; k < p_.pops.size(); ++k) {
            const double coeff =
                cross_line ? same_line_coeff(p_.tau * serving_pow / std::pow(r, p_.alpha) /
                                             p_.pops[k].slot)
                           : chat_alpha_[k];
            exponent += 2.0 * p_.pops[k].mu * r * coeff;
        }
        if (exponent > kExpCut) return 0.0;

        std::vector<double> s(p_.pops.size());
        for (std::size_t k = 0; k < p_.pops.size(); ++k)
            s[k] = p_.tau * serving_pow / p_.pops[k].slot;

        // Interference integrals along the circle w = r cos, L = r sin are
        // interpolated in theta and shared by the near-line functional and
        // the angular kernel.
        MemoizedKernel circle(
            [this, r](double param, double theta) {
                return interference_integral(param, r * std::cos(theta), r * std::sin(theta),
                                             p_.beta, opts_.inner, "cross-road interference");
            },
            GridSpec{0.0, kHalfPi, opts_.interp_tol, 257}, 8);

        exponent += 2.0 * p_.lambda_l * near_line_functional(r, circle, s);
        if (exponent > kExpCut) return 0.0;
        exponent += 2.0 * p_.lambda_l * far_line_functional(r, s);
        if (exponent > kExpCut) return 0.0;

        if (!cross_line) return 2.0 * std::exp(-exponent);
        return std::exp(-exponent) * angular_kernel(r, circle, s);
    }

    double pop_exponent(const std::vector<double>& s, MemoizedKernel& circle,
                        double theta) {
        double e = 0.0;
        for (std::size_t k = 0; k < p_.pops.size(); ++k)
            e += 2.0 * p_.pops[k].mu * circle(s[k], theta);
        return e;
    }

    // int_0^r (1 - G2/H2-type product) dv in the theta parameterization.
    double near_line_functional(double r, MemoizedKernel& circle,
                                const std::vector<double>& s) {
        auto f = [&](double theta) {
            const double sin_t = std::sin(theta);
            const double expo = 2.0 * p_.mu_void * r * sin_t + pop_exponent(s, circle, theta);
            const double surv = expo > kExpCut ? 0.0 : std::exp(-expo);
            return (1.0 - surv) * r * sin_t;
        };
        return require_converged(integrate_finite(f, 0.0, kHalfPi, opts_.inner),
                                 "line functional (near)");
    }

    // int_r^inf (1 - G3/H3-type product) dv.
    double far_line_functional(double r, const std::vector<double>& s) {
        auto f = [&](double v) {
            double expo = 0.0;
            for (std::size_t k = 0; k < p_.pops.size(); ++k)
                expo += 2.0 * p_.pops[k].mu *
                        interference_integral(s[k], v, 0.0, p_.beta, opts_.inner,
                                              "cross-road interference (far)");
            return expo > kExpCut ? 1.0 : -std::expm1(-expo);
        };
        return require_converged(integrate_semi_infinite(f, r, opts_.inner),
                                 "line functional (far)");
    }

    // int_0^{pi/2} 4 lambda r e^{-2 mu_void r sin} (slot products) dtheta,
    // exclusive of the density prefactor c.
    double angular_kernel(double r, MemoizedKernel& circle, const std::vector<double>& s) {
        auto f = [&](double theta) {
            const double expo =
                2.0 * p_.mu_void * r * std::sin(theta) + pop_exponent(s, circle, theta);
            return expo > kExpCut ? 0.0 : std::exp(-expo);
        };
        const double integral = require_converged(
            integrate_finite(f, 0.0, kHalfPi, opts_.inner), "angular kernel");
        return 4.0 * p_.lambda_l * r * integral;
    }
};

EngineParams engine_params(const NetworkConfig& cfg, double tau,
                           std::vector<SlotPop> pops, double mu_void) {
    EngineParams p;
    p.lambda_l = cfg.lambda_l;
    p.alpha = cfg.alpha;
    p.beta = cfg.beta;
    p.tau = tau;
    p.mu_void = mu_void;
    for (const SlotPop& pop : pops)
        if (pop.mu > 0.0) p.pops.push_back(pop);
    return p;
}

void check_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("coverage: tau must be finite and > 0");
}

double tau_of_xi(double xi) { return std::expm1(xi * std::log(2.0)); }

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double assoc_prob_rsu(const NetworkConfig& cfg, const AnalyticOptions& opts) {
    cfg.validate();
    const double m = cfg.mu_s + cfg.mu_r;
    if (m <= 0.0)
        throw std::invalid_argument("assoc_prob_rsu: mu_s + mu_r must be > 0");
    if (cfg.mu_s == 0.0) return 0.0;

    auto void_chord = [&](double r) {
        auto f = [&](double theta) {
            const double sin_t = std::sin(theta);
            return (1.0 - std::exp(-2.0 * m * r * sin_t)) * r * sin_t;
        };
        return require_converged(integrate_finite(f, 0.0, kHalfPi, opts.inner),
                                 "association void chord");
    };
    auto angular = [&](double r) {
        auto f = [&](double theta) { return std::exp(-2.0 * r * m * std::sin(theta)); };
        return require_converged(integrate_finite(f, 0.0, kHalfPi, opts.inner),
                                 "association angular factor");
    };

    double r_max = 1.0 / (2.0 * m);
    const double kill = std::log(1.0 / opts.kill_threshold);
    while (r_max < 1e4 &&
           2.0 * m * r_max + 2.0 * cfg.lambda_l * void_chord(r_max) < kill)
        r_max *= 2.0;

    auto integrand = [&](double r) {
        const double base = 2.0 * m * r + 2.0 * cfg.lambda_l * void_chord(r);
        if (base > kExpCut) return 0.0;
        const double envelope = std::exp(-base);
        return 2.0 * cfg.mu_s * envelope +
               4.0 * cfg.mu_s * cfg.lambda_l * r * angular(r) * envelope;
    };
    const double p = integrate_outer_log(integrand, std::min(1e-9, r_max * 1e-12), r_max,
                                         1.0 / (2.0 * m), opts.outer,
                                         "association outer integral");
    return std::clamp(p, 0.0, 1.0);
}

MeanLoads mean_loads(const NetworkConfig& cfg, const AnalyticOptions& opts) {
    cfg.validate();
    if (cfg.mu_s <= 0.0 || cfg.mu_r <= 0.0)
        throw std::invalid_argument("mean_loads: requires mu_s > 0 and mu_r > 0");
    const double p_as = assoc_prob_rsu(cfg, opts);
    MeanLoads loads;
    loads.users_per_rsu = cfg.mu_u * p_as / cfg.mu_s;
    loads.users_per_relay = cfg.mu_u * (1.0 - p_as) / cfg.mu_r;
    loads.relays_per_rsu = cfg.mu_r / cfg.mu_s;
    return loads;
}

CoverageComponents user_coverage(const NetworkConfig& cfg, double tau,
                                 const AnalyticOptions& opts) {
    cfg.validate();
    check_tau(tau);
    const double m = cfg.mu_s + cfg.mu_r;
    if (m <= 0.0) throw std::invalid_argument("user_coverage: mu_s + mu_r must be > 0");
    const double g = cfg.gamma();

    double e_as = 0.0, ec_as = 0.0, e_ar = 0.0, ec_ar = 0.0;
    // RSU-served terms: slots (a, b) = (1, 1/gamma).
    if (cfg.mu_s > 0.0) {
        CoverageEngine engine(
            engine_params(cfg, tau, {{cfg.mu_s, 1.0}, {cfg.mu_r, 1.0 / g}}, m), opts);
        e_as = cfg.mu_s * engine.same_line_integral();
        ec_as = cfg.mu_s * engine.cross_line_integral();
    }
    // Relay-served terms: slots (a, b) = (gamma, 1).
    if (cfg.mu_r > 0.0) {
        if (g == 1.0 && cfg.mu_s > 0.0) {
            // Identical slot sets; the integrals only differ by prefactor.
            e_ar = e_as * cfg.mu_r / cfg.mu_s;
            ec_ar = ec_as * cfg.mu_r / cfg.mu_s;
        } else {
            CoverageEngine engine(
                engine_params(cfg, tau, {{cfg.mu_s, g}, {cfg.mu_r, 1.0}}, m), opts);
            e_ar = cfg.mu_r * engine.same_line_integral();
            ec_ar = cfg.mu_r * engine.cross_line_integral();
        }
    }
    return CoverageComponents::assemble(e_as, e_ar, ec_as, ec_ar);
}

double user_coverage_equal_power(const NetworkConfig& cfg, double tau,
                                 const AnalyticOptions& opts) {
    cfg.validate();
    check_tau(tau);
    const double m = cfg.mu_s + cfg.mu_r;
    if (m <= 0.0)
        throw std::invalid_argument("user_coverage_equal_power: mu_s + mu_r must be > 0");
    CoverageEngine engine(engine_params(cfg, tau, {{m, 1.0}}, m), opts);
    const double p = m * (engine.same_line_integral() + engine.cross_line_integral());
    return std::clamp(p, 0.0, 1.0);
}

double relay_coverage(const NetworkConfig& cfg, double tau, const AnalyticOptions& opts) {
    cfg.validate();
    check_tau(tau);
    if (cfg.mu_s <= 0.0) return 0.0;
    CoverageEngine engine(engine_params(cfg, tau, {{cfg.mu_s, 1.0}}, cfg.mu_s), opts);
    const double p = cfg.mu_s * (engine.same_line_integral() + engine.cross_line_integral());
    return std::clamp(p, 0.0, 1.0);
}

double cond_coverage(const NetworkConfig& cfg, double tau, AssocKind which,
                     const AnalyticOptions& opts) {
    const CoverageComponents c = user_coverage(cfg, tau, opts);
    const double p_as = assoc_prob_rsu(cfg, opts);
    const double p = which == AssocKind::rsu ? p_as : 1.0 - p_as;
    if (p < 1e-12)
        throw std::domain_error("cond_coverage: conditioning association probability vanishes");
    const double joint = which == AssocKind::rsu ? c.e_as + c.ec_as : c.e_ar + c.ec_ar;
    return joint / p;
}

double spectral_integral(const std::function<double(double)>& coverage_of_xi,
                         const AnalyticOptions& opts) {
    double total = 0.0;
    double lo = 0.0;
    double width = 8.0;
    while (lo < opts.xi_cap) {
        const double hi = std::min(lo + width, opts.xi_cap);
        total += require_converged(integrate_finite(coverage_of_xi, lo, hi, opts.spectral),
                                   "spectral integral");
        if (coverage_of_xi(hi) < opts.coverage_floor) break;
        lo = hi;
        width *= 2.0;
    }
    return total;
}

ThroughputReport throughput(const NetworkConfig& cfg, const AnalyticOptions& opts) {
    cfg.validate();
    if (cfg.mu_s <= 0.0 || cfg.mu_u <= 0.0)
        throw std::invalid_argument("throughput: requires mu_s > 0 and mu_u > 0");

    ThroughputReport rep;
    rep.p_as = cfg.mu_r > 0.0 ? assoc_prob_rsu(cfg, opts) : 1.0;
    rep.p_ar = 1.0 - rep.p_as;
    rep.u_bar_s = cfg.mu_u * rep.p_as / cfg.mu_s;
    rep.r_bar_s = cfg.mu_r / cfg.mu_s;

    // The user-coverage components at each spectral node serve both
    // conditional integrands.
    std::map<double, CoverageComponents> cache;
    auto components_at = [&](double xi) -> const CoverageComponents& {
        auto it = cache.find(xi);
        if (it == cache.end())
            it = cache.emplace(xi, user_coverage(cfg, tau_of_xi(xi), opts)).first;
        return it->second;
    };

    auto cov_su = [&](double xi) {
        const CoverageComponents& c = components_at(xi);
        return (c.e_as + c.ec_as) / rep.p_as;
    };
    rep.se_rsu_user = spectral_integral(cov_su, opts);
    rep.t_s_mbps = rep.u_bar_s > 0.0 ? cfg.w1_mhz * rep.se_rsu_user / rep.u_bar_s : 0.0;

    if (cfg.mu_r > 0.0 && rep.p_ar > 0.0) {
        rep.u_bar_r = cfg.mu_u * rep.p_ar / cfg.mu_r;
        auto cov_ru = [&](double xi) {
            const CoverageComponents& c = components_at(xi);
            return (c.e_ar + c.ec_ar) / rep.p_ar;
        };
        rep.se_relay_user = spectral_integral(cov_ru, opts);
        auto cov_sr = [&](double xi) { return relay_coverage(cfg, tau_of_xi(xi), opts); };
        rep.se_rsu_relay = spectral_integral(cov_sr, opts);

        rep.backhaul_branch_mbps =
            cfg.w2_mhz * rep.se_rsu_relay / (rep.r_bar_s * rep.u_bar_r);
        rep.access_branch_mbps = cfg.w1_mhz * rep.se_relay_user / rep.u_bar_r;
        rep.t_r_mbps = std::min(rep.backhaul_branch_mbps, rep.access_branch_mbps);
        rep.backhaul_limited = rep.backhaul_branch_mbps <= rep.access_branch_mbps;
    }
    rep.t_total_mbps = rep.p_as * rep.t_s_mbps + rep.p_ar * rep.t_r_mbps;
    return rep;
}

double throughput_gain(const NetworkConfig& cfg, const AnalyticOptions& opts) {
    cfg.validate();
    if (std::abs(cfg.gamma() - 1.0) > 1e-9)
        throw std::invalid_argument("throughput_gain: defined for gamma = 1");
    if (cfg.mu_s <= 0.0) throw std::invalid_argument("throughput_gain: requires mu_s > 0");

    NetworkConfig no_relay = cfg;
    no_relay.mu_r = 0.0;
    auto cov0 = [&](double xi) {
        return user_coverage_equal_power(no_relay, tau_of_xi(xi), opts);
    };
    const double baseline = spectral_integral(cov0, opts);

    if (cfg.mu_r == 0.0) {
        // Conditioning on a sure event: numerator equals the baseline.
        return 1.0;
    }

    const double p_as = assoc_prob_rsu(cfg, opts);
    std::map<double, CoverageComponents> cache;
    auto components_at = [&](double xi) -> const CoverageComponents& {
        auto it = cache.find(xi);
        if (it == cache.end())
            it = cache.emplace(xi, user_coverage(cfg, tau_of_xi(xi), opts)).first;
        return it->second;
    };
    auto cov_su = [&](double xi) { return (components_at(xi).e_as + components_at(xi).ec_as) / p_as; };
    auto cov_ru = [&](double xi) {
        return (components_at(xi).e_ar + components_at(xi).ec_ar) / (1.0 - p_as);
    };
    const double i_su = spectral_integral(cov_su, opts);
    const double i_ru = spectral_integral(cov_ru, opts);
    return i_su / baseline + (cfg.mu_r / cfg.mu_s) * (i_ru / baseline);
}

}  // namespace coxnet
