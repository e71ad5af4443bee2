#include "coxnet/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace coxnet {

namespace {

enum : std::uint64_t { kStreamFading = 101, kStreamRep = 7777 };

std::uint64_t rep_seed_of(std::uint64_t seed, long rep) {
    return derive_seed(seed, {kStreamRep, static_cast<std::uint64_t>(rep)});
}

template <class Fn>
void parallel_reps(long n, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    const long chunk = 64;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const long begin = next.fetch_add(chunk);
                if (begin >= n) break;
                const long end = std::min(n, begin + chunk);
                for (long i = begin; i < end; ++i) fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

double resolve_window(const NetworkConfig& cfg, const McOptions& mc) {
    return mc.window_radius_km > 0.0 ? mc.window_radius_km : default_window_radius(cfg);
}

// Flat uniform grid over the window for nearest-transmitter queries.
class NeighborGrid {
public:
    NeighborGrid(const Realization& real, double window_radius) : half_extent_(window_radius) {
        double density = 1.0;
        for (std::size_t i = 0; i < real.points.size(); ++i)
            density += static_cast<double>(real.points[i].rsus.size() +
                                           real.points[i].relays.size());
        density /= std::max(1.0, window_radius * window_radius * 3.14159265358979323846);
        cell_ = std::clamp(0.7 / std::sqrt(density), 0.02, window_radius);

        for (std::size_t i = 0; i < real.points.size(); ++i) {
            const Line& line = real.lines.lines[i];
            auto insert = [&](const std::vector<double>& coords, EntityKind kind) {
                for (double t : coords) {
                    const Vec2 p = point_on_line(line, t);
                    cells_[key(p)].push_back(Entry{p, kind});
                }
            };
            insert(real.points[i].rsus, EntityKind::rsu);
            insert(real.points[i].relays, EntityKind::relay);
        }
    }

    struct Entry {
        Vec2 pos;
        EntityKind kind;
    };

    // Nearest entry to q; expands rings of cells until no closer entry can
    // exist. Returns false when the grid is empty.
    bool nearest(const Vec2& q, Entry& out) const {
        if (cells_.empty()) return false;
        const long qx = cell_index(q.x);
        const long qy = cell_index(q.y);
        const long max_ring = static_cast<long>(4.0 * half_extent_ / cell_) + 2;
        double best = std::numeric_limits<double>::infinity();
        for (long ring = 0; ring <= max_ring; ++ring) {
            // Any point in this or a farther ring is at least this far away.
            const double ring_floor = ring > 0 ? static_cast<double>(ring - 1) * cell_ : 0.0;
            if (ring_floor * ring_floor > best) break;
            for (long dx = -ring; dx <= ring; ++dx) {
                for (long dy = -ring; dy <= ring; ++dy) {
                    if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                    auto it = cells_.find(pack(qx + dx, qy + dy));
                    if (it == cells_.end()) continue;
                    for (const Entry& e : it->second) {
                        const double d2 = (e.pos.x - q.x) * (e.pos.x - q.x) +
                                          (e.pos.y - q.y) * (e.pos.y - q.y);
                        if (d2 < best) {
                            best = d2;
                            out = e;
                        }
                    }
                }
            }
        }
        return std::isfinite(best);
    }

private:
    long cell_index(double x) const { return static_cast<long>(std::floor(x / cell_)); }
    std::int64_t key(const Vec2& p) const { return pack(cell_index(p.x), cell_index(p.y)); }
    static std::int64_t pack(long ix, long iy) {
        return (static_cast<std::int64_t>(ix) << 32) ^ (iy & 0xffffffffLL);
    }

    double half_extent_ = 1.0;
    double cell_ = 1.0;
    std::unordered_map<std::int64_t, std::vector<Entry>> cells_;
};

CoverageCurve make_curve(CurveKind kind, const std::vector<double>& taus_db) {
    CoverageCurve c;
    c.kind = kind;
    c.taus_db = taus_db;
    c.taus_linear.reserve(taus_db.size());
    for (double db : taus_db) c.taus_linear.push_back(std::pow(10.0, db / 10.0));
    c.probs.assign(taus_db.size(), 0.0);
    c.ci_halfwidths.assign(taus_db.size(), 0.0);
    return c;
}

void fill_curve(CoverageCurve& curve, const std::vector<long>& covered, long n) {
    curve.n = n;
    for (std::size_t i = 0; i < curve.probs.size(); ++i) {
        curve.probs[i] = n > 0 ? static_cast<double>(covered[i]) / static_cast<double>(n) : 0.0;
        curve.ci_halfwidths[i] = wilson_halfwidth(covered[i], n);
    }
}

AssociationStats assemble_association(const std::vector<UserSirSample>& samples) {
    AssociationStats st;
    st.n = static_cast<long>(samples.size());
    double dist_sum = 0.0;
    for (const UserSirSample& s : samples) {
        if (s.assoc_rsu)
            ++(s.same_line ? st.n_as_e : st.n_as_ec);
        else
            ++(s.same_line ? st.n_ar_e : st.n_ar_ec);
        dist_sum += s.distance_km;
    }
    const double n = static_cast<double>(std::max<long>(st.n, 1));
    st.p_as_e = st.n_as_e / n;
    st.p_as_ec = st.n_as_ec / n;
    st.p_ar_e = st.n_ar_e / n;
    st.p_ar_ec = st.n_ar_ec / n;
    st.p_as = static_cast<double>(st.n_as_e + st.n_as_ec) / n;
    st.p_ar = static_cast<double>(st.n_ar_e + st.n_ar_ec) / n;
    st.ci_halfwidth = wilson_halfwidth(st.n_as_e + st.n_as_ec, st.n);
    st.mean_assoc_distance_km = dist_sum / n;
    return st;
}

// Ratio-estimator halfwidth for sum(a_i)/sum(b_i) over iid replications.
double ratio_halfwidth(const std::vector<double>& a, const std::vector<double>& b) {
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum_a += a[i];
        sum_b += b[i];
    }
    if (sum_b <= 0.0) return std::numeric_limits<double>::infinity();
    const double ratio = sum_a / sum_b;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - ratio * b[i];
        ss += d * d;
    }
    return 1.959963984540054 * std::sqrt(ss) / sum_b;
}

}  // namespace

double default_window_radius(const NetworkConfig& cfg) {
    const double m = std::min(cfg.mu_s + cfg.mu_r, cfg.lambda_l);
    if (m <= 0.0) return 50.0;
    return std::clamp(15.0 / m, 10.0, 50.0);
}

double wilson_halfwidth(long successes, long n) {
    if (n <= 0) return 1.0;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double denom = 1.0 + z2 / nn;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return half;
}

const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::user_total: return "user_total";
        case CurveKind::user_given_as: return "user_given_as";
        case CurveKind::user_given_ar: return "user_given_ar";
        case CurveKind::relay: return "relay";
    }
    return "?";
}

UserSirSample sample_user_sir(const NetworkConfig& cfg, double window_radius,
                              std::uint64_t rep_seed) {
    BuildOptions opts;
    opts.include_users = false;  // users never transmit
    const Realization real =
        build_realization(cfg, window_radius, PalmKind::typical_user, rep_seed, opts);
    const NearestResult serving = nearest_transmitter(real);
    Rng fading_rng(derive_seed(rep_seed, {kStreamFading}));
    const LinkBudget budget = sir_user(real, cfg, serving, fading_rng);
    UserSirSample s;
    s.sir = budget.sir;
    s.assoc_rsu = serving.tx.kind == EntityKind::rsu;
    s.same_line = serving.same_line;
    s.distance_km = serving.distance;
    return s;
}

double sample_relay_sir(const NetworkConfig& cfg, double window_radius,
                        std::uint64_t rep_seed) {
    BuildOptions opts;
    opts.include_users = false;
    const Realization real =
        build_realization(cfg, window_radius, PalmKind::typical_relay, rep_seed, opts);
    NearestResult serving;
    try {
        serving = nearest_rsu(real);
    } catch (const std::runtime_error&) {
        return 0.0;  // no RSU landed in the window; count as uncovered
    }
    Rng fading_rng(derive_seed(rep_seed, {kStreamFading}));
    return sir_relay(real, cfg, serving, fading_rng).sir;
}

AssociationStats estimate_association(const NetworkConfig& cfg, const McOptions& mc) {
    cfg.validate();
    if (mc.n_reps < 1) throw std::invalid_argument("estimate_association: n_reps must be >= 1");
    const double window = resolve_window(cfg, mc);

    std::vector<UserSirSample> samples(static_cast<std::size_t>(mc.n_reps));
    parallel_reps(mc.n_reps, mc.threads, [&](long rep) {
        // Association only needs the argmin; skip the fading draws.
        BuildOptions opts;
        opts.include_users = false;
        const Realization real = build_realization(cfg, window, PalmKind::typical_user,
                                                   rep_seed_of(mc.seed, rep), opts);
        const NearestResult serving = nearest_transmitter(real);
        UserSirSample& s = samples[static_cast<std::size_t>(rep)];
        s.assoc_rsu = serving.tx.kind == EntityKind::rsu;
        s.same_line = serving.same_line;
        s.distance_km = serving.distance;
    });
    return assemble_association(samples);
}

UserCoverageEstimate estimate_user_coverage(const NetworkConfig& cfg,
                                            const std::vector<double>& taus_db,
                                            const McOptions& mc) {
    cfg.validate();
    if (taus_db.empty())
        throw std::invalid_argument("estimate_user_coverage: tau grid must be nonempty");
    const double window = resolve_window(cfg, mc);

    std::vector<UserSirSample> samples(static_cast<std::size_t>(mc.n_reps));
    parallel_reps(mc.n_reps, mc.threads, [&](long rep) {
        samples[static_cast<std::size_t>(rep)] =
            sample_user_sir(cfg, window, rep_seed_of(mc.seed, rep));
    });

    UserCoverageEstimate est;
    est.assoc = assemble_association(samples);
    est.total = make_curve(CurveKind::user_total, taus_db);
    est.given_as = make_curve(CurveKind::user_given_as, taus_db);
    est.given_ar = make_curve(CurveKind::user_given_ar, taus_db);

    const std::size_t nt = taus_db.size();
    std::vector<long> cov_total(nt, 0), cov_as(nt, 0), cov_ar(nt, 0);
    long n_as = 0, n_ar = 0;
    for (const UserSirSample& s : samples) {
        (s.assoc_rsu ? n_as : n_ar) += 1;
        for (std::size_t i = 0; i < nt; ++i) {
            if (s.sir > est.total.taus_linear[i]) {
                ++cov_total[i];
                ++(s.assoc_rsu ? cov_as[i] : cov_ar[i]);
            }
        }
    }
    fill_curve(est.total, cov_total, mc.n_reps);
    fill_curve(est.given_as, cov_as, n_as);
    fill_curve(est.given_ar, cov_ar, n_ar);
    return est;
}

CoverageCurve estimate_relay_coverage(const NetworkConfig& cfg,
                                      const std::vector<double>& taus_db,
                                      const McOptions& mc) {
    cfg.validate();
    if (taus_db.empty())
        throw std::invalid_argument("estimate_relay_coverage: tau grid must be nonempty");
    const double window = resolve_window(cfg, mc);

    std::vector<double> sirs(static_cast<std::size_t>(mc.n_reps));
    parallel_reps(mc.n_reps, mc.threads, [&](long rep) {
        sirs[static_cast<std::size_t>(rep)] =
            sample_relay_sir(cfg, window, rep_seed_of(mc.seed, rep));
    });

    CoverageCurve curve = make_curve(CurveKind::relay, taus_db);
    std::vector<long> covered(taus_db.size(), 0);
    for (double sir : sirs)
        for (std::size_t i = 0; i < covered.size(); ++i)
            if (sir > curve.taus_linear[i]) ++covered[i];
    fill_curve(curve, covered, mc.n_reps);
    return curve;
}

LoadStats estimate_loads(const NetworkConfig& cfg, const McOptions& mc) {
    cfg.validate();
    const double window = resolve_window(cfg, mc);
    const double inner = 0.5 * window;

    // Palm phase: association split for the mass-transport estimates.
    const AssociationStats assoc = estimate_association(cfg, mc);

    LoadStats out;
    out.n = mc.n_reps;
    if (cfg.mu_s > 0.0) {
        out.mt_users_per_rsu = cfg.mu_u * assoc.p_as / cfg.mu_s;
        out.mt_users_per_rsu_ci = cfg.mu_u * assoc.ci_halfwidth / cfg.mu_s;
    }
    if (cfg.mu_r > 0.0) {
        out.mt_users_per_relay = cfg.mu_u * assoc.p_ar / cfg.mu_r;
        out.mt_users_per_relay_ci = cfg.mu_u * assoc.ci_halfwidth / cfg.mu_r;
    }
    out.window_warning = inner < 4.0 * assoc.mean_assoc_distance_km;

    // Counting phase: stationary snapshots, users in the inner window
    // associated over the full window.
    struct RepCounts {
        double users_to_rsu = 0.0, users_to_relay = 0.0;
        double rsus_in = 0.0, relays_in = 0.0;
    };
    std::vector<RepCounts> counts(static_cast<std::size_t>(mc.n_reps));
    parallel_reps(mc.n_reps, mc.threads, [&](long rep) {
        const std::uint64_t rep_seed = rep_seed_of(mc.seed ^ 0x10adu, rep);
        const Realization real = build_realization(cfg, window, PalmKind::none, rep_seed);
        RepCounts& rc = counts[static_cast<std::size_t>(rep)];
        NeighborGrid grid(real, window);
        for (std::size_t i = 0; i < real.points.size(); ++i) {
            const Line& line = real.lines.lines[i];
            const double r2 = line.r * line.r;
            auto inside = [&](double t) { return r2 + t * t <= inner * inner; };
            for (double t : real.points[i].rsus)
                if (inside(t)) rc.rsus_in += 1.0;
            for (double t : real.points[i].relays)
                if (inside(t)) rc.relays_in += 1.0;
            for (double t : real.points[i].users) {
                if (!inside(t)) continue;
                NeighborGrid::Entry nearest;
                if (!grid.nearest(point_on_line(line, t), nearest)) continue;
                (nearest.kind == EntityKind::rsu ? rc.users_to_rsu : rc.users_to_relay) += 1.0;
            }
        }
    });

    std::vector<double> u2s, u2r, ns, nr;
    u2s.reserve(counts.size());
    for (const RepCounts& rc : counts) {
        u2s.push_back(rc.users_to_rsu);
        u2r.push_back(rc.users_to_relay);
        ns.push_back(rc.rsus_in);
        nr.push_back(rc.relays_in);
    }
    auto ratio = [](const std::vector<double>& a, const std::vector<double>& b) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            sa += a[i];
            sb += b[i];
        }
        return sb > 0.0 ? sa / sb : 0.0;
    };
    out.count_users_per_rsu = ratio(u2s, ns);
    out.count_users_per_rsu_ci = ratio_halfwidth(u2s, ns);
    out.count_users_per_relay = ratio(u2r, nr);
    out.count_users_per_relay_ci = ratio_halfwidth(u2r, nr);
    out.count_relays_per_rsu = ratio(nr, ns);
    out.count_relays_per_rsu_ci = ratio_halfwidth(nr, ns);
    return out;
}

}  // namespace coxnet
