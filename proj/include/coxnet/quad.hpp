#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace coxnet {

enum class Transform { none, tan_half, inverse };

struct QuadSpec {
    double rel_tol = 1e-7;
    double abs_tol = 1e-10;
    int max_depth = 30;  // bisection levels per panel
    Transform transform = Transform::inverse;

    QuadSpec scaled(double factor) const {
        QuadSpec s = *this;
        s.rel_tol *= factor;
        s.abs_tol *= factor;
        return s;
    }
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;
};

/// Thrown by evaluators that require converged quadrature; names the
/// integral that failed.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& kernel, const QuadResult& result)
        : std::runtime_error("quadrature did not converge in " + kernel +
                             " (error estimate " + std::to_string(result.error_estimate) + ")"),
          kernel_name(kernel),
          result(result) {}
    std::string kernel_name;
    QuadResult result;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
    double value;
    double error;
};

// One G7/K15 pass over [a, b] with the quadpack-style error heuristic.
template <class F>
PanelEstimate gk15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    fv[7] = fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15Nodes[i];
        fv[i] = f(center - dx);
        fv[14 - i] = f(center + dx);
    }

    double kronrod = kGk15WeightsK[7] * fc;
    double gauss = kGk15WeightsG[3] * fc;
    for (int i = 0; i < 7; ++i) {
        kronrod += kGk15WeightsK[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += kGk15WeightsG[i / 2] * (fv[i] + fv[14 - i]);
    }
    kronrod *= half;
    gauss *= half;

    // Scale-aware error estimate (resasc in quadpack terms).
    const double mean = kronrod / (b - a);
    double resasc = kGk15WeightsK[7] * std::abs(fc - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kGk15WeightsK[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    resasc *= std::abs(half);

    double err = std::abs(kronrod - gauss);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {kronrod, err};
}

}  // namespace detail

/// Globally adaptive G7/K15 bisection on [a, b]. Nodes are interior, so
/// integrable endpoint singularities are admissible; they simply cost depth.
template <class F>
QuadResult integrate_finite(F&& f, double a, double b, const QuadSpec& spec = {}) {
    QuadResult result;
    if (!(a <= b)) throw std::invalid_argument("integrate_finite: requires a <= b");
    if (a == b) {
        result.converged = true;
        return result;
    }

    struct Panel {
        double a, b, value, error;
        int depth;
        bool operator<(const Panel& o) const { return error < o.error; }
    };

    const std::size_t max_panels = std::max<std::size_t>(256, 64u * static_cast<std::size_t>(spec.max_depth));
    std::vector<Panel> heap;
    auto push = [&](double lo, double hi, int depth) {
        auto est = detail::gk15(f, lo, hi);
        result.evaluations += 15;
        heap.push_back({lo, hi, est.value, est.error, depth});
        std::push_heap(heap.begin(), heap.end());
    };
    push(a, b, 0);

    double total_value = heap.front().value;
    double total_error = heap.front().error;
    bool hit_nan = false;

    while (true) {
        if (std::isnan(total_value) || std::isnan(total_error)) {
            hit_nan = true;
            break;
        }
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value));
        if (total_error <= tol) break;
        // Worst panel first.
        std::pop_heap(heap.begin(), heap.end());
        Panel worst = heap.back();
        if (worst.depth >= spec.max_depth || heap.size() + 1 >= max_panels) {
            std::push_heap(heap.begin(), heap.end());
            break;  // cannot refine further
        }
        heap.pop_back();
        total_value -= worst.value;
        total_error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid, worst.depth + 1);
        total_value += heap.back().value;
        total_error += heap.back().error;
        push(mid, worst.b, worst.depth + 1);
        total_value += heap.back().value;
        total_error += heap.back().error;
    }

    // Recompute the totals; the incremental sums drift over many updates.
    double value = 0.0, error = 0.0;
    for (const Panel& p : heap) {
        value += p.value;
        error += p.error;
    }
    result.value = value;
    result.error_estimate = error;
    result.converged = !hit_nan &&
                       error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
    return result;
}

/// Semi-infinite integral over [a, inf), mapped to a finite interval and
/// handed to the adaptive rule. The integrand must decay like u^-p, p > 1.
template <class F>
QuadResult integrate_semi_infinite(F&& f, double a, const QuadSpec& spec = {}) {
    const Transform tf = spec.transform == Transform::none ? Transform::inverse : spec.transform;
    if (tf == Transform::inverse) {
        // u = a + t/(1-t), du = dt/(1-t)^2
        auto g = [&f, a](double t) {
            const double om = 1.0 - t;
            return f(a + t / om) / (om * om);
        };
        return integrate_finite(g, 0.0, 1.0, spec);
    }
    // u = a + tan(t), du = sec^2(t) dt
    auto g = [&f, a](double t) {
        const double c = std::cos(t);
        return f(a + std::tan(t)) / (c * c);
    };
    return integrate_finite(g, 0.0, 1.5707963267948966, spec);
}

inline double require_converged(const QuadResult& r, const char* kernel_name) {
    if (!r.converged) throw QuadratureError(kernel_name, r);
    return r.value;
}

/// Chebyshev-Lobatto interpolant with barycentric evaluation. Built
/// adaptively by node doubling until staggered probe points agree with the
/// direct function to the requested tolerance.
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant() = default;

    static ChebyshevInterpolant build(const std::function<double(double)>& f, double lo,
                                      double hi, double abs_tol, int max_nodes,
                                      long* evaluations = nullptr);

    double operator()(double x) const;
    int node_count() const { return static_cast<int>(values_.size()); }
    bool converged() const { return converged_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> nodes_;   // ascending in x
    std::vector<double> values_;
    std::vector<double> weights_;  // barycentric
    bool converged_ = false;
};

struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    double abs_tol = 1e-10;  // interpolation error budget
    int max_nodes = 257;
};

/// Caches Chebyshev interpolants of a one-parameter kernel family
/// f(param, x) over x in [lo, hi], keyed on the quantized parameter.
/// Re-querying an already-built parameter costs zero new evaluations of f.
/// Parameters whose interpolant fails to converge fall back to direct
/// evaluation, as does any build past the capacity limit.
class MemoizedKernel {
public:
    using Family = std::function<double(double param, double x)>;

    MemoizedKernel(Family family, const GridSpec& grid, std::size_t max_entries = 64);

    double operator()(double param, double x);

    long direct_evaluations() const { return direct_evaluations_; }
    std::size_t entry_count() const { return cache_.size(); }

private:
    Family family_;
    GridSpec grid_;
    std::size_t max_entries_;
    long direct_evaluations_ = 0;
    std::map<std::int64_t, ChebyshevInterpolant> cache_;

    static std::int64_t quantize(double param);
};

}  // namespace coxnet
