#include "coxnet/quad.hpp"

#include <bit>
#include <cmath>

namespace coxnet {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ChebyshevInterpolant ChebyshevInterpolant::build(const std::function<double(double)>& f,
                                                 double lo, double hi, double abs_tol,
                                                 int max_nodes, long* evaluations) {
    ChebyshevInterpolant interp;
    interp.lo_ = lo;
    interp.hi_ = hi;

    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    long evals = 0;

    // Lobatto grids nest under doubling; reuse previous values.
    int n = 16;  // panels; nodes = n + 1
    std::vector<double> vals(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double x = mid - half * std::cos(kPi * k / n);
        vals[static_cast<std::size_t>(k)] = f(x);
        ++evals;
    }
    auto assemble = [&](int panels, const std::vector<double>& v) {
        interp.nodes_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
        interp.values_ = v;
        interp.weights_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
        for (int k = 0; k <= panels; ++k) {
            interp.nodes_[static_cast<std::size_t>(k)] = mid - half * std::cos(kPi * k / panels);
            double w = (k % 2 == 0) ? 1.0 : -1.0;
            if (k == 0 || k == panels) w *= 0.5;
            interp.weights_[static_cast<std::size_t>(k)] = w;
        }
    };

    while (true) {
        assemble(n, vals);
        // Probe halfway between nodes; these become the next level's nodes.
        std::vector<double> next(static_cast<std::size_t>(2 * n) + 1);
        double max_err = 0.0;
        for (int k = 0; k <= 2 * n; ++k) {
            if (k % 2 == 0) {
                next[static_cast<std::size_t>(k)] = vals[static_cast<std::size_t>(k / 2)];
                continue;
            }
            const double x = mid - half * std::cos(kPi * k / (2 * n));
            const double exact = f(x);
            ++evals;
            next[static_cast<std::size_t>(k)] = exact;
            max_err = std::max(max_err, std::abs(exact - interp(x)));
        }
        if (max_err <= abs_tol) {
            interp.converged_ = true;
            break;
        }
        if (2 * n + 1 > max_nodes) break;  // leave converged_ = false
        n *= 2;
        vals = std::move(next);
    }
    if (evaluations) *evaluations += evals;
    return interp;
}

double ChebyshevInterpolant::operator()(double x) const {
    // Barycentric form; exact at nodes.
    double num = 0.0, den = 0.0;
    const std::size_t n = nodes_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = x - nodes_[k];
        if (dx == 0.0) return values_[k];
        const double c = weights_[k] / dx;
        num += c * values_[k];
        den += c;
    }
    return num / den;
}

MemoizedKernel::MemoizedKernel(Family family, const GridSpec& grid, std::size_t max_entries)
    : family_(std::move(family)), grid_(grid), max_entries_(max_entries) {}

std::int64_t MemoizedKernel::quantize(double param) {
    // ~1e-9 relative buckets via the exponent+mantissa bits; near-identical
    // parameters share an interpolant.
    const auto bits = std::bit_cast<std::int64_t>(param);
    return bits >> 22;
}

double MemoizedKernel::operator()(double param, double x) {
    const std::int64_t key = quantize(param);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        if (cache_.size() >= max_entries_) {
            ++direct_evaluations_;
            return family_(param, x);
        }
        auto fn = [this, param](double xx) { return family_(param, xx); };
        ChebyshevInterpolant interp = ChebyshevInterpolant::build(
            fn, grid_.lo, grid_.hi, grid_.abs_tol, grid_.max_nodes, &direct_evaluations_);
        it = cache_.emplace(key, std::move(interp)).first;
    }
    if (!it->second.converged()) {
        ++direct_evaluations_;
        return family_(param, x);
    }
    return it->second(x);
}

}  // namespace coxnet
