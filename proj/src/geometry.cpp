#include "coxnet/geometry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace coxnet {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Vec2 Line::direction() const { return {std::cos(theta), std::sin(theta)}; }

Vec2 Line::normal() const { return {-std::sin(theta), std::cos(theta)}; }

Vec2 point_on_line(const Line& line, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("point_on_line: t must be finite");
    const Vec2 n = line.normal();
    const Vec2 d = line.direction();
    return {line.r * n.x + t * d.x, line.r * n.y + t * d.y};
}

double distance_to_line(const Line& line, const Vec2& p) {
    const Vec2 n = line.normal();
    return std::abs(p.x * n.x + p.y * n.y - line.r);
}

LineProcessSample sample_line_process(double lambda_l, double window_radius, Rng& rng) {
    if (!std::isfinite(lambda_l) || lambda_l < 0.0)
        throw std::invalid_argument("sample_line_process: lambda_l must be finite and >= 0");
    if (!std::isfinite(window_radius) || window_radius <= 0.0)
        throw std::invalid_argument("sample_line_process: window_radius must be finite and > 0");

    LineProcessSample sample;
    sample.window_radius = window_radius;

    // Intensity lambda_l/pi on the strip [-R, R] x [0, pi) gives mean
    // 2 * lambda_l * R lines hitting the disk.
    const double mean = 2.0 * lambda_l * window_radius;
    std::poisson_distribution<long> count(mean);
    const long n = (mean > 0.0) ? count(rng) : 0;
    sample.lines.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        Line line;
        line.r = (2.0 * rng.uniform() - 1.0) * window_radius;
        line.theta = rng.uniform() * kPi;
        sample.lines.push_back(line);
    }
    return sample;
}

LineProcessSample palm_condition_line(LineProcessSample sample, Rng& rng) {
    Line palm;
    palm.r = 0.0;
    palm.theta = rng.uniform() * kPi;
    sample.lines.push_back(palm);
    sample.palm_line = sample.lines.size() - 1;
    return sample;
}

}  // namespace coxnet
