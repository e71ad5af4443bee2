#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "coxnet/rng.hpp"

namespace coxnet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// A road of the Poisson line process, parameterized by the signed
/// perpendicular distance r (km) from the origin and the direction angle
/// theta in [0, pi). The closest point of the line to the origin is at
/// distance |r|.
struct Line {
    double r = 0.0;
    double theta = 0.0;

    // Unit direction of the line.
    Vec2 direction() const;
    // Unit normal; foot of the perpendicular from the origin is r * normal().
    Vec2 normal() const;
};

/// Point on `line` at signed arc length t, measured from the foot of the
/// perpendicular. Its distance to the origin is sqrt(r^2 + t^2).
Vec2 point_on_line(const Line& line, double t);

/// Unsigned distance from a planar point to a line.
double distance_to_line(const Line& line, const Vec2& p);

struct LineProcessSample {
    std::vector<Line> lines;
    double window_radius = 0.0;
    // Index of a line forced through the origin (r = 0), if Palm-conditioned.
    std::optional<std::size_t> palm_line;
};

/// Samples the isotropic Poisson line process restricted to the lines
/// hitting B(0, window_radius). The number of such lines is Poisson with
/// mean 2 * lambda_l * window_radius; r is uniform on [-R, R] and theta
/// uniform on [0, pi).
LineProcessSample sample_line_process(double lambda_l, double window_radius, Rng& rng);

/// Returns the sample augmented with one extra line through the origin
/// (r = 0, theta uniform on [0, pi)), flagged as the palm line. Existing
/// lines are untouched.
LineProcessSample palm_condition_line(LineProcessSample sample, Rng& rng);

}  // namespace coxnet
