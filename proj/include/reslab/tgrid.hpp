#pragma once

#include <cstdint>

namespace reslab::extremes {

/// Uniform evaluation grid on [t_min, t_max].
struct TGrid {
    double t_min = 1.0;
    double t_max = 2.0;
    double spacing = 1e-2;
    int refinement_depth = 12; // halvings a consumer may apply on top

    /// Grid whose spacing satisfies the certification bound
    /// spacing <= tolerance / (N log N), derived from |dS_t/dt| <= N log N.
    /// For N = 1 the polynomial is constant and any spacing certifies.
    static TGrid certified(double t_min, double t_max, std::uint64_t N,
                           double tolerance);

    std::uint64_t point_count() const;
};

} // namespace reslab::extremes
