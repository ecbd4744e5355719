#pragma once

#include "reslab/kernels.hpp"

#include <complex>
#include <cstdint>

namespace reslab::quad {

/// Integrand shapes: all are multiplied by the Gaussian exp(-(a t)^2 / 2).
enum class Form {
    first,      // A(t)
    abs2,       // |A(t)|^2
    first_abs2, // A(t) * |B(t)|^2
    abs2_abs2,  // |A(t)|^2 * |B(t)|^2
};

struct Result {
    std::complex<double> value{0.0, 0.0};
    double achieved_rel = 0.0;
    bool converged = true;
    std::uint64_t points = 0;
    double h = 0.0;
};

/// Integral over the whole real line.  Uses the trapezoid rule at a spacing
/// below the integrand's Nyquist limit (spectrally exact for these
/// band-limited-Gaussian integrands), truncated where the Gaussian falls to
/// ~1e-22 of its peak, then halves the spacing until two successive
/// estimates agree to rel_tol.
Result integrate_line(const kernels::PhaseSeries& A, const kernels::PhaseSeries* B,
                      Form form, double a, double rel_tol, unsigned workers = 1,
                      std::uint64_t max_points = (std::uint64_t{1} << 27));

/// Integral over [lo, hi] by adaptive composite Simpson (halved until two
/// successive estimates agree to rel_tol or max_halvings is hit).  h0 = 0
/// picks the oscillation-aware default spacing.
Result integrate_segment(const kernels::PhaseSeries& A, const kernels::PhaseSeries* B,
                         Form form, double a, double lo, double hi, double rel_tol,
                         unsigned workers = 1, double h0 = 0.0, int max_halvings = 16,
                         std::uint64_t max_points = (std::uint64_t{1} << 27));

/// int_{|t| > t0} exp(-(a t)^2/2) dt, for truncation-residual accounting.
double gauss_tail_mass(double a, double t0);

} // namespace reslab::quad
