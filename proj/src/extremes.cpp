#include "reslab/extremes.hpp"

#include "reslab/kernels.hpp"
#include "reslab/parallel.hpp"
#include "reslab/summation.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace reslab::extremes {

namespace {
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kE1BracketLo = 1e-8;
constexpr double kE1BracketHi = 50.0;
} // namespace

TGrid TGrid::certified(double t_min, double t_max, std::uint64_t N, double tolerance) {
    if (!(t_max > t_min)) throw std::invalid_argument("TGrid: t_max must exceed t_min");
    if (!(tolerance > 0.0)) throw std::invalid_argument("TGrid: tolerance must be positive");
    TGrid g;
    g.t_min = t_min;
    g.t_max = t_max;
    g.spacing = N < 2 ? t_max - t_min
                      : tolerance / (static_cast<double>(N) *
                                     std::log(static_cast<double>(N)));
    return g;
}

std::uint64_t TGrid::point_count() const {
    const double steps = std::ceil((t_max - t_min) / spacing);
    if (!(steps >= 0.0) || steps > 9e18)
        throw std::overflow_error("TGrid: point count out of range");
    return static_cast<std::uint64_t>(steps) + 1;
}

std::complex<double> eval_poly(const multfn::CMFunction& f, std::uint64_t N, double t) {
    Accumulator re, im;
    for (std::uint64_t n = 1; n <= N; ++n) {
        const double theta = f.angle(n) + t * std::log(static_cast<double>(n));
        re.add(std::cos(theta));
        im.add(std::sin(theta));
    }
    return {re.value(), im.value()};
}

MaxResult find_max(const multfn::CMFunction& f, std::uint64_t N, const TGrid& grid,
                   unsigned workers, std::uint64_t max_points) {
    if (N < 1) throw std::invalid_argument("find_max: N must be >= 1");
    if (!(grid.t_max > grid.t_min) || !(grid.spacing > 0.0))
        throw std::invalid_argument("find_max: degenerate grid");

    MaxResult res;
    if (N == 1) { // S is constantly f(1) = 1
        res.t = res.grid_t = grid.t_min;
        res.value = res.grid_value = 1.0;
        res.grid_points = 1;
        return res;
    }

    const double span = grid.t_max - grid.t_min;
    double steps_d = std::ceil(span / grid.spacing);
    if (steps_d < 1.0) steps_d = 1.0;
    std::uint64_t steps;
    if (steps_d > static_cast<double>(max_points - 1)) {
        steps = max_points - 1;
        res.certified = false; // budget forced a coarser grid than requested
    } else {
        steps = static_cast<std::uint64_t>(steps_d);
    }
    const double h = span / static_cast<double>(steps);
    const std::uint64_t count = steps + 1;

    kernels::PhaseSeries s = moments::poly_series(f, N);
    kernels::ScanMax scan = kernels::scan_max_abs2(s, grid.t_min, h,
                                                   static_cast<std::size_t>(count),
                                                   resolve_workers(workers));
    res.grid_points = count;
    res.grid_t = grid.t_min + static_cast<double>(scan.index) * h;
    res.grid_value = std::abs(eval_poly(f, N, res.grid_t));

    // golden-section refinement of |S|^2 on the bracket around the best point
    double best_t = res.grid_t;
    double best_g = res.grid_value * res.grid_value;
    double a = std::max(grid.t_min, res.grid_t - h);
    double b = std::min(grid.t_max, res.grid_t + h);
    const double invphi = 0.6180339887498948482;
    auto g = [&](double t) {
        const double v = std::norm(eval_poly(f, N, t));
        if (v > best_g) {
            best_g = v;
            best_t = t;
        }
        return v;
    };
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 2 * grid.refinement_depth; ++it) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - invphi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + invphi * (b - a);
            gd = g(d);
        }
    }
    res.t = best_t;
    res.value = std::sqrt(best_g);

    // sup_{[t_min,t_max]} |S| <= best grid value + (h/2) * sup |dS/dt|, plus
    // an allowance for the incremental kernel's rounding drift
    const double drift = 3.0 * std::sqrt(static_cast<double>(kernels::kBlockLen)) *
                         DBL_EPSILON * s.weight_abs_sum();
    res.certified_gap = 0.5 * h * s.derivative_bound() + 2.0 * drift;
    return res;
}

CertifyResult certify_resonance(moments::Style style, const resonator::Resonator& R,
                                const multfn::CMFunction& f, double T, double N,
                                double tolerance, double rel_tol, double budget,
                                unsigned workers, std::uint64_t max_points) {
    CertifyResult out;
    out.report = style == moments::Style::thm11
                     ? moments::report_thm11(R, f, T, N, rel_tol, budget, workers)
                     : moments::report_thm12(R, f, T, N, rel_tol, budget, workers);
    const auto Ni = static_cast<std::uint64_t>(N);
    const TGrid grid = TGrid::certified(1.0, T, Ni, tolerance);
    out.forward = find_max(f, Ni, grid, workers, max_points);
    out.backward = f.real_valued() ? out.forward
                                   : find_max(f.conjugated(), Ni, grid, workers,
                                              max_points);
    out.observed = std::max(out.forward.value, out.backward.value);
    out.covered_upper = std::max(out.forward.value + out.forward.certified_gap,
                                 out.backward.value + out.backward.certified_gap);
    out.bound = out.report.lower_bound;
    out.bound_low = out.report.lower_bound_low;
    out.pass = out.covered_upper >= out.bound_low;
    return out;
}

double e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("e1: x must be positive");
    if (x <= 1.0) {
        Accumulator sum;
        sum.add(-kEulerGamma);
        sum.add(-std::log(x));
        double pow_term = 1.0; // x^k / k!
        for (int k = 1; k <= 64; ++k) {
            pow_term *= x / k;
            const double add = (k % 2 ? pow_term : -pow_term) / k;
            sum.add(add);
            if (std::fabs(add) < 1e-18 * std::max(1e-30, std::fabs(sum.value())))
                break;
        }
        return sum.value();
    }
    // modified Lentz evaluation of the continued fraction
    // E_1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...))))
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

double e1_inverse(double y) {
    const double y_hi = e1(kE1BracketLo);
    const double y_lo = e1(kE1BracketHi);
    if (!(y > y_lo) || !(y < y_hi))
        throw std::domain_error("e1_inverse: value outside the invertible bracket "
                                "[E_1(50), E_1(1e-8)]");
    double a = kE1BracketLo, b = kE1BracketHi;
    for (int it = 0; it < 200 && (b - a) > 1e-16 * b; ++it) {
        const double mid = 0.5 * (a + b);
        if (e1(mid) > y)
            a = mid; // E_1 decreases: still above the target
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

double tau_prime(double A) {
    if (!(A > 0.0)) throw std::domain_error("tau_prime: A must be positive");
    return std::exp(-A) / A - e1(A);
}

Prediction predict_thm11(double T, double N) {
    if (!(T > std::exp(1.0)))
        throw std::domain_error("predict_thm11: needs log log T > 0, i.e. T > e");
    if (!(N >= 1.0)) throw std::invalid_argument("predict_thm11: N must be >= 1");
    const double l1 = std::log(T), l2 = std::log(l1);
    Prediction p;
    p.tau = std::log(N) / std::sqrt(l1 * l2);
    p.A = e1_inverse(p.tau);
    p.tau_p = tau_prime(p.A);
    p.exponent = p.A * (p.tau + p.tau_p) * std::sqrt(l1 / l2);
    p.value = std::sqrt(N) * std::exp(p.exponent);
    return p;
}

Prediction predict_thm12(double T, double N) {
    if (!(N >= 1.0)) throw std::invalid_argument("predict_thm12: N must be >= 1");
    const double ratio = T / N;
    const double l1 = ratio > 0.0 ? std::log(ratio) : -1.0;
    const double l2 = l1 > 0.0 ? std::log(l1) : -1.0;
    if (!(l2 > 1.0))
        throw std::domain_error("predict_thm12: needs log log log (T/N) > 0, "
                                "i.e. T/N > e^e");
    const double l3 = std::log(l2);
    Prediction p;
    p.exponent = std::sqrt(2.0 * l1 * l3 / l2);
    p.value = std::sqrt(N) * std::exp(p.exponent);
    return p;
}

Prediction predict_xy(double T, double N, double delta) {
    if (!(T > std::exp(1.0)))
        throw std::domain_error("predict_xy: needs log log T > 0, i.e. T > e");
    if (!(delta > 0.0) || !(delta < 0.5))
        throw std::invalid_argument("predict_xy: delta must lie in (0, 1/2)");
    if (!(N >= 1.0)) throw std::invalid_argument("predict_xy: N must be >= 1");
    const double l1 = std::log(T), l2 = std::log(l1);
    Prediction p;
    p.exponent = std::sqrt((1.0 - delta) * l1 / l2);
    p.value = std::sqrt(N) * std::exp(p.exponent);
    return p;
}

bool xy_range_ok(double T, double N, double delta) {
    if (!(T > std::exp(1.0)) || !(delta > 0.0) || !(delta < 0.5) || !(N >= 1.0))
        return false;
    const double lo = std::exp(std::pow(std::log(T), 0.5 + delta));
    return N >= lo && N <= std::sqrt(T);
}

} // namespace reslab::extremes
