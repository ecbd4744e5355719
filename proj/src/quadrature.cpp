#include "reslab/quadrature.hpp"

#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace reslab::quad {

using kernels::kBlockLen;
using kernels::PhaseSeries;

namespace {

// Highest angular frequency present in the integrand (before the Gaussian).
double freq_extent(const PhaseSeries& A, const PhaseSeries* B, Form form) {
    double span_a = A.freq_max() - A.freq_min();
    double abs_a = std::max(std::fabs(A.freq_max()), std::fabs(A.freq_min()));
    switch (form) {
        case Form::first: return abs_a;
        case Form::abs2: return span_a;
        case Form::first_abs2:
            return abs_a + (B->freq_max() - B->freq_min());
        case Form::abs2_abs2:
            return span_a + (B->freq_max() - B->freq_min());
    }
    return abs_a;
}

struct BlockSums {
    Accumulator re, im;
};

// One fixed-weight pass: value = sum_j c(j) * F(lo + j*h), where c(j) is the
// quadrature coefficient.  Deterministic: block results are pure functions
// of the block index and are merged in index order.
template <class Coeff>
std::complex<double> weighted_pass(const PhaseSeries& A, const PhaseSeries* B,
                                   Form form, double a, double lo, double h,
                                   std::uint64_t count, unsigned workers,
                                   Coeff coeff) {
    kernels::EvalFn eval = kernels::get();
    const bool needs_b = (form == Form::first_abs2 || form == Form::abs2_abs2);
    if (needs_b && B == nullptr)
        throw std::invalid_argument("quadrature: form requires a second series");

    std::size_t nblocks = (count + kBlockLen - 1) / kBlockLen;
    auto parts = map_blocks<BlockSums>(nblocks, workers, [&](std::size_t blk) {
        std::uint64_t begin = blk * kBlockLen;
        std::uint64_t len = std::min<std::uint64_t>(kBlockLen, count - begin);
        thread_local std::vector<double> are, aim, bre, bim;
        are.resize(kBlockLen);
        aim.resize(kBlockLen);
        double tb = lo + static_cast<double>(begin) * h;
        eval(A, tb, h, len, are.data(), aim.data());
        if (needs_b) {
            bre.resize(kBlockLen);
            bim.resize(kBlockLen);
            eval(*B, tb, h, len, bre.data(), bim.data());
        }
        BlockSums sums;
        for (std::uint64_t j = 0; j < len; ++j) {
            std::uint64_t gj = begin + j;
            double t = lo + static_cast<double>(gj) * h;
            double at = a * t;
            double weight = std::exp(-0.5 * at * at) * coeff(gj);
            switch (form) {
                case Form::first:
                    sums.re.add(are[j] * weight);
                    sums.im.add(aim[j] * weight);
                    break;
                case Form::abs2:
                    sums.re.add((are[j] * are[j] + aim[j] * aim[j]) * weight);
                    break;
                case Form::first_abs2: {
                    double b2 = bre[j] * bre[j] + bim[j] * bim[j];
                    sums.re.add(are[j] * b2 * weight);
                    sums.im.add(aim[j] * b2 * weight);
                    break;
                }
                case Form::abs2_abs2: {
                    double a2 = are[j] * are[j] + aim[j] * aim[j];
                    double b2 = bre[j] * bre[j] + bim[j] * bim[j];
                    sums.re.add(a2 * b2 * weight);
                    break;
                }
            }
        }
        return sums;
    });
    Accumulator re, im;
    for (const auto& p : parts) {
        re.add(p.re);
        im.add(p.im);
    }
    return {re.value(), im.value()};
}

bool close_enough(std::complex<double> prev, std::complex<double> cur,
                  double rel_tol, double* achieved) {
    double diff = std::abs(cur - prev);
    double denom = std::max(std::abs(cur), 1e-300);
    *achieved = diff / denom;
    return diff <= rel_tol * denom + 1e-280;
}

} // namespace

double gauss_tail_mass(double a, double t0) {
    if (!(a > 0.0)) throw std::invalid_argument("gauss_tail_mass: a must be > 0");
    // 2 * int_{t0}^inf exp(-(a t)^2/2) dt
    return std::sqrt(2.0 * std::numbers::pi) / a *
           std::erfc(a * t0 / std::sqrt(2.0));
}

Result integrate_line(const PhaseSeries& A, const PhaseSeries* B, Form form,
                      double a, double rel_tol, unsigned workers,
                      std::uint64_t max_points) {
    if (!(a > 0.0)) throw std::invalid_argument("integrate_line: a must be > 0");
    double omega = freq_extent(A, B, form);
    double t_max = 10.0 / a; // Gaussian is ~e^{-50} of peak at the cut
    double h = 2.0 * std::numbers::pi / (omega + 14.0 * a);

    Result out;
    std::complex<double> prev{0.0, 0.0};
    bool have_prev = false;
    for (int depth = 0; depth <= 10; ++depth) {
        std::uint64_t steps = static_cast<std::uint64_t>(std::ceil(t_max / h));
        std::uint64_t count = 2 * steps + 1; // symmetric grid including 0
        if (count > max_points)
            throw BudgetExceeded("integrate_line: needs " + std::to_string(count) +
                                 " points, budget is " + std::to_string(max_points));
        double hh = t_max / static_cast<double>(steps);
        double lo = -t_max;
        std::complex<double> q =
            weighted_pass(A, B, form, a, lo, hh, count, workers,
                          [hh](std::uint64_t) { return hh; });
        out.points += count;
        out.h = hh;
        if (have_prev && close_enough(prev, q, rel_tol, &out.achieved_rel)) {
            out.value = q;
            out.converged = true;
            return out;
        }
        prev = q;
        have_prev = true;
        h = hh / 2.0;
    }
    out.value = prev;
    out.converged = false;
    return out;
}

Result integrate_segment(const PhaseSeries& A, const PhaseSeries* B, Form form,
                         double a, double lo, double hi, double rel_tol,
                         unsigned workers, double h0, int max_halvings,
                         std::uint64_t max_points) {
    Result out;
    if (!(hi > lo)) return out; // empty or inverted segment integrates to zero
    double omega = freq_extent(A, B, form) + a;
    if (h0 <= 0.0) h0 = 0.5 / std::max(omega, 8.0 / (hi - lo));

    std::complex<double> prev{0.0, 0.0};
    bool have_prev = false;
    for (int depth = 0; depth <= max_halvings; ++depth) {
        std::uint64_t intervals =
            std::max<std::uint64_t>(8, static_cast<std::uint64_t>(std::ceil((hi - lo) / h0)));
        intervals += intervals % 2; // Simpson needs an even interval count
        std::uint64_t count = intervals + 1;
        if (count > max_points)
            throw BudgetExceeded("integrate_segment: needs " + std::to_string(count) +
                                 " points, budget is " + std::to_string(max_points));
        double h = (hi - lo) / static_cast<double>(intervals);
        std::uint64_t last = count - 1;
        std::complex<double> q = weighted_pass(
            A, B, form, a, lo, h, count, workers, [h, last](std::uint64_t j) {
                double c = (j == 0 || j == last) ? 1.0 : ((j % 2 == 1) ? 4.0 : 2.0);
                return c * h / 3.0;
            });
        out.points += count;
        out.h = h;
        if (have_prev && close_enough(prev, q, rel_tol, &out.achieved_rel)) {
            out.value = q;
            out.converged = true;
            return out;
        }
        prev = q;
        have_prev = true;
        h0 = h / 2.0;
    }
    out.value = prev;
    out.converged = false;
    return out;
}

} // namespace reslab::quad
