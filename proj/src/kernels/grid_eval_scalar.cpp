#include "reslab/kernels.hpp"

#include <cmath>

namespace reslab::kernels {

// Reference implementation: one complex rotation per term per grid step.
// The SIMD variants must agree with this up to reduction-order rounding.
void eval_grid_scalar(const PhaseSeries& s, double t0, double dt,
                      std::size_t count, double* out_re, double* out_im) {
    const std::size_t K = s.wre.size();
    std::vector<double> zre(K), zim(K), rre(K), rim(K);
    for (std::size_t k = 0; k < K; ++k) {
        double ph = t0 * s.freq[k];
        double c = std::cos(ph), sn = std::sin(ph);
        zre[k] = s.wre[k] * c - s.wim[k] * sn;
        zim[k] = s.wre[k] * sn + s.wim[k] * c;
        double rph = dt * s.freq[k];
        rre[k] = std::cos(rph);
        rim[k] = std::sin(rph);
    }
    for (std::size_t j = 0; j < count; ++j) {
        double sre = 0.0, sim = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            sre += zre[k];
            sim += zim[k];
            double a = zre[k], b = zim[k];
            zre[k] = a * rre[k] - b * rim[k];
            zim[k] = a * rim[k] + b * rre[k];
        }
        out_re[j] = sre;
        out_im[j] = sim;
    }
}

} // namespace reslab::kernels
