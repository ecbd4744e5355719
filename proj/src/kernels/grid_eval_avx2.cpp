#if defined(RESLAB_HAVE_AVX2_KERNEL)

#include "reslab/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace reslab::kernels {

// AVX2/FMA variant of eval_grid_scalar: four independent rotation streams
// per register pair.  PhaseSeries::finalize() guarantees the arrays are
// padded to a multiple of 4 with zero weights, so no tail loop is needed.
void eval_grid_avx2(const PhaseSeries& s, double t0, double dt,
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
        __m256d acc_re = _mm256_setzero_pd();
        __m256d acc_im = _mm256_setzero_pd();
        for (std::size_t k = 0; k < K; k += 4) {
            __m256d vzr = _mm256_loadu_pd(&zre[k]);
            __m256d vzi = _mm256_loadu_pd(&zim[k]);
            acc_re = _mm256_add_pd(acc_re, vzr);
            acc_im = _mm256_add_pd(acc_im, vzi);
            __m256d vrr = _mm256_loadu_pd(&rre[k]);
            __m256d vri = _mm256_loadu_pd(&rim[k]);
            // (zr + i zi) * (rr + i ri)
            __m256d nre = _mm256_fmsub_pd(vzr, vrr, _mm256_mul_pd(vzi, vri));
            __m256d nim = _mm256_fmadd_pd(vzr, vri, _mm256_mul_pd(vzi, vrr));
            _mm256_storeu_pd(&zre[k], nre);
            _mm256_storeu_pd(&zim[k], nim);
        }
        __m128d lo = _mm256_castpd256_pd128(acc_re);
        __m128d hi = _mm256_extractf128_pd(acc_re, 1);
        __m128d sum2 = _mm_add_pd(lo, hi);
        out_re[j] = _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
        lo = _mm256_castpd256_pd128(acc_im);
        hi = _mm256_extractf128_pd(acc_im, 1);
        sum2 = _mm_add_pd(lo, hi);
        out_im[j] = _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
    }
}

} // namespace reslab::kernels

#endif // RESLAB_HAVE_AVX2_KERNEL
