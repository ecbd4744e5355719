// Acceptance suite: one line per criterion, pinned tolerances, exit 0 only
// when every criterion passes.  Run with --cli <path-to-reslab-binary> so the
// determinism criterion can drive the command-line tool.

#include "reslab/arith.hpp"
#include "reslab/extremes.hpp"
#include "reslab/gcdsum.hpp"
#include "reslab/kernels.hpp"
#include "reslab/moments.hpp"
#include "reslab/multfn.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/resonator.hpp"
#include "reslab/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace reslab;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;
};

std::string g_cli; // path to the command-line binary (criterion 11)

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// --- criterion 1: Fourier identity ----------------------------------------
// int (m/n)^{-it} Phi(a t) dt = (sqrt(2 pi)/a) Phi(log(m/n)/a)

Outcome c1_fourier() {
    std::mt19937_64 gen(101);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = 1 + uniform_index(gen, 10000);
        const auto n = 1 + uniform_index(gen, 10000);
        const double a = uniform_real(gen, 10.0, 1000.0);
        const double lr = std::log(static_cast<double>(m) / static_cast<double>(n));

        kernels::PhaseSeries s;
        s.add({1.0, 0.0}, -lr);
        s.finalize();
        const auto got = quad::integrate_line(s, nullptr, quad::Form::first, a, 1e-11, 1);
        if (!got.converged) return {false, "quadrature failed to converge"};

        const double want = std::sqrt(2.0 * std::acos(-1.0)) / a *
                            std::exp(-0.5 * (lr / a) * (lr / a));
        worst = std::max(worst, rel_err(got.value.real(), want));
        worst = std::max(worst, std::fabs(got.value.imag()) / want);
    }
    return {worst <= 1e-8, "worst rel " + fmt(worst) + " (tol 1e-8)"};
}

// --- criterion 2: pair sum vs quadrature -----------------------------------

Outcome c2_pairsum() {
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    arith::PrimeTable sieve(64);

    struct Case {
        resonator::Resonator R;
        double T;
    };
    std::vector<Case> cases;
    cases.push_back({resonator::build_hough(5000.0, 30.0, sieve, std::pair{3.0, 13.0}),
                     5000.0}); // support 32
    {
        std::vector<std::uint64_t> v;
        for (std::uint64_t k = 60; k <= 90; ++k) v.push_back(k);
        cases.push_back({resonator::build_binned(resonator::IntegerSet(std::move(v)),
                                                 800.0),
                         800.0}); // support 31
    }

    double worst = 0.0;
    for (const auto& [R, T] : cases) {
        if (R.support.size() > 50) return {false, "support exceeds 50"};
        for (std::uint64_t seed : {0ull, 13ull}) {
            const auto f = seed == 0 ? multfn::sample_constant_one(tbl)
                                     : multfn::sample_random_unimodular(tbl, seed);
            const auto pair = moments::i1_pairsum(R, f, T, 1);
            const auto quadv = moments::i1_quadrature(R, f, T, 1e-10, 1);
            if (!quadv.converged) return {false, "quadrature failed to converge"};
            const double pref = T / std::log(T);
            worst = std::max(worst, rel_err(pair.i1(pref) / pref, quadv.value));
        }
    }
    return {worst <= 1e-6, "worst rel " + fmt(worst) + " (tol 1e-6)"};
}

// --- criterion 3: exact identities ------------------------------------------

Outcome c3_identities() {
    std::mt19937_64 gen(303);
    // binned: sum of squared weights is |M| integer-exactly
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t size = 1 + uniform_index(gen, 200);
        std::set<std::uint64_t> pick;
        while (pick.size() < size) pick.insert(1 + uniform_index(gen, 10'000'000));
        resonator::IntegerSet M(std::vector<std::uint64_t>(pick.begin(), pick.end()));
        const double T = uniform_real(gen, 10.0, 1e5);
        const auto R = resonator::build_binned(M, T);
        if (R.weight_sq_sum_exact() != M.size())
            return {false, "binned weight identity broke at trial " +
                               std::to_string(trial)};
    }

    // hough: triple-sum diagonal vs the closed-form diagonal sums
    arith::PrimeTable sieve(64);
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    double worst = 0.0;
    const std::pair<double, double> windows[] = {{3.0, 13.0}, {5.0, 23.0}, {7.0, 19.0}};
    const double Ts[] = {5000.0, 2000.0, 20000.0};
    const double Ns[] = {30.0, 20.0, 50.0};
    for (int i = 0; i < 3; ++i) {
        const auto R = resonator::build_hough(Ts[i], Ns[i], sieve, windows[i]);
        const auto f = multfn::sample_random_unimodular(tbl, 100 + i);
        const auto part = moments::i2_thm11(R, f, Ts[i], Ns[i], 1e9, 1);
        const auto d = resonator::diagonal_sums(R, Ns[i], Ts[i] / Ns[i]);
        worst = std::max(worst, rel_err(part.diag_coeff, d.i2_diag));
    }
    return {worst <= 1e-10, "hough diag worst rel " + fmt(worst) + " (tol 1e-10)"};
}

// --- criterion 4: resonance inequality on certified searches ---------------

Outcome c4_resonance() {
    arith::PrimeTable sieve(64);
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    const unsigned workers = resolve_workers(0);

    struct Config {
        double T, N;
        std::uint64_t seed; // 0 = constant one
    };
    std::vector<Config> configs = {{5000.0, 30.0, 0},  {5000.0, 30.0, 1},
                                   {5000.0, 30.0, 2},  {5000.0, 30.0, 3},
                                   {5000.0, 30.0, 4},  {5000.0, 30.0, 5},
                                   {2000.0, 20.0, 6}};
    int passed = 0;
    double min_margin = 1e300;
    for (const auto& cfg : configs) {
        const auto R = resonator::build_hough(cfg.T, cfg.N, sieve, std::pair{3.0, 13.0});
        const auto f = cfg.seed == 0 ? multfn::sample_constant_one(tbl)
                                     : multfn::sample_random_unimodular(tbl, cfg.seed);
        const auto cert = extremes::certify_resonance(moments::Style::thm11, R, f,
                                                      cfg.T, cfg.N, 1e-2, 1e-9, 1e9,
                                                      workers);
        if (cert.pass) ++passed;
        min_margin = std::min(min_margin, cert.covered_upper - cert.bound_low);
    }
    return {passed == 7, std::to_string(passed) + "/7 configs, min margin " +
                             fmt(min_margin)};
}

// --- criterion 5: gcd-sum oracle --------------------------------------------

double naive_gcd_sum(const std::vector<std::uint64_t>& e) {
    double s = 0.0;
    for (auto m : e)
        for (auto n : e)
            s += std::sqrt(static_cast<double>(std::gcd(m, n)) /
                           static_cast<double>(std::lcm(m, n)));
    return s / static_cast<double>(e.size());
}

Outcome c5_gcdsum() {
    // hand-enumerated: {1} -> 1; {1,2} -> (2 + 2/sqrt(2))/2; {2,3} -> (2 + 2/sqrt(6))/2
    const double sqrt2 = std::sqrt(2.0), sqrt6 = std::sqrt(6.0);
    struct Hand {
        std::vector<std::uint64_t> set;
        double want;
    };
    const Hand hand[] = {{{1}, 1.0},
                         {{1, 2}, (2.0 + 2.0 / sqrt2) / 2.0},
                         {{2, 3}, (2.0 + 2.0 / sqrt6) / 2.0}};
    for (const auto& h : hand) {
        const double got = gcdsum::gcd_sum(resonator::IntegerSet(h.set), 1);
        if (rel_err(got, h.want) > 1e-12)
            return {false, "hand-enumerated value missed: got " + std::to_string(got)};
    }

    std::mt19937_64 gen(505);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t size = 2 + uniform_index(gen, 199);
        std::set<std::uint64_t> pick;
        while (pick.size() < size) pick.insert(1 + uniform_index(gen, 100000));
        std::vector<std::uint64_t> e(pick.begin(), pick.end());
        const double got = gcdsum::gcd_sum(resonator::IntegerSet(e), 1);
        worst = std::max(worst, rel_err(got, naive_gcd_sum(e)));
    }
    return {worst <= 1e-10, "naive-loop worst rel " + fmt(worst) + " (tol 1e-10)"};
}

// --- criterion 6: truncation consistency ------------------------------------

Outcome c6_truncation() {
    std::mt19937_64 gen(606);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t size = 2 + uniform_index(gen, 120);
        std::set<std::uint64_t> pick;
        while (pick.size() < size) pick.insert(1 + uniform_index(gen, 50000));
        resonator::IntegerSet M(std::vector<std::uint64_t>(pick.begin(), pick.end()));
        const double N = uniform_real(gen, 2.0, 500.0);
        const auto rep = gcdsum::gcd_sum_truncated(M, N, 1);
        worst = std::max(worst, rel_err(rep.truncated + rep.tail_exact, rep.full));
    }
    if (worst > 1e-10) return {false, "split broke: worst rel " + fmt(worst)};

    // y-smooth sets: exact tail must sit below the majorant
    arith::PrimeTable table(60000);
    std::vector<resonator::IntegerSet> smooth_sets;
    for (auto [K, y, center] : {std::tuple{16ull, 7ull, 5000ull},
                                std::tuple{20ull, 11ull, 20000ull}}) {
        gcdsum::ConstructParams params;
        params.K = K;
        params.y = y;
        params.window_center = center;
        params.search_budget = 1000;
        params.seed = 1;
        smooth_sets.push_back(gcdsum::construct_candidate_set(params, table));
    }
    {
        std::vector<std::uint64_t> v; // every 7-smooth integer in [500, 4000]
        for (std::uint64_t n = 500; n <= 4000; ++n)
            if (arith::factorize(n, table).largest_prime() <= 7) v.push_back(n);
        smooth_sets.push_back(resonator::IntegerSet(std::move(v)));
    }
    for (const auto& M : smooth_sets)
        for (double N : {8.0, 64.0})
            for (double eta : {0.05, 0.1, 0.15}) {
                const auto rep = gcdsum::gcd_sum_truncated(M, N, 1);
                const double bound = gcdsum::tail_bound(M, N, eta, table);
                if (!(rep.tail_exact <= bound))
                    return {false, "tail bound violated at eta " + fmt(eta)};
                if (!(static_cast<double>(rep.K) * rep.tail_exact <= bound))
                    return {false, "sharp tail bound violated at eta " + fmt(eta)};
            }
    return {true, "split worst rel " + fmt(worst) + "; tails dominated"};
}

// --- criterion 7: special functions ------------------------------------------

Outcome c7_special() {
    // independent oracle: composite Simpson for int_1^51 e^{-u}/u du
    const auto integrand = [](double u) { return std::exp(-u) / u; };
    const std::size_t steps = 1 << 21;
    const double lo = 1.0, hi = 51.0, h = (hi - lo) / static_cast<double>(steps);
    double acc = integrand(lo) + integrand(hi);
    for (std::size_t k = 1; k < steps; ++k)
        acc += integrand(lo + static_cast<double>(k) * h) * (k % 2 ? 4.0 : 2.0);
    const double oracle = acc * h / 3.0; // tail past 51 is ~1e-24

    const double d1 = rel_err(extremes::e1(1.0), oracle);
    if (d1 > 1e-9) return {false, "e1(1) off by " + fmt(d1)};

    double worst_rt = 0.0, worst_tp = 0.0;
    for (double x : {0.05, 0.3, 1.0, 4.0, 20.0}) {
        worst_rt = std::max(worst_rt,
                            std::fabs(extremes::e1_inverse(extremes::e1(x)) - x) / x);
        worst_tp = std::max(worst_tp,
                            std::fabs(extremes::tau_prime(x) -
                                      (std::exp(-x) / x - extremes::e1(x))));
    }
    const bool ok = worst_rt <= 1e-8 && worst_tp <= 1e-10;
    return {ok, "e1(1) rel " + fmt(d1) + ", roundtrip " + fmt(worst_rt) +
                    ", tau' " + fmt(worst_tp)};
}

// --- criterion 8: off-diagonal Gaussian decay --------------------------------

Outcome c8_offdiag_decay() {
    // 20 equally spaced integers, 11 apart: singleton bins at every T used, so
    // the support is literally identical and only the kernel width changes
    std::vector<std::uint64_t> v;
    for (int k = 0; k < 20; ++k) v.push_back(1000 + 11 * static_cast<std::uint64_t>(k));
    const resonator::IntegerSet M(std::move(v));
    auto tbl = std::make_shared<arith::PrimeTable>(16);
    const auto f = multfn::sample_constant_one(tbl);

    auto ratio = [&](double T) {
        const auto R = resonator::build_binned(M, T);
        if (R.support.size() != 20) return -1.0;
        const auto p = moments::i1_pairsum(R, f, T, 1);
        return p.offdiag_coeff / (moments::phi_hat(0.0) * p.diag_coeff);
    };
    const double r3 = ratio(1e3), r6 = ratio(1e6);
    if (r3 < 0.0 || r6 < 0.0) return {false, "support was not fixed"};
    return {r6 < r3, "offdiag/diag " + fmt(r3) + " @T=1e3 -> " + fmt(r6) + " @T=1e6"};
}

// --- criterion 9: search certification ---------------------------------------

Outcome c9_search() {
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    std::mt19937_64 gen(909);
    const unsigned workers = resolve_workers(0);
    double worst_slack = 1e300;
    for (int trial = 0; trial < 20; ++trial) {
        std::uint64_t N;
        double T;
        if (trial == 0) {
            N = 5;
            T = 1e4;
        } else if (trial == 1) {
            N = 8;
            T = 8000.0;
        } else {
            N = 3 + uniform_index(gen, 48);
            T = std::exp(uniform_real(gen, std::log(50.0), std::log(2000.0)));
        }
        const auto f = multfn::sample_random_unimodular(tbl, 900 + trial);
        const double tol = 0.25;
        const auto grid = extremes::TGrid::certified(1.0, T, N, tol);
        const auto res = extremes::find_max(f, N, grid, workers);
        if (!res.certified) return {false, "grid fell back to uncertified"};

        // 10x-finer scan on an offset mesh
        auto s = moments::poly_series(f, N);
        const double dt = grid.spacing / 10.0;
        const double t0 = 1.0 + dt / 3.0;
        const auto count = static_cast<std::size_t>((T - t0) / dt) + 1;
        const auto dense = kernels::scan_max_abs2(s, t0, dt, count, workers);
        const double dense_val = std::sqrt(dense.abs2);
        const double cover = res.value + res.certified_gap;
        if (dense_val > cover)
            return {false, "dense scan beat the cover at trial " +
                               std::to_string(trial)};
        worst_slack = std::min(worst_slack, cover - dense_val);
    }
    return {true, "20/20 covered, min slack " + fmt(worst_slack)};
}

// --- criterion 10: predictor evaluation ---------------------------------------

Outcome c10_predictor() {
    const double N = 100.0, T = N * std::exp(20.0);
    const double L2 = std::log(20.0), L3 = std::log(L2);
    const double want = std::exp(std::sqrt(2.0) * std::sqrt(20.0 * L3 / L2));
    const auto p = extremes::predict_thm12(T, N);
    const double got = p.value / std::sqrt(N);
    const double d = rel_err(got, want);
    if (d > 1e-10) return {false, "factor off by " + fmt(d)};

    const double ee = std::exp(std::exp(1.0));
    bool threw_below = false, threw_at = false, ran_above = false;
    try {
        (void)extremes::predict_thm12(N * ee * 0.9, N);
    } catch (const std::domain_error&) {
        threw_below = true;
    }
    try {
        (void)extremes::predict_thm12(N * ee * (1.0 - 1e-9), N);
    } catch (const std::domain_error&) {
        threw_at = true;
    }
    try {
        (void)extremes::predict_thm12(N * ee * (1.0 + 1e-6), N);
        ran_above = true;
    } catch (const std::domain_error&) {
    }
    const bool ok = threw_below && threw_at && ran_above;
    return {ok, "factor rel " + fmt(d) + (ok ? ", domain edge exact" :
                                               ", domain edge wrong")};
}

// --- criterion 11: CLI determinism across worker counts -----------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c11_determinism() {
    if (g_cli.empty()) return {false, "no --cli path given"};
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"predict11", "predict11 --T 5000 8000 --N 30 100"},
        {"predict12", "predict12 --T 1e9 --N 100 --delta 0.15"},
        {"resonate11",
         "resonate11 --T 5000 --N 30 --window 3 13 --sample random --seed 5 --certify"},
        {"resonate12",
         "resonate12 --T 800 --N 20 --set-lo 60 --set-hi 90 --sample random --seed 5 "
         "--certify"},
        {"search", "search --N 35 --t-max 300 --sample random --seed 9"},
        {"gcdsum", "gcdsum --set-lo 5000 --set-hi 5120 --N 100 --eta 0.1"},
        {"construct-set",
         "construct-set --K 16 --y 11 --window-center 20000 --budget 3000 --seed 2"},
        {"moments-thm11",
         "moments --style thm11 --T 2000 --N 20 --window 3 13 --sample random --seed 3"},
        {"moments-thm12",
         "moments --style thm12 --T 800 --N 20 --set-lo 60 --set-hi 90 --sample random "
         "--seed 3"},
        {"check-fc", "check-fc --N 80 --sample arc --c 0.4 --seed 6"},
        {"selftest", "selftest"},
    };
    for (const auto& [name, args] : runs) {
        const std::string f1 = "/tmp/reslab_acc_" + name + "_t1.csv";
        const std::string f4 = "/tmp/reslab_acc_" + name + "_t4.csv";
        const std::string c1 = g_cli + " " + args + " --threads 1 --out " + f1;
        const std::string c4 = g_cli + " " + args + " --threads 4 --out " + f4;
        if (std::system(c1.c_str()) != 0) return {false, name + " exited nonzero"};
        if (std::system(c4.c_str()) != 0) return {false, name + " exited nonzero"};
        const auto b1 = slurp(f1), b4 = slurp(f4);
        std::remove(f1.c_str());
        std::remove(f4.c_str());
        if (b1.empty()) return {false, name + " produced no output"};
        if (b1 != b4) return {false, name + " differs between 1 and 4 workers"};
    }
    return {true, std::to_string(runs.size()) + " commands byte-identical"};
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];

    struct Criterion {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"fourier identity (100 random pairs, 1e-8)", c1_fourier},
        {"pair sum vs quadrature (1e-6)", c2_pairsum},
        {"exact identities (binned weights, hough diagonal)", c3_identities},
        {"resonance inequality, certified (7 configs)", c4_resonance},
        {"gcd-sum oracle (hand values + naive loop)", c5_gcdsum},
        {"truncation consistency and tail bounds", c6_truncation},
        {"special functions (e1, inverse, tau')", c7_special},
        {"off-diagonal gaussian decay", c8_offdiag_decay},
        {"search certification (20 instances)", c9_search},
        {"predictor evaluation at T/N = e^20", c10_predictor},
        {"cli determinism (1 vs 4 workers)", c11_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] %2zu. %s — %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, out.note.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures == 0) {
        std::printf("acceptance: 11/11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
