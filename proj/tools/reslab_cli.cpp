// resonance-lab command-line driver: every pipeline as a subcommand with a
// serialized config echo, CSV/JSON output, and deterministic numerics.

#include "CLI11.hpp"
#include "json.hpp"

#include "reslab/arith.hpp"
#include "reslab/errors.hpp"
#include "reslab/extremes.hpp"
#include "reslab/gcdsum.hpp"
#include "reslab/io.hpp"
#include "reslab/kernels.hpp"
#include "reslab/moments.hpp"
#include "reslab/multfn.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/resonator.hpp"
#include "reslab/summation.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace {

using nlohmann::ordered_json;
namespace rl = reslab;

constexpr const char* kTool = "resonance-lab";
constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kAutoSieveCap = 50'000'000;

// ---------------------------------------------------------------- output --

struct OutputOpts {
    std::string format = "csv";
    std::string path = "-";
};

std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return rl::io::fmt_double(v.get<double>());
    return v.dump();
}

void write_output(const OutputOpts& out, const std::string& command,
                  const ordered_json& config, const std::vector<ordered_json>& rows) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (out.path != "-") {
        file.open(out.path);
        if (!file) throw std::runtime_error("cannot open " + out.path + " for writing");
        os = &file;
    }
    if (out.format == "json") {
        ordered_json doc;
        doc["tool"] = kTool;
        doc["version"] = kVersion;
        doc["schema"] = 1;
        doc["command"] = command;
        doc["config"] = config;
        doc["rows"] = rows;
        *os << doc.dump(2) << "\n";
        return;
    }
    *os << "# " << kTool << " " << kVersion << "\n";
    *os << "# schema 1\n";
    *os << "# command " << command << "\n";
    *os << "# config " << config.dump() << "\n";
    if (rows.empty()) return;
    bool first = true;
    for (const auto& [key, value] : rows.front().items()) {
        (void)value;
        *os << (first ? "" : ",") << key;
        first = false;
    }
    *os << "\n";
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, value] : row.items()) {
            (void)key;
            *os << (first ? "" : ",") << csv_cell(value);
            first = false;
        }
        *os << "\n";
    }
}

// ------------------------------------------------------------ shared opts --

struct CommonOpts {
    OutputOpts out;
    unsigned threads = 0; // 0 = RESONANCE_LAB_THREADS or hardware
    std::string kernel = "auto";
    std::uint64_t seed = 1;

    unsigned workers() const { return rl::resolve_workers(threads); }
    void apply_kernel() const {
        if (kernel == "scalar")
            rl::kernels::force(rl::kernels::Impl::Scalar);
        else if (kernel == "avx2")
            rl::kernels::force(rl::kernels::Impl::Avx2);
        else
            rl::kernels::force(rl::kernels::Impl::Auto);
    }
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--format", c.out.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", c.out.path, "Output file ('-' = stdout)")
        ->capture_default_str();
    sub->add_option("--threads", c.threads,
                    "Worker threads (0 = RESONANCE_LAB_THREADS or hardware)");
    sub->add_option("--kernel", c.kernel, "Grid kernel")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed for every sampled quantity")
        ->capture_default_str();
}

struct FunctionOpts {
    std::string file;
    std::string sample = "one"; // one | random | arc
    double c = 0.5;
};

void add_function_opts(CLI::App* sub, FunctionOpts& fo) {
    sub->add_option("--function", fo.file,
                    "Load f from a cmfunction file (overrides --sample)");
    sub->add_option("--sample", fo.sample, "f sampler")
        ->check(CLI::IsMember({"one", "random", "arc"}))
        ->capture_default_str();
    sub->add_option("--c", fo.c, "Arc-constraint target Re f(n)conj(f(m)) >= c")
        ->capture_default_str();
}

rl::multfn::CMFunction make_function(const FunctionOpts& fo,
                                     std::shared_ptr<const rl::arith::PrimeTable> table,
                                     std::uint64_t seed, std::uint64_t N) {
    if (!fo.file.empty()) return rl::io::load_cmfunction(fo.file);
    if (fo.sample == "one") return rl::multfn::sample_constant_one(std::move(table));
    if (fo.sample == "random")
        return rl::multfn::sample_random_unimodular(std::move(table), seed);
    return rl::multfn::sample_arc_constrained(std::move(table), fo.c, N, seed);
}

ordered_json function_config(const FunctionOpts& fo) {
    ordered_json j;
    if (!fo.file.empty()) {
        j["function"] = fo.file;
    } else {
        j["sample"] = fo.sample;
        if (fo.sample == "arc") j["c"] = fo.c;
    }
    return j;
}

// Sieve limit accommodating the hough window, the polynomial range and an
// explicit user override.
std::uint64_t hough_sieve_limit(double T, double N, std::uint64_t user_limit,
                                const std::optional<std::pair<double, double>>& window) {
    const double x = T / N;
    if (!(x > std::exp(1.0)))
        throw std::invalid_argument("resonator: x = T/N must exceed e");
    double hi;
    if (window) {
        hi = window->second;
    } else {
        const double lambda = std::sqrt(std::log(x) * std::log(std::log(x)));
        hi = std::exp(std::log(lambda) * std::log(lambda));
    }
    if (user_limit > 0) return user_limit;
    const double need = std::max({hi + 2.0, N + 2.0, 4.0});
    if (need > static_cast<double>(kAutoSieveCap))
        throw std::invalid_argument(
            "resonator: the default prime window needs a sieve of " +
            rl::io::fmt_double(need) +
            " entries; pass --window lo hi (and/or --limit) to keep it tractable");
    return static_cast<std::uint64_t>(need);
}

ordered_json report_row(const rl::moments::MomentReport& rep) {
    ordered_json row;
    row["style"] = rl::io::style_name(rep.style);
    for (const auto& [key, value] : rl::io::report_fields(rep)) row[key] = value;
    return row;
}

void append_resonator_meta(ordered_json& row, const rl::resonator::Resonator& R) {
    row["support_size"] = R.support.size();
    if (R.meta.style == rl::resonator::Style::hough) {
        row["lambda"] = R.meta.lambda;
        row["window_lo"] = R.meta.window_lo;
        row["window_hi"] = R.meta.window_hi;
        row["empty_window"] = R.meta.empty_window;
    } else {
        row["bin_count"] = R.meta.bin_count;
    }
}

void append_certify(ordered_json& row, const rl::extremes::CertifyResult& cert) {
    row["observed"] = cert.observed;
    row["observed_t"] = cert.backward.value > cert.forward.value ? -cert.backward.t
                                                                 : cert.forward.t;
    row["covered_upper"] = cert.covered_upper;
    row["scan_points"] = cert.forward.grid_points;
    row["grid_certified"] = cert.forward.certified && cert.backward.certified;
    row["pass"] = cert.pass;
}

// ------------------------------------------------------------ predictors --

void cmd_predict11(const CommonOpts& common, const std::vector<double>& Ts,
                   const std::vector<double>& Ns) {
    ordered_json config{{"T", Ts}, {"N", Ns}, {"seed", common.seed},
                        {"note", "o(1) factors dropped"}};
    std::vector<ordered_json> rows;
    for (double T : Ts) {
        for (double N : Ns) {
            const auto p = rl::extremes::predict_thm11(T, N);
            ordered_json row;
            row["T"] = T;
            row["N"] = N;
            row["tau"] = p.tau;
            row["A"] = p.A;
            row["tau_prime"] = p.tau_p;
            row["exponent"] = p.exponent;
            row["bound"] = p.value;
            rows.push_back(std::move(row));
        }
    }
    write_output(common.out, "predict11", config, rows);
}

void cmd_predict12(const CommonOpts& common, const std::vector<double>& Ts,
                   const std::vector<double>& Ns, double delta) {
    ordered_json config{{"T", Ts}, {"N", Ns}, {"delta", delta},
                        {"seed", common.seed}, {"note", "o(1) factors dropped"}};
    std::vector<ordered_json> rows;
    for (double T : Ts) {
        for (double N : Ns) {
            const auto p = rl::extremes::predict_thm12(T, N);
            ordered_json row;
            row["T"] = T;
            row["N"] = N;
            row["exponent"] = p.exponent;
            row["bound"] = p.value;
            row["domain_ok"] = true; // predict_thm12 throws otherwise
            const auto xy = rl::extremes::predict_xy(T, N, delta);
            row["xy_exponent"] = xy.exponent;
            row["xy_bound"] = xy.value;
            row["xy_range_ok"] = rl::extremes::xy_range_ok(T, N, delta);
            rows.push_back(std::move(row));
        }
    }
    write_output(common.out, "predict12", config, rows);
}

// -------------------------------------------------------------- resonate --

struct Resonate11Opts {
    CommonOpts common;
    FunctionOpts fn;
    double T = 0.0, N = 0.0;
    std::uint64_t limit = 0;
    std::vector<double> window; // empty or {lo, hi}
    double rel_tol = 1e-9;
    double budget = 1e9;
    bool certify = false;
    double tolerance = 1e-2;
    std::uint64_t max_points = std::uint64_t{1} << 28;
    std::string dump_support, dump_function;
};

void cmd_resonate11(const Resonate11Opts& o) {
    o.common.apply_kernel();
    std::optional<std::pair<double, double>> window;
    if (!o.window.empty()) window = {o.window[0], o.window[1]};

    std::shared_ptr<const rl::arith::PrimeTable> table;
    rl::multfn::CMFunction f = [&] {
        if (!o.fn.file.empty()) {
            auto loaded = rl::io::load_cmfunction(o.fn.file);
            table = loaded.table_ptr();
            return loaded;
        }
        const std::uint64_t limit = hough_sieve_limit(o.T, o.N, o.limit, window);
        table = std::make_shared<rl::arith::PrimeTable>(limit);
        return make_function(o.fn, table, o.common.seed,
                             static_cast<std::uint64_t>(o.N));
    }();

    const auto R = rl::resonator::build_hough(o.T, o.N, f.table(), window);
    if (!o.dump_support.empty()) rl::io::save_resonator(R, o.dump_support);
    if (!o.dump_function.empty()) rl::io::save_cmfunction(f, o.dump_function);

    ordered_json config{{"T", o.T}, {"N", o.N}, {"seed", o.common.seed},
                        {"rel_tol", o.rel_tol}, {"budget", o.budget}};
    if (window) config["window"] = {window->first, window->second};
    if (o.limit) config["limit"] = o.limit;
    config.update(function_config(o.fn));
    if (o.certify) {
        config["certify"] = true;
        config["tolerance"] = o.tolerance;
        config["max_points"] = o.max_points;
    }

    ordered_json row;
    if (o.certify) {
        const auto cert = rl::extremes::certify_resonance(
            rl::moments::Style::thm11, R, f, o.T, o.N, o.tolerance, o.rel_tol,
            o.budget, o.common.workers(), o.max_points);
        row = report_row(cert.report);
        append_resonator_meta(row, R);
        append_certify(row, cert);
    } else {
        const auto rep = rl::moments::report_thm11(R, f, o.T, o.N, o.rel_tol,
                                                   o.budget, o.common.workers());
        row = report_row(rep);
        append_resonator_meta(row, R);
    }
    write_output(o.common.out, "resonate11", config, {row});
}

struct Resonate12Opts {
    CommonOpts common;
    FunctionOpts fn;
    double T = 0.0, N = 0.0;
    std::string set_file;
    std::uint64_t set_lo = 0, set_hi = 0;
    double rel_tol = 1e-8;
    double budget = 1e9;
    bool certify = false;
    double tolerance = 1e-2;
    std::uint64_t max_points = std::uint64_t{1} << 28;
    std::string dump_support;
};

rl::resonator::IntegerSet load_set(const std::string& file, std::uint64_t lo,
                                   std::uint64_t hi) {
    if (!file.empty()) return rl::io::load_integer_set(file);
    if (lo == 0 || hi < lo)
        throw std::invalid_argument(
            "set selection: pass --set-file or --set-lo/--set-hi with hi >= lo >= 1");
    if (hi - lo >= 50'000'000)
        throw std::invalid_argument(
            "set selection: the interval [set-lo, set-hi] has more than 5e7 elements");
    std::vector<std::uint64_t> elems;
    elems.reserve(hi - lo + 1);
    for (std::uint64_t n = lo; n <= hi; ++n) elems.push_back(n);
    return rl::resonator::IntegerSet(std::move(elems));
}

void cmd_resonate12(const Resonate12Opts& o) {
    o.common.apply_kernel();
    const auto M = load_set(o.set_file, o.set_lo, o.set_hi);
    const auto R = rl::resonator::build_binned(M, o.T);
    if (!o.dump_support.empty()) rl::io::save_resonator(R, o.dump_support);

    const auto Ni = static_cast<std::uint64_t>(o.N);
    auto table = std::make_shared<rl::arith::PrimeTable>(std::max<std::uint64_t>(Ni + 1, 4));
    const auto f = make_function(o.fn, table, o.common.seed, Ni);

    ordered_json config{{"T", o.T}, {"N", o.N}, {"seed", o.common.seed},
                        {"rel_tol", o.rel_tol}, {"budget", o.budget}};
    if (!o.set_file.empty())
        config["set_file"] = o.set_file;
    else
        config["set"] = {o.set_lo, o.set_hi};
    config.update(function_config(o.fn));
    if (o.certify) {
        config["certify"] = true;
        config["tolerance"] = o.tolerance;
        config["max_points"] = o.max_points;
    }

    ordered_json row;
    if (o.certify) {
        const auto cert = rl::extremes::certify_resonance(
            rl::moments::Style::thm12, R, f, o.T, o.N, o.tolerance, o.rel_tol,
            o.budget, o.common.workers(), o.max_points);
        row = report_row(cert.report);
        append_resonator_meta(row, R);
        row["set_size"] = M.size();
        row["set_dyadic"] = M.dyadic();
        append_certify(row, cert);
    } else {
        const auto rep = rl::moments::report_thm12(R, f, o.T, o.N, o.rel_tol,
                                                   o.budget, o.common.workers());
        row = report_row(rep);
        append_resonator_meta(row, R);
        row["set_size"] = M.size();
        row["set_dyadic"] = M.dyadic();
    }
    write_output(o.common.out, "resonate12", config, {row});
}

// ---------------------------------------------------------------- search --

struct SearchOpts {
    CommonOpts common;
    FunctionOpts fn;
    std::uint64_t N = 0;
    double t_min = 1.0, t_max = 0.0;
    double tolerance = 1e-2;
    std::uint64_t max_points = std::uint64_t{1} << 28;
};

void cmd_search(const SearchOpts& o) {
    o.common.apply_kernel();
    auto table = std::make_shared<rl::arith::PrimeTable>(std::max<std::uint64_t>(o.N + 1, 4));
    const auto f = make_function(o.fn, table, o.common.seed, o.N);
    const auto grid = rl::extremes::TGrid::certified(o.t_min, o.t_max, o.N, o.tolerance);
    const auto res = rl::extremes::find_max(f, o.N, grid, o.common.workers(),
                                            o.max_points);
    ordered_json config{{"N", o.N}, {"t_min", o.t_min}, {"t_max", o.t_max},
                        {"tolerance", o.tolerance}, {"max_points", o.max_points},
                        {"seed", o.common.seed}};
    config.update(function_config(o.fn));
    ordered_json row;
    row["t"] = res.t;
    row["value"] = res.value;
    row["grid_t"] = res.grid_t;
    row["grid_value"] = res.grid_value;
    row["certified_gap"] = res.certified_gap;
    row["grid_points"] = res.grid_points;
    row["certified"] = res.certified;
    write_output(o.common.out, "search", config, {row});
}

// ---------------------------------------------------------------- gcdsum --

struct GcdSumOpts {
    CommonOpts common;
    std::string set_file;
    std::uint64_t set_lo = 0, set_hi = 0;
    double N = 0.0;
    double eta = 0.1;
};

void cmd_gcdsum(const GcdSumOpts& o) {
    const auto M = load_set(o.set_file, o.set_lo, o.set_hi);
    rl::arith::PrimeTable table(std::max<std::uint64_t>(M.max(), 3));
    auto rep = rl::gcdsum::gcd_sum_truncated(M, o.N, o.common.workers());
    rep.eta = o.eta;
    rep.tail_bound = rl::gcdsum::tail_bound(M, o.N, o.eta, table);
    rep.y_M = rl::gcdsum::largest_prime_over_set(M, table);

    ordered_json config{{"N", o.N}, {"eta", o.eta}, {"seed", o.common.seed}};
    if (!o.set_file.empty())
        config["set_file"] = o.set_file;
    else
        config["set"] = {o.set_lo, o.set_hi};

    ordered_json row;
    row["K"] = rep.K;
    row["N"] = rep.N;
    row["eta"] = rep.eta;
    row["y_M"] = rep.y_M;
    row["full"] = rep.full;
    row["truncated"] = rep.truncated;
    row["tail_exact"] = rep.tail_exact;
    row["tail_bound"] = rep.tail_bound;
    row["tail_ok"] = rep.tail_ok();
    row["lemma_rate"] = rep.K > 15
                            ? ordered_json(rl::gcdsum::lemma_rate(rep.K))
                            : ordered_json(nullptr);
    write_output(o.common.out, "gcdsum", config, {row});
}

struct ConstructOpts {
    CommonOpts common;
    std::uint64_t K = 0, y = 0, window_center = 0;
    std::uint64_t budget = 20000;
    std::string save_set;
};

void cmd_construct_set(const ConstructOpts& o) {
    rl::arith::PrimeTable table(std::max<std::uint64_t>(2 * o.window_center + 1, 4));
    rl::gcdsum::ConstructParams params;
    params.K = o.K;
    params.y = o.y;
    params.window_center = o.window_center;
    params.search_budget = o.budget;
    params.seed = o.common.seed;
    const auto M = rl::gcdsum::construct_candidate_set(params, table);
    if (!o.save_set.empty()) rl::io::save_integer_set(M, o.save_set);

    ordered_json config{{"K", o.K}, {"y", o.y}, {"window_center", o.window_center},
                        {"budget", o.budget}, {"seed", o.common.seed}};
    ordered_json row;
    row["K"] = M.size();
    row["min"] = M.min();
    row["max"] = M.max();
    row["dyadic"] = M.dyadic();
    row["gcd_sum"] = rl::gcdsum::gcd_sum(M, o.common.workers());
    row["lemma_rate"] = o.K > 15 ? ordered_json(rl::gcdsum::lemma_rate(o.K))
                                 : ordered_json(nullptr);
    write_output(o.common.out, "construct-set", config, {row});
}

// --------------------------------------------------------------- moments --

struct MomentsOpts {
    CommonOpts common;
    FunctionOpts fn;
    std::string style = "thm11";
    double T = 0.0, N = 0.0;
    std::uint64_t limit = 0;
    std::vector<double> window;
    std::string set_file;
    std::uint64_t set_lo = 0, set_hi = 0;
    double rel_tol = 1e-8;
    double budget = 1e9;
};

void cmd_moments(const MomentsOpts& o) {
    o.common.apply_kernel();
    const unsigned workers = o.common.workers();
    ordered_json config{{"style", o.style}, {"T", o.T}, {"N", o.N},
                        {"seed", o.common.seed}, {"rel_tol", o.rel_tol},
                        {"budget", o.budget}};
    config.update(function_config(o.fn));

    ordered_json row;
    if (o.style == "thm11") {
        std::optional<std::pair<double, double>> window;
        if (!o.window.empty()) window = {o.window[0], o.window[1]};
        if (window) config["window"] = {window->first, window->second};
        if (o.limit) config["limit"] = o.limit;

        std::shared_ptr<const rl::arith::PrimeTable> table;
        rl::multfn::CMFunction f = [&] {
            if (!o.fn.file.empty()) {
                auto loaded = rl::io::load_cmfunction(o.fn.file);
                table = loaded.table_ptr();
                return loaded;
            }
            const std::uint64_t limit = hough_sieve_limit(o.T, o.N, o.limit, window);
            table = std::make_shared<rl::arith::PrimeTable>(limit);
            return make_function(o.fn, table, o.common.seed,
                                 static_cast<std::uint64_t>(o.N));
        }();
        const auto R = rl::resonator::build_hough(o.T, o.N, f.table(), window);
        const auto rep = rl::moments::report_thm11(R, f, o.T, o.N, o.rel_tol,
                                                   o.budget, workers);
        row = report_row(rep);
        append_resonator_meta(row, R);

        // independent quadrature cross-checks of the pair sums
        const auto q1 = rl::moments::i1_quadrature(R, f, o.T, o.rel_tol, workers);
        const double i1_scaled = rep.i1 / rep.prefactor;
        row["i1_quad"] = q1.value;
        row["i1_agree_rel"] =
            std::fabs(q1.value - i1_scaled) / std::max(std::fabs(q1.value), 1e-300);

        const auto A = rl::moments::poly_series(f, static_cast<std::uint64_t>(o.N));
        const auto B = rl::moments::resonator_series(R, f);
        const double a = 1.0 / rep.prefactor;
        const auto pos = rl::quad::integrate_segment(A, &B, rl::quad::Form::first_abs2,
                                                     a, 1.0, o.T, o.rel_tol, workers);
        const auto neg = rl::quad::integrate_segment(A, &B, rl::quad::Form::first_abs2,
                                                     a, -o.T, -1.0, o.rel_tol, workers);
        const std::complex<double> m2_grid = pos.value + neg.value;
        row["m2_grid_re"] = m2_grid.real();
        row["m2_grid_im"] = m2_grid.imag();
        row["m2_agree_rel"] = std::abs(m2_grid - rep.m2) /
                              std::max(std::abs(m2_grid), 1e-300);
    } else {
        if (!o.set_file.empty())
            config["set_file"] = o.set_file;
        else
            config["set"] = {o.set_lo, o.set_hi};
        const auto M = load_set(o.set_file, o.set_lo, o.set_hi);
        const auto R = rl::resonator::build_binned(M, o.T);
        const auto Ni = static_cast<std::uint64_t>(o.N);
        auto table = std::make_shared<rl::arith::PrimeTable>(
            std::max<std::uint64_t>(Ni + 1, 4));
        const auto f = make_function(o.fn, table, o.common.seed, Ni);
        const auto rep = rl::moments::report_thm12(R, f, o.T, o.N, o.rel_tol,
                                                   o.budget, workers);
        row = report_row(rep);
        append_resonator_meta(row, R);

        const auto q1 = rl::moments::i1_quadrature(R, f, o.T, o.rel_tol, workers);
        const double i1_scaled = rep.i1 / rep.prefactor;
        row["i1_quad"] = q1.value;
        row["i1_agree_rel"] =
            std::fabs(q1.value - i1_scaled) / std::max(std::fabs(q1.value), 1e-300);

        const auto g2 = rl::moments::m2_thm12_grid(R, f, o.T, o.N, o.rel_tol, workers);
        row["m2_grid"] = g2.value;
        row["m2_agree_rel"] = std::fabs(g2.value - rep.m2.real()) /
                              std::max(std::fabs(g2.value), 1e-300);
    }
    write_output(o.common.out, "moments", config, {row});
}

// -------------------------------------------------------------- check-fc --

struct CheckFcOpts {
    CommonOpts common;
    FunctionOpts fn; // fn.c doubles as the class parameter
    std::uint64_t N = 0;
};

void cmd_check_fc(const CheckFcOpts& o) {
    auto table = std::make_shared<rl::arith::PrimeTable>(std::max<std::uint64_t>(o.N + 1, 4));
    const auto f = make_function(o.fn, table, o.common.seed, o.N);
    const auto res = rl::multfn::check_fc(f, o.N, o.fn.c);
    ordered_json config{{"N", o.N}, {"c", o.fn.c}, {"seed", o.common.seed}};
    config.update(function_config(o.fn));
    ordered_json row;
    row["N"] = o.N;
    row["c"] = o.fn.c;
    row["threshold"] = std::acos(o.fn.c);
    row["arc_width"] = res.arc.width;
    row["min_pair_re"] = res.arc.min_pair_re;
    row["witness_n"] = res.arc.witness.first;
    row["witness_m"] = res.arc.witness.second;
    row["member"] = res.member;
    write_output(o.common.out, "check-fc", config, {row});
}

// -------------------------------------------------------------- selftest --

int cmd_selftest(const CommonOpts& common) {
    common.apply_kernel();
    std::vector<ordered_json> rows;
    bool all = true;
    auto check = [&](const char* name, bool ok) {
        rows.push_back(ordered_json{{"check", name}, {"pass", ok}});
        all = all && ok;
    };

    { // kernel equivalence: blocked incremental scan vs direct evaluation
        rl::kernels::PhaseSeries s;
        std::mt19937_64 gen(7);
        auto uni = [&] { return (gen() >> 11) * 0x1.0p-53; };
        for (int k = 0; k < 37; ++k)
            s.add(std::polar(0.25 + uni(), 6.28 * uni()), 10.0 * uni());
        s.finalize();
        const std::size_t count = 3 * rl::kernels::kBlockLen + 17;
        const double t0 = -3.0, dt = 1.0 / 4096;
        auto scan1 = rl::kernels::scan_max_abs2(s, t0, dt, count, 1);
        auto scan3 = rl::kernels::scan_max_abs2(s, t0, dt, count, 3);
        bool same = scan1.abs2 == scan3.abs2 && scan1.index == scan3.index;
        check("scan_workers_bitwise", same);

        const double t = t0 + static_cast<double>(scan1.index) * dt;
        rl::Accumulator re, im;
        for (std::size_t k = 0; k < s.count; ++k) {
            re.add(s.wre[k] * std::cos(t * s.freq[k]) - s.wim[k] * std::sin(t * s.freq[k]));
            im.add(s.wre[k] * std::sin(t * s.freq[k]) + s.wim[k] * std::cos(t * s.freq[k]));
        }
        const double direct = re.value() * re.value() + im.value() * im.value();
        check("scan_matches_direct", std::fabs(direct - scan1.abs2) <
                                         1e-9 * std::max(1.0, direct));
    }
    { // binned resonator weight identity
        std::vector<std::uint64_t> elems;
        for (std::uint64_t n = 50; n <= 100; ++n) elems.push_back(n);
        rl::resonator::IntegerSet M(std::move(elems));
        const auto R = rl::resonator::build_binned(M, 1000.0);
        check("binned_weight_sq_exact", R.weight_sq_sum_exact() == M.size());
    }
    { // first-moment pair sum vs adaptive quadrature
        rl::arith::PrimeTable table(16);
        const double T = 600.0, N = 2.0;
        const auto R = rl::resonator::build_hough(T, N, table,
                                                  std::pair<double, double>{3.0, 13.0});
        const auto f = rl::multfn::sample_constant_one(
            std::make_shared<rl::arith::PrimeTable>(16));
        const auto pair = rl::moments::i1_pairsum(R, f, T, 1);
        const auto quadv = rl::moments::i1_quadrature(R, f, T, 1e-10, 1);
        const double scaled = pair.i1(T / std::log(T)) * std::log(T) / T;
        check("i1_pairsum_vs_quadrature",
              std::fabs(scaled - quadv.value) < 1e-6 * std::fabs(quadv.value));
    }
    { // exponential integral round trip
        bool ok = true;
        for (double x : {0.1, 0.7, 1.0, 3.0, 9.0})
            ok = ok && std::fabs(rl::extremes::e1_inverse(rl::extremes::e1(x)) - x) <
                           1e-10 * x;
        check("e1_roundtrip", ok);
    }
    { // truncated class membership of the constant function
        auto table = std::make_shared<rl::arith::PrimeTable>(128);
        const auto f = rl::multfn::sample_constant_one(table);
        const auto res = rl::multfn::check_fc(f, 100, 0.5);
        check("fc_constant_one", res.member && res.arc.width == 0.0);
    }

    ordered_json config{{"seed", common.seed}};
    write_output(common.out, "selftest", config, rows);
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonance-lab: numerical laboratory for resonance-method "
                 "lower bounds on Dirichlet polynomials"};
    app.set_version_flag("--version", std::string(kTool) + " " + kVersion);
    app.require_subcommand(1);
    int exit_code = 0;

    // predict11 / predict12
    auto p11_common = std::make_shared<CommonOpts>();
    auto p11_T = std::make_shared<std::vector<double>>();
    auto p11_N = std::make_shared<std::vector<double>>();
    {
        auto* sub = app.add_subcommand("predict11",
                                       "Asymptotic bound shape, twisted-resonator flavor");
        add_common(sub, *p11_common);
        sub->add_option("--T", *p11_T, "Heights T")->required();
        sub->add_option("--N", *p11_N, "Lengths N")->required();
        sub->callback([=] { cmd_predict11(*p11_common, *p11_T, *p11_N); });
    }
    auto p12_common = std::make_shared<CommonOpts>();
    auto p12_T = std::make_shared<std::vector<double>>();
    auto p12_N = std::make_shared<std::vector<double>>();
    auto p12_delta = std::make_shared<double>(0.1);
    {
        auto* sub = app.add_subcommand("predict12",
                                       "Asymptotic bound shape, binned-resonator flavor");
        add_common(sub, *p12_common);
        sub->add_option("--T", *p12_T, "Heights T")->required();
        sub->add_option("--N", *p12_N, "Lengths N")->required();
        sub->add_option("--delta", *p12_delta, "xy comparison exponent parameter")
            ->capture_default_str();
        sub->callback([=] { cmd_predict12(*p12_common, *p12_T, *p12_N, *p12_delta); });
    }

    auto r11 = std::make_shared<Resonate11Opts>();
    {
        auto* sub = app.add_subcommand("resonate11",
                                       "Hough resonator moment report (optionally certified)");
        add_common(sub, r11->common);
        add_function_opts(sub, r11->fn);
        sub->add_option("--T", r11->T, "Height T")->required();
        sub->add_option("--N", r11->N, "Polynomial length N")->required();
        sub->add_option("--limit", r11->limit, "Sieve limit (0 = auto)");
        sub->add_option("--window", r11->window, "Prime window override: lo hi")
            ->expected(2);
        sub->add_option("--rel-tol", r11->rel_tol, "Quadrature relative tolerance")
            ->capture_default_str();
        sub->add_option("--budget", r11->budget, "Pair-sum work budget")
            ->capture_default_str();
        sub->add_flag("--certify", r11->certify,
                      "Scan |S_t(N)| and check the bound against the observed max");
        sub->add_option("--tolerance", r11->tolerance, "Certified scan tolerance")
            ->capture_default_str();
        sub->add_option("--max-points", r11->max_points, "Scan point budget")
            ->capture_default_str();
        sub->add_option("--dump-support", r11->dump_support, "Write the support to a file");
        sub->add_option("--dump-function", r11->dump_function, "Write f to a file");
        sub->callback([=] { cmd_resonate11(*r11); });
    }

    auto r12 = std::make_shared<Resonate12Opts>();
    {
        auto* sub = app.add_subcommand("resonate12",
                                       "Binned resonator moment report (optionally certified)");
        add_common(sub, r12->common);
        add_function_opts(sub, r12->fn);
        sub->add_option("--T", r12->T, "Height T")->required();
        sub->add_option("--N", r12->N, "Polynomial length N")->required();
        sub->add_option("--set-file", r12->set_file, "Integer-set file for M");
        sub->add_option("--set-lo", r12->set_lo, "M = [set-lo, set-hi] when no file");
        sub->add_option("--set-hi", r12->set_hi, "");
        sub->add_option("--rel-tol", r12->rel_tol, "Quadrature relative tolerance")
            ->capture_default_str();
        sub->add_option("--budget", r12->budget, "Pair-sum work budget")
            ->capture_default_str();
        sub->add_flag("--certify", r12->certify,
                      "Scan |S_t(N)| and check the bound against the observed max");
        sub->add_option("--tolerance", r12->tolerance, "Certified scan tolerance")
            ->capture_default_str();
        sub->add_option("--max-points", r12->max_points, "Scan point budget")
            ->capture_default_str();
        sub->add_option("--dump-support", r12->dump_support, "Write the support to a file");
        sub->callback([=] { cmd_resonate12(*r12); });
    }

    auto se = std::make_shared<SearchOpts>();
    {
        auto* sub = app.add_subcommand("search",
                                       "Certified grid search for max |S_t(N)|");
        add_common(sub, se->common);
        add_function_opts(sub, se->fn);
        sub->add_option("--N", se->N, "Polynomial length N")->required();
        sub->add_option("--t-min", se->t_min, "Scan start")->capture_default_str();
        sub->add_option("--t-max", se->t_max, "Scan end")->required();
        sub->add_option("--tolerance", se->tolerance, "Certified scan tolerance")
            ->capture_default_str();
        sub->add_option("--max-points", se->max_points, "Scan point budget")
            ->capture_default_str();
        sub->callback([=] { cmd_search(*se); });
    }

    auto gs = std::make_shared<GcdSumOpts>();
    {
        auto* sub = app.add_subcommand("gcdsum",
                                       "Normalized GCD sum with truncation and tail bound");
        add_common(sub, gs->common);
        sub->add_option("--set-file", gs->set_file, "Integer-set file for M");
        sub->add_option("--set-lo", gs->set_lo, "M = [set-lo, set-hi] when no file");
        sub->add_option("--set-hi", gs->set_hi, "");
        sub->add_option("--N", gs->N, "Truncation parameter")->required();
        sub->add_option("--eta", gs->eta, "Tail-bound exponent, 0 < eta < 1/2")
            ->capture_default_str();
        sub->callback([=] { cmd_gcdsum(*gs); });
    }

    auto cs = std::make_shared<ConstructOpts>();
    {
        auto* sub = app.add_subcommand("construct-set",
                                       "Search for a K-element smooth set with large GCD sum");
        add_common(sub, cs->common);
        sub->add_option("--K", cs->K, "Target cardinality")->required();
        sub->add_option("--y", cs->y, "Smoothness bound")->required();
        sub->add_option("--window-center", cs->window_center,
                        "Candidates are y-smooth in [center, 2*center]")
            ->required();
        sub->add_option("--budget", cs->budget, "Swap proposals for the local search")
            ->capture_default_str();
        sub->add_option("--save-set", cs->save_set, "Write the chosen set to a file");
        sub->callback([=] { cmd_construct_set(*cs); });
    }

    auto mo = std::make_shared<MomentsOpts>();
    {
        auto* sub = app.add_subcommand("moments",
                                       "Moment report plus independent quadrature cross-checks");
        add_common(sub, mo->common);
        add_function_opts(sub, mo->fn);
        sub->add_option("--style", mo->style, "thm11 or thm12")
            ->check(CLI::IsMember({"thm11", "thm12"}))
            ->capture_default_str();
        sub->add_option("--T", mo->T, "Height T")->required();
        sub->add_option("--N", mo->N, "Polynomial length N")->required();
        sub->add_option("--limit", mo->limit, "Sieve limit (0 = auto, thm11)");
        sub->add_option("--window", mo->window, "Prime window override: lo hi (thm11)")
            ->expected(2);
        sub->add_option("--set-file", mo->set_file, "Integer-set file for M (thm12)");
        sub->add_option("--set-lo", mo->set_lo, "M = [set-lo, set-hi] (thm12)");
        sub->add_option("--set-hi", mo->set_hi, "");
        sub->add_option("--rel-tol", mo->rel_tol, "Quadrature relative tolerance")
            ->capture_default_str();
        sub->add_option("--budget", mo->budget, "Pair-sum work budget")
            ->capture_default_str();
        sub->callback([=] { cmd_moments(*mo); });
    }

    auto cf = std::make_shared<CheckFcOpts>();
    {
        auto* sub = app.add_subcommand("check-fc",
                                       "Minimal-arc membership test for the class F(c)");
        add_common(sub, cf->common);
        add_function_opts(sub, cf->fn);
        sub->add_option("--N", cf->N, "Check f(n) for n <= N")->required();
        sub->callback([=] { cmd_check_fc(*cf); });
    }

    auto st_common = std::make_shared<CommonOpts>();
    {
        auto* sub = app.add_subcommand("selftest", "Run the built-in invariant suite");
        add_common(sub, *st_common);
        sub->callback([&exit_code, st_common] { exit_code = cmd_selftest(*st_common); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success))
            return app.exit(e);
        app.exit(e);
        return 2; // usage error
    } catch (const rl::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rl::Infeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
