#include "reslab/io.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace reslab::io {

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path + " for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot open " + path + " for writing");
    return out;
}

bool skippable(const std::string& line) {
    for (char ch : line) {
        if (ch == ' ' || ch == '\t' || ch == '\r') continue;
        return ch == '#';
    }
    return true; // blank
}

} // namespace

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

resonator::IntegerSet load_integer_set(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::uint64_t> elems;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        std::istringstream ss(line);
        std::uint64_t n = 0;
        if (!(ss >> n))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected an integer");
        elems.push_back(n);
    }
    return resonator::IntegerSet(std::move(elems));
}

void save_integer_set(const resonator::IntegerSet& M, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# reslab-integer-set v1 size=" << M.size() << "\n";
    for (std::uint64_t n : M.elements) out << n << "\n";
}

multfn::CMFunction load_cmfunction(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty multiplicative-function file");
    std::uint64_t domain = 0;
    {
        const std::string tag = "# reslab-cmfunction v1 domain=";
        if (line.rfind(tag, 0) != 0)
            throw std::runtime_error(path + ": missing reslab-cmfunction header");
        domain = std::stoull(line.substr(tag.size()));
    }
    auto table = std::make_shared<arith::PrimeTable>(domain);
    std::vector<double> angles(table->primes().size(), 0.0);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        std::istringstream ss(line);
        std::uint64_t p = 0;
        double theta = 0.0;
        if (!(ss >> p >> theta))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected '<prime> <angle>'");
        if (p > domain || !table->is_prime(p))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                                     std::to_string(p) + " is not a prime in the domain");
        angles[table->prime_index(p)] = theta;
    }
    return multfn::CMFunction(std::move(table), std::move(angles));
}

void save_cmfunction(const multfn::CMFunction& f, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# reslab-cmfunction v1 domain=" << f.domain_limit() << "\n";
    const auto& primes = f.table().primes();
    const auto& angles = f.prime_angles();
    for (std::size_t i = 0; i < angles.size() && i < primes.size(); ++i) {
        if (angles[i] == 0.0) continue;
        out << primes[i] << " " << fmt_double(angles[i]) << "\n";
    }
}

void save_resonator(const resonator::Resonator& R, const std::string& path) {
    std::ofstream out = open_out(path);
    const auto& m = R.meta;
    if (m.style == resonator::Style::hough) {
        out << "# reslab-resonator v1 style=hough lambda=" << fmt_double(m.lambda)
            << " x=" << fmt_double(m.x) << " window=[" << fmt_double(m.window_lo)
            << "," << fmt_double(m.window_hi) << "]"
            << (m.window_overridden ? " overridden" : "")
            << (m.empty_window ? " empty-window" : "") << "\n";
    } else {
        out << "# reslab-resonator v1 style=binned T=" << fmt_double(m.T)
            << " bins=" << m.bin_count << "\n";
    }
    out << "# n weight\n";
    for (const auto& sp : R.support)
        out << sp.n << " " << fmt_double(sp.weight) << "\n";
}

const char* style_name(moments::Style style) {
    return style == moments::Style::thm11 ? "thm11" : "thm12";
}

std::vector<std::pair<std::string, double>> report_fields(const moments::MomentReport& rep) {
    return {
        {"T", rep.T},
        {"N", rep.N},
        {"prefactor", rep.prefactor},
        {"i1", rep.i1},
        {"diag_i1", rep.diag_i1},
        {"offdiag_i1", rep.offdiag_i1},
        {"gap1_small", rep.gap1_small},
        {"gap1_outer", rep.gap1_outer},
        {"m1", rep.m1},
        {"err_m1", rep.err_m1},
        {"diag_i2", rep.diag_i2},
        {"i2_re", rep.i2.real()},
        {"i2_im", rep.i2.imag()},
        {"offdiag_i2_re", rep.offdiag_i2.real()},
        {"offdiag_i2_im", rep.offdiag_i2.imag()},
        {"gap2_small_re", rep.gap2_small.real()},
        {"gap2_small_im", rep.gap2_small.imag()},
        {"gap2_outer_re", rep.gap2_outer.real()},
        {"gap2_outer_im", rep.gap2_outer.imag()},
        {"m2_re", rep.m2.real()},
        {"m2_im", rep.m2.imag()},
        {"err_m2", rep.err_m2},
        {"lower_bound", rep.lower_bound},
        {"lower_bound_low", rep.lower_bound_low},
        {"quad_points", static_cast<double>(rep.quad_points)},
        {"achieved_rel", rep.achieved_rel},
    };
}

void save_report(const moments::MomentReport& rep, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "style " << style_name(rep.style) << "\n";
    for (const auto& [key, value] : report_fields(rep))
        out << key << " " << fmt_double(value) << "\n";
}

} // namespace reslab::io
