#pragma once

#include "reslab/moments.hpp"
#include "reslab/multfn.hpp"
#include "reslab/resonator.hpp"

#include <string>
#include <utility>
#include <vector>

namespace reslab::io {

std::string fmt_double(double x); // shortest round-trip-safe form (%.17g)

/// Integer-set text format: one integer per line; blank lines and lines whose
/// first non-space character is '#' are ignored.
resonator::IntegerSet load_integer_set(const std::string& path);
void save_integer_set(const resonator::IntegerSet& M, const std::string& path);

/// Multiplicative-function text format:
///     # reslab-cmfunction v1 domain=<limit>
///     <p> <theta_p>
/// One line per prime with a nonzero angle; absent primes mean theta = 0.
multfn::CMFunction load_cmfunction(const std::string& path);
void save_cmfunction(const multfn::CMFunction& f, const std::string& path);

/// Resonator support dump: a '#' header with the construction metadata, then
/// one "n weight" line per support point.
void save_resonator(const resonator::Resonator& R, const std::string& path);

const char* style_name(moments::Style style);

/// Ordered scalar view of a moment report; shared by the text dump and the
/// CLI output formatting.
std::vector<std::pair<std::string, double>> report_fields(const moments::MomentReport& rep);

/// Flat "key value" dump, one field per line, preceded by the style.
void save_report(const moments::MomentReport& rep, const std::string& path);

} // namespace reslab::io
