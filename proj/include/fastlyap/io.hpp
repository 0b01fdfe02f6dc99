#ifndef FASTLYAP_IO_HPP
#define FASTLYAP_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastlyap/coding.hpp"
#include "fastlyap/exponents.hpp"
#include "fastlyap/sequence.hpp"

namespace fastlyap {

using Json = nlohmann::ordered_json;

// {"builtin": "gauss"} or {"gamma", "C", "branches": [{"interval": [lo, hi], "mobius": [a,b,c,d]}
// | {"interval", "affine": {"slope", "intercept"}}], "parabolic_point"?, "m"?}.
MapSpec map_from_json(const Json& doc);
// "gauss", "renyi", or a path to a map-spec file.
MapSpec load_map(const std::string& arg);

// {"family": ..., "params": {...}} or {"table": "path.csv"}; relative table paths
// resolve against base_dir.
Sequence psi_from_json(const Json& doc, const std::string& base_dir = ".");
// Inline forms: power:p[:c], exp:r[:c], e[:k], nlogn, factorial_block, alternating:even:odd,
// tower:b:c, const:v, table:path. Anything ending in .json or .csv is read as a file.
Sequence parse_psi(const std::string& arg);
// CSV rows "n,psi" with n = 1, 2, ... in order; psi exact ("p/q", decimal) or "exp(x)".
Sequence read_psi_table(const std::string& path);

Digit parse_digit(const std::string& token);
DigitWord parse_word(const std::string& line);
std::vector<DigitWord> read_words(std::istream& in);
void write_word(std::ostream& out, const DigitWord& word);

std::string cylinder_csv_header();
std::string cylinder_csv_row(const CylinderInterval& c);

// Rows (n, log_deriv_sum, digit_log_sum, lyapunov_partial, fast_partial).
void write_trace_csv(std::ostream& out, const ExponentTrace& t, const FastPartials* fast);

Json to_json(const Rational& q);
// Non-finite doubles become the strings "inf", "-inf", "nan".
Json number(double x);

}  // namespace fastlyap

#endif  // FASTLYAP_IO_HPP
