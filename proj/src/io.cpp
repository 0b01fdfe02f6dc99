#include "fastlyap/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "fastlyap/error.hpp"

namespace fastlyap {

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Rational rational_field(const Json& v, const std::string& what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(Integer(std::to_string(v.get<long long>())));
  if (v.is_number()) return parse_rational(v.dump());
  throw Error(ErrorKind::malformed, what + " must be a number or a \"p/q\" string");
}

double double_field(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return rational_field(v, what).get_d();
  throw Error(ErrorKind::malformed, what + " must be a number");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::malformed, path + ": " + e.what());
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// "exp(x)" -> x
std::optional<double> log_notation(const std::string& s) {
  if (s.rfind("exp(", 0) != 0 || s.back() != ')') return std::nullopt;
  try {
    return std::stod(s.substr(4, s.size() - 5));
  } catch (const std::exception&) {
    throw Error(ErrorKind::malformed, "bad log-scaled value " + s);
  }
}

}  // namespace

MapSpec map_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::malformed, "map spec must be a JSON object");
  if (doc.contains("builtin")) {
    auto name = doc.at("builtin").get<std::string>();
    if (name == "gauss") return MapSpec::gauss();
    if (name == "renyi") return MapSpec::renyi();
    throw Error(ErrorKind::malformed, "unknown builtin map " + name);
  }
  for (const char* key : {"gamma", "C", "branches"})
    if (!doc.contains(key)) throw Error(ErrorKind::malformed, std::string("map spec lacks \"") + key + "\"");
  std::vector<BranchSpec> branches;
  for (const auto& item : doc.at("branches")) {
    BranchSpec b;
    const auto& iv = item.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw Error(ErrorKind::malformed, "branch interval must be [lo, hi]");
    b.lo = rational_field(iv[0], "interval endpoint");
    b.hi = rational_field(iv[1], "interval endpoint");
    if (item.contains("mobius")) {
      const auto& m = item.at("mobius");
      if (!m.is_array() || m.size() != 4) throw Error(ErrorKind::malformed, "mobius must be [a, b, c, d]");
      Integer coef[4];
      for (int i = 0; i < 4; ++i) {
        Rational r = rational_field(m[static_cast<std::size_t>(i)], "mobius coefficient");
        if (r.get_den() != 1) throw Error(ErrorKind::malformed, "mobius coefficients must be integers");
        coef[i] = r.get_num();
      }
      b.map = {coef[0], coef[1], coef[2], coef[3]};
      b.form = BranchForm::mobius;
    } else if (item.contains("affine")) {
      const auto& a = item.at("affine");
      Rational slope = rational_field(a.at("slope"), "affine slope");
      Rational intercept = rational_field(a.at("intercept"), "affine intercept");
      Integer q = slope.get_den() * intercept.get_den();
      b.map = {Integer(slope.get_num() * intercept.get_den()), Integer(intercept.get_num() * slope.get_den()), Integer(0), q};
      b.form = BranchForm::affine;
    } else {
      throw Error(ErrorKind::malformed, "branch needs \"mobius\" or \"affine\"");
    }
    branches.push_back(std::move(b));
  }
  std::optional<Rational> parabolic;
  if (doc.contains("parabolic_point") && !doc.at("parabolic_point").is_null())
    parabolic = rational_field(doc.at("parabolic_point"), "parabolic_point");
  int m = doc.value("m", 1);
  return MapSpec::from_branches(std::move(branches), double_field(doc.at("gamma"), "gamma"),
                                rational_field(doc.at("C"), "C"), parabolic, m, doc.value("name", std::string("user")));
}

MapSpec load_map(const std::string& arg) {
  if (arg == "gauss") return MapSpec::gauss();
  if (arg == "renyi") return MapSpec::renyi();
  return map_from_json(read_json_file(arg));
}

Sequence psi_from_json(const Json& doc, const std::string& base_dir) {
  if (doc.contains("table")) {
    std::filesystem::path p = doc.at("table").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return read_psi_table(p.string());
  }
  if (!doc.contains("family")) throw Error(ErrorKind::malformed, "psi spec needs \"family\" or \"table\"");
  auto family = doc.at("family").get<std::string>();
  Json params = doc.value("params", Json::object());
  auto rat = [&](const char* key, const char* fallback) {
    return params.contains(key) ? rational_field(params.at(key), key) : parse_rational(fallback);
  };
  auto dbl = [&](const char* key, double fallback) {
    return params.contains(key) ? double_field(params.at(key), key) : fallback;
  };
  if (family == "power") return Sequence::power(dbl("p", 2), dbl("c", 1));
  if (family == "exp") return Sequence::exponential(rat("r", "2"), rat("c", "1"));
  if (family == "e" || family == "natural_exp") return Sequence::natural_exp(dbl("k", 1));
  if (family == "factorial_block") return Sequence::factorial_block();
  if (family == "nlogn") return Sequence::nlogn();
  if (family == "alternating") return Sequence::alternating(rat("even", "4"), rat("odd", "2"));
  if (family == "tower") return Sequence::tower(rat("b", "2"), rat("c", "2"));
  if (family == "constant") return Sequence::constant(rat("value", "1"));
  throw Error(ErrorKind::malformed, "unknown psi family " + family);
}

Sequence parse_psi(const std::string& arg) {
  if (arg.rfind("table:", 0) == 0) return read_psi_table(arg.substr(6));
  if (ends_with(arg, ".json")) {
    auto base = std::filesystem::path(arg).parent_path().string();
    return psi_from_json(read_json_file(arg), base.empty() ? "." : base);
  }
  if (ends_with(arg, ".csv")) return read_psi_table(arg);
  auto parts = split(arg, ':');
  if (parts.empty()) throw Error(ErrorKind::usage, "empty psi spec");
  const std::string& head = parts[0];
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo + 1 || parts.size() > hi + 1)
      throw Error(ErrorKind::usage, "psi spec " + arg + ": wrong number of parameters");
  };
  try {
    if (head == "power") {
      need(1, 2);
      return Sequence::power(std::stod(parts[1]), parts.size() > 2 ? std::stod(parts[2]) : 1.0);
    }
    if (head == "exp") {
      need(1, 2);
      return Sequence::exponential(parse_rational(parts[1]), parts.size() > 2 ? parse_rational(parts[2]) : Rational(1));
    }
    if (head == "e") {
      need(0, 1);
      return Sequence::natural_exp(parts.size() > 1 ? std::stod(parts[1]) : 1.0);
    }
    if (head == "nlogn") {
      need(0, 0);
      return Sequence::nlogn();
    }
    if (head == "factorial_block") {
      need(0, 0);
      return Sequence::factorial_block();
    }
    if (head == "alternating") {
      need(2, 2);
      return Sequence::alternating(parse_rational(parts[1]), parse_rational(parts[2]));
    }
    if (head == "tower") {
      need(2, 2);
      return Sequence::tower(parse_rational(parts[1]), parse_rational(parts[2]));
    }
    if (head == "const") {
      need(1, 1);
      return Sequence::constant(parse_rational(parts[1]));
    }
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::usage, "psi spec " + arg + ": bad number");
  }
  throw Error(ErrorKind::usage, "unknown psi spec " + arg);
}

Sequence read_psi_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot open " + path);
  std::vector<Rational> exact;
  std::vector<double> logs;
  bool all_exact = true;
  std::string line;
  std::size_t expected = 1, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, ',');
    if (fields.size() != 2) throw Error(ErrorKind::malformed, path + ":" + std::to_string(line_no) + ": expected n,psi");
    if (fields[0] == "n") continue;  // header
    if (fields[0] != std::to_string(expected))
      throw Error(ErrorKind::malformed, path + ":" + std::to_string(line_no) + ": expected n = " + std::to_string(expected));
    ++expected;
    if (auto lv = log_notation(fields[1])) {
      all_exact = false;
      logs.push_back(*lv);
      continue;
    }
    Rational v = parse_rational(fields[1]);
    if (v <= 0) throw Error(ErrorKind::malformed, path + ":" + std::to_string(line_no) + ": psi must be positive");
    exact.push_back(v);
    logs.push_back(log_abs(v));
  }
  if (logs.empty()) throw Error(ErrorKind::malformed, path + ": no rows");
  auto label = "table:" + path;
  return all_exact ? Sequence::table(exact, label) : Sequence::table_log(std::move(logs), label);
}

Digit parse_digit(const std::string& token) {
  auto t = trim(token);
  if (auto lv = log_notation(t)) return Digit::log_only(*lv);
  Integer v = parse_integer(t);
  if (v < 1) throw Error(ErrorKind::malformed, "digits must be positive integers, got " + t);
  return Digit(v);
}

DigitWord parse_word(const std::string& line) {
  DigitWord w;
  for (const auto& tok : split(trim(line), ','))
    if (!tok.empty()) w.push_back(parse_digit(tok));
  return w;
}

std::vector<DigitWord> read_words(std::istream& in) {
  std::vector<DigitWord> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_word(line));
  }
  return out;
}

void write_word(std::ostream& out, const DigitWord& word) { out << to_string(word) << '\n'; }

std::string cylinder_csv_header() { return "word,lo,hi,diameter,bound_lo,bound_hi"; }

std::string cylinder_csv_row(const CylinderInterval& c) {
  std::ostringstream row;
  row << '"' << to_string(c.word) << "\",";
  if (c.exact) {
    row << to_string(c.lo) << ',' << to_string(c.hi) << ',' << to_string(c.diameter);
  } else {
    row << c.lo_down->to_string() << ',' << c.hi_up->to_string() << ',' << c.diameter_up->to_string();
  }
  row << ',';
  if (c.bound_lo) row << to_string(*c.bound_lo);
  else row << "exp(" << c.log_bound_lo << ')';
  row << ',';
  if (c.bound_hi) row << to_string(*c.bound_hi);
  else row << "exp(" << c.log_bound_hi << ')';
  return row.str();
}

void write_trace_csv(std::ostream& out, const ExponentTrace& t, const FastPartials* fast) {
  Array lyap = t.lyapunov_partials();
  out << "n,log_deriv_sum,digit_log_sum,lyapunov_partial,fast_partial\n";
  char buf[256];
  for (std::size_t i = 0; i < t.n; ++i) {
    auto k = static_cast<Eigen::Index>(i);
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,", i + 1, t.log_deriv_sum[k], t.digit_log_sum[k], lyap[k]);
    out << buf;
    if (fast) {
      std::snprintf(buf, sizeof buf, "%.17g", fast->value[k]);
      out << buf;
    }
    out << '\n';
  }
}

Json to_json(const Rational& q) { return to_string(q); }

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace fastlyap
