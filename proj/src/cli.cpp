#include "fastlyap/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fastlyap/construct.hpp"
#include "fastlyap/dimension.hpp"
#include "fastlyap/error.hpp"
#include "fastlyap/gpsi.hpp"
#include "fastlyap/io.hpp"
#include "fastlyap/scaling.hpp"
#include "fastlyap/spectra.hpp"

namespace fastlyap::cli {

namespace {

struct Context {
  std::ostream& out;
  Json config;
  std::string format;
};

// Resolved option values of one subcommand, defaults included.
Json options_json(const CLI::App& app) {
  Json j = Json::object();
  for (const CLI::Option* opt : app.get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->get_expected_min() == 0) {
      j[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? Json(r[0]) : Json(r);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void emit(Context& ctx, Json body) {
  Json doc = Json::object();
  doc["config"] = ctx.config;
  for (auto& [k, v] : body.items()) doc[k] = v;
  ctx.out << doc.dump(2) << '\n';
}

Json rational_list(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

Json word_json(const DigitWord& w) {
  Json a = Json::array();
  for (const auto& d : w) {
    if (d.exact() && d.value().fits_slong_p()) a.push_back(d.value().get_si());
    else a.push_back(d.to_string());
  }
  return a;
}

Json array_json(const Array& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

template <class T>
Json index_list(const std::vector<T>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

double parse_extended(const std::string& s) {
  if (s == "inf" || s == "infinity") return INFINITY;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return parse_rational(s).get_d();
}

Json cylinder_json(const CylinderInterval& c) {
  Json j;
  j["word"] = word_json(c.word);
  j["exact"] = c.exact;
  if (c.exact) {
    j["lo"] = to_string(c.lo);
    j["hi"] = to_string(c.hi);
    j["diameter"] = to_string(c.diameter);
  } else {
    j["lo"] = c.lo_down->to_string();
    j["hi"] = c.hi_up->to_string();
    j["diameter"] = c.diameter_up->to_string();
  }
  j["log_diameter"] = number(c.log_diameter());
  j["bound_lo"] = c.bound_lo ? Json(to_string(*c.bound_lo)) : Json("exp(" + std::to_string(c.log_bound_lo) + ")");
  j["bound_hi"] = c.bound_hi ? Json(to_string(*c.bound_hi)) : Json("exp(" + std::to_string(c.log_bound_hi) + ")");
  j["bounds_hold"] = c.bounds_hold();
  return j;
}

Json tail_json(const TailEstimate& t) { return Json{{"window", number(t.window)}, {"running", number(t.running)}}; }

void write_file_or(std::ostream& fallback, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::usage, "cannot write " + path);
  f << text;
}

// Options shared across subcommands.
struct Knobs {
  std::string map = "gauss";
  std::string psi = "power:2";
  std::string x;
  std::string word;
  std::string words_file;
  std::string csv;
  std::string s = "exp:2", t = "exp:2";
  std::size_t depth = 30;
  std::size_t horizon = 1000;
  std::size_t window = 0;
  std::size_t start = 2;
  std::size_t samples = 16;
  std::size_t branch_horizon = 64;
  std::size_t max_length = 3;
  unsigned long max_digit = 4;
  std::size_t random = 0;
  std::size_t denominator_bits = 200;
  std::size_t formula_horizon = 1000;
  std::size_t n = 1, k = 1;
  unsigned long seed = 1;
  unsigned workers = 0;
  double tolerance = 1e-12;
  double epsilon = 0.5;
  std::string alpha = "finite";
  std::string which = "fast";
  std::string estimate = "window";
  std::string beta, B, b;
  std::string method = "simple";
  std::string gpsi_case;
  std::string b_value;
  std::string rule = "smallest";
  std::string mode = "eventually";
  std::string subsequence;
  std::string dset_b = "2", dset_c = "2";
  std::string decode;
  bool force = false;
};

// --- subcommands -----------------------------------------------------------

void cmd_map_check(Context& ctx, const Knobs& k) {
  MapSpec map = load_map(k.map);
  auto rep = validate_hypotheses(map, static_cast<int>(k.samples), static_cast<int>(k.branch_horizon));
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"hypothesis", c.hypothesis},
                      {"status", to_string(c.status)},
                      {"detail", c.detail},
                      {"witnesses", index_list(c.witnesses)}});
  }
  emit(ctx, {{"map", map.name()},
             {"gamma", map.gamma()},
             {"C", to_string(map.distortion())},
             {"parabolic", rep.parabolic},
             {"m", rep.m},
             {"branches_checked", rep.branches_checked},
             {"samples_per_branch", rep.samples_per_branch},
             {"checks", checks},
             {"all_pass", rep.all_pass()},
             {"blocks_spectrum", rep.blocks_spectrum()}});
}

void cmd_orbit(Context& ctx, const Knobs& k) {
  if (k.x.empty()) throw Error(ErrorKind::usage, "orbit needs --x");
  MapSpec map = load_map(k.map);
  OrbitRecord rec = encode(map, parse_rational(k.x), k.depth);
  if (ctx.format == "csv") {
    ctx.out << "n,point,digit,log_derivative\n";
    for (std::size_t i = 0; i < rec.word.size(); ++i)
      ctx.out << i << ',' << to_string(rec.orbit[i]) << ',' << rec.word[i].to_string() << ','
              << number(rec.derivative_logs[i]).dump() << '\n';
    return;
  }
  Json logs = Json::array();
  for (double d : rec.derivative_logs) logs.push_back(number(d));
  emit(ctx, {{"point", to_string(rec.point)},
             {"digits", word_json(rec.word)},
             {"orbit", rational_list(rec.orbit)},
             {"log_derivatives", logs}});
}

void cmd_code(Context& ctx, const Knobs& k) {
  MapSpec map = load_map(k.map);
  if (!k.decode.empty()) {
    DigitWord period = parse_word(k.decode);
    if (period.empty()) throw Error(ErrorKind::usage, "--decode needs at least one digit");
    DecodeOptions opts;
    opts.tolerance = k.tolerance;
    auto res = decode(map, periodic_stream(period), opts);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", res.point);
    emit(ctx, {{"period", word_json(period)},
               {"point", res.point},
               {"point_text", buf},
               {"depth", res.depth},
               {"cylinder", cylinder_json(res.cylinder)}});
    return;
  }
  if (k.x.empty()) throw Error(ErrorKind::usage, "code needs --x (encode) or --decode WORD");
  OrbitRecord rec = encode(map, parse_rational(k.x), k.depth);
  if (ctx.format == "csv") {
    write_word(ctx.out, rec.word);
    return;
  }
  emit(ctx, {{"point", to_string(rec.point)}, {"digits", word_json(rec.word)}});
}

void cmd_cylinder(Context& ctx, const Knobs& k) {
  MapSpec map = load_map(k.map);
  std::vector<CylinderInterval> cyl;
  if (!k.word.empty()) {
    cyl.push_back(cylinder(map, parse_word(k.word)));
  } else if (!k.words_file.empty()) {
    std::ifstream in(k.words_file);
    if (!in) throw Error(ErrorKind::usage, "cannot open " + k.words_file);
    auto words = read_words(in);
    cyl.resize(words.size());
    std::vector<std::string> errors(words.size());
    parallel_for(
        words.size(),
        [&](std::size_t i) {
          try {
            cyl[i] = cylinder(map, words[i]);
          } catch (const Error& e) {
            errors[i] = e.what();
          }
        },
        k.workers);
    for (std::size_t i = 0; i < errors.size(); ++i)
      if (!errors[i].empty()) throw Error(ErrorKind::usage, "word " + std::to_string(i + 1) + ": " + errors[i]);
  } else {
    for_each_cylinder(map, k.max_length, k.max_digit, [&](const CylinderInterval& c) { cyl.push_back(c); });
  }
  if (ctx.format == "csv") {
    ctx.out << cylinder_csv_header() << '\n';
    for (const auto& c : cyl) ctx.out << cylinder_csv_row(c) << '\n';
    return;
  }
  Json rows = Json::array();
  std::size_t violations = 0;
  for (const auto& c : cyl) {
    rows.push_back(cylinder_json(c));
    if (!c.bounds_hold()) ++violations;
  }
  emit(ctx, {{"count", cyl.size()}, {"bound_violations", violations}, {"cylinders", rows}});
}

Rational random_point(gmp_randclass& rng, std::size_t bits) {
  Integer den = rng.get_z_bits(static_cast<unsigned long>(bits));
  den += 2;
  Integer num = rng.get_z_range(den - 1);
  num += 1;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

void cmd_exponent(Context& ctx, const Knobs& k) {
  MapSpec map = load_map(k.map);
  const double logC = map.log_distortion();
  if (k.random > 0) {
    // Batch: random rational starting points; redraw when the orbit hits the exceptional set early.
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(k.seed);
    std::vector<Rational> points;
    std::size_t redraws = 0;
    while (points.size() < k.random) {
      Rational x = random_point(rng, k.denominator_bits);
      try {
        (void)encode(map, x, k.depth);
        points.push_back(x);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::exceptional_orbit && e.kind() != ErrorKind::boundary) throw;
        ++redraws;
      }
    }
    std::vector<std::size_t> bad(points.size());
    std::vector<double> worst(points.size());
    parallel_for(
        points.size(),
        [&](std::size_t i) {
          auto t = trace(map, points[i], k.depth);
          bad[i] = chain_rule_violations(t, map.gamma(), logC).size();
          Array gap = chain_rule_gap(t, map.gamma());
          double w = 0;
          for (Eigen::Index j = 0; j < gap.size(); ++j) w = std::max(w, gap[j] / (static_cast<double>(j + 1) * logC));
          worst[i] = w;
        },
        k.workers);
    std::size_t total = 0;
    for (auto b : bad) total += b;
    emit(ctx, {{"points", points.size()},
               {"redraws", redraws},
               {"violations", total},
               {"max_gap_over_nlogC", *std::max_element(worst.begin(), worst.end())}});
    return;
  }
  ExponentTrace t = !k.word.empty() ? trace_word(map, parse_word(k.word))
                                    : (k.x.empty() ? throw Error(ErrorKind::usage, "exponent needs --x, --word or --random")
                                                   : trace(map, parse_rational(k.x), k.depth));
  std::optional<FastPartials> fast;
  std::optional<Sequence> psi;
  if (!k.psi.empty()) {
    psi = parse_psi(k.psi);
    fast = fast_exponent_partials(t, *psi);
  }
  if (ctx.format == "csv") {
    std::ostringstream s;
    write_trace_csv(s, t, fast ? &*fast : nullptr);
    write_file_or(ctx.out, k.csv, s.str());
    return;
  }
  if (!k.csv.empty()) {
    std::ostringstream s;
    write_trace_csv(s, t, fast ? &*fast : nullptr);
    write_file_or(ctx.out, k.csv, s.str());
  }
  Array lyap = t.lyapunov_partials();
  auto violations = chain_rule_violations(t, map.gamma(), logC);
  Json body = {{"depth", t.n},
               {"log_deriv_sum", number(t.log_deriv_sum[static_cast<Eigen::Index>(t.n) - 1])},
               {"digit_log_sum", number(t.digit_log_sum[static_cast<Eigen::Index>(t.n) - 1])},
               {"lyapunov_partial", number(lyap[lyap.size() - 1])},
               {"chain_rule_violations", index_list(violations)}};
  if (fast) {
    auto last = fast->value.size() - 1;
    body["fast_partial"] = {{"value", number(fast->value[last])},
                            {"tail_sup_from_3_4", number(fast->upper[fast->value.size() * 3 / 4])},
                            {"tail_inf_from_3_4", number(fast->lower[fast->value.size() * 3 / 4])}};
  }
  emit(ctx, body);
}

ScalingInvariants resolved_invariants(const Sequence& psi, const Knobs& k) {
  return invariants(psi, k.horizon, k.window, k.start);
}

void cmd_scaling(Context& ctx, const Knobs& k) {
  Sequence psi = parse_psi(k.psi);
  auto inv = resolved_invariants(psi, k);
  auto eq = is_equivalent_increasing(psi, k.horizon);
  auto x = xi(psi, k.horizon, k.window);
  emit(ctx, {{"psi", psi.describe()},
             {"horizon", inv.horizon},
             {"window", inv.window},
             {"start", inv.start},
             {"beta", tail_json(inv.beta)},
             {"B", tail_json(inv.B)},
             {"b", tail_json(inv.b)},
             {"superlinear", inv.superlinear},
             {"equivalent_increasing", {{"flag", eq.flag}, {"window_min_ratio", number(eq.window_min_ratio)}}},
             {"xi", tail_json(x)}});
}

AlphaClass parse_alpha(const std::string& s) {
  if (s == "0") return AlphaClass::zero;
  if (s == "finite") return AlphaClass::finite;
  if (s == "inf" || s == "infinity") return AlphaClass::infinite;
  throw Error(ErrorKind::usage, "--alpha must be 0, finite or inf");
}

SpectrumKind parse_which(const std::string& s) {
  if (s == "fast") return SpectrumKind::fast;
  if (s == "upper") return SpectrumKind::upper;
  if (s == "lower") return SpectrumKind::lower;
  if (s == "classical") return SpectrumKind::classical_at_infinity;
  throw Error(ErrorKind::usage, "--which must be fast, upper, lower or classical");
}

void cmd_spectrum(Context& ctx, const Knobs& k) {
  MapSpec map = load_map(k.map);
  auto rep = validate_hypotheses(map, static_cast<int>(k.samples), static_cast<int>(k.branch_horizon));
  if (rep.blocks_spectrum() && !k.force)
    throw Error(ErrorKind::hypothesis, "map fails a hypothesis required for spectrum evaluation (run map check)");
  SpectrumQuery q;
  q.alpha = parse_alpha(k.alpha);
  q.which = parse_which(k.which);
  q.inputs.gamma = map.gamma();
  Json sources = Json::object();
  bool exact_all = !k.beta.empty() && !k.B.empty() && !k.b.empty();
  if (!exact_all) {
    Sequence psi = parse_psi(k.psi);
    auto inv = resolved_invariants(psi, k);
    EstimateMode mode = k.estimate == "running" ? EstimateMode::running : EstimateMode::window;
    if (k.estimate != "running" && k.estimate != "window") throw Error(ErrorKind::usage, "--estimate must be window or running");
    q.inputs.beta = inv.beta.get(mode);
    q.inputs.B = inv.B.get(mode);
    q.inputs.b = inv.b.get(mode);
    q.inputs.superlinear = inv.superlinear;
    q.inputs.equiv_increasing = inv.equiv_increasing;
    sources["estimate"] = to_string(mode);
  }
  if (!k.beta.empty()) q.inputs.beta = parse_extended(k.beta);
  if (!k.B.empty()) q.inputs.B = parse_extended(k.B);
  if (!k.b.empty()) q.inputs.b = parse_extended(k.b);
  SpectrumValue v = evaluate(q);
  emit(ctx, {{"dimension", v.dimension ? number(*v.dimension) : Json(nullptr)},
             {"empty_level_set", v.empty_level_set()},
             {"formula", v.formula_tag},
             {"note", v.note},
             {"inputs",
              {{"gamma", number(q.inputs.gamma)},
               {"beta", number(q.inputs.beta)},
               {"B", number(q.inputs.B)},
               {"b", number(q.inputs.b)},
               {"superlinear", q.inputs.superlinear},
               {"equivalent_increasing_heuristic", q.inputs.equiv_increasing}}},
             {"continuous_at_infinity", continuous_at_infinity(q.inputs.beta, q.inputs.B)},
             {"sources", sources},
             {"hypotheses_pass", rep.all_pass()}});
}

std::string gpsi_csv(const GpsiResult& g) {
  std::ostringstream s;
  s << "n,psi,g_psi,contact_flag,ratio\n";
  std::vector<char> contact(g.horizon + 1, 0);
  for (auto c : g.contacts) contact[c] = 1;
  char buf[256];
  for (std::size_t n = 1; n <= g.horizon; ++n) {
    auto i = static_cast<Eigen::Index>(n - 1);
    double ratio = n < g.horizon ? std::exp(g.log_g[i + 1] - g.log_g[i]) : NAN;
    auto fmt = [](double logv) {
      char b[64];
      if (logv < 700) std::snprintf(b, sizeof b, "%.17g", std::exp(logv));
      else std::snprintf(b, sizeof b, "exp(%.17g)", logv);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%zu,%s,%s,%d,", n, fmt(g.log_psi[i]).c_str(), fmt(g.log_g[i]).c_str(), contact[n]);
    s << buf;
    if (n < g.horizon) {
      std::snprintf(buf, sizeof buf, "%.17g", ratio);
      s << buf;
    }
    s << '\n';
  }
  return s.str();
}

void cmd_gpsi(Context& ctx, const Knobs& k) {
  Sequence psi = parse_psi(k.psi);
  GpsiResult g;
  if (k.method == "simple") {
    double b = !k.b_value.empty() ? parse_extended(k.b_value) : invariants(psi, k.horizon).b.window;
    g = gpsi_simple(psi, b, k.epsilon, k.horizon);
  } else if (k.method == "appendix") {
    AppendixOptions opts;
    if (k.gpsi_case == "b_infinite") opts.force_case = GpsiCase::b_infinite;
    else if (k.gpsi_case == "b_finite") opts.force_case = GpsiCase::b_finite;
    else if (k.gpsi_case == "b_one") opts.force_case = GpsiCase::b_one;
    else if (!k.gpsi_case.empty() && k.gpsi_case != "auto") throw Error(ErrorKind::usage, "--case must be auto, b_infinite, b_finite or b_one");
    g = gpsi_appendix(psi, k.epsilon, k.horizon, opts);
  } else {
    throw Error(ErrorKind::usage, "--method must be simple or appendix");
  }
  std::string csv = gpsi_csv(g);
  if (ctx.format == "csv") {
    ctx.out << csv;
    return;
  }
  if (!k.csv.empty()) write_file_or(ctx.out, k.csv, csv);
  auto check = check_gpsi(g);
  Json cross = Json::array();
  for (const auto& c : g.crossovers)
    cross.push_back({{"j", c.j}, {"n_j", c.n_j}, {"n_next", c.n_next}, {"n_hat", c.n_hat},
                     {"f_log_base", number(c.f_log_base)}, {"h_log_base", number(c.h_log_base)}});
  emit(ctx, {{"case", to_string(g.case_label)},
             {"b", number(g.b)},
             {"epsilon", g.epsilon},
             {"horizon", g.horizon},
             {"contacts", index_list(g.contacts)},
             {"crossovers", cross},
             {"partial", g.partial},
             {"note", g.note},
             {"checks",
              {{"not_monotone", check.not_monotone},
               {"above_psi", check.above_psi},
               {"contact_mismatch", check.contact_mismatch},
               {"ratio_violations", check.ratio_violations},
               {"final_window_ratio", number(check.final_window_ratio)}}}});
}

void cmd_eset(Context& ctx, const Knobs& k) {
  SequencePair pair{parse_psi(k.s), parse_psi(k.t)};
  DigitRule rule = k.rule == "midpoint" ? DigitRule::midpoint : DigitRule::smallest;
  if (k.rule != "midpoint" && k.rule != "smallest") throw Error(ErrorKind::usage, "--rule must be smallest or midpoint");
  DigitWord w = e_set_digits(pair, k.depth, rule);
  if (ctx.format == "csv") {
    write_word(ctx.out, w);
    return;
  }
  emit(ctx, {{"digits", word_json(w)}, {"text", to_string(w)}});
}

void cmd_eset_dim(Context& ctx, const Knobs& k) {
  MapSpec map = load_map(k.map);
  SequencePair pair{parse_psi(k.s), parse_psi(k.t)};
  TreeOptions opts;
  opts.workers = k.workers;
  auto tree = enumerate_basic_intervals(map, pair, k.depth, opts);
  auto lower = falconer_lower(tree.log_m(), tree.log_min_gap());
  auto upper = cover_upper(tree.log_count(), tree.log_max_diameter());
  auto formula = e_set_dimension_formula(pair, map.gamma(), k.formula_horizon);
  std::ostringstream csv;
  csv << "n,m_n,min_gap,max_diam\n";
  Json levels = Json::array();
  for (const auto& l : tree.levels) {
    csv << l.n << ',' << to_string(l.m) << ',' << to_string(l.min_gap) << ',' << to_string(l.max_diameter) << '\n';
    levels.push_back({{"n", l.n},
                      {"m_n", to_string(l.m)},
                      {"count", l.intervals.size()},
                      {"min_gap", to_string(l.min_gap)},
                      {"max_diameter", to_string(l.max_diameter)},
                      {"gap_bound", l.gap_bound ? Json(to_string(*l.gap_bound)) : Json("exp(" + std::to_string(l.log_gap_bound) + ")")},
                      {"gap_bound_holds", l.gap_bound_holds},
                      {"contained", l.contained},
                      {"disjoint", l.disjoint}});
  }
  if (ctx.format == "csv") {
    ctx.out << csv.str();
    return;
  }
  if (!k.csv.empty()) write_file_or(ctx.out, k.csv, csv.str());
  auto H = static_cast<Eigen::Index>(formula.horizon);
  emit(ctx, {{"measured",
              {{"depth", tree.depth},
               {"theta", number(tree.theta)},
               {"levels", levels},
               {"lower", {{"values", array_json(lower.values)}, {"estimate", number(lower.estimate)}}},
               {"upper", {{"values", array_json(upper.values)}, {"estimate", number(upper.estimate)}}}}},
             {"formula",
              {{"horizon", formula.horizon},
               {"final", number(formula.values[H - 1])},
               {"running_liminf", number(formula.running_liminf[H - 1])},
               {"estimate", number(formula.estimate)}}}});
}

void cmd_dset(Context& ctx, const Knobs& k) {
  DSetMode mode;
  if (k.mode == "eventually") mode = DSetMode::eventually;
  else if (k.mode == "infinitely_often") mode = DSetMode::infinitely_often;
  else throw Error(ErrorKind::usage, "--mode must be eventually or infinitely_often");
  std::set<std::size_t> sub;
  if (!k.subsequence.empty()) {
    std::istringstream in(k.subsequence);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        sub.insert(std::stoul(tok));
      } catch (const std::exception&) {
        throw Error(ErrorKind::usage, "bad --subsequence entry " + tok);
      }
    }
  }
  DigitWord w = d_set_digits(parse_rational(k.dset_b), parse_rational(k.dset_c), k.depth, mode, sub);
  if (ctx.format == "csv") {
    write_word(ctx.out, w);
    return;
  }
  emit(ctx, {{"digits", word_json(w)}, {"text", to_string(w)}});
}

void cmd_count(Context& ctx, const Knobs& k) {
  auto r = count_product_tuples(k.n, k.k);
  if (ctx.format == "csv") {
    ctx.out << "n,k,count,bound\n" << r.n << ',' << r.k << ',' << r.count << ',' << number(r.bound).dump() << '\n';
    return;
  }
  emit(ctx, {{"n", r.n}, {"k", r.k}, {"count", r.count}, {"bound", r.bound}, {"within_bound", r.within_bound()}});
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::usage ? 2 : 1; }

bool knows_flag(const CLI::App& app, const std::string& name) {
  for (const auto* o : app.get_options())
    for (const auto& l : o->get_lnames())
      if (l == name) return true;
  for (const auto* s : app.get_subcommands({}))
    if (knows_flag(*s, name)) return true;
  return false;
}

std::optional<std::string> unknown_flag(const CLI::App& app, const std::vector<std::string>& args) {
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0 || a.size() == 2) continue;
    std::string name = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
    if (name != "help" && !knows_flag(app, name)) return a;
  }
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fast Lyapunov spectra toolkit for countable Markov interval maps", "fastlyap"};
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");
  Knobs k;
  std::string format = "json";
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", k.seed, "seed for randomized batches");
  app.add_option("--workers", k.workers, "worker threads (0 = hardware)");

  auto add_map = [&](CLI::App* s) { s->add_option("--map", k.map, "gauss, renyi or a map-spec JSON file"); };
  auto add_psi = [&](CLI::App* s) { s->add_option("--psi", k.psi, "scaling function spec"); };

  auto* map_cmd = app.add_subcommand("map", "map operations")->require_subcommand(1);
  auto* check = map_cmd->add_subcommand("check", "validate the map hypotheses");
  add_map(check);
  check->add_option("--samples", k.samples, "sample points per branch");
  check->add_option("--branch-horizon", k.branch_horizon, "branches checked");

  auto* orbit = app.add_subcommand("orbit", "exact orbit of a rational point");
  add_map(orbit);
  orbit->add_option("--x", k.x, "starting point p/q")->required();
  orbit->add_option("--depth", k.depth, "orbit length");

  auto* code = app.add_subcommand("code", "encode a point or decode a periodic digit word");
  add_map(code);
  code->add_option("--x", k.x, "point to encode");
  code->add_option("--depth", k.depth, "digits to produce");
  code->add_option("--decode", k.decode, "period of the digit stream, comma separated");
  code->add_option("--tolerance", k.tolerance, "decode stops when the cylinder is this small");

  auto* cyl = app.add_subcommand("cylinder", "cylinder intervals");
  add_map(cyl);
  cyl->add_option("--word", k.word, "digit word, comma separated");
  cyl->add_option("--words", k.words_file, "file with one word per line");
  cyl->add_option("--max-length", k.max_length, "enumeration length when no word is given");
  cyl->add_option("--max-digit", k.max_digit, "enumeration digit bound");

  auto* expo = app.add_subcommand("exponent", "Lyapunov partial sums along an orbit");
  add_map(expo);
  expo->add_option("--x", k.x, "starting point");
  expo->add_option("--word", k.word, "follow the cylinder of this word instead");
  expo->add_option("--depth", k.depth, "orbit length");
  expo->add_option("--psi", k.psi, "scaling function for the fast partials (empty to skip)");
  expo->add_option("--csv", k.csv, "write per-prefix rows here");
  expo->add_option("--random", k.random, "batch of random rational points");
  expo->add_option("--denominator-bits", k.denominator_bits, "size of random denominators");

  auto* scal = app.add_subcommand("scaling", "tail invariants of a scaling function");
  add_psi(scal);
  scal->add_option("--horizon", k.horizon, "last index");
  scal->add_option("--window", k.window, "final window (0 = horizon/4)");
  scal->add_option("--start", k.start, "first index of the running extremes");

  auto* spec = app.add_subcommand("spectrum", "fast Lyapunov spectrum value");
  add_map(spec);
  add_psi(spec);
  spec->add_option("--alpha", k.alpha, "0, finite or inf");
  spec->add_option("--which", k.which, "fast, upper, lower or classical");
  spec->add_option("--horizon", k.horizon, "last index for the invariants");
  spec->add_option("--window", k.window, "final window (0 = horizon/4)");
  spec->add_option("--estimate", k.estimate, "window or running");
  spec->add_option("--beta", k.beta, "override beta");
  spec->add_option("--B", k.B, "override B");
  spec->add_option("--b", k.b, "override b");
  spec->add_option("--samples", k.samples, "hypothesis samples per branch");
  spec->add_option("--branch-horizon", k.branch_horizon, "branches checked");
  spec->add_flag("--force", k.force, "evaluate even when the map fails a hypothesis");

  auto* gp = app.add_subcommand("gpsi", "monotone minorant of psi");
  add_psi(gp);
  gp->add_option("--epsilon", k.epsilon, "slack");
  gp->add_option("--horizon", k.horizon, "last index");
  gp->add_option("--method", k.method, "simple or appendix");
  gp->add_option("--b", k.b_value, "b for the simple method (default: window estimate)");
  gp->add_option("--case", k.gpsi_case, "appendix case: auto, b_infinite, b_finite, b_one");
  gp->add_option("--csv", k.csv, "write (n, psi, g_psi, contact_flag, ratio) rows here");

  auto* eset = app.add_subcommand("eset", "digits of a point with a_n in (s_n, s_n + t_n]");
  eset->add_option("--s", k.s, "sequence s");
  eset->add_option("--t", k.t, "sequence t");
  eset->add_option("--depth", k.depth, "digits");
  eset->add_option("--rule", k.rule, "smallest or midpoint");
  auto* edim = eset->add_subcommand("dim", "basic-interval tree bounds and the truncated formula");
  add_map(edim);
  edim->add_option("--s", k.s, "sequence s");
  edim->add_option("--t", k.t, "sequence t");
  edim->add_option("--depth", k.depth, "tree depth");
  edim->add_option("--formula-horizon", k.formula_horizon, "horizon of the truncated formula");
  edim->add_option("--csv", k.csv, "write (n, m_n, min_gap, max_diam) rows here");

  auto* dset = app.add_subcommand("dset", "minimal digits with a prescribed product growth");
  dset->add_option("--b", k.dset_b, "base b > 1");
  dset->add_option("--c", k.dset_c, "rate c > 1");
  dset->add_option("--depth", k.depth, "digits");
  dset->add_option("--mode", k.mode, "eventually or infinitely_often");
  dset->add_option("--subsequence", k.subsequence, "indices for infinitely_often, comma separated");

  auto* count = app.add_subcommand("count-oracle", "count of product tuples against the bound");
  count->add_option("--n", k.n, "tuple length (1..4)");
  count->add_option("--k", k.k, "scale index (0..4)");

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--format" || a == "--seed" || a == "--workers") {
      ++i;
      continue;
    }
    if (a.rfind("-", 0) == 0) continue;
    bool known = false;
    for (const auto* s : app.get_subcommands({})) known = known || s->get_name() == a;
    if (!known) {
      err << "usage error: unknown subcommand '" << a << "'\n";
      return 2;
    }
    break;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "0.1.0\n";
    return 0;
  } catch (const CLI::RequiredError& e) {
    // CLI11 checks requirements before extras; name a stray flag first.
    if (auto bad = unknown_flag(app, args)) err << "usage error: unknown option '" << *bad << "'\n";
    else err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  CLI::App* leaf = sub;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
  bool digits_out = (sub == eset && leaf == eset) || sub == dset;
  Context ctx{out, Json::object(), app.count("--format") ? format : (digits_out ? "csv" : "json")};
  ctx.config["subcommand"] = leaf == sub ? sub->get_name() : sub->get_name() + " " + leaf->get_name();
  ctx.config["format"] = ctx.format;
  ctx.config["seed"] = k.seed;
  ctx.config["precision_bits"] = static_cast<long>(default_precision());
  ctx.config["options"] = options_json(*leaf);

  try {
    if (leaf == check) cmd_map_check(ctx, k);
    else if (leaf == orbit) cmd_orbit(ctx, k);
    else if (leaf == code) cmd_code(ctx, k);
    else if (leaf == cyl) cmd_cylinder(ctx, k);
    else if (leaf == expo) cmd_exponent(ctx, k);
    else if (leaf == scal) cmd_scaling(ctx, k);
    else if (leaf == spec) cmd_spectrum(ctx, k);
    else if (leaf == gp) cmd_gpsi(ctx, k);
    else if (leaf == eset) cmd_eset(ctx, k);
    else if (leaf == edim) cmd_eset_dim(ctx, k);
    else if (leaf == dset) cmd_dset(ctx, k);
    else if (leaf == count) cmd_count(ctx, k);
  } catch (const Error& e) {
    err << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace fastlyap::cli
