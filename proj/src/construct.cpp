#include "fastlyap/construct.hpp"

#include <algorithm>
#include <cmath>

#include "fastlyap/error.hpp"

namespace fastlyap {

PairCheck check_pair(const SequencePair& pair, std::size_t horizon) {
  if (horizon < 2) throw Error(ErrorKind::usage, "pair check needs horizon >= 2");
  PairCheck c;
  c.theta = INFINITY;
  CompensatedSum sum;
  for (std::size_t n = 1; n <= horizon; ++n) {
    double ls = pair.s.log(n), lt = pair.t.log(n);
    c.theta = std::min(c.theta, std::exp(ls - lt));
    sum.add(ls);
    if (n == horizon / 2) c.growth_half = sum.value() / static_cast<double>(n);
  }
  c.growth_full = sum.value() / static_cast<double>(horizon);
  c.ratio_ok = c.theta > 0;
  c.growth_ok = c.growth_full > c.growth_half;
  return c;
}

namespace {

constexpr double ln2 = 0.69314718055994530942;

Integer floor_big(const BigFloat& v) {
  Integer z;
  mpfr_get_z(z.get_mpz_t(), v.get(), MPFR_RNDD);
  return z;
}

// floor(v), refusing values too close to an integer to decide.
Integer resolved_floor(const BigFloat& v, std::size_t n) {
  Integer f = floor_big(v);
  BigFloat frac = BigFloat::sub(v, BigFloat(f, Round::nearest, v.precision()), Round::nearest);
  double fr = frac.to_double();
  if (fr < 0x1p-40 || fr > 1 - 0x1p-40)
    throw Error(ErrorKind::construction,
                "cannot separate s_n or s_n + t_n from an integer at n = " + std::to_string(n) +
                    "; supply exact values",
                n);
  return f;
}

struct WindowValues {
  BigFloat s, st;  // s_n and s_n + t_n
};

WindowValues big_values(const SequencePair& pair, std::size_t n, std::size_t bit_budget) {
  double bits = std::max(pair.s.log(n), pair.t.log(n)) / ln2;
  if (!(bits <= static_cast<double>(bit_budget)))
    throw Error(ErrorKind::bit_budget, "window at n = " + std::to_string(n) + " exceeds the bit budget", n);
  auto prec = static_cast<mpfr_prec_t>(std::max(256.0, bits + 128));
  BigFloat s = BigFloat::exp(pair.s.log_big(n, prec), Round::nearest);
  BigFloat t = BigFloat::exp(pair.t.log_big(n, prec), Round::nearest);
  return {s, BigFloat::add(s, t, Round::nearest)};
}

}  // namespace

DigitWindow digit_window(const SequencePair& pair, std::size_t n, std::size_t bit_budget) {
  auto s = pair.s.exact(n);
  auto t = pair.t.exact(n);
  if (s && t) return {floor(*s) + 1, floor(*s + *t)};
  WindowValues v = big_values(pair, n, bit_budget);
  return {resolved_floor(v.s, n) + 1, resolved_floor(v.st, n)};
}

DigitWord e_set_digits(const SequencePair& pair, std::size_t depth, DigitRule rule, std::size_t bit_budget) {
  DigitWord out;
  for (std::size_t n = 1; n <= depth; ++n) {
    DigitWindow w;
    try {
      w = digit_window(pair, n, bit_budget);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::bit_budget) throw;
      // Beyond the budget only the log of the digit is kept.
      double ls = pair.s.log(n), lt = pair.t.log(n);
      out.push_back(Digit::log_only(rule == DigitRule::smallest ? ls : log_add_exp(ls, lt - ln2)));
      continue;
    }
    if (w.empty())
      throw Error(ErrorKind::construction, "no integer in (s_n, s_n + t_n] at n = " + std::to_string(n), n);
    Integer a = w.lo;
    if (rule == DigitRule::midpoint) {
      auto s = pair.s.exact(n);
      auto t = pair.t.exact(n);
      if (s && t) {
        a = floor(*s + *t / 2 + Rational(1, 2));
      } else {
        WindowValues v = big_values(pair, n, bit_budget);
        BigFloat center = BigFloat::div(BigFloat::add(v.s, v.st, Round::nearest), BigFloat(2.0, v.s.precision()),
                                        Round::nearest);
        BigFloat half(0.5, center.precision());
        a = floor_big(BigFloat::add(center, half, Round::nearest));
      }
      a = std::clamp(a, w.lo, w.hi);
    }
    if (a < w.lo || a > w.hi) throw Error(ErrorKind::construction, "digit left its window", n);
    out.emplace_back(a);
  }
  return out;
}

namespace {

Integer ceil_div(const Rational& x) {
  Integer z;
  mpz_cdiv_q(z.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return z;
}

}  // namespace

DigitWord d_set_digits(const Rational& b, const Rational& c, std::size_t depth, DSetMode mode,
                       const std::set<std::size_t>& subsequence, std::size_t bit_budget) {
  if (b <= 1 || c <= 1) throw Error(ErrorKind::out_of_range, "D-set digits need b > 1 and c > 1");
  DigitWord out;
  const double log_b = log_abs(b), log_c = log_abs(c);
  const bool integral_c = is_integer(c) && c.get_num().fits_ulong_p();
  Integer prod(1);
  bool exact = true;
  CompensatedSum log_prod;
  for (std::size_t n = 1; n <= depth; ++n) {
    bool constrained = mode == DSetMode::eventually || subsequence.count(n) > 0;
    double log_target = std::exp(static_cast<double>(n) * log_c) * log_b;  // c^n log b
    if (!constrained) {
      out.emplace_back(1UL);
      continue;
    }
    if (exact && log_target / ln2 > static_cast<double>(bit_budget)) exact = false;
    if (exact && integral_c) {
      Integer e;
      mpz_pow_ui(e.get_mpz_t(), c.get_num_mpz_t(), n);
      Rational target;
      mpz_pow_ui(target.get_num_mpz_t(), b.get_num_mpz_t(), e.get_ui());
      mpz_pow_ui(target.get_den_mpz_t(), b.get_den_mpz_t(), e.get_ui());
      target.canonicalize();
      Integer a = std::max(Integer(1), ceil_div(target / prod));
      prod *= a;
      log_prod.add(log_abs(a));
      out.emplace_back(a);
      continue;
    }
    if (exact) {
      // Non-integer c: b^(c^n) is irrational in general; decide the ceiling in MPFR.
      auto prec = static_cast<mpfr_prec_t>(std::max(256.0, log_target / ln2 + 128));
      BigFloat cn(prec);
      BigFloat cb(c, Round::nearest, prec);
      mpfr_pow_ui(cn.get(), cb.get(), n, MPFR_RNDN);
      BigFloat L = BigFloat::mul(cn, BigFloat::log(BigFloat(b, Round::nearest, prec), Round::nearest), Round::nearest);
      BigFloat lp = BigFloat::log(BigFloat(prod, Round::nearest, prec), Round::nearest);
      BigFloat q = BigFloat::exp(BigFloat::sub(L, lp, Round::down), Round::down);
      Integer a = std::max(Integer(1), floor_big(q));
      auto enough = [&](const Integer& cand) {
        BigFloat lt = BigFloat::log(BigFloat(Integer(prod * cand), Round::nearest, prec), Round::nearest);
        return L <= lt;
      };
      while (!enough(a)) ++a;
      prod *= a;
      log_prod.add(log_abs(a));
      out.emplace_back(a);
      continue;
    }
    double need = log_target - log_prod.value();
    if (need <= 0) {
      out.emplace_back(1UL);
    } else {
      out.push_back(Digit::log_only(need));
      log_prod.add(need);
    }
  }
  return out;
}

std::vector<std::size_t> luczak_witnesses(const DigitWord& word, double b, double c, double d) {
  if (!(d > 1 && d < c)) throw Error(ErrorKind::out_of_range, "Luczak witnesses need 1 < d < c");
  if (!(b > 1)) throw Error(ErrorKind::out_of_range, "Luczak witnesses need b > 1");
  std::vector<std::size_t> out;
  CompensatedSum acc;
  std::vector<double> lp;
  for (const auto& digit : word) {
    acc.add(digit.log());
    lp.push_back(acc.value());
  }
  const double log_b = std::log(b);
  for (std::size_t n = 1; n < lp.size(); ++n) {
    double rhs = std::max(d * lp[n - 1], std::pow(d, static_cast<double>(n + 1)) * log_b);
    if (lp[n] > rhs) out.push_back(n);
  }
  return out;
}

namespace {

std::size_t provisional_start(std::size_t horizon) {
  std::size_t tail = std::max<std::size_t>(1, horizon / 10);
  return horizon - tail + 1;
}

}  // namespace

LPIndexReport l_indices(const Array& a) {
  LPIndexReport r;
  r.horizon = static_cast<std::size_t>(a.size());
  if (a.size() == 0) return r;
  r.provisional_from = provisional_start(r.horizon);
  double suffix_min = INFINITY;
  for (Eigen::Index i = a.size() - 1; i >= 0; --i) {
    if (a[i] < suffix_min) r.indices.push_back(static_cast<std::size_t>(i + 1));
    suffix_min = std::min(suffix_min, a[i]);
  }
  std::reverse(r.indices.begin(), r.indices.end());
  return r;
}

LPIndexReport p_indices(const Array& c) {
  LPIndexReport r;
  r.horizon = static_cast<std::size_t>(c.size());
  if (c.size() == 0) return r;
  r.provisional_from = provisional_start(r.horizon);
  double prefix_min = INFINITY;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c[i] < prefix_min) r.indices.push_back(static_cast<std::size_t>(i + 1));
    prefix_min = std::min(prefix_min, c[i]);
  }
  return r;
}

JointIndexResult joint_index(const Array& log_a, const Array& log_c, std::size_t N) {
  if (log_a.size() != log_c.size()) throw Error(ErrorKind::usage, "joint_index needs sequences of equal length");
  JointIndexResult out;
  auto H = static_cast<std::size_t>(log_a.size());
  if (H == 0 || H <= N) return out;
  Array diff = log_a - log_c;
  std::size_t m = H;
  while (m > 1 && diff[static_cast<Eigen::Index>(m - 2)] < diff[static_cast<Eigen::Index>(m - 1)]) --m;
  if (m < H) out.monotone_from = m;
  auto L = l_indices(log_a).indices;
  auto P = p_indices(log_c).indices;
  std::vector<char> in_p(H + 1, 0);
  for (auto p : P) in_p[p] = 1;
  for (auto l : L)
    if (l > N && in_p[l]) {
      out.index = l;
      break;
    }
  return out;
}

KeyIndexResult key_index(const Array& log_psi, double b, double epsilon, std::size_t N, KeyCase which) {
  if (!(epsilon > 0)) throw Error(ErrorKind::out_of_range, "key index needs epsilon > 0");
  if (which == KeyCase::finite_b && !(epsilon < b - 1))
    throw Error(ErrorKind::out_of_range, "key index (finite b) needs 0 < epsilon < b - 1");
  auto H = log_psi.size();
  Array log_a(H), log_c(H);
  double up = which == KeyCase::finite_b ? std::log(b + epsilon) : std::log1p(epsilon);
  for (Eigen::Index i = 0; i < H; ++i) {
    double n = static_cast<double>(i + 1);
    log_a[i] = which == KeyCase::finite_b ? log_psi[i] - n * std::log(b - epsilon) : log_psi[i] - std::log(n);
    log_c[i] = log_psi[i] - n * up;
  }
  JointIndexResult j = joint_index(log_a, log_c, N);
  KeyIndexResult out;
  out.index = j.index;
  out.monotone_from = j.monotone_from;
  if (!out.index) return out;
  // Re-check both inequalities directly against psi.
  auto s = static_cast<Eigen::Index>(*out.index - 1);
  double ns = static_cast<double>(*out.index);
  bool ok = true;
  for (Eigen::Index i = 0; i < H && ok; ++i) {
    double n = static_cast<double>(i + 1);
    if (i > s) {
      ok = which == KeyCase::finite_b ? log_psi[i] > (n - ns) * std::log(b - epsilon) + log_psi[s]
                                      : std::log(ns) + log_psi[i] > std::log(n) + log_psi[s];
    } else if (i < s) {
      ok = log_psi[i] > (n - ns) * up + log_psi[s];
    }
  }
  out.verified = ok;
  return out;
}

FswResult fsw_sequence(const Sequence& psi, double alpha, double epsilon, std::size_t horizon, double B,
                       std::size_t run, std::size_t scan_cap) {
  if (!(alpha > 0) || !(epsilon > 0)) throw Error(ErrorKind::out_of_range, "FSW sequence needs alpha > 0 and epsilon > 0");
  if (!(B >= 1) || std::isinf(B)) throw Error(ErrorKind::out_of_range, "FSW sequence needs a finite B >= 1");
  if (horizon == 0) throw Error(ErrorKind::usage, "FSW sequence needs horizon >= 1");
  FswResult out;
  out.B_plus_eps = B + epsilon;
  const double lq = std::log(B + epsilon);
  const double drop = std::ldexp(1.0, -10);
  std::vector<double> logs;  // log psi(k), grown on demand
  auto log_psi = [&](std::size_t k) {
    while (logs.size() < k) logs.push_back(psi.log(logs.size() + 1));
    return logs[k - 1];
  };
  auto value = [&](double log_v) {
    double v = alpha * std::exp(log_v);
    if (!std::isfinite(v)) throw Error(ErrorKind::truncation, "FSW envelope overflows double precision");
    return v;
  };
  out.log_d.resize(static_cast<Eigen::Index>(horizon));
  out.log_envelope.resize(static_cast<Eigen::Index>(horizon));
  double prefix_max = -INFINITY;
  for (std::size_t n = 1; n <= horizon; ++n) {
    prefix_max = std::max(prefix_max, value(log_psi(n)));
    double best = -INFINITY;
    std::size_t stale = 0;
    bool stopped = false;
    for (std::size_t k = n + 1; k <= n + scan_cap; ++k) {
      double v = value(log_psi(k) + (static_cast<double>(n) - static_cast<double>(k)) * lq);
      if (v > best) {
        best = v;
        stale = 0;
      } else {
        ++stale;
      }
      if (stale >= run && v < std::max(best, prefix_max) * drop) {
        stopped = true;
        break;
      }
    }
    if (!stopped)
      throw Error(ErrorKind::truncation, "FSW supremum did not decay within the scan cap at n = " + std::to_string(n), n);
    double e = std::max(prefix_max, best);
    auto i = static_cast<Eigen::Index>(n - 1);
    out.log_envelope[i] = e;
    out.log_d[i] = n == 1 ? e : e - out.log_envelope[i - 1];
  }
  return out;
}

}  // namespace fastlyap
