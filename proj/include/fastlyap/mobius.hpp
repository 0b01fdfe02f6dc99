#ifndef FASTLYAP_MOBIUS_HPP
#define FASTLYAP_MOBIUS_HPP

#include <cmath>

namespace fastlyap {

// x -> (a x + b) / (c x + d). Composition is matrix multiplication, so a word of
// inverse branches stays exact when Scalar is an exact integer type.
template <class Scalar>
struct Mobius {
  Scalar a{1}, b{0}, c{0}, d{1};

  static Mobius identity() { return Mobius{Scalar(1), Scalar(0), Scalar(0), Scalar(1)}; }

  Scalar determinant() const { return Scalar(a * d - b * c); }

  // Inverse up to the projective scale factor det.
  Mobius adjugate() const { return Mobius{d, Scalar(-b), Scalar(-c), a}; }

  template <class X>
  X operator()(const X& x) const {
    return X(X(a * x + b) / X(c * x + d));
  }

  template <class X>
  X denominator_at(const X& x) const {
    return X(c * x + d);
  }
};

// (f * g)(x) = f(g(x)).
template <class Scalar>
Mobius<Scalar> operator*(const Mobius<Scalar>& f, const Mobius<Scalar>& g) {
  return Mobius<Scalar>{Scalar(f.a * g.a + f.b * g.c), Scalar(f.a * g.b + f.b * g.d),
                        Scalar(f.c * g.a + f.d * g.c), Scalar(f.c * g.b + f.d * g.d)};
}

template <class Out, class In>
Mobius<Out> cast(const Mobius<In>& m, Out (*convert)(const In&)) {
  return Mobius<Out>{convert(m.a), convert(m.b), convert(m.c), convert(m.d)};
}

}  // namespace fastlyap

#endif  // FASTLYAP_MOBIUS_HPP
