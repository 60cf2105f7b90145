#include "congflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "congflow/errors.hpp"

namespace congflow {

namespace {

constexpr double kDropTol = 0.0;  // exact arithmetic on coefficients; drop true zeros only

template <typename Term, typename Key>
std::vector<Term> normalize(std::map<Key, Complex>&& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [key, c] : acc) {
    if (std::abs(c.real()) <= kDropTol && std::abs(c.imag()) <= kDropTol) continue;
    if constexpr (std::is_same_v<Key, std::pair<int, int>>) {
      out.push_back(Term{key.first, key.second, c});
    } else {
      out.push_back(Term{key, c});
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BiPoly

BiPoly::BiPoly(std::vector<Term> terms) {
  std::map<std::pair<int, int>, Complex> acc;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0) throw std::invalid_argument("BiPoly: negative exponent");
    if (!is_finite(t.c)) throw std::invalid_argument("BiPoly: non-finite coefficient");
    acc[{t.i, t.j}] += t.c;
  }
  terms_ = normalize<Term, std::pair<int, int>>(std::move(acc));
}

BiPoly BiPoly::constant(Complex c) { return BiPoly({{0, 0, c}}); }

BiPoly BiPoly::monomial(int i, int j, Complex c) { return BiPoly({{i, j, c}}); }

BiPoly BiPoly::one_plus_xixibar() { return BiPoly({{0, 0, 1.0}, {1, 1, 1.0}}); }

int BiPoly::total_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.i + t.j);
  return d;
}

double BiPoly::max_coeff_norm() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.c));
  return m;
}

BiPoly BiPoly::operator+(const BiPoly& o) const {
  std::map<std::pair<int, int>, Complex> acc;
  for (const auto& t : terms_) acc[{t.i, t.j}] += t.c;
  for (const auto& t : o.terms_) acc[{t.i, t.j}] += t.c;
  BiPoly out;
  out.terms_ = normalize<Term, std::pair<int, int>>(std::move(acc));
  return out;
}

BiPoly BiPoly::operator-(const BiPoly& o) const { return *this + o.scaled(-1.0); }

BiPoly BiPoly::operator*(const BiPoly& o) const {
  std::map<std::pair<int, int>, Complex> acc;
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) acc[{a.i + b.i, a.j + b.j}] += a.c * b.c;
  }
  BiPoly out;
  out.terms_ = normalize<Term, std::pair<int, int>>(std::move(acc));
  return out;
}

BiPoly BiPoly::scaled(Complex s) const {
  BiPoly out;
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.c *= s;
  if (s == Complex{0.0, 0.0}) out.terms_.clear();
  return out;
}

BiPoly BiPoly::conj_poly() const {
  std::vector<Term> ts;
  ts.reserve(terms_.size());
  for (const auto& t : terms_) ts.push_back({t.j, t.i, std::conj(t.c)});
  return BiPoly(std::move(ts));
}

BiPoly BiPoly::d_xi() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) {
    if (t.i > 0) ts.push_back({t.i - 1, t.j, double(t.i) * t.c});
  }
  return BiPoly(std::move(ts));
}

BiPoly BiPoly::d_xibar() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) {
    if (t.j > 0) ts.push_back({t.i, t.j - 1, double(t.j) * t.c});
  }
  return BiPoly(std::move(ts));
}

Complex BiPoly::eval(Complex xi) const {
  int max_i = 0, max_j = 0;
  for (const auto& t : terms_) {
    max_i = std::max(max_i, t.i);
    max_j = std::max(max_j, t.j);
  }
  std::vector<Complex> pi(max_i + 1), pj(max_j + 1);
  pi[0] = pj[0] = 1.0;
  const Complex xb = std::conj(xi);
  for (int i = 1; i <= max_i; ++i) pi[i] = pi[i - 1] * xi;
  for (int j = 1; j <= max_j; ++j) pj[j] = pj[j - 1] * xb;
  Complex acc = 0.0;
  for (const auto& t : terms_) acc += t.c * pi[t.i] * pj[t.j];
  return acc;
}

BiPoly wirtinger_d(const BiPoly& f) { return f.d_xi(); }
BiPoly wirtinger_dbar(const BiPoly& f) { return f.d_xibar(); }

// ---------------------------------------------------------------------------
// ChartRational

ChartRational::ChartRational(BiPoly num, int denom_pow)
    : num_(std::move(num)), denom_pow_(denom_pow) {
  if (denom_pow_ < 0) throw std::invalid_argument("ChartRational: negative denominator power");
}

namespace {
BiPoly lift(const BiPoly& num, int by) {
  BiPoly out = num;
  const BiPoly d = BiPoly::one_plus_xixibar();
  for (int k = 0; k < by; ++k) out = out * d;
  return out;
}
}  // namespace

ChartRational ChartRational::operator+(const ChartRational& o) const {
  const int p = std::max(denom_pow_, o.denom_pow_);
  return ChartRational(lift(num_, p - denom_pow_) + lift(o.num_, p - o.denom_pow_), p);
}

ChartRational ChartRational::operator-(const ChartRational& o) const {
  return *this + o.scaled(-1.0);
}

ChartRational ChartRational::operator*(const ChartRational& o) const {
  return ChartRational(num_ * o.num_, denom_pow_ + o.denom_pow_);
}

ChartRational ChartRational::scaled(Complex s) const {
  return ChartRational(num_.scaled(s), denom_pow_);
}

ChartRational ChartRational::conj() const {
  return ChartRational(num_.conj_poly(), denom_pow_);
}

ChartRational ChartRational::d_xi() const {
  // d/dxi (1+xi xibar)^-p = -p xibar (1+xi xibar)^-(p+1)
  const BiPoly d = BiPoly::one_plus_xixibar();
  const BiPoly xb = BiPoly::monomial(0, 1, 1.0);
  return ChartRational(num_.d_xi() * d - (xb * num_).scaled(double(denom_pow_)), denom_pow_ + 1);
}

ChartRational ChartRational::d_xibar() const {
  const BiPoly d = BiPoly::one_plus_xixibar();
  const BiPoly x = BiPoly::monomial(1, 0, 1.0);
  return ChartRational(num_.d_xibar() * d - (x * num_).scaled(double(denom_pow_)), denom_pow_ + 1);
}

Complex ChartRational::eval(Complex xi) const {
  return num_.eval(xi) / std::pow(1.0 + std::norm(xi), denom_pow_);
}

// ---------------------------------------------------------------------------
// CurvePoly

CurvePoly::CurvePoly(std::vector<Term> terms) {
  std::map<int, Complex> acc;
  for (const auto& t : terms) {
    if (t.k < 0) throw std::invalid_argument("CurvePoly: negative exponent");
    if (!is_finite(t.c)) throw std::invalid_argument("CurvePoly: non-finite coefficient");
    acc[t.k] += t.c;
  }
  terms_ = normalize<Term, int>(std::move(acc));
}

CurvePoly CurvePoly::monomial(int k, Complex c) { return CurvePoly({{k, c}}); }

int CurvePoly::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.k);
  return d;
}

double CurvePoly::max_coeff_norm() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.c));
  return m;
}

CurvePoly CurvePoly::operator+(const CurvePoly& o) const {
  std::map<int, Complex> acc;
  for (const auto& t : terms_) acc[t.k] += t.c;
  for (const auto& t : o.terms_) acc[t.k] += t.c;
  CurvePoly out;
  out.terms_ = normalize<Term, int>(std::move(acc));
  return out;
}

CurvePoly CurvePoly::operator-(const CurvePoly& o) const { return *this + o.scaled(-1.0); }

CurvePoly CurvePoly::operator*(const CurvePoly& o) const {
  std::map<int, Complex> acc;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) acc[a.k + b.k] += a.c * b.c;
  CurvePoly out;
  out.terms_ = normalize<Term, int>(std::move(acc));
  return out;
}

CurvePoly CurvePoly::scaled(Complex s) const {
  CurvePoly out;
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.c *= s;
  if (s == Complex{0.0, 0.0}) out.terms_.clear();
  return out;
}

CurvePoly CurvePoly::conj_poly() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) ts.push_back({t.k, std::conj(t.c)});
  return CurvePoly(std::move(ts));
}

CurvePoly CurvePoly::derivative() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) {
    if (t.k > 0) ts.push_back({t.k - 1, double(t.k) * t.c});
  }
  return CurvePoly(std::move(ts));
}

Complex CurvePoly::eval(double u) const {
  // Horner over the sorted terms.
  Complex acc = 0.0;
  int k = degree();
  auto it = terms_.rbegin();
  for (; k >= 0; --k) {
    acc *= u;
    if (it != terms_.rend() && it->k == k) {
      acc += it->c;
      ++it;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// SheetPoly

SheetPoly::SheetPoly(std::vector<Term> terms) {
  std::map<std::pair<int, int>, Complex> acc;
  for (const auto& t : terms) {
    if (t.k < 0 || t.l < 0) throw std::invalid_argument("SheetPoly: negative exponent");
    if (!is_finite(t.c)) throw std::invalid_argument("SheetPoly: non-finite coefficient");
    acc[{t.k, t.l}] += t.c;
  }
  terms_ = normalize<Term, std::pair<int, int>>(std::move(acc));
}

SheetPoly SheetPoly::constant(Complex c) { return SheetPoly({{0, 0, c}}); }

SheetPoly SheetPoly::monomial(int k, int l, Complex c) { return SheetPoly({{k, l, c}}); }

SheetPoly SheetPoly::from_curve(const CurvePoly& p) {
  std::vector<Term> ts;
  for (const auto& t : p.terms()) ts.push_back({t.k, 0, t.c});
  return SheetPoly(std::move(ts));
}

int SheetPoly::total_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.k + t.l);
  return d;
}

double SheetPoly::max_coeff_norm() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.c));
  return m;
}

bool SheetPoly::is_real_valued() const {
  for (const auto& t : terms_) {
    if (t.c.imag() != 0.0) return false;
  }
  return true;
}

SheetPoly SheetPoly::operator+(const SheetPoly& o) const {
  std::map<std::pair<int, int>, Complex> acc;
  for (const auto& t : terms_) acc[{t.k, t.l}] += t.c;
  for (const auto& t : o.terms_) acc[{t.k, t.l}] += t.c;
  SheetPoly out;
  out.terms_ = normalize<Term, std::pair<int, int>>(std::move(acc));
  return out;
}

SheetPoly SheetPoly::operator-(const SheetPoly& o) const { return *this + o.scaled(-1.0); }

SheetPoly SheetPoly::operator*(const SheetPoly& o) const {
  std::map<std::pair<int, int>, Complex> acc;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) acc[{a.k + b.k, a.l + b.l}] += a.c * b.c;
  SheetPoly out;
  out.terms_ = normalize<Term, std::pair<int, int>>(std::move(acc));
  return out;
}

SheetPoly SheetPoly::scaled(Complex s) const {
  SheetPoly out;
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.c *= s;
  if (s == Complex{0.0, 0.0}) out.terms_.clear();
  return out;
}

SheetPoly SheetPoly::conj_poly() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) ts.push_back({t.k, t.l, std::conj(t.c)});
  return SheetPoly(std::move(ts));
}

SheetPoly SheetPoly::d_u() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) {
    if (t.k > 0) ts.push_back({t.k - 1, t.l, double(t.k) * t.c});
  }
  return SheetPoly(std::move(ts));
}

SheetPoly SheetPoly::d_v() const {
  std::vector<Term> ts;
  for (const auto& t : terms_) {
    if (t.l > 0) ts.push_back({t.k, t.l - 1, double(t.l) * t.c});
  }
  return SheetPoly(std::move(ts));
}

Complex SheetPoly::eval(double u, double v) const {
  int max_k = 0, max_l = 0;
  for (const auto& t : terms_) {
    max_k = std::max(max_k, t.k);
    max_l = std::max(max_l, t.l);
  }
  std::vector<double> pu(max_k + 1), pv(max_l + 1);
  pu[0] = pv[0] = 1.0;
  for (int k = 1; k <= max_k; ++k) pu[k] = pu[k - 1] * u;
  for (int l = 1; l <= max_l; ++l) pv[l] = pv[l - 1] * v;
  Complex acc = 0.0;
  for (const auto& t : terms_) acc += t.c * (pu[t.k] * pv[t.l]);
  return acc;
}

// ---------------------------------------------------------------------------
// RationalUV

RationalUV::RationalUV(SheetPoly num, SheetPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::invalid_argument("RationalUV: zero denominator");
}

RationalUV RationalUV::d_u() const {
  return RationalUV(num_.d_u() * den_ - num_ * den_.d_u(), den_ * den_);
}

RationalUV RationalUV::d_v() const {
  return RationalUV(num_.d_v() * den_ - num_ * den_.d_v(), den_ * den_);
}

Complex RationalUV::eval(double u, double v) const {
  const Complex d = den_.eval(u, v);
  const double scale = 1.0 + num_.max_coeff_norm();
  if (std::abs(d) < 1e-14 * scale) {
    throw DegenerateParameterization("RationalUV: denominator vanishes at evaluation point");
  }
  return num_.eval(u, v) / d;
}

}  // namespace congflow
