#pragma once

// Univariate functions built from shifted signed powers
//   sum_j c_j * s_j(x + a_j) |x + a_j|^{p_j},  s_j in {1, sgn},
// which is closed under shifts, sums and differentiation. Integer powers with
// matching parity are ordinary monomials; the other terms carry finite
// smoothness and report it through derivative queries.

#include <malab/core.hpp>

#include <sstream>
#include <vector>

namespace malab {

struct PowerTerm {
  double coeff = 0.0;
  double power = 0.0;
  bool odd = false;  // true: sgn(t)|t|^p, false: |t|^p
  double shift = 0.0;

  bool is_monomial() const {
    const double r = std::round(power);
    return r == power && r >= 0.0 && ((static_cast<long>(r) % 2 == 1) == odd);
  }
};

class PowerSum {
 public:
  PowerSum() = default;
  explicit PowerSum(std::vector<PowerTerm> terms) : terms_(std::move(terms)) { prune(); }

  /// Ordinary polynomial sum_i c[i] x^i.
  static PowerSum polynomial(const std::vector<double>& coeffs) {
    std::vector<PowerTerm> t;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0.0) t.push_back(monomial_term(coeffs[i], static_cast<int>(i)));
    return PowerSum(std::move(t));
  }
  static PowerSum monomial(double c, int m) { return PowerSum({monomial_term(c, m)}); }
  /// c |x|^p.
  static PowerSum abs_power(double c, double p) { return PowerSum({{c, p, false, 0.0}}); }
  static PowerSum constant(double c) { return monomial(c, 0); }

  const std::vector<PowerTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  bool all_monomial() const {
    for (const auto& t : terms_)
      if (!t.is_monomial()) return false;
    return true;
  }

  double operator()(double x) const { return derivative(x, 0); }

  /// n-th derivative at x. Throws CapabilityError where a finite-smoothness
  /// term is not n times differentiable (at its singular point).
  double derivative(double x, int n) const {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term_derivative(term, x, n);
    return sum;
  }

  /// Largest n for which the n-th derivative exists at x (capped at cap).
  int smoothness_at(double x, int cap) const {
    int best = cap;
    for (const auto& term : terms_) {
      if (term.is_monomial() || x + term.shift != 0.0) continue;
      // n-th derivative exists at the singular point iff n < p
      int n = static_cast<int>(std::ceil(term.power)) - 1;
      best = std::min(best, std::max(n, -1));
    }
    return best;
  }

  /// Function x -> f(x + s).
  PowerSum shifted(double s) const {
    PowerSum r = *this;
    for (auto& t : r.terms_) t.shift += s;
    return r;
  }

  PowerSum scaled(double c) const {
    PowerSum r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    r.prune();
    return r;
  }

  friend PowerSum operator+(const PowerSum& a, const PowerSum& b) {
    std::vector<PowerTerm> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return PowerSum(std::move(t));
  }
  friend PowerSum operator-(const PowerSum& a, const PowerSum& b) { return a + b.scaled(-1.0); }

  /// Expanded monomial coefficients. Requires all_monomial().
  std::vector<double> expand() const {
    if (!all_monomial()) throw CapabilityError("PowerSum::expand: non-polynomial term present");
    std::vector<double> c;
    for (const auto& t : terms_) {
      const int m = static_cast<int>(t.power);
      if (static_cast<int>(c.size()) < m + 1) c.resize(m + 1, 0.0);
      // c (x + s)^m = sum_i c binom(m,i) s^{m-i} x^i
      for (int i = 0; i <= m; ++i) c[i] += t.coeff * binomial(m, i) * std::pow(t.shift, m - i);
    }
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
  }

  /// Largest |coeff|, used for tolerance scaling.
  double scale() const {
    double s = 0.0;
    for (const auto& t : terms_) s = std::max(s, std::abs(t.coeff));
    return s;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : terms_) {
      if (!first) os << " + ";
      first = false;
      os << t.coeff << (t.odd ? "*sgn" : "*abs") << "(x" << (t.shift >= 0 ? "+" : "") << t.shift
         << ")^" << t.power;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  static PowerTerm monomial_term(double c, int m) { return {c, static_cast<double>(m), m % 2 == 1, 0.0}; }

  void prune() {
    std::erase_if(terms_, [](const PowerTerm& t) { return t.coeff == 0.0; });
  }

  static double term_derivative(const PowerTerm& term, double x, int n) {
    const double t = x + term.shift;
    if (term.is_monomial()) {
      const int m = static_cast<int>(term.power);
      if (n > m) return 0.0;
      double falling = 1.0;
      for (int i = 0; i < n; ++i) falling *= (m - i);
      return term.coeff * falling * std::pow(t, m - n);
    }
    if (t == 0.0) {
      if (static_cast<double>(n) < term.power) return 0.0;
      std::ostringstream os;
      os << "derivative of order " << n << " does not exist for |t|^" << term.power << " at its singular point";
      throw CapabilityError(os.str());
    }
    double falling = 1.0;
    for (int i = 0; i < n; ++i) falling *= (term.power - i);
    const bool odd = (n % 2 == 1) ? !term.odd : term.odd;
    const double mag = std::pow(std::abs(t), term.power - n);
    const double sgn = (odd && t < 0.0) ? -1.0 : 1.0;
    return term.coeff * falling * sgn * mag;
  }

  std::vector<PowerTerm> terms_;
};

}  // namespace malab
