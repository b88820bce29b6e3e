#include "bifurcade/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace bifurcade {

double poly_eval(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> poly_derivative(std::span<const double> coeffs) {
  if (coeffs.size() <= 1) return {0.0};
  std::vector<double> d(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs[i];
  return d;
}

int poly_degree(std::span<const double> coeffs) {
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    if (coeffs[i] != 0.0) return i;
  }
  return -1;
}

namespace {

double newton_polish(std::span<const double> c, std::span<const double> dc, double x) {
  for (int it = 0; it < 30; ++it) {
    const double f = poly_eval(c, x);
    const double df = poly_eval(dc, x);
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

std::vector<double> poly_real_roots(std::span<const double> coeffs, double lo, double hi) {
  const int deg = poly_degree(coeffs);
  std::vector<double> roots;
  if (deg <= 0) return roots;

  if (deg == 1) {
    roots.push_back(-coeffs[0] / coeffs[1]);
  } else if (deg == 2) {
    const double a = coeffs[2], b = coeffs[1], c = coeffs[0];
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        roots.push_back(q / a);
        roots.push_back(c / q);
      } else {
        roots.push_back(0.0);  // b == 0 and c == 0
      }
    }
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / coeffs[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto dc = poly_derivative(coeffs);
    for (int i = 0; i < deg; ++i) {
      const std::complex<double> z = solver.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-7 * (1.0 + std::abs(z.real()))) {
        roots.push_back(newton_polish(coeffs.first(deg + 1), dc, z.real()));
      }
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (r < lo || r > hi) continue;
    if (!out.empty() && std::abs(r - out.back()) <= 1e-12 * std::max(1.0, std::abs(r))) continue;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<Monomial> monomials_of_degree(int nvars, int degree) {
  std::vector<Monomial> out;
  if (nvars <= 0) return out;
  Monomial m(nvars, 0);
  // Recursive composition enumeration, first variable taking the largest share first.
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      m[var] = remaining;
      out.push_back(m);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      m[var] = e;
      self(self, var + 1, remaining - e);
    }
  };
  rec(rec, 0, degree);
  return out;
}

MultiPoly MultiPoly::variable(int nvars, int index) {
  MultiPoly p(nvars);
  Monomial m(nvars, 0);
  m[index] = 1;
  p.set_term(m, 1.0);
  return p;
}

int MultiPoly::min_degree() const {
  return terms_.empty() ? -1 : total_degree(terms_.begin()->first);
}

int MultiPoly::max_degree() const {
  return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first);
}

double MultiPoly::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void MultiPoly::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void MultiPoly::set_term(const Monomial& m, double c) {
  if (c == 0.0) {
    terms_.erase(m);
  } else {
    terms_[m] = c;
  }
}

MultiPoly MultiPoly::homogeneous_part(int degree) const {
  MultiPoly out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (total_degree(m) == degree) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

MultiPoly MultiPoly::truncated(int max_degree) const {
  MultiPoly out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (total_degree(m) <= max_degree) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

MultiPoly MultiPoly::derivative(int var) const {
  MultiPoly out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial dm = m;
    dm[var] -= 1;
    out.add_term(dm, c * m[var]);
  }
  return out;
}

double MultiPoly::evaluate(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c;
    for (int v = 0; v < nvars_; ++v) {
      for (int e = 0; e < m[v]; ++e) term *= w[v];
    }
    acc += term;
  }
  return acc;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& other) {
  if (nvars_ == 0) nvars_ = other.nvars_;
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& other) {
  if (nvars_ == 0) nvars_ = other.nvars_;
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

MultiPoly multiply_truncated(const MultiPoly& a, const MultiPoly& b, int max_degree) {
  MultiPoly out(std::max(a.nvars_, b.nvars_));
  for (const auto& [ma, ca] : a.terms_) {
    const int da = total_degree(ma);
    for (const auto& [mb, cb] : b.terms_) {
      if (da + total_degree(mb) > max_degree) break;  // b's terms are degree-ordered
      Monomial m(ma.size());
      for (std::size_t v = 0; v < m.size(); ++v) m[v] = ma[v] + mb[v];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
MultiPoly operator*(double s, MultiPoly a) { return a *= s; }

std::string to_string(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const bool constant = std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
    bool star = false;
    if (constant || std::abs(c) != 1.0) {
      os << std::abs(c);
      star = true;
    }
    for (std::size_t v = 0; v < m.size(); ++v) {
      if (m[v] == 0) continue;
      os << (star ? "*" : "") << "w" << v + 1;
      star = true;
      if (m[v] > 1) os << "^" << m[v];
    }
  }
  return os.str();
}

}  // namespace bifurcade
