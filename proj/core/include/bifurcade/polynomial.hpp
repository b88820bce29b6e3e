#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bifurcade {

// ---------------------------------------------------------------------------
// Univariate polynomials in the bifurcation parameter, stored with ascending
// coefficients: c[0] + c[1] x + c[2] x^2 + ...
// ---------------------------------------------------------------------------

double poly_eval(std::span<const double> coeffs, double x);
std::vector<double> poly_derivative(std::span<const double> coeffs);

/// Degree after discarding exactly-zero leading coefficients; -1 for the zero polynomial.
int poly_degree(std::span<const double> coeffs);

/// Real roots inside [lo, hi], ascending. Linear and quadratic cases are closed
/// form; higher degrees go through companion-matrix eigenvalues followed by a
/// Newton polish. Repeated roots are reported once.
std::vector<double> poly_real_roots(std::span<const double> coeffs, double lo, double hi);

// ---------------------------------------------------------------------------
// Truncated multivariate polynomials used by the center-manifold reduction.
// ---------------------------------------------------------------------------

using Monomial = std::vector<int>;

int total_degree(const Monomial& m);

/// Graded ordering: total degree first, then lexicographic with the first
/// variable dominant (x^2 < xy < y^2 within degree two).
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Enumerates every monomial of exactly the given total degree in `nvars`
/// variables, in GradedLex order.
std::vector<Monomial> monomials_of_degree(int nvars, int degree);

class MultiPoly {
 public:
  using Terms = std::map<Monomial, double, GradedLex>;

  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  /// The coordinate function w_index.
  static MultiPoly variable(int nvars, int index);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  /// Lowest and highest total degree with a stored term; -1 when zero.
  int min_degree() const;
  int max_degree() const;

  double coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, double c);
  void set_term(const Monomial& m, double c);

  MultiPoly homogeneous_part(int degree) const;
  MultiPoly truncated(int max_degree) const;
  MultiPoly derivative(int var) const;

  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& w) const;

  MultiPoly& operator+=(const MultiPoly& other);
  MultiPoly& operator-=(const MultiPoly& other);
  MultiPoly& operator*=(double s);

  /// Product dropping every term above `max_degree`.
  friend MultiPoly multiply_truncated(const MultiPoly& a, const MultiPoly& b, int max_degree);

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) = default;

 private:
  int nvars_ = 0;
  Terms terms_;
};

MultiPoly operator+(MultiPoly a, const MultiPoly& b);
MultiPoly operator-(MultiPoly a, const MultiPoly& b);
MultiPoly operator*(double s, MultiPoly a);

/// Human-readable form, e.g. "-0.75*w1^3 + 0.1*w1*w2".
std::string to_string(const MultiPoly& p);

}  // namespace bifurcade
