#pragma once

// Fields on R^d evaluated through truncated Taylor jets, and the pointwise
// exterior algebra used to integrate forms.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crlab/errors.hpp"
#include "crlab/taylor.hpp"

namespace crlab {

using Vec = Eigen::VectorXcd;
using Domain = std::function<bool(std::span<const double>)>;

struct Point {
  std::vector<double> x;

  int dim() const { return static_cast<int>(x.size()); }
  double operator[](int i) const { return x[i]; }
};

// value and first/second derivatives of every component at one point
struct Jet {
  int order = 0;
  std::vector<cplx> value;
  std::vector<Vec> d1;
  std::vector<Eigen::MatrixXcd> d2;
};

enum class Arity { Scalar, Vector, Form, Spinor };

class FieldExpr {
 public:
  using Eval = std::function<std::vector<CJet>(std::span<const RJet>)>;

  FieldExpr(std::string name, Arity arity, int dim, int components, Eval eval, Domain domain = {},
            int degree = 0);

  const std::string& name() const { return name_; }
  Arity arity() const { return arity_; }
  int dim() const { return dim_; }
  int components() const { return components_; }
  // form degree; zero for other arities
  int degree() const { return degree_; }

  bool contains(std::span<const double> p) const { return !domain_ || domain_(p); }
  std::vector<CJet> operator()(std::span<const RJet> x) const { return eval_(x); }
  // throws DomainError outside the domain
  std::vector<CJet> at(std::span<const double> p, int order) const;

 private:
  std::string name_;
  Arity arity_;
  int dim_;
  int components_;
  int degree_;
  Eval eval_;
  Domain domain_;
};

// real valued scalar field; the common case for conformal factors
class ScalarField {
 public:
  using Eval = std::function<RJet(std::span<const RJet>)>;

  ScalarField(std::string name, int dim, Eval eval, Domain domain = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool contains(std::span<const double> p) const { return !domain_ || domain_(p); }
  RJet operator()(std::span<const RJet> x) const { return eval_(x); }
  RJet at(std::span<const double> p, int order) const;
  double value(std::span<const double> p) const { return at(p, 0).value(); }
  FieldExpr as_field() const;

 private:
  std::string name_;
  int dim_;
  Eval eval_;
  Domain domain_;
};

// exact jets up to second order; higher orders are internal only
Jet jet_eval(const FieldExpr& f, const Point& p, int order);
// central differences of values, step h per coordinate
Jet fd_jet(const FieldExpr& f, const Point& p, int order, double h);

// constant-coefficient k-form on C (x) R^d with basis dx^I, I a bitmask
class AltForm {
 public:
  AltForm() = default;
  AltForm(int dim, int degree);
  static AltForm covector(std::span<const cplx> comps);
  static AltForm covector(const Vec& comps);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  cplx& operator[](unsigned mask) { return c_[mask]; }
  cplx operator[](unsigned mask) const { return c_[mask]; }

  AltForm& operator+=(const AltForm& o);
  AltForm& operator*=(cplx s);
  friend AltForm operator+(AltForm a, const AltForm& b) { return a += b; }
  friend AltForm operator*(AltForm a, cplx s) { return a *= s; }
  friend AltForm operator*(cplx s, AltForm a) { return a *= s; }

  AltForm interior(const Vec& v) const;
  // determinant convention: (a ^ b)(v, w) = a(v) b(w) - a(w) b(v)
  cplx evaluate(std::span<const Vec> vectors) const;

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::vector<cplx> c_;
};

AltForm wedge(const AltForm& a, const AltForm& b);
AltForm wedge_power(const AltForm& a, int k);

// sign of dx^j ^ dx^I relative to dx^(I+j); zero if j in I
int wedge_sign(unsigned single, unsigned mask);
int wedge_sign_masks(unsigned a, unsigned b);

// k-form fields: components indexed by bitmask, 2^dim entries
FieldExpr make_form(std::string name, int dim, int degree,
                    std::function<std::vector<CJet>(std::span<const RJet>)> eval, Domain domain = {});
FieldExpr covector_field(std::string name, int dim, std::function<std::vector<CJet>(std::span<const RJet>)> comps,
                         Domain domain = {});
// exterior derivative as a field, one jet order lower
FieldExpr exterior_derivative(const FieldExpr& form);
FieldExpr wedge(const FieldExpr& a, const FieldExpr& b);
AltForm form_value(const FieldExpr& form, const Point& p);
std::vector<CJet> exterior_derivative_jets(std::span<const CJet> form, int dim, int degree);

// d(form) at p on constant extensions of the given vectors
cplx exterior_derivative(const FieldExpr& form, const Point& p, std::span<const Vec> vectors);
// invariant formula with directional derivatives and brackets of vector fields
cplx exterior_derivative(const FieldExpr& form, const Point& p, std::span<const FieldExpr> fields);
cplx wedge_eval(const FieldExpr& a, const FieldExpr& b, const Point& p, std::span<const Vec> vectors);

Vec lie_bracket(const FieldExpr& X, const FieldExpr& Y, const Point& p);
// [X, Y] componentwise on jets: X^j d_j Y - Y^j d_j X
std::vector<CJet> bracket_jets(std::span<const CJet> X, std::span<const CJet> Y);
// X(f) = X^j d_j f
CJet directional(std::span<const CJet> X, const CJet& f);

Vec values(std::span<const CJet> comps);

}  // namespace crlab
