#pragma once

// Numerical layer for the discrete Schrödinger equations: closed-form
// solution families, grid residuals, symmetry residuals, and evolution on
// finite periodic lattices. Floating point is confined to this module.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "jordan/error.hpp"
#include "jordan/opalg.hpp"
#include "jordan/rational.hpp"
#include "jordan/report.hpp"

namespace jordan {

/// Uniform sampling grid; a zero step marks a continuous direction.
struct GridSpec {
  Rational x0 = 0, t0 = 0;
  Rational sigma = Rational(1, 10), tau = Rational(1, 10);
  int nx = 16, nt = 16;

  void validate() const {
    if (nx <= 0 || nt <= 0) throw Error(ErrorCode::ConfigError, "grid counts must be positive");
    if (sgn(sigma) < 0 || sgn(tau) < 0) throw Error(ErrorCode::ConfigError, "grid steps must be nonnegative");
  }
  /// Sample spacing; a continuous direction is sampled at 1/10.
  Rational dx() const { return sgn(sigma) > 0 ? sigma : Rational(1, 10); }
  Rational dt() const { return sgn(tau) > 0 ? tau : Rational(1, 10); }
  Rational x(int i) const { return x0 + dx() * i; }
  Rational t(int j) const { return t0 + dt() * j; }
  GridSpec translated_x(int cells) const {
    GridSpec g = *this;
    g.x0 += dx() * cells;
    return g;
  }
};

/// Samples on a grid, row-major in t: values[j * nx + i] at (x(i), t(j)).
struct GridSamples {
  GridSpec grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j * grid.nx + i)]; }
};

inline void write_csv(std::ostream& os, const GridSamples& s) {
  os << "x,t,value\n";
  for (int j = 0; j < s.grid.nt; ++j)
    for (int i = 0; i < s.grid.nx; ++i)
      os << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.grid.x(i).get_d(), s.grid.t(j).get_d(), s.at(i, j));
}

// ------------------------------------------------------------ equations

/// Space lattice with continuous time, or time lattice with continuous space.
enum class Equation { SpaceLattice, TimeLattice };

inline std::string_view to_string(Equation e) { return e == Equation::SpaceLattice ? "space" : "time"; }

inline Equation parse_equation(std::string_view s) {
  if (s == "space") return Equation::SpaceLattice;
  if (s == "time") return Equation::TimeLattice;
  throw Error(ErrorCode::ConfigError, fmt::format("unknown equation '{}' (expected space or time)", s));
}

/// Dx^2 - 2m dt, or dx^2 - 2m Dt.
inline DiffOp equation_operator(Equation e) {
  DiffOp two_m = DiffOp::constant(ParamPoly::var(kMass) * ParamPoly(2));
  if (e == Equation::SpaceLattice) return DiffOp::delta_x().pow(2) - two_m * DiffOp::dt();
  return DiffOp::dx().pow(2) - two_m * DiffOp::delta_t();
}

// ------------------------------------------------------------ families

/// Exact eigen-data of an exponential factor along one direction: d acts as
/// multiplication by `deriv`, one lattice shift by `shift`.
struct DirectionData {
  std::optional<Rational> deriv;
  std::optional<Rational> shift;
  double deriv_d = 0;
  double shift_d = 1;
};

/// Closed-form solution: either A·exp(αx + βt) or a polynomial in (x, t).
class SolutionFamily {
 public:
  enum class Kind { Exponential, Polynomial };

  /// (1 + σk)^(x/σ) e^(k² t / 2m): Dx φ = k φ and dt φ = (k²/2m) φ.
  static SolutionFamily space_geometric(const Rational& k, const Rational& m, const Rational& sigma,
                                        const Rational& amplitude = 1) {
    if (sgn(Rational(1 + sigma * k)) <= 0)
      throw Error(ErrorCode::ConfigError, "space family needs 1 + sigma*k > 0");
    SolutionFamily f(Kind::Exponential, fmt::format("space_geometric(k={})", to_string(k)), m);
    f.solves_ = {Equation::SpaceLattice};
    f.amplitude_ = amplitude;
    f.step_x_ = sigma;
    Rational rho = 1 + sigma * k;
    f.x_.shift = rho;
    f.x_.shift_d = rho.get_d();
    f.x_.deriv_d = std::log(rho.get_d()) / sigma.get_d();
    Rational beta = k * k / (2 * m);
    f.t_.deriv = beta;
    f.t_.deriv_d = beta.get_d();
    return f;
  }
  /// e^(kx) (1 + τk²/2m)^(t/τ): dx φ = k φ and Dt φ = (k²/2m) φ.
  static SolutionFamily time_geometric(const Rational& k, const Rational& m, const Rational& tau,
                                       const Rational& amplitude = 1) {
    SolutionFamily f(Kind::Exponential, fmt::format("time_geometric(k={})", to_string(k)), m);
    f.solves_ = {Equation::TimeLattice};
    f.amplitude_ = amplitude;
    f.step_t_ = tau;
    f.x_.deriv = k;
    f.x_.deriv_d = k.get_d();
    Rational rho = 1 + tau * k * k / (2 * m);
    f.t_.shift = rho;
    f.t_.shift_d = rho.get_d();
    f.t_.deriv_d = std::log(rho.get_d()) / tau.get_d();
    return f;
  }
  /// x² + t/m solves both equations: every second difference of x² is 2.
  static SolutionFamily heat_polynomial(const Rational& m) {
    SolutionFamily f(Kind::Polynomial, "heat_polynomial", m);
    f.solves_ = {Equation::SpaceLattice, Equation::TimeLattice};
    add_to(f.poly_, {2, 0}, ParamPoly(1));
    add_to(f.poly_, {0, 1}, ParamPoly(Rational(1) / m));
    return f;
  }
  static SolutionFamily constant(const Rational& c, const Rational& m) {
    SolutionFamily f(Kind::Polynomial, "constant", m);
    f.solves_ = {Equation::SpaceLattice, Equation::TimeLattice};
    add_to(f.poly_, {0, 0}, ParamPoly(c));
    return f;
  }

  const std::string& id() const { return id_; }
  Kind kind() const { return kind_; }
  const Rational& mass() const { return m_; }
  bool solves(Equation e) const { return std::find(solves_.begin(), solves_.end(), e) != solves_.end(); }

  /// Parameter values for binding operator coefficients on this grid.
  ParamValues bindings(const GridSpec& g) const { return ParamValues::of(g.sigma, g.tau, m_); }

  /// Checks that the family's lattice step matches the grid.
  void check_grid(const GridSpec& g) const {
    if (step_x_ && *step_x_ != g.sigma)
      throw Error(ErrorCode::ConfigError, fmt::format("{} built for sigma={}, grid has {}", id_, to_string(*step_x_),
                                                      to_string(g.sigma)));
    if (step_t_ && *step_t_ != g.tau)
      throw Error(ErrorCode::ConfigError,
                  fmt::format("{} built for tau={}, grid has {}", id_, to_string(*step_t_), to_string(g.tau)));
  }

  double value(double x, double t) const {
    if (kind_ == Kind::Polynomial) return eval_poly_d(poly_, x, t);
    return amplitude_.get_d() * std::exp(x_.deriv_d * x + t_.deriv_d * t);
  }

  /// (Lφ)(x,t) in floating point; L must have numeric coefficients.
  double apply_d(const DiffOp& L, const ParamValues& pv, double x, double t) const {
    if (kind_ == Kind::Polynomial) return eval_poly_d(jordan::bind(L.apply(poly_), pv), x, t);
    double s = 0;
    for (const auto& [k, c] : L.terms()) {
      double term = c.constant_term().get_d() * std::pow(x, k.x) * std::pow(t, k.t);
      term *= std::pow(x_.deriv_d, k.dx) * std::pow(t_.deriv_d, k.dt);
      term *= std::pow(x_.shift_d, k.sx) * std::pow(t_.shift_d, k.st);
      s += term;
    }
    return s * value(x, t);
  }

  /// Exact (Lφ)(x,t) for polynomials; exact (Lφ)/φ for exponentials, which
  /// is rational when every eigenvalue L touches is rational.
  Rational apply_exact(const DiffOp& L, const ParamValues& pv, const Rational& x, const Rational& t) const {
    if (kind_ == Kind::Polynomial) return eval_poly(jordan::bind(L.apply(poly_), pv), x, t);
    Rational s = 0;
    for (const auto& [k, c] : L.terms()) {
      Rational term = c.constant_term() * rational_pow(x, k.x) * rational_pow(t, k.t);
      term *= eigen_pow(x_.deriv, k.dx, "dx") * eigen_pow(t_.deriv, k.dt, "dt");
      term *= eigen_pow(x_.shift, k.sx, "Tx") * eigen_pow(t_.shift, k.st, "Tt");
      s += term;
    }
    return s;
  }

 private:
  SolutionFamily(Kind k, std::string id, Rational m) : kind_(k), id_(std::move(id)), m_(std::move(m)) {}

  Rational eigen_pow(const std::optional<Rational>& v, int p, const char* what) const {
    if (p == 0) return 1;
    if (!v)
      throw Error(ErrorCode::MissingDerivative,
                  fmt::format("{} has no exact eigenvalue for {}; use the float backend", id_, what));
    return rational_pow(*v, p);
  }
  static Rational eval_poly(const CoordPoly& f, const Rational& x, const Rational& t) {
    Rational s = 0;
    for (const auto& [ij, c] : f) {
      if (!c.is_constant()) throw Error(ErrorCode::TypeMismatch, "unbound parameter in polynomial evaluation");
      s += c.constant_term() * rational_pow(x, ij.first) * rational_pow(t, ij.second);
    }
    return s;
  }
  static double eval_poly_d(const CoordPoly& f, double x, double t) {
    double s = 0;
    for (const auto& [ij, c] : f) {
      if (!c.is_constant()) throw Error(ErrorCode::TypeMismatch, "unbound parameter in polynomial evaluation");
      s += c.constant_term().get_d() * std::pow(x, ij.first) * std::pow(t, ij.second);
    }
    return s;
  }

  Kind kind_;
  std::string id_;
  Rational m_;
  std::vector<Equation> solves_;
  Rational amplitude_ = 1;
  std::optional<Rational> step_x_, step_t_;
  DirectionData x_, t_;
  CoordPoly poly_;
};

/// Default families for an equation on a grid.
inline std::vector<SolutionFamily> default_families(Equation e, const GridSpec& g, const Rational& m) {
  std::vector<SolutionFamily> out;
  if (e == Equation::SpaceLattice)
    for (const Rational& k : {Rational(1), Rational(1, 2), Rational(-1, 2)}) out.push_back(SolutionFamily::space_geometric(k, m, g.sigma));
  else
    for (const Rational& k : {Rational(1), Rational(1, 2), Rational(-1, 2)}) out.push_back(SolutionFamily::time_geometric(k, m, g.tau));
  out.push_back(SolutionFamily::heat_polynomial(m));
  out.push_back(SolutionFamily::constant(Rational(3, 2), m));
  return out;
}

// ------------------------------------------------------------ residuals

enum class Backend { Exact, Float };

struct Residual {
  double max_abs = 0;                 // float backend: max |Lφ| over the grid
  std::optional<Rational> exact_max;  // exact backend: max |Lφ| (|Lφ/φ| for exponentials)
};

/// Max residual of an operator applied to a family over the grid.
inline Residual operator_residual(const DiffOp& L, const SolutionFamily& f, const GridSpec& g, Backend b) {
  g.validate();
  f.check_grid(g);
  const ParamValues pv = f.bindings(g);
  DiffOp bound = L.bind(pv);
  Residual r;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (b == Backend::Exact) {
        Rational v = abs(f.apply_exact(bound, pv, g.x(i), g.t(j)));
        if (!r.exact_max || v > *r.exact_max) r.exact_max = v;
        r.max_abs = std::max(r.max_abs, r.exact_max->get_d());
      } else {
        double v = std::abs(f.apply_d(bound, pv, g.x(i).get_d(), g.t(j).get_d()));
        if (!std::isfinite(v)) throw Error(ErrorCode::InstabilityDetected, "non-finite residual");
        r.max_abs = std::max(r.max_abs, v);
      }
    }
  return r;
}

inline Residual residual(Equation e, const SolutionFamily& f, const GridSpec& g, Backend b) {
  return operator_residual(equation_operator(e), f, g, b);
}

/// Residual from samples alone: only shift terms can be evaluated, so any
/// continuous-direction derivative is an error.
inline double residual(Equation e, const GridSamples& s, const Rational& m) {
  DiffOp L = equation_operator(e).bind(ParamValues::of(s.grid.sigma, s.grid.tau, m));
  for (const auto& [k, c] : L.terms())
    if (k.dx > 0 || k.dt > 0)
      throw Error(ErrorCode::MissingDerivative,
                  fmt::format("{} equation needs an analytic derivative; grid samples have none", to_string(e)));
  double worst = 0;
  for (int j = 0; j < s.grid.nt; ++j)
    for (int i = 0; i < s.grid.nx; ++i) {
      double v = 0;
      bool inside = true;
      for (const auto& [k, c] : L.terms()) {
        int ii = i + k.sx, jj = j + k.st;
        if (ii < 0 || jj < 0 || ii >= s.grid.nx || jj >= s.grid.nt) {
          inside = false;
          break;
        }
        v += c.constant_term().get_d() * std::pow(s.grid.x(i).get_d(), k.x) * std::pow(s.grid.t(j).get_d(), k.t) *
             s.at(ii, jj);
      }
      if (inside) worst = std::max(worst, std::abs(v));
    }
  return worst;
}

/// (Oφ) sampled on the grid.
inline GridSamples apply_symmetry_numeric(const DiffOp& op, const SolutionFamily& f, const GridSpec& g) {
  g.validate();
  f.check_grid(g);
  const ParamValues pv = f.bindings(g);
  DiffOp bound = op.bind(pv);
  GridSamples s{g, {}};
  s.values.reserve(static_cast<std::size_t>(g.nx * g.nt));
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) s.values.push_back(f.apply_d(bound, pv, g.x(i).get_d(), g.t(j).get_d()));
  return s;
}

/// Residual of E applied to Oφ, computed as the normal-ordered product E·O.
inline Residual symmetry_residual(const DiffOp& E, const DiffOp& op, const SolutionFamily& f, const GridSpec& g,
                                  Backend b) {
  return operator_residual(E * op, f, g, b);
}

// ------------------------------------------------------------ evolution

namespace detail {

using cplx = std::complex<double>;

inline std::vector<cplx> dft(const std::vector<cplx>& v, bool inverse) {
  const std::size_t n = v.size();
  std::vector<cplx> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = 0;
    for (std::size_t j = 0; j < n; ++j) s += v[j] * std::polar(1.0, sign * 2 * M_PI * double(j * k % n) / double(n));
    out[k] = inverse ? s / double(n) : s;
  }
  return out;
}

inline void guard(double v, double limit) {
  if (!std::isfinite(v) || std::abs(v) > limit)
    throw Error(ErrorCode::InstabilityDetected, fmt::format("sample magnitude {:.3g} exceeds guard {:.3g}", v, limit));
}

}  // namespace detail

/// Overflow guard for evolved samples.
inline constexpr double kEvolutionGuard = 1e100;

/// Relative size below which a Fourier coefficient is transform roundoff.
inline constexpr double kModeNoiseFloor = 1e-14;

/// Eigenvalue of Dx^2/(2m) on the ring of n sites for Fourier mode j.
inline std::complex<double> ring_eigenvalue(int j, int n, double sigma, double m) {
  std::complex<double> w = std::polar(1.0, 2 * M_PI * j / n);
  std::complex<double> d = (w - 1.0) / sigma;
  return d * d / (2 * m);
}

/// Space lattice on a periodic ring, exact in time: each Fourier mode of the
/// circulant Dx^2/(2m) evolves by exp(λ t). Rows j = 0..steps at spacing dt.
inline GridSamples evolve_space(const std::vector<double>& initial, const GridSpec& g, const Rational& m, int steps,
                                double guard = kEvolutionGuard) {
  g.validate();
  if (sgn(g.sigma) <= 0) throw Error(ErrorCode::ConfigError, "space evolution needs sigma > 0");
  const int n = static_cast<int>(initial.size());
  if (n == 0) throw Error(ErrorCode::ConfigError, "empty initial profile");
  std::vector<detail::cplx> c(initial.begin(), initial.end());
  auto modes = detail::dft(c, false);
  // Modes near ω = -1 grow like exp(8t/(2mσ²)); coefficients at transform
  // roundoff carry no data and are dropped so they cannot be amplified.
  double peak = 0;
  for (const auto& v : modes) peak = std::max(peak, std::abs(v));
  for (auto& v : modes)
    if (std::abs(v) <= kModeNoiseFloor * n * peak) v = 0;
  GridSpec out_grid = g;
  out_grid.nx = n;
  out_grid.nt = steps + 1;
  GridSamples s{out_grid, {}};
  for (int step = 0; step <= steps; ++step) {
    double t = Rational(g.dt() * step).get_d();
    std::vector<detail::cplx> m_t(modes.size());
    for (int j = 0; j < n; ++j)
      m_t[static_cast<std::size_t>(j)] =
          modes[static_cast<std::size_t>(j)] * std::exp(ring_eigenvalue(j, n, g.sigma.get_d(), m.get_d()) * t);
    auto back = detail::dft(m_t, true);
    for (const auto& v : back) {
      detail::guard(v.real(), guard);
      s.values.push_back(v.real());
    }
  }
  return s;
}

/// Time lattice in a monomial basis: φ(·, t+τ) = φ + (τ/2m) dx² φ acting on
/// Taylor coefficients. Returns the coefficients after each step.
inline std::vector<std::vector<double>> evolve_time_series(const std::vector<double>& coeffs, const Rational& tau,
                                                           const Rational& m, int steps,
                                                           double guard = kEvolutionGuard) {
  std::vector<std::vector<double>> out{coeffs};
  const double a = Rational(tau / (2 * m)).get_d();
  for (int s = 0; s < steps; ++s) {
    const auto& c = out.back();
    std::vector<double> next(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      double second = j + 2 < c.size() ? double((j + 2) * (j + 1)) * c[j + 2] : 0.0;
      next[j] = c[j] + a * second;
      detail::guard(next[j], guard);
    }
    out.push_back(std::move(next));
  }
  return out;
}

/// Time lattice on a periodic ring of n sites spaced by sigma (spectral in x):
/// mode j is multiplied by 1 - (τ/2m)(2πj'/L)^2 per step.
inline GridSamples evolve_time(const std::vector<double>& initial, const GridSpec& g, const Rational& m, int steps,
                               double guard = kEvolutionGuard) {
  g.validate();
  if (sgn(g.tau) <= 0) throw Error(ErrorCode::ConfigError, "time evolution needs tau > 0");
  const int n = static_cast<int>(initial.size());
  if (n == 0) throw Error(ErrorCode::ConfigError, "empty initial profile");
  const double L = n * g.dx().get_d();
  std::vector<detail::cplx> c(initial.begin(), initial.end());
  auto modes = detail::dft(c, false);
  GridSpec out_grid = g;
  out_grid.nx = n;
  out_grid.nt = steps + 1;
  GridSamples s{out_grid, {}};
  const double a = Rational(g.tau / (2 * m)).get_d();
  for (int step = 0; step <= steps; ++step) {
    if (step > 0)
      for (int j = 0; j < n; ++j) {
        int jj = j <= n / 2 ? j : j - n;
        double k = 2 * M_PI * jj / L;
        modes[static_cast<std::size_t>(j)] *= 1.0 - a * k * k;
      }
    auto back = detail::dft(modes, true);
    for (const auto& v : back) {
      detail::guard(v.real(), guard);
      s.values.push_back(v.real());
    }
  }
  return s;
}

/// Dispatches on the equation.
inline GridSamples evolve(Equation e, const std::vector<double>& initial, const GridSpec& g, const Rational& m,
                          int steps) {
  return e == Equation::SpaceLattice ? evolve_space(initial, g, m, steps) : evolve_time(initial, g, m, steps);
}

// ------------------------------------------------------------ suite

struct LatticeConfig {
  GridSpec grid;
  Rational mass = Rational(1, 2);
  double tolerance = 1e-10;
  double agreement = 1e-12;   // float vs exact, and circulant vs closed form
  double series_tolerance = 1e-8;
};

namespace detail {

inline CheckRecord lattice_record(std::string id, std::vector<std::string> ids, bool ok, std::string residual,
                                  std::string detail, double ms) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.catalog_ids = std::move(ids);
  r.suite = "lattice";
  r.status = ok ? Status::Pass : Status::Fail;
  r.residual = std::move(residual);
  r.detail = std::move(detail);
  r.timing_ms = ms;
  return r;
}

inline std::string fmt_double(double v) { return fmt::format("{:.3e}", v); }

}  // namespace detail

/// Families solve their equations exactly and in float, and residuals are
/// unchanged by a one-cell lattice translation.
inline CheckReport check_family_residuals(const LatticeConfig& cfg) {
  CheckReport rep;
  for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice}) {
    for (const auto& f : default_families(e, cfg.grid, cfg.mass)) {
      std::string id = fmt::format("lattice/{}/residual/{}", to_string(e), f.id());
      detail::guarded(rep, id, {}, "lattice", [&] {
        Stopwatch sw;
        Residual ex = residual(e, f, cfg.grid, Backend::Exact);
        Residual fl = residual(e, f, cfg.grid, Backend::Float);
        Residual moved = residual(e, f, cfg.grid.translated_x(1), Backend::Exact);
        bool ok = ex.exact_max && sgn(*ex.exact_max) == 0 && fl.max_abs <= cfg.tolerance &&
                  std::abs(fl.max_abs - ex.max_abs) <= cfg.agreement && moved.exact_max == ex.exact_max;
        rep.add(detail::lattice_record(
            id, {}, ok, to_string(*ex.exact_max),
            fmt::format("exact {}; float {}; translated exact {}", to_string(*ex.exact_max),
                        detail::fmt_double(fl.max_abs), to_string(*moved.exact_max)),
            sw.ms()));
      });
    }
  }
  return rep;
}

/// Which equation a realized Casimir is, if either.
inline std::optional<Equation> equation_of(const DiffOp& E) {
  for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice})
    if (E == equation_operator(e)) return e;
  return std::nullopt;
}

/// Every symmetry operator that holds exactly maps each family solution to a
/// solution within tolerance (float), and exactly where eigenvalues allow.
inline CheckReport check_symmetry_numeric(const Catalog& cat, const LatticeConfig& cfg) {
  CheckReport rep;
  for (const auto& table_id : cat.list(EntryKind::SymmetryTable)) {
    const auto& s = cat.get<SymmetryTable>(table_id);
    std::vector<std::string> ids{table_id, s.realization};
    detail::guarded(rep, "lattice/" + table_id + "/resolve", ids, "lattice", [&] {
      const auto& real = cat.get<Realization>(s.realization);
      RealizedAlgebra ra(cat, real);
      DiffOp E = ra.realize(cat.get<Casimir>(s.casimir).element);
      auto eq = equation_of(E);
      if (!eq) {
        CheckRecord info;
        info.check_id = "lattice/" + table_id + "/equation";
        info.catalog_ids = ids;
        info.suite = "lattice";
        info.status = Status::Info;
        info.detail = "Casimir is not a lattice equation: " + E.to_string();
        rep.add(info);
        return;
      }
      auto families = default_families(*eq, cfg.grid, cfg.mass);
      for (const auto& g : ra.presentation().generators) {
        if (!symmetry_residual_op(ra, E, s, g).is_zero()) continue;  // only exactly verified operators
        const DiffOp& op = ra.op(g);
        std::string id = fmt::format("lattice/{}/{}", table_id, g);
        detail::guarded(rep, id, ids, "lattice", [&] {
          Stopwatch sw;
          double worst = 0;
          std::string notes;
          bool ok = true;
          for (const auto& f : families) {
            Residual fl = symmetry_residual(E, op, f, cfg.grid, Backend::Float);
            worst = std::max(worst, fl.max_abs);
            ok = ok && fl.max_abs <= cfg.tolerance;
            try {
              Residual ex = symmetry_residual(E, op, f, cfg.grid, Backend::Exact);
              ok = ok && ex.exact_max && sgn(*ex.exact_max) == 0;
              notes += fmt::format("{}{}: exact {}", notes.empty() ? "" : "; ", f.id(), to_string(*ex.exact_max));
            } catch (const Error& err) {
              if (err.code() != ErrorCode::MissingDerivative) throw;
              notes += fmt::format("{}{}: float only", notes.empty() ? "" : "; ", f.id());
            }
          }
          rep.add(detail::lattice_record(id, ids, ok, detail::fmt_double(worst),
                                         fmt::format("{} equation; {}", to_string(*eq), notes), sw.ms()));
        });
      }
    });
  }
  return rep;
}

/// Single Fourier mode on an 8-site ring against exp(λ t), zero data staying
/// zero, and the time-lattice series evolution against its family.
inline CheckReport check_evolution(const LatticeConfig& cfg) {
  CheckReport rep;
  detail::guarded(rep, "lattice/evolve/space_mode", {}, "lattice", [&] {
    Stopwatch sw;
    const int n = 8, mode = 1, steps = 5;
    GridSpec g = cfg.grid;
    std::vector<double> init(n);
    for (int i = 0; i < n; ++i) init[static_cast<std::size_t>(i)] = std::cos(2 * M_PI * mode * i / n);
    GridSamples s = evolve_space(init, g, cfg.mass, steps);
    double worst = 0;
    for (int step = 0; step <= steps; ++step) {
      double t = Rational(g.dt() * step).get_d();
      auto lp = ring_eigenvalue(mode, n, g.sigma.get_d(), cfg.mass.get_d());
      auto lm = ring_eigenvalue(n - mode, n, g.sigma.get_d(), cfg.mass.get_d());
      for (int i = 0; i < n; ++i) {
        std::complex<double> w = std::polar(1.0, 2 * M_PI * mode * i / n);
        double expect = 0.5 * (w * std::exp(lp * t) + std::conj(w) * std::exp(lm * t)).real();
        worst = std::max(worst, std::abs(s.at(i, step) - expect));
      }
    }
    rep.add(detail::lattice_record("lattice/evolve/space_mode", {}, worst <= cfg.agreement, detail::fmt_double(worst),
                                   "cos mode on an 8-site ring, 5 steps", sw.ms()));
  });
  detail::guarded(rep, "lattice/evolve/zero", {}, "lattice", [&] {
    Stopwatch sw;
    std::vector<double> zero(8, 0.0);
    double worst = 0;
    for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice})
      for (double v : evolve(e, zero, cfg.grid, cfg.mass, 5).values) worst = std::max(worst, std::abs(v));
    rep.add(detail::lattice_record("lattice/evolve/zero", {}, worst == 0.0, detail::fmt_double(worst),
                                   "zero data, both equations", sw.ms()));
  });
  // Truncation at degree d perturbs coefficient j only after (d - j) / 2 steps.
  auto series_case = [&](const std::string& id, double k, bool untouched_only, double tol) {
    detail::guarded(rep, id, {}, "lattice", [&] {
      Stopwatch sw;
      const int degree = 12, steps = 5;
      std::vector<double> c(degree + 1);
      double fact = 1;
      for (int j = 0; j <= degree; ++j) {
        if (j > 0) fact *= j;
        c[static_cast<std::size_t>(j)] = std::pow(k, j) / fact;
      }
      auto hist = evolve_time_series(c, cfg.grid.tau, cfg.mass, steps);
      double rho = 1 + Rational(cfg.grid.tau / (2 * cfg.mass)).get_d() * k * k;
      double worst = 0;
      for (int s = 0; s <= steps; ++s)
        for (int j = 0; j <= (untouched_only ? degree - 2 * s : degree); ++j)
          worst = std::max(worst, std::abs(hist[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] -
                                           c[static_cast<std::size_t>(j)] * std::pow(rho, s)));
      rep.add(detail::lattice_record(
          id, {}, worst <= tol, detail::fmt_double(worst),
          fmt::format("exp({}x) truncated at degree 12, 5 steps, {} coefficients", k,
                      untouched_only ? "truncation-free" : "all"),
          sw.ms()));
    });
  };
  series_case("lattice/evolve/time_series", 0.5, false, cfg.series_tolerance);
  series_case("lattice/evolve/time_series_exact_range", 1.0, true, cfg.agreement);
  return rep;
}

inline CheckReport run_lattice_suite(const Catalog& cat, const LatticeConfig& cfg = {}) {
  CheckReport rep = check_family_residuals(cfg);
  rep.append(check_symmetry_numeric(cat, cfg));
  rep.append(check_evolution(cfg));
  return rep;
}

}  // namespace jordan
