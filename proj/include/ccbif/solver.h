#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccbif/equations.h"
#include "ccbif/krawczyk.h"
#include "ccbif/symmetry.h"

namespace ccbif {

// Flattened form of a PolySystem for fast evaluation of F and D_xF at fixed m.
template <class T>
class CompiledSystemT {
 public:
  explicit CompiledSystemT(const PolySystem& sys);

  std::size_t unknowns() const { return n_; }
  // x holds the unknowns; m is the parameter value.
  void eval(const T* x, T m, T* f) const;
  // Row-major n×n Jacobian (unknowns only) and F together.
  void eval_jacobian(const T* x, T m, T* f, T* jac) const;
  // ∂F/∂m.
  void eval_dm(const T* x, T m, T* fm) const;
  // Per-equation magnitude Σ|c·x^α|, for relative residuals.
  void eval_scale(const T* x, T m, T* s) const;

 private:
  struct Term {
    T coef;
    std::uint32_t begin, end;  // range in factors_
  };
  std::size_t n_ = 0;
  unsigned max_degree_ = 0;
  std::vector<std::vector<Term>> eqs_;
  std::vector<std::pair<std::uint16_t, std::uint16_t>> factors_;
  void powers(const T* x, T m, std::vector<T>& pw) const;
};

using CompiledSystem = CompiledSystemT<double>;

struct NewtonOptions {
  double tol = 1e-10;     // relative residual bound
  int max_iter = 60;
  bool require_positive = true;  // distances must stay > 0
  double max_norm = 1e3;         // divergence guard
};

struct NewtonResult {
  bool converged = false;
  std::vector<double> x;
  double residual = 0;      // ∞-norm of F
  double rel_residual = 0;  // max_i |F_i| / Σ|terms_i|
  double det = 0;
  int iterations = 0;
  std::string reason;
};

NewtonResult newton(const CompiledSystem& f, std::vector<double> x0, double m, const NewtonOptions& opt = {});

struct SolutionRecord {
  SystemKind kind = SystemKind::Dziobek;
  MassPattern family = MassPattern::ThreeEqual;
  double m = 1;
  std::vector<double> x;
  double residual = 0;
  double det = 0;
  IsotropyTag isotropy;
  bool collinear = false;
  std::string certificate_id;

  std::array<double, 6> distances() const;
  nlohmann::json to_json() const;
  static SolutionRecord from_json(const nlohmann::json& j);
};

struct EnumerateOptions {
  std::size_t budget = 100000;
  std::uint64_t seed = 20240601;
  double lo = 0.2, hi = 3.0;  // start box for the distances
  double dedup_tol = 1e-6;
  double residual_tol = 1e-10;
  double cm_tol = 1e-9;
  bool symmetry_closure = true;
  unsigned threads = 1;
  // Extra starting points (e.g. stored seeds), tried before the random ones.
  std::vector<std::vector<double>> seeds;
};

struct Enumeration {
  std::vector<SolutionRecord> solutions;  // sorted lexicographically
  std::size_t starts = 0;
  std::size_t converged = 0;
  std::size_t collinear() const;
};

Enumeration multistart_enumerate(const PolySystem& sys, double m, const EnumerateOptions& opt = {});

enum class Termination { RangeEnd, FoldDetected, Lost };
std::string to_string(Termination t);

struct BranchPoint {
  double m;
  std::vector<double> x;
  double det;
  double residual;
  std::string isotropy;
};

struct Branch {
  MassPattern family = MassPattern::ThreeEqual;
  SystemKind kind = SystemKind::Dziobek;
  std::vector<BranchPoint> points;
  Termination termination = Termination::RangeEnd;
  std::string to_csv() const;
  static Branch from_csv(const std::string& text);
};

struct ContinuationOptions {
  double initial_step = 1e-3;
  double max_step = 1e-2;
  double min_step = 1e-10;
  double fold_ratio = 1e-2;     // |det| relative to its value at m0
  double max_displacement = 0.1;  // per step, ∞-norm, guards against branch jumping
  NewtonOptions newton;
};

Branch continue_branch(const PolySystem& sys, const std::vector<double>& x0, double m0, double m1,
                       const ContinuationOptions& opt = {});

struct CountRow {
  double m;
  std::size_t dziobek = 0, ac = 0, distinct = 0, collinear = 0;
  std::size_t budget = 0;
};

CountRow count_row(MassPattern family, double m, const EnumerateOptions& opt = {});

// Krawczyk certificate of an isolated solution at an exact mass value; the
// guess is Newton-refined at the working precision first.
KrawczykCertificate certify_solution(const PolySystem& sys, const mpq_class& m, const std::vector<double>& x,
                                     mpfr_prec_t precision = 256);

// Stored equal-mass seeds (Dziobek coordinates) shipped with the repository.
std::vector<std::vector<double>> load_seeds(const std::string& path);

}  // namespace ccbif
