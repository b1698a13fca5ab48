#include "ccbif/solver.h"
#include "ccbif/augmented.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ccbif {

template <class T>
CompiledSystemT<T>::CompiledSystemT(const PolySystem& sys) : n_(sys.unknowns()) {
  for (const auto& e : sys.equations) {
    std::vector<Term> terms;
    for (const auto& [mono, c] : e.terms()) {
      Term t{T(c.get_d()), std::uint32_t(factors_.size()), 0};
      for (auto f : mono.factors()) {
        factors_.push_back(f);
        max_degree_ = std::max<unsigned>(max_degree_, f.second);
      }
      t.end = std::uint32_t(factors_.size());
      terms.push_back(t);
    }
    eqs_.push_back(std::move(terms));
  }
}

template <class T>
void CompiledSystemT<T>::powers(const T* x, T m, std::vector<T>& pw) const {
  const std::size_t stride = max_degree_ + 1;
  pw.assign((n_ + 1) * stride, T(1));
  for (std::size_t v = 0; v <= n_; ++v) {
    T base = v < n_ ? x[v] : m;
    for (unsigned e = 1; e <= max_degree_; ++e) pw[v * stride + e] = pw[v * stride + e - 1] * base;
  }
}

template <class T>
void CompiledSystemT<T>::eval(const T* x, T m, T* f) const {
  std::vector<T> pw;
  powers(x, m, pw);
  const std::size_t stride = max_degree_ + 1;
  for (std::size_t i = 0; i < eqs_.size(); ++i) {
    T acc = 0;
    for (const auto& t : eqs_[i]) {
      T v = t.coef;
      for (auto k = t.begin; k < t.end; ++k) v *= pw[factors_[k].first * stride + factors_[k].second];
      acc += v;
    }
    f[i] = acc;
  }
}

template <class T>
void CompiledSystemT<T>::eval_scale(const T* x, T m, T* s) const {
  std::vector<T> pw;
  powers(x, m, pw);
  const std::size_t stride = max_degree_ + 1;
  for (std::size_t i = 0; i < eqs_.size(); ++i) {
    T acc = 0;
    for (const auto& t : eqs_[i]) {
      T v = t.coef;
      for (auto k = t.begin; k < t.end; ++k) v *= pw[factors_[k].first * stride + factors_[k].second];
      acc += std::abs(v);
    }
    s[i] = acc;
  }
}

template <class T>
void CompiledSystemT<T>::eval_jacobian(const T* x, T m, T* f, T* jac) const {
  std::vector<T> pw;
  powers(x, m, pw);
  const std::size_t stride = max_degree_ + 1;
  std::fill(jac, jac + n_ * n_, T(0));
  for (std::size_t i = 0; i < eqs_.size(); ++i) {
    T acc = 0;
    T* row = jac + i * n_;
    for (const auto& t : eqs_[i]) {
      T v = t.coef;
      for (auto k = t.begin; k < t.end; ++k) v *= pw[factors_[k].first * stride + factors_[k].second];
      acc += v;
      for (auto k = t.begin; k < t.end; ++k) {
        auto [var, e] = factors_[k];
        if (var >= n_) continue;
        T d = t.coef * T(e) * pw[var * stride + e - 1];
        for (auto l = t.begin; l < t.end; ++l)
          if (l != k) d *= pw[factors_[l].first * stride + factors_[l].second];
        row[var] += d;
      }
    }
    f[i] = acc;
  }
}

template <class T>
void CompiledSystemT<T>::eval_dm(const T* x, T m, T* fm) const {
  std::vector<T> pw;
  powers(x, m, pw);
  const std::size_t stride = max_degree_ + 1;
  for (std::size_t i = 0; i < eqs_.size(); ++i) {
    T acc = 0;
    for (const auto& t : eqs_[i])
      for (auto k = t.begin; k < t.end; ++k) {
        auto [var, e] = factors_[k];
        if (var != n_) continue;
        T d = t.coef * T(e) * pw[var * stride + e - 1];
        for (auto l = t.begin; l < t.end; ++l)
          if (l != k) d *= pw[factors_[l].first * stride + factors_[l].second];
        acc += d;
      }
    fm[i] = acc;
  }
}

template class CompiledSystemT<double>;
template class CompiledSystemT<long double>;

namespace {

using MatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// First index of the distances within the unknowns.
std::size_t distance_offset(std::size_t n) { return n == 8 ? 2 : 0; }

bool positive(const std::vector<double>& x) {
  for (std::size_t k = distance_offset(x.size()); k < x.size(); ++k)
    if (!(x[k] > 0)) return false;
  return true;
}

double inf_norm(const std::vector<double>& v) {
  double r = 0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double rel_residual(const CompiledSystem& f, const std::vector<double>& x, double m, const std::vector<double>& fx) {
  std::vector<double> s(fx.size());
  f.eval_scale(x.data(), m, s.data());
  double r = 0;
  for (std::size_t i = 0; i < fx.size(); ++i) r = std::max(r, std::abs(fx[i]) / std::max(s[i], 1e-300));
  return r;
}

}  // namespace

NewtonResult newton(const CompiledSystem& f, std::vector<double> x, double m, const NewtonOptions& opt) {
  const std::size_t n = f.unknowns();
  NewtonResult res;
  if (x.size() != n) throw std::invalid_argument("newton: dimension mismatch");
  for (double v : x)
    if (!std::isfinite(v)) {
      res.reason = "non-finite start";
      res.x = x;
      return res;
    }
  std::vector<double> fx(n), jac(n * n), fn(n);
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0;
    for (double a : v) s += a * a;
    return s;
  };
  double step = INFINITY;
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    f.eval_jacobian(x.data(), m, fx.data(), jac.data());
    Eigen::Map<MatD> J(jac.data(), Eigen::Index(n), Eigen::Index(n));
    Eigen::PartialPivLU<MatD> lu(J);
    res.det = lu.determinant();
    double rr = rel_residual(f, x, m, fx);
    if (rr < opt.tol && step < 1e-8 * (1 + inf_norm(x))) {
      res.converged = true;
      res.residual = inf_norm(fx);
      res.rel_residual = rr;
      res.x = x;
      return res;
    }
    if (!std::isfinite(res.det) || res.det == 0) {
      res.reason = "singular Jacobian";
      break;
    }
    Eigen::VectorXd d = lu.solve(Eigen::Map<Eigen::VectorXd>(fx.data(), Eigen::Index(n)));
    if (!d.allFinite()) {
      res.reason = "singular Jacobian";
      break;
    }
    // Backtracking on ‖F‖₂, also keeping distances positive.
    double f0 = norm2(fx), t = 1;
    std::vector<double> xn(n);
    bool accepted = false;
    for (int k = 0; k < 12; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - t * d(Eigen::Index(i));
      if (opt.require_positive && !positive(xn)) continue;
      f.eval(xn.data(), m, fn.data());
      double f1 = norm2(fn);
      if (std::isfinite(f1) && (f1 < f0 || f0 < 1e-28)) {
        accepted = true;
        break;
      }
    }
    if (!accepted && rr < opt.tol) {
      // Already at the rounding floor: no step can lower ‖F‖ further.
      res.converged = true;
      res.residual = inf_norm(fx);
      res.rel_residual = rr;
      res.x = x;
      return res;
    }
    if (!accepted) {
      res.reason = opt.require_positive && !positive(xn) ? "positivity violated" : "no descent";
      break;
    }
    step = t * d.lpNorm<Eigen::Infinity>();
    x = xn;
    if (inf_norm(x) > opt.max_norm) {
      res.reason = "divergence";
      break;
    }
  }
  if (res.reason.empty()) res.reason = "iteration limit";
  res.x = x;
  f.eval(x.data(), m, fx.data());
  res.residual = inf_norm(fx);
  res.rel_residual = rel_residual(f, x, m, fx);
  return res;
}

std::array<double, 6> SolutionRecord::distances() const {
  std::array<double, 6> r{};
  std::size_t o = distance_offset(x.size());
  for (std::size_t k = 0; k < 6; ++k) r[k] = x[o + k];
  return r;
}

nlohmann::json SolutionRecord::to_json() const {
  nlohmann::json j;
  j["system"] = ccbif::to_string(kind);
  j["family"] = ccbif::to_string(family);
  j["m"] = m;
  j["x"] = x;
  j["residual"] = residual;
  j["det"] = det;
  j["isotropy"] = isotropy.label;
  j["collinear"] = collinear;
  if (!certificate_id.empty()) j["certificate_id"] = certificate_id;
  return j;
}

SolutionRecord SolutionRecord::from_json(const nlohmann::json& j) {
  SolutionRecord s;
  s.kind = parse_system_kind(j.at("system").get<std::string>());
  s.family = parse_mass_pattern(j.at("family").get<std::string>());
  s.m = j.at("m").get<double>();
  s.x = j.at("x").get<std::vector<double>>();
  s.residual = j.value("residual", 0.0);
  s.det = j.value("det", 0.0);
  s.isotropy.label = j.value("isotropy", "");
  s.collinear = j.value("collinear", false);
  s.certificate_id = j.value("certificate_id", "");
  return s;
}

std::size_t Enumeration::collinear() const {
  return std::size_t(std::count_if(solutions.begin(), solutions.end(), [](const SolutionRecord& s) { return s.collinear; }));
}

Enumeration multistart_enumerate(const PolySystem& sys, double m, const EnumerateOptions& opt) {
  if (opt.budget < 1) throw std::invalid_argument("multistart_enumerate: budget must be at least 1");
  const CompiledSystem f(sys);
  const std::size_t n = sys.unknowns();
  const bool dz = sys.kind == SystemKind::Dziobek;
  const auto masses = sys.masses.at(m);
  const Group* group = sys.masses.pattern == MassPattern::General ? nullptr : &Group::for_pattern(sys.masses.pattern);
  NewtonOptions nopt;
  nopt.tol = opt.residual_tol;

  Enumeration out;
  std::vector<std::vector<double>> found;
  auto is_new = [&](const std::vector<double>& x) {
    for (const auto& y : found) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(x[i] - y[i]));
      if (d < opt.dedup_tol) return false;
    }
    return true;
  };
  auto accept = [&](const NewtonResult& r) {
    if (!r.converged || !positive(r.x)) return false;
    SolutionRecord s;
    s.kind = sys.kind;
    s.family = sys.masses.pattern;
    s.m = m;
    s.x = r.x;
    s.residual = r.residual;
    s.det = r.det;
    s.collinear = is_collinear(s.distances());
    if (dz) {
      // Collinear points form a continuum in μ; they are not strictly planar solutions.
      if (s.collinear) return false;
      if (std::abs(cayley_menger(s.distances())) >= opt.cm_tol) return false;
    }
    if (!is_new(s.x)) return false;
    if (group) s.isotropy = isotropy(s.x, *group, 1e-9);
    found.push_back(s.x);
    out.solutions.push_back(std::move(s));
    return true;
  };
  auto start_from = [&](const std::array<double, 6>& r) {
    std::vector<double> x0;
    if (dz) {
      auto z = to_dziobek(r, masses);
      x0.assign(z.begin(), z.end());
    } else {
      auto z = to_ac_scale(r, masses);
      x0.assign(z.begin(), z.end());
    }
    return x0;
  };
  // Newton runs are independent; results are merged in start order so the
  // outcome does not depend on the thread count.
  auto run_batch = [&](const std::vector<std::vector<double>>& starts) {
    std::vector<NewtonResult> res(starts.size());
    const std::size_t T = std::max<std::size_t>(1, std::min<std::size_t>(opt.threads, starts.size()));
    auto work = [&](std::size_t t) {
      for (std::size_t i = t; i < starts.size(); i += T) res[i] = newton(f, starts[i], m, nopt);
    };
    if (T == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < T; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    for (const auto& r : res) {
      ++out.starts;
      if (r.converged) ++out.converged;
      accept(r);
    }
  };

  std::vector<std::vector<double>> batch;
  for (const auto& s : opt.seeds) {
    if (s.size() == n) {
      batch.push_back(s);
    } else if (s.size() == 8 || s.size() == 6) {
      std::array<double, 6> r{};
      for (std::size_t k = 0; k < 6; ++k) r[k] = s[s.size() - 6 + k];
      batch.push_back(start_from(r));
    }
  }
  run_batch(batch);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(opt.lo, opt.hi);
  constexpr std::size_t kBatch = 4096;
  for (std::size_t b = 0; b < opt.budget; b += kBatch) {
    batch.clear();
    for (std::size_t k = b; k < std::min(opt.budget, b + kBatch); ++k) {
      std::array<double, 6> r;
      for (auto& v : r) v = U(rng);
      batch.push_back(start_from(r));
    }
    run_batch(batch);
  }

  if (opt.symmetry_closure && group) {
    for (std::size_t i = 0; i < out.solutions.size(); ++i)
      for (const auto& g : group->elements()) {
        if (g.is_identity()) continue;
        auto r = newton(f, act(g, out.solutions[i].x), m, nopt);
        accept(r);
      }
  }
  // Lexicographic on coordinates rounded to 1e-8, so that symmetric copies
  // differing only by rounding noise in λ₀, μ are ordered by their distances.
  auto key = [](const std::vector<double>& x) {
    std::vector<double> k;
    for (double v : x) k.push_back(std::round(v * 1e8));
    return k;
  };
  std::sort(out.solutions.begin(), out.solutions.end(), [&](const SolutionRecord& a, const SolutionRecord& b) {
    auto ka = key(a.x), kb = key(b.x);
    return ka != kb ? ka < kb : a.x < b.x;
  });
  return out;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::RangeEnd: return "range-end";
    case Termination::FoldDetected: return "fold-detected";
    case Termination::Lost: return "lost";
  }
  return "?";
}

namespace {

Termination parse_termination(const std::string& s) {
  for (auto t : {Termination::RangeEnd, Termination::FoldDetected, Termination::Lost})
    if (to_string(t) == s) return t;
  throw std::invalid_argument("unknown termination '" + s + "'");
}

std::vector<std::string> coordinate_names(std::size_t n) {
  std::vector<std::string> names;
  if (n == 8) names = {"lambda0", "mu"};
  for (const char* p : {"r12", "r13", "r14", "r23", "r24", "r34"}) names.emplace_back(p);
  return names;
}

}  // namespace

std::string Branch::to_csv() const {
  std::ostringstream os;
  os << "# family=" << ccbif::to_string(family) << " system=" << ccbif::to_string(kind)
     << " termination=" << ccbif::to_string(termination) << "\n";
  const std::size_t n = points.empty() ? (kind == SystemKind::Dziobek ? 8 : 6) : points.front().x.size();
  os << "m";
  for (const auto& c : coordinate_names(n)) os << "," << c;
  os << ",det,residual,isotropy\n";
  os << std::setprecision(17);
  for (const auto& p : points) {
    os << p.m;
    for (double v : p.x) os << "," << v;
    os << "," << p.det << "," << p.residual << ",\"" << p.isotropy << "\"\n";
  }
  return os.str();
}

Branch Branch::from_csv(const std::string& text) {
  Branch b;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  std::size_t ncols = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string kv;
      while (hs >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        if (k == "family") b.family = parse_mass_pattern(v);
        else if (k == "system") b.kind = parse_system_kind(v);
        else if (k == "termination") b.termination = parse_termination(v);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (!header) {
      if (cells.empty() || cells[0] != "m") throw std::invalid_argument("branch CSV: missing header");
      ncols = cells.size();
      if (ncols != 10 && ncols != 12) throw std::invalid_argument("branch CSV: unexpected column count");
      header = true;
      continue;
    }
    // The isotropy label is the last field and may be quoted (it contains commas).
    std::size_t cut = 0;
    for (std::size_t k = 0; k + 1 < ncols; ++k) {
      cut = line.find(',', cut);
      if (cut == std::string::npos) throw std::invalid_argument("branch CSV: malformed row '" + line + "'");
      ++cut;
    }
    std::string iso = line.substr(cut);
    if (iso.size() >= 2 && iso.front() == '"' && iso.back() == '"') iso = iso.substr(1, iso.size() - 2);
    else if (iso.find_first_of(",\"") != std::string::npos)
      throw std::invalid_argument("branch CSV: malformed row '" + line + "'");
    cells.resize(ncols - 1);
    BranchPoint p;
    try {
      p.m = std::stod(cells.at(0));
      for (std::size_t k = 1; k + 3 < ncols; ++k) p.x.push_back(std::stod(cells.at(k)));
      p.det = std::stod(cells.at(ncols - 3));
      p.residual = std::stod(cells.at(ncols - 2));
    } catch (const std::exception&) {
      throw std::invalid_argument("branch CSV: non-numeric value in '" + line + "'");
    }
    p.isotropy = iso;
    b.points.push_back(std::move(p));
  }
  if (!header) throw std::invalid_argument("branch CSV: empty");
  return b;
}

Branch continue_branch(const PolySystem& sys, const std::vector<double>& x0, double m0, double m1,
                       const ContinuationOptions& opt) {
  const CompiledSystem f(sys);
  const Group* group = sys.masses.pattern == MassPattern::General ? nullptr : &Group::for_pattern(sys.masses.pattern);
  Branch br;
  br.family = sys.masses.pattern;
  br.kind = sys.kind;
  auto first = newton(f, x0, m0, opt.newton);
  if (!first.converged) throw std::runtime_error("continue_branch: corrector failed at the start (" + first.reason + ")");
  auto record = [&](double m, const NewtonResult& r) {
    br.points.push_back({m, r.x, r.det, r.residual, group ? isotropy(r.x, *group, 1e-7).label : ""});
  };
  record(m0, first);
  const double dir = m1 >= m0 ? 1 : -1;
  const double det0 = std::abs(first.det);
  double h = opt.initial_step;
  int successes = 0;
  while (true) {
    const auto& cur = br.points.back();
    if (dir * (m1 - cur.m) <= 0) break;
    double hs = std::min(h, dir * (m1 - cur.m));
    double m = cur.m + dir * hs;
    std::vector<double> pred = cur.x;
    if (br.points.size() >= 2) {
      const auto& prev = br.points[br.points.size() - 2];
      double s = (m - cur.m) / (cur.m - prev.m);
      for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = cur.x[i] + s * (cur.x[i] - prev.x[i]);
    }
    auto r = newton(f, pred, m, opt.newton);
    bool ok = r.converged;
    if (ok) {
      double disp = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) disp = std::max(disp, std::abs(r.x[i] - cur.x[i]));
      ok = disp <= opt.max_displacement;
    }
    // A change of isotropy means the corrector jumped across a symmetry-breaking
    // bifurcation onto another branch.
    if (ok && group) ok = isotropy(r.x, *group, 1e-7).label == br.points.front().isotropy;
    if (ok) {
      record(m, r);
      if (++successes >= 3) {
        h = std::min(2 * h, opt.max_step);
        successes = 0;
      }
      continue;
    }
    successes = 0;
    h *= 0.5;
    if (h < opt.min_step) {
      bool near_singular = det0 > 0 && std::abs(cur.det) < opt.fold_ratio * det0;
      br.termination = near_singular ? Termination::FoldDetected : Termination::Lost;
      return br;
    }
  }
  br.termination = Termination::RangeEnd;
  return br;
}

CountRow count_row(MassPattern family, double m, const EnumerateOptions& opt) {
  MassParams mp = family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal();
  CountRow row;
  row.m = m;
  row.budget = opt.budget;
  auto dz = multistart_enumerate(build_dziobek(mp), m, opt);
  auto ac = multistart_enumerate(build_ac(mp), m, opt);
  row.dziobek = dz.solutions.size();
  row.ac = ac.solutions.size();
  row.collinear = ac.collinear();
  row.distinct = row.ac > 0 ? row.ac - 1 : 0;
  return row;
}

std::vector<std::vector<double>> load_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open seed file " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<std::vector<double>> out;
  // Either {"seeds": [...]} or the solution-set layout written by `ccbif solve`.
  for (const auto& s : j.contains("seeds") ? j.at("seeds") : j.at("solutions"))
    out.push_back(s.at("x").get<std::vector<double>>());
  return out;
}

KrawczykCertificate certify_solution(const PolySystem& sys, const mpq_class& m, const std::vector<double>& x,
                                     mpfr_prec_t precision) {
  FixedParameterSystem f(sys, m);
  PrecisionScope scope(precision);
  bool converged = false;
  auto y = newton_refine(f, to_reals(x), &converged);
  if (!converged) y = to_reals(x);
  return krawczyk_sweep(f, y, precision, std::max<mpfr_prec_t>(precision, 1024));
}

}  // namespace ccbif
