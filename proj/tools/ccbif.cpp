// ccbif: command-line front end.
//
// Exit codes: 0 success, 2 usage/config error, 3 inconclusive certification,
// 4 internal numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ccbif/bifurcation.h"
#include "ccbif/lyapunov_schmidt.h"
#include "ccbif/solver.h"

using namespace ccbif;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kConfig = 2, kInconclusive = 3, kNumeric = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Inconclusive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned thread_count() {
  const char* e = std::getenv("CCBIF_THREADS");
  if (!e || !*e) return 1;
  char* end = nullptr;
  long n = std::strtol(e, &end, 10);
  if (*end || n < 1 || n > 1024) throw ConfigError("CCBIF_THREADS must be an integer in [1, 1024]");
  return unsigned(n);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

// --- masses -----------------------------------------------------------------

struct MassArgs {
  std::string family = "three-equal";
  double m = 1.0;
  std::optional<double> mi[4];

  void add(CLI::App* app) {
    app->add_option("--family", family, "three-equal: (1,1,1,m); two-pairs: (1,1,m,m)")
        ->check(CLI::IsMember({"three-equal", "two-pairs"}))
        ->capture_default_str();
    app->add_option("--m", m, "mass parameter")->capture_default_str();
    for (int i = 0; i < 4; ++i)
      app->add_option("--m" + std::to_string(i + 1), mi[i], "mass of body " + std::to_string(i + 1));
  }

  // --m4 alone sets the parameter of the three-equal family; any of --m1..--m3
  // switches to four explicit masses (remaining ones default to 1).
  bool general() const { return mi[0] || mi[1] || mi[2]; }

  double parameter() const {
    double v = (!general() && mi[3]) ? *mi[3] : m;
    return v;
  }

  MassParams params() const {
    for (const auto& v : mi)
      if (v && !(*v > 0)) throw ConfigError("masses must be positive");
    if (!(parameter() > 0) || !std::isfinite(parameter())) throw ConfigError("masses must be positive");
    if (general()) {
      std::array<mpq_class, 4> q;
      for (int i = 0; i < 4; ++i) q[i] = mpq_class(mi[i].value_or(1.0));
      return MassParams::general(q);
    }
    if (mi[3] && family != "three-equal") throw ConfigError("--m4 alone implies --family three-equal");
    return family == "two-pairs" ? MassParams::two_pairs() : MassParams::three_equal();
  }

  std::array<double, 4> numeric() const { return params().at(parameter()); }
};

PolySystem build(SystemKind k, const MassParams& mp) { return k == SystemKind::Dziobek ? build_dziobek(mp) : build_ac(mp); }

json defaults_json() {
  EnumerateOptions e;
  NewtonOptions n;
  ContinuationOptions c;
  LocateOptions l;
  return {{"precision", l.precision},
          {"max_precision", l.max_precision},
          {"budget", e.budget},
          {"seed", e.seed},
          {"start_box", {e.lo, e.hi}},
          {"newton_tol", n.tol},
          {"dedup_tol", e.dedup_tol},
          {"cm_tol", e.cm_tol},
          {"collinear_tol", 1e-8},
          {"symmetry_tol", 1e-9},
          {"continuation",
           {{"initial_step", c.initial_step},
            {"max_step", c.max_step},
            {"min_step", c.min_step},
            {"fold_ratio", c.fold_ratio}}}};
}

json header(const std::string& cmd, const MassArgs* ma, json run) {
  json h;
  h["tool"] = "ccbif";
  h["command"] = cmd;
  if (ma) {
    auto mp = ma->params();
    h["family"] = to_string(mp.pattern);
    h["m"] = ma->parameter();
    h["masses"] = mp.at(ma->parameter());
  }
  h["run"] = std::move(run);
  h["defaults"] = defaults_json();
  return h;
}

std::string csv_header(const json& h) {
  std::ostringstream os;
  os << "# ccbif " << h.at("command").get<std::string>();
  if (h.contains("family")) os << " family_tag=" << h["family"].get<std::string>() << " m_param=" << h["m"].dump();
  for (auto& [k, v] : h.at("run").items()) os << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
  os << "\n# defaults " << h.at("defaults").dump() << "\n";
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Values like 1e-3 print identically whatever the locale or platform.
std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// --- solve ------------------------------------------------------------------

struct SolveArgs {
  MassArgs mass;
  std::string system = "dziobek";
  std::size_t budget = 100000;
  std::uint64_t seed = 20240601;
  std::string seeds;
  bool certify = false;
  int precision = 256;
  std::string output;
};

int cmd_solve(const SolveArgs& a) {
  const MassParams mp = a.mass.params();
  if (a.budget < 1) throw ConfigError("budget must be at least 1");
  const SystemKind kind = parse_system_kind(a.system);
  PolySystem sys = build(kind, mp);
  EnumerateOptions opt;
  opt.budget = a.budget;
  opt.seed = a.seed;
  opt.threads = thread_count();
  if (!a.seeds.empty()) opt.seeds = load_seeds(a.seeds);
  const double m = a.mass.parameter();
  Enumeration e = multistart_enumerate(sys, m, opt);

  bool all_certified = true;
  if (a.certify) {
    const mpq_class mq(m);
    for (auto& s : e.solutions) {
      auto c = certify_solution(sys, mq, s.x, a.precision);
      if (c.verdict == Verdict::UniqueZero) s.certificate_id = fingerprint(c);
      else all_certified = false;
    }
  }

  json out;
  out["header"] = header("solve", &a.mass,
                         {{"system", a.system}, {"budget", a.budget}, {"seed", a.seed}, {"certify", a.certify},
                          {"precision", a.precision}, {"seeds", a.seeds}});
  json sols = json::array();
  for (const auto& s : e.solutions) sols.push_back(s.to_json());
  json orbits = json::array();
  if (mp.pattern != MassPattern::General) {
    std::vector<std::vector<double>> xs;
    for (const auto& s : e.solutions) xs.push_back(s.x);
    for (const auto& o : orbit_dedup(xs, Group::for_pattern(mp.pattern)))
      orbits.push_back({{"representative", o.representative}, {"size", o.size}, {"isotropy", o.isotropy.label},
                        {"members", o.members}});
  }
  out["summary"] = {{"solutions", e.solutions.size()},
                    {"collinear", e.collinear()},
                    {"orbits", orbits.size()},
                    {"starts", e.starts},
                    {"converged", e.converged}};
  out["solutions"] = std::move(sols);
  out["orbits"] = std::move(orbits);
  write_out(a.output, dump(out));
  if (!a.output.empty() && a.output != "-")
    std::cout << e.solutions.size() << " solutions (" << e.collinear() << " collinear, " << out["orbits"].size()
              << " orbits) written to " << a.output << "\n";
  if (!all_certified) {
    std::cerr << "some solutions could not be certified\n";
    return kInconclusive;
  }
  return kOk;
}

// --- verify (solution sets) -------------------------------------------------

int cmd_verify(const std::string& path, int precision) {
  json j = read_json(path);
  if (!j.contains("solutions") || !j["solutions"].is_array()) throw ConfigError(path + ": no solutions array");
  std::optional<MassParams> general;
  if (j.contains("header") && j["header"].value("family", "") == "general") {
    auto ms = j["header"].at("masses").get<std::vector<double>>();
    general = MassParams::general({mpq_class(ms.at(0)), mpq_class(ms.at(1)), mpq_class(ms.at(2)), mpq_class(ms.at(3))});
  }
  std::map<std::string, PolySystem> cache;
  std::size_t ok = 0, n = 0;
  for (const auto& sj : j["solutions"]) {
    SolutionRecord s;
    try {
      s = SolutionRecord::from_json(sj);
    } catch (const std::exception& e) {
      throw ConfigError(path + ": malformed solution record: " + e.what());
    }
    MassParams mp = general ? *general
                            : (s.family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal());
    std::string key = to_string(s.kind) + to_string(mp.pattern);
    if (!cache.count(key)) cache.emplace(key, build(s.kind, mp));
    auto c = certify_solution(cache.at(key), mpq_class(s.m), s.x, precision);
    std::string id = c.verdict == Verdict::UniqueZero ? fingerprint(c) : "";
    bool good = c.verdict == Verdict::UniqueZero && (s.certificate_id.empty() || s.certificate_id == id);
    std::cout << std::setw(3) << n << "  " << to_string(c.verdict) << "  " << (id.empty() ? "-" : id);
    if (!s.certificate_id.empty() && s.certificate_id != id) std::cout << "  (stored " << s.certificate_id << ")";
    std::cout << (good ? "  ok" : "  FAILED") << "\n";
    ok += good;
    ++n;
  }
  std::cout << ok << "/" << n << " solutions verified\n";
  return ok == n ? kOk : kInconclusive;
}

// --- verify-certificate -----------------------------------------------------

int cmd_verify_certificate(const std::string& path) {
  json j = read_json(path);
  if (j.contains("certificate")) j = j["certificate"];
  BifurcationCertificate c;
  try {
    c = BifurcationCertificate::from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": not a bifurcation certificate: " + e.what());
  }
  std::string why;
  if (verify_bifurcation(c, &why)) {
    std::cout << "certificate verified: " << to_string(c.classification) << " at m in " << c.m().str(30) << "\n";
    return kOk;
  }
  std::cout << "certificate rejected: " << why << "\n";
  return kInconclusive;
}

// --- classify ---------------------------------------------------------------

struct ClassifyArgs {
  MassArgs mass;
  std::string guess;
  std::string branch;
  std::string restriction = "auto";
  int precision = 256;
  int max_precision = 1024;
  double max_distance = 0.05;
  std::string format = "json";
  std::string output;
};

// Guess from a branch file: the interpolated det sign change if there is one,
// otherwise the sample with the smallest |det|.
std::vector<double> guess_from_branch(const Branch& b) {
  if (b.kind != SystemKind::Dziobek) throw ConfigError("classify needs a Dziobek branch");
  if (b.points.empty()) throw ConfigError("branch file has no points");
  auto with_m = [](const BranchPoint& p) {
    auto g = p.x;
    g.push_back(p.m);
    return g;
  };
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    const auto &p = b.points[i - 1], &q = b.points[i];
    if (p.det * q.det < 0) {
      double t = p.det / (p.det - q.det);
      auto g = with_m(p), h = with_m(q);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += t * (h[k] - g[k]);
      return g;
    }
  }
  auto it = std::min_element(b.points.begin(), b.points.end(),
                             [](const BranchPoint& p, const BranchPoint& q) { return std::abs(p.det) < std::abs(q.det); });
  return with_m(*it);
}

int cmd_classify(const ClassifyArgs& a) {
  const MassParams mp = a.mass.params();
  if (mp.pattern == MassPattern::General) throw ConfigError("classify needs --family three-equal or two-pairs");
  if (a.guess.empty() == a.branch.empty()) throw ConfigError("give exactly one of --guess and --branch");
  if (a.precision < 64 || a.precision > 4096 || a.max_precision < a.precision || a.max_precision > 4096)
    throw ConfigError("precision must lie in [64, 4096]");
  std::vector<double> g;
  if (!a.guess.empty()) {
    g = parse_list(a.guess);
  } else {
    Branch b;
    try {
      b = Branch::from_csv(read_file(a.branch));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(a.branch + ": " + e.what());
    }
    if (to_string(b.family) != to_string(mp.pattern)) throw ConfigError("branch family does not match --family");
    g = guess_from_branch(b);
  }
  PolySystem sys = build_dziobek(mp);
  if (g.size() != sys.arity()) throw ConfigError("guess must have 9 components (lambda0, mu, six distances, m)");

  LocateOptions lo;
  lo.precision = a.precision;
  lo.max_precision = a.max_precision;
  lo.restriction = a.restriction == "none" ? "" : a.restriction;
  Singularity s;
  try {
    s = locate_singularity(sys, g, lo);
  } catch (const CertificationError& e) {
    throw Inconclusive(std::string(e.what()) + " (try --precision " + std::to_string(e.suggested_precision) + ")");
  }
  double dist = 0;
  for (std::size_t k = 0; k < g.size(); ++k) dist = std::max(dist, std::abs(s.x[k].mid_d() - g[k]));
  if (dist > a.max_distance)
    throw Inconclusive("no singular point within " + fmt(a.max_distance) + " of the guess (nearest at distance " +
                       fmt(dist, 4) + ")");
  BifurcationCertificate c = sotomayor_classify(sys, s);

  json out;
  out["header"] = header("classify", &a.mass,
                         {{"guess", g}, {"restriction", a.restriction}, {"precision", a.precision},
                          {"max_precision", a.max_precision}, {"branch", a.branch}});
  out["certificate"] = c.to_json();
  if (a.format == "text") {
    write_out(a.output, proof_sketch(c));
  } else {
    write_out(a.output, dump(out));
    if (!a.output.empty() && a.output != "-") std::cout << proof_sketch(c);
  }
  return c.classification == Classification::Unresolved ? kInconclusive : kOk;
}

// --- continue ---------------------------------------------------------------

struct ContinueArgs {
  MassArgs mass;
  std::string system = "dziobek";
  std::string x;
  std::string from;
  int index = -1;
  bool all = false;
  std::string certificate;
  double dm = 1e-3;
  std::optional<double> m0;
  double m1 = 0;
  ContinuationOptions opt;
  std::string output;
  bool family_given = false;  // --family overrides the family stored with --from records
};

int cmd_continue(ContinueArgs a) {
  struct Start {
    std::vector<double> x;
    double m0;
    std::string origin;
  };
  std::vector<Start> starts;
  MassParams mp = a.mass.params();
  SystemKind kind = parse_system_kind(a.system);
  const int sources = !a.x.empty() + !a.from.empty() + !a.certificate.empty();
  if (sources != 1) throw ConfigError("give exactly one of --x, --from and --certificate");

  if (!a.x.empty()) {
    starts.push_back({parse_list(a.x), a.m0.value_or(a.mass.parameter()), "x"});
  } else if (!a.from.empty()) {
    json j = read_json(a.from);
    if (!j.contains("solutions")) throw ConfigError(a.from + ": no solutions array");
    const auto& arr = j["solutions"];
    if (!a.all && (a.index < 0 || a.index >= int(arr.size())))
      throw ConfigError("--index out of range (file has " + std::to_string(arr.size()) + " solutions); or use --all");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!a.all && int(i) != a.index) continue;
      SolutionRecord s = SolutionRecord::from_json(arr[i]);
      kind = s.kind;
      if (s.family == MassPattern::General) {
        if (!a.mass.general()) throw ConfigError("general-mass solutions need the same --m1..--m4");
      } else if (!a.family_given) {
        mp = s.family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal();
      }
      if (s.collinear) continue;  // collinear AC solutions are continued trivially and not of interest
      starts.push_back({s.x, a.m0.value_or(s.m), a.from + "#" + std::to_string(i)});
    }
  } else {
    json j = read_json(a.certificate);
    if (j.contains("certificate")) j = j["certificate"];
    BifurcationCertificate c = BifurcationCertificate::from_json(j);
    mp = c.family == MassPattern::TwoPairs ? MassParams::two_pairs() : MassParams::three_equal();
    kind = SystemKind::Dziobek;
    PolySystem sys = build_dziobek(mp);
    auto seeds = branch_switch(sys, c, a.dm);
    if (seeds.empty()) throw Inconclusive("branch switching found no solutions");
    for (std::size_t i = 0; i < seeds.size(); ++i)
      starts.push_back({seeds[i].x, seeds[i].m, "switch#" + std::to_string(i) + " " + seeds[i].isotropy.label});
  }
  if (mp.pattern == MassPattern::General) throw ConfigError("continuation needs --family three-equal or two-pairs");
  PolySystem sys = build(kind, mp);
  for (const auto& s : starts)
    if (s.x.size() != sys.unknowns())
      throw ConfigError("start point must have " + std::to_string(sys.unknowns()) + " components");
  if (starts.empty()) throw ConfigError("no start points");

  std::size_t k = 0;
  for (const auto& s : starts) {
    Branch b = continue_branch(sys, s.x, s.m0, a.m1, a.opt);
    json h = header("continue", nullptr,
                    {{"origin", s.origin}, {"m0", s.m0}, {"m1", a.m1}, {"initial_step", a.opt.initial_step},
                     {"max_step", a.opt.max_step}, {"min_step", a.opt.min_step}, {"fold_ratio", a.opt.fold_ratio}});
    std::string text = csv_header(h) + b.to_csv();
    std::string path = a.output;
    if (starts.size() > 1 && !path.empty() && path != "-") {
      auto dot = path.rfind(".csv");
      std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
      std::ostringstream p;
      p << stem << "_" << std::setw(2) << std::setfill('0') << k << ".csv";
      path = p.str();
    }
    write_out(path, text);
    if (!path.empty() && path != "-")
      std::cout << path << ": " << b.points.size() << " points, m " << fmt(b.points.front().m) << " -> "
                << fmt(b.points.back().m) << ", " << to_string(b.termination) << "\n";
    ++k;
  }
  return kOk;
}

// --- count ------------------------------------------------------------------

int cmd_count(const MassArgs& mass, const std::string& ms, std::size_t budget, std::uint64_t seed,
              const std::string& format, const std::string& output) {
  const MassParams mp = mass.params();
  if (mp.pattern == MassPattern::General) throw ConfigError("count needs --family three-equal or two-pairs");
  if (budget < 1) throw ConfigError("budget must be at least 1");
  auto values = parse_list(ms);
  for (double v : values)
    if (!(v > 0)) throw ConfigError("masses must be positive");
  EnumerateOptions opt;
  opt.budget = budget;
  opt.seed = seed;
  opt.threads = thread_count();
  std::vector<CountRow> rows;
  for (double v : values) rows.push_back(count_row(mp.pattern, v, opt));

  json h = header("count", nullptr, {{"family", to_string(mp.pattern)}, {"budget", budget}, {"seed", seed}});
  std::ostringstream os;
  if (format == "markdown") {
    os << "<!-- " << h.dump() << " -->\n";
    os << "| m | Dziobek | AC | geometrically different c.c.'s | collinear | budget |\n";
    os << "|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
      os << "| " << fmt(r.m) << " | " << r.dziobek << " | " << r.ac << " | " << r.distinct << " | " << r.collinear
         << " | " << r.budget << " |\n";
  } else {
    os << csv_header(h) << "m,dziobek,ac,distinct,collinear,budget\n";
    for (const auto& r : rows)
      os << fmt(r.m) << "," << r.dziobek << "," << r.ac << "," << r.distinct << "," << r.collinear << "," << r.budget
         << "\n";
  }
  write_out(output, os.str());
  return kOk;
}

// --- ls-reduce --------------------------------------------------------------

int cmd_ls_reduce(int order, const std::string& format, const std::string& output) {
  LSExpansion L;
  try {
    L = ls_reduce(order);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (format == "json") {
    json j;
    j["header"] = header("ls-reduce", nullptr, {{"order", order}});
    j["m_star"] = L.m_star.str();
    j["alpha_cubed"] = L.t.str();
    json rel = json::array();
    for (int i = 0; i < 4; ++i) rel.push_back({{"b5", L.rel_b5[i].str()}, {"b6", L.rel_b6[i].str()}});
    j["relations"] = rel;
    j["C"] = L.C.str();
    j["E"] = L.E.str();
    j["p1"] = L.p1.get_str();
    j["p2_over_beta"] = L.p2_over_beta.str();
    j["beta_cubed"] = L.beta_cubed.str();
    j["p2"] = L.p2;
    j["p3"] = L.p3;
    j["s"] = L.s.str();
    json sol = json::array();
    for (const auto& s : L.solutions) sol.push_back({s[0].str(), s[1].str()});
    j["solutions"] = sol;
    json cs = json::array();
    for (const auto& c : L.c) cs.push_back({c[0].str(), c[1].str(), c[2].str(), c[3].str()});
    j["c"] = cs;
    write_out(output, dump(j));
  } else {
    write_out(output, L.report());
  }
  return kOk;
}

// --- report -----------------------------------------------------------------

int cmd_report(const std::vector<std::string>& files, const std::string& diagram, double cluster_tol,
               double point_tol) {
  if (files.empty()) throw ConfigError("report needs at least one branch file");
  std::vector<Branch> branches;
  for (const auto& f : files) {
    try {
      branches.push_back(Branch::from_csv(read_file(f)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(f + ": " + e.what());
    }
    if (branches.back().points.empty()) throw ConfigError(f + ": branch has no points");
  }

  if (!diagram.empty()) {
    std::ostringstream os;
    os << "# ccbif report diagram\nbranch,m,coordinate,value,isotropy\n" << std::setprecision(17);
    const char* names8[] = {"lambda0", "mu", "r12", "r13", "r14", "r23", "r24", "r34"};
    const char* names6[] = {"r12", "r13", "r14", "r23", "r24", "r34"};
    for (std::size_t b = 0; b < branches.size(); ++b)
      for (const auto& p : branches[b].points)
        for (std::size_t k = 0; k < p.x.size(); ++k)
          os << b << "," << p.m << "," << (p.x.size() == 8 ? names8[k] : names6[k]) << "," << p.x[k] << ",\""
             << p.isotropy << "\"\n";
    write_out(diagram, os.str());
  }

  // Regions between clustered branch endpoints; counts at region midpoints.
  std::vector<double> ends;
  for (const auto& b : branches) {
    auto [lo, hi] = std::minmax(b.points.front().m, b.points.back().m);
    ends.push_back(lo);
    ends.push_back(hi);
  }
  std::sort(ends.begin(), ends.end());
  std::vector<double> cuts;
  for (double e : ends)
    if (cuts.empty() || e - cuts.back() > cluster_tol) cuts.push_back(e);
  auto covers = [&](const Branch& b, double m) {
    auto [lo, hi] = std::minmax(b.points.front().m, b.points.back().m);
    return lo - cluster_tol <= m && m <= hi + cluster_tol;
  };
  // Solutions at a breakpoint: branch positions at m, merged when closer than point_tol
  // (branches ending at a fold or pitchfork meet there).
  auto at = [&](const Branch& b, double m) {
    const auto& P = b.points;
    if ((m - P.front().m) * (m - P.back().m) >= 0)
      return std::abs(m - P.front().m) < std::abs(m - P.back().m) ? P.front().x : P.back().x;
    for (std::size_t i = 1; i < P.size(); ++i)
      if ((m - P[i - 1].m) * (m - P[i].m) <= 0) {
        double t = (m - P[i - 1].m) / (P[i].m - P[i - 1].m);
        auto x = P[i - 1].x;
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += t * (P[i].x[k] - x[k]);
        return x;
      }
    return P.back().x;
  };
  auto count_at = [&](double m) {
    std::vector<std::vector<double>> pts;
    for (const auto& b : branches) {
      if (!covers(b, m)) continue;
      auto x = at(b, m);
      bool fresh = true;
      for (const auto& y : pts) {
        double d = 0;
        for (std::size_t k = 0; k < x.size(); ++k) d = std::max(d, std::abs(x[k] - y[k]));
        fresh = fresh && d > point_tol;
      }
      if (fresh) pts.push_back(std::move(x));
    }
    return pts.size();
  };
  struct Row {
    double a, b;
    bool a_closed, b_closed;
    std::size_t n;
  };
  std::vector<Row> rows;
  auto push = [&](Row r) {
    if (!rows.empty() && rows.back().n == r.n) {
      rows.back().b = r.b;
      rows.back().b_closed = r.b_closed;
    } else {
      rows.push_back(r);
    }
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (i > 0) push({cuts[i], cuts[i], true, true, count_at(cuts[i])});
    std::size_t n = 0;
    for (const auto& b : branches) n += covers(b, 0.5 * (cuts[i] + cuts[i + 1]));
    push({cuts[i], cuts[i + 1], false, false, n});
  }
  const bool dz = branches.front().kind == SystemKind::Dziobek;
  std::ostringstream os;
  os << "# Branch summary\n\n" << branches.size() << " branch files, family " << to_string(branches.front().family)
     << ", system " << to_string(branches.front().kind) << ".\n\n";
  os << "| m | " << (dz ? "Dziobek | AC | geometrically different c.c.'s |" : "AC | geometrically different c.c.'s |")
     << (dz ? "\n|---|---|---|---|\n" : "\n|---|---|---|\n");
  for (const auto& r : rows) {
    os << "| ";
    if (r.a == r.b) os << fmt(r.a, 8);
    else os << (r.a_closed ? "[" : "(") << fmt(r.a, 8) << ", " << fmt(r.b, 8) << (r.b_closed ? "]" : ")");
    if (dz) os << " | " << r.n << " | " << r.n + 13 << " | " << r.n + 12 << " |\n";
    else os << " | " << r.n << " | " << r.n - 1 << " |\n";
  }
  os << "\nCounts assume the branch files cover every strictly planar solution; 12 collinear "
        "configurations and the tetrahedron are added for the AC column.\n";
  std::size_t folds = 0;
  for (const auto& b : branches) folds += b.termination == Termination::FoldDetected;
  os << "\nTerminations: " << folds << " fold-detected, " << branches.size() - folds << " other.\n";
  std::cout << os.str();
  return kOk;
}

// Arguments after the program name, with `key=value` lines of --config FILE
// appended as `--key value` unless the key is already on the command line.
// `key=true` becomes a bare flag, `key=false` is dropped; '#' starts a comment.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  auto given = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    auto trim = [](std::string t) {
      auto b = t.find_first_not_of(" \t\r"), e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw ConfigError(path + ":" + std::to_string(lineno) + ": bad key");
    if (given(key)) continue;
    if (value == "false") continue;
    args.push_back("--" + key);
    if (value != "true") args.push_back(value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified bifurcations of four-body central configurations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ccbif 1.0");

  std::string config_unused;
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_unused, "key=value file mirroring the command-line flags");
  };

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "enumerate solutions by seeded multistart Newton");
  sa.mass.add(solve);
  solve->add_option("--system", sa.system, "dziobek | ac")->check(CLI::IsMember({"dziobek", "ac"}))->capture_default_str();
  solve->add_option("--budget", sa.budget, "number of random starts")->capture_default_str();
  solve->add_option("--seed", sa.seed, "RNG seed")->capture_default_str();
  solve->add_option("--seeds", sa.seeds, "JSON seed file tried before the random starts");
  solve->add_flag("--certify", sa.certify, "Krawczyk-certify every solution and attach certificate ids");
  solve->add_option("--precision", sa.precision, "bits for --certify")->check(CLI::Range(64, 4096))->capture_default_str();
  solve->add_option("-o,--output", sa.output, "output file (default stdout)");
  with_config(solve);

  std::string verify_file;
  int verify_precision = 256;
  auto* verify = app.add_subcommand("verify", "re-certify every solution of a solution-set JSON");
  verify->add_option("file", verify_file, "output of solve")->required();
  verify->add_option("--precision", verify_precision)->check(CLI::Range(64, 4096))->capture_default_str();
  with_config(verify);

  std::string vc_file;
  auto* vcert = app.add_subcommand("verify-certificate", "replay a bifurcation certificate bit for bit");
  vcert->add_option("file", vc_file, "certificate JSON (output of classify)")->required();
  with_config(vcert);

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "certify and classify a bifurcation point");
  ca.mass.add(classify);
  classify->add_option("--guess", ca.guess, "lambda0,mu,r12,r13,r14,r23,r24,r34,m");
  classify->add_option("--branch", ca.branch, "branch CSV; the guess is its det zero or smallest |det|");
  classify->add_option("--restriction", ca.restriction, "auto | none | element label")->capture_default_str();
  classify->add_option("--precision", ca.precision)->check(CLI::Range(64, 4096))->capture_default_str();
  classify->add_option("--max-precision", ca.max_precision)->check(CLI::Range(64, 4096))->capture_default_str();
  classify->add_option("--max-distance", ca.max_distance, "largest accepted distance from the guess")->capture_default_str();
  classify->add_option("--format", ca.format, "json | text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  classify->add_option("-o,--output", ca.output, "output file (default stdout)");
  with_config(classify);

  ContinueArgs ka;
  auto* cont = app.add_subcommand("continue", "natural-parameter continuation in m");
  ka.mass.add(cont);
  cont->add_option("--system", ka.system)->check(CLI::IsMember({"dziobek", "ac"}))->capture_default_str();
  cont->add_option("--x", ka.x, "start point (unknowns, comma separated)");
  cont->add_option("--from", ka.from, "solution-set JSON");
  cont->add_option("--index", ka.index, "solution index in --from");
  cont->add_flag("--all", ka.all, "continue every solution in --from");
  cont->add_option("--certificate", ka.certificate, "pitchfork certificate: switch branches at m0 + dm");
  cont->add_option("--dm", ka.dm, "parameter offset for branch switching")->capture_default_str();
  cont->add_option("--m-start", ka.m0, "start parameter (default: from the start point)");
  cont->add_option("--m-end", ka.m1, "end parameter")->required();
  cont->add_option("--initial-step", ka.opt.initial_step)->capture_default_str();
  cont->add_option("--max-step", ka.opt.max_step)->capture_default_str();
  cont->add_option("--min-step", ka.opt.min_step)->capture_default_str();
  cont->add_option("--fold-ratio", ka.opt.fold_ratio, "|det| threshold relative to det at m0")->capture_default_str();
  cont->add_option("-o,--output", ka.output, "CSV file; several branches get _NN suffixes");
  with_config(cont);

  MassArgs cm;
  std::string count_ms = "1";
  std::size_t count_budget = 100000;
  std::uint64_t count_seed = 20240601;
  std::string count_format = "csv", count_out;
  auto* count = app.add_subcommand("count", "count table: Dziobek, AC and distinct solutions per m");
  count->add_option("--family", cm.family)->check(CLI::IsMember({"three-equal", "two-pairs"}))->capture_default_str();
  count->add_option("--m", count_ms, "comma-separated m values")->capture_default_str();
  count->add_option("--budget", count_budget)->capture_default_str();
  count->add_option("--seed", count_seed)->capture_default_str();
  count->add_option("--format", count_format)->check(CLI::IsMember({"csv", "markdown"}))->capture_default_str();
  count->add_option("-o,--output", count_out);
  with_config(count);

  int ls_order = 2;
  std::string ls_format = "text", ls_out;
  auto* ls = app.add_subcommand("ls-reduce", "exact reduction at the degenerate equilateral point");
  ls->add_option("--order", ls_order)->capture_default_str();
  ls->add_option("--format", ls_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  ls->add_option("-o,--output", ls_out);
  with_config(ls);

  std::vector<std::string> report_files;
  std::string report_diagram;
  double report_tol = 1e-4, report_point_tol = 1e-3;
  auto* report = app.add_subcommand("report", "diagram data and count summary from branch files");
  report->add_option("files", report_files, "branch CSV files");
  report->add_option("--diagram", report_diagram, "write long-format diagram CSV here");
  report->add_option("--cluster-tol", report_tol, "endpoints closer than this share a boundary")->capture_default_str();
  report->add_option("--point-tol", report_point_tol, "solutions closer than this coincide at a boundary")
      ->capture_default_str();
  with_config(report);

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*verify) return cmd_verify(verify_file, verify_precision);
    if (*vcert) return cmd_verify_certificate(vc_file);
    if (*classify) return cmd_classify(ca);
    if (*cont) {
      ka.family_given = cont->get_option("--family")->count() > 0;
      return cmd_continue(ka);
    }
    if (*count) return cmd_count(cm, count_ms, count_budget, count_seed, count_format, count_out);
    if (*ls) return cmd_ls_reduce(ls_order, ls_format, ls_out);
    if (*report) return cmd_report(report_files, report_diagram, report_tol, report_point_tol);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const Inconclusive& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const CertificationError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kConfig;
}
