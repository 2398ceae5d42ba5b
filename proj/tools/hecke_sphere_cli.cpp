// hecke_sphere_cli: runs one experiment per invocation and writes JSON/CSV
// artifacts under --out. Exit status 0 when every assertion of the run
// holds, 1 on a failed assertion, 2 on invalid input.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hecke_sphere/error.hpp"
#include "hecke_sphere/gon.hpp"
#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/hecke.hpp"
#include "hecke_sphere/io.hpp"
#include "hecke_sphere/moments.hpp"
#include "hecke_sphere/parallel.hpp"
#include "hecke_sphere/quat.hpp"
#include "hecke_sphere/simd.hpp"
#include "hecke_sphere/spectral.hpp"
#include "hecke_sphere/theta.hpp"

namespace {

using hs::io::json;
using hs::io::format_double;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int n = -1;
  std::string n_range;
  std::vector<std::int64_t> primes{3, 5, 7};
  std::vector<std::int64_t> extras;
  std::int64_t cutoff = 0;
  std::size_t grid = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = "out";
  std::string precision = "double";
  // Command-specific knobs.
  std::int64_t k = 1;
  std::string parity = "integral";
  int alpha_max = 2;
  std::size_t pairs = 100;
  std::vector<std::int64_t> gamma{1, 0, 4, 1};
  std::vector<double> z{0.0, 0.5};
  std::vector<std::int64_t> x, y;
  std::string family = "all";
  std::int64_t k_max = 4096, m_min = 16, m_max = 4096, r_max = 64;
  std::size_t instances = 50;
  int refine_steps = 20;
  std::vector<std::int64_t> export_matrices;

  std::vector<int> ns;  // resolved from --n / --n-range

  json to_json() const {
    return {{"command", command},
            {"n", ns},
            {"primes", primes},
            {"extras", extras},
            {"cutoff", cutoff},
            {"grid", grid},
            {"seed", seed},
            {"threads", threads},
            {"precision", precision},
            {"k", k},
            {"parity", parity},
            {"alpha_max", alpha_max},
            {"pairs", pairs},
            {"gamma", gamma},
            {"z", z},
            {"x", x},
            {"y", y},
            {"family", family},
            {"k_max", k_max},
            {"m_min", m_min},
            {"m_max", m_max},
            {"r_max", r_max},
            {"instances", instances},
            {"refine_steps", refine_steps},
            {"export_matrices", export_matrices}};
  }
};

std::vector<int> parse_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) throw UsageError("--n-range expects a:b or a:b:step, got '" + spec + "'");
  int a, b, step = 1;
  try {
    a = std::stoi(parts[0]);
    b = std::stoi(parts[1]);
    if (parts.size() == 3) step = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("--n-range expects integers, got '" + spec + "'");
  }
  if (step <= 0 || b < a || a < 0) throw UsageError("--n-range needs 0 <= a <= b and step >= 1");
  std::vector<int> out;
  for (int v = a; v <= b; v += step) out.push_back(v);
  return out;
}

// Resolves --n / --n-range, falling back to `fallback` when both are absent.
void resolve_ns(RunConfig& cfg, const std::vector<int>& fallback, bool even_only) {
  if (cfg.n >= 0 && !cfg.n_range.empty()) throw UsageError("give either --n or --n-range, not both");
  if (cfg.n >= 0)
    cfg.ns = {cfg.n};
  else if (!cfg.n_range.empty())
    cfg.ns = parse_range(cfg.n_range);
  else
    cfg.ns = fallback;
  if (cfg.ns.empty()) throw UsageError("no degree n selected; pass --n or --n-range");
  if (even_only)
    for (int n : cfg.ns)
      if (n % 2) throw UsageError(cfg.command + " requires even n, got " + std::to_string(n));
}

hs::Quaternion quaternion_from(const std::vector<std::int64_t>& c, const std::string& flag) {
  if (c.size() != 4) throw UsageError(flag + " expects four integer coordinates a,b,c,d");
  const auto q = hs::Quaternion::integral(c[0], c[1], c[2], c[3]);
  if (q.norm() == 0) throw UsageError(flag + " must be a nonzero quaternion");
  return q;
}

// Collects artifacts and assertion failures of one run.
class Run {
 public:
  explicit Run(const RunConfig& cfg) : cfg_(cfg), config_(cfg.to_json()) {}

  const json& config() const { return config_; }

  void check(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }

  void write_json(const std::string& name, const json& body, bool passed) {
    json b = body;
    b["passed"] = passed;
    emit(name, hs::io::document(cfg_.command, config_, b).dump(2) + "\n");
  }

  /// `extra` is merged into the recorded config of this file only.
  void write_csv(const std::string& name, const hs::io::CsvTable& table, const json& extra = json::object()) {
    json cfg = config_;
    for (const auto& [k, v] : extra.items()) cfg[k] = v;
    emit(name, table.render(cfg));
  }

  int finish() {
    json summary = {{"schema", hs::io::kSchema},
                    {"command", cfg_.command},
                    {"status", failures_.empty() ? "pass" : "fail"},
                    {"files", files_}};
    if (!failures_.empty()) {
      summary["failures"] = failures_;
      json record = {{"schema", hs::io::kSchema}, {"command", cfg_.command}, {"config", config_},
                     {"status", "fail"},         {"failures", failures_}};
      hs::io::write_file(path(cfg_.command + ".failure.json"), record.dump(2) + "\n");
    }
    std::cout << summary.dump() << "\n";
    return failures_.empty() ? 0 : 1;
  }

 private:
  std::string path(const std::string& name) const { return (std::filesystem::path(cfg_.out) / name).string(); }

  void emit(const std::string& name, const std::string& content) {
    hs::io::write_file(path(name), content);
    files_.push_back(name);
  }

  const RunConfig& cfg_;
  json config_;
  std::vector<std::string> failures_;
  std::vector<std::string> files_;
};

std::string tag(int n) { return "n" + std::to_string(n); }

// --- subcommands -----------------------------------------------------------

void cmd_shells(const RunConfig& cfg, Run& run) {
  if (cfg.k < 1) throw UsageError("--k must be >= 1");
  const hs::Parity parity = hs::parity_from_string(cfg.parity);
  const auto shell = hs::enumerate_shell(cfg.k, parity);
  hs::io::CsvTable t({"k", "parity", "c1", "c2", "c3", "c4"});
  for (const auto& m : shell.elements) {
    const auto& c = m.doubled();
    t.add_row({std::to_string(cfg.k), cfg.parity, std::to_string(c[0]), std::to_string(c[1]), std::to_string(c[2]),
               std::to_string(c[3])});
  }
  run.write_csv("shells_k" + std::to_string(cfg.k) + "_" + cfg.parity + ".csv", t);
  for (const auto& m : shell.elements) run.check(m.norm() == cfg.k, "shell element with wrong norm");
  if (parity == hs::Parity::integral)
    run.check(static_cast<std::int64_t>(shell.elements.size()) == hs::r4_count(cfg.k), "shell size differs from r4");
}

void cmd_basis(const RunConfig& cfg, Run& run, unsigned threads) {
  for (int n : cfg.ns) {
    const auto basis = hs::harmonic_basis(n, threads);
    bool harmonic = true;
    for (const auto& b : basis.basis) harmonic = harmonic && b.laplacian().is_zero();
    const bool sized = basis.dim() == hs::harmonic_dimension(n);
    const bool symmetric = basis.gram.is_symmetric();
    run.check(harmonic, "basis element not harmonic at n=" + std::to_string(n));
    run.check(sized, "basis size differs from (n+1)^2 at n=" + std::to_string(n));
    run.check(symmetric, "Gram matrix not symmetric at n=" + std::to_string(n));
    run.write_json("basis_" + tag(n) + ".json", hs::io::to_json(basis), harmonic && sized && symmetric);
  }
}

void export_matrix(Run& run, const hs::HeckeMatrix& a) {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < a.dim(); ++j) header.push_back("c" + std::to_string(j));
  hs::io::CsvTable t(header);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(a.entries(i, j).get_str());
    t.add_row(row);
  }
  // T_N = entries / (denominator * 8 N^(n/2)).
  const json meta = {{"matrix", {{"n", a.n}, {"N", a.N}, {"denominator", a.denominator.get_str()},
                                 {"scale", "1/(8*" + std::to_string(a.N) + "^(" + std::to_string(a.n) + "/2))"}}}};
  run.write_csv("hecke_" + tag(a.n) + "_N" + std::to_string(a.N) + ".csv", t, meta);
}

void cmd_hecke_check(const RunConfig& cfg, Run& run, unsigned threads) {
  for (auto p : cfg.primes)
    if (p < 3 || p % 2 == 0) throw UsageError("--primes must be odd primes");
  if (cfg.alpha_max < 1) throw UsageError("--alpha-max must be >= 1");
  for (int n : cfg.ns) {
    if (n % 2) {
      const bool zero = hs::t1_vanishing(n);
      run.check(zero, "T_1 is not zero at odd n=" + std::to_string(n));
      run.write_json("hecke-check_" + tag(n) + ".json", {{"n", n}, {"t1_vanishing", zero}}, zero);
      continue;
    }
    const auto basis = hs::harmonic_basis(n, threads);
    const auto report = hs::hecke_relations_check(basis, cfg.primes, cfg.alpha_max, threads);
    for (const auto& r : report.results)
      run.check(r.passed, r.identity + " failed at n=" + std::to_string(n) + " (M=" + std::to_string(r.M) +
                              ", N=" + std::to_string(r.N) + ")");
    run.write_json("hecke-check_" + tag(n) + ".json", hs::io::to_json(report), report.all_passed());
    for (auto N : cfg.export_matrices) export_matrix(run, hs::hecke_matrix(basis, N, threads));
  }
}

std::vector<std::int64_t> default_extras(std::int64_t upto) {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 2; k <= upto; ++k) out.push_back(k);
  return out;
}

template <class T>
void spectral_for(const RunConfig& cfg, Run& run, int n, unsigned threads) {
  const auto basis = hs::harmonic_basis(n, threads);
  hs::SpectralOptions opt;
  opt.seed = cfg.seed;
  opt.threads = threads;
  const auto dec = hs::joint_eigenspaces<T>(basis, cfg.primes, cfg.extras, opt);
  const bool complete = dec.total_dim() == hs::harmonic_dimension(n);
  run.check(complete, "eigenspace dimensions do not sum to (n+1)^2 at n=" + std::to_string(n));
  hs::io::CsvTable t({"n", "space", "dim", "t1_flag", "N", "lambda"});
  for (std::size_t s = 0; s < dec.spaces.size(); ++s)
    for (const auto& [N, v] : dec.spaces[s].lambda)
      t.add_row({std::to_string(n), std::to_string(s), std::to_string(dec.spaces[s].dim()),
                 std::to_string(dec.spaces[s].t1_flag), std::to_string(N), format_double(v)});
  json body = hs::io::to_json(dec);
  std::size_t flagged = 0;
  for (const auto& sp : dec.spaces) flagged += sp.t1_flag ? 1 : 0;
  body["flagged_spaces"] = flagged;
  run.write_json("spectral_" + tag(n) + ".json", body, complete);
  run.write_csv("spectral_" + tag(n) + ".csv", t);
}

void cmd_spectral(const RunConfig& cfg, Run& run, unsigned threads) {
  for (int n : cfg.ns) {
    if (cfg.precision == "extended")
      spectral_for<hs::Quad>(cfg, run, n, threads);
    else
      spectral_for<double>(cfg, run, n, threads);
  }
}

void cmd_pretrace(const RunConfig& cfg, Run& run, unsigned threads) {
  if (cfg.pairs < 1) throw UsageError("--pairs must be >= 1");
  for (int n : cfg.ns) {
    const auto basis = hs::harmonic_basis(n, threads);
    hs::SpectralOptions opt;
    opt.seed = cfg.seed;
    opt.threads = threads;
    const auto dec = hs::joint_eigenspaces<double>(basis, cfg.primes, cfg.extras, opt);
    const auto rep = hs::pretrace_check(basis, dec, cfg.pairs, cfg.seed);
    run.check(rep.passed, "pre-trace residual " + format_double(rep.max_residual) + " above " +
                              format_double(rep.tolerance) + " at n=" + std::to_string(n));
    run.write_json("pretrace-check_" + tag(n) + ".json", hs::io::to_json(rep), rep.passed);
  }
}

struct PointPair {
  std::string label;
  hs::Quaternion x, y;
};

std::vector<PointPair> theta_points(const RunConfig& cfg) {
  if (!cfg.x.empty() || !cfg.y.empty()) {
    const auto x = quaternion_from(cfg.x, "--x");
    const auto y = cfg.y.empty() ? x : quaternion_from(cfg.y, "--y");
    return {{"custom", x, y}};
  }
  const auto one = hs::Quaternion::integral(1, 0, 0, 0);
  const auto q9 = hs::Quaternion::integral(1, 2, 2, 0);
  const auto q25 = hs::Quaternion::integral(3, 4, 0, 0);
  return {{"x=y nr1", one, one}, {"x=y nr9", q9, q9}, {"x=y nr25", q25, q25}, {"x!=y nr9,nr25", q9, q25}};
}

template <class T>
double theta_identity_for(const RunConfig& cfg, Run& run, int n, std::int64_t K, hs::io::CsvTable& table,
                          unsigned threads) {
  const auto basis = hs::harmonic_basis(n, threads);
  hs::SpectralOptions opt;
  opt.seed = cfg.seed;
  opt.threads = threads;
  std::vector<std::int64_t> extras = cfg.extras.empty() ? default_extras(K) : cfg.extras;
  const auto dec = hs::joint_eigenspaces<T>(basis, cfg.primes, extras, opt);
  double worst = 0;
  for (const auto& pp : theta_points(cfg)) {
    const auto bx = hs::basis_values_at<T>(basis, pp.x);
    const auto by = hs::basis_values_at<T>(basis, pp.y);
    for (std::int64_t k = 1; k <= K; ++k) {
      const auto th = hs::theta_coefficient(n, pp.x, pp.y, k);
      const T sp = hs::spectral_coefficient<T>(dec, bx, by, k);
      const double thd = th.value.get_d();
      const double err = std::fabs(static_cast<double>(sp - hs::real_from<T>(th.value))) / (1 + std::fabs(thd));
      worst = std::max(worst, err);
      const std::string ks = std::to_string(k), ns = std::to_string(n);
      table.add_row({ns, ks, pp.label, "theta", hs::io::rational(th.value).get<std::string>()});
      table.add_row({ns, ks, pp.label, "theta_float", format_double(th.float_value)});
      table.add_row({ns, ks, pp.label, "spectral", format_double(static_cast<double>(sp))});
      run.check(err <= 1e-8, "central identity off by " + format_double(err) + " at n=" + ns + ", k=" + ks + ", " +
                                 pp.label);
    }
  }
  return worst;
}

void cmd_theta_identity(const RunConfig& cfg, Run& run, unsigned threads) {
  const std::int64_t K = cfg.cutoff > 0 ? cfg.cutoff : 40;
  hs::io::CsvTable table({"n", "k", "point", "side", "value"});
  json per_n = json::array();
  bool ok = true;
  for (int n : cfg.ns) {
    const double worst = cfg.precision == "extended" ? theta_identity_for<hs::Quad>(cfg, run, n, K, table, threads)
                                                     : theta_identity_for<double>(cfg, run, n, K, table, threads);
    per_n.push_back({{"n", n}, {"cutoff", K}, {"max_relative_error", worst}, {"tolerance", 1e-8}});
    ok = ok && worst <= 1e-8;
  }
  run.write_csv("theta-identity.csv", table);
  run.write_json("theta-identity.json", {{"results", per_n}}, ok);
}

void cmd_modularity(const RunConfig& cfg, Run& run) {
  if (cfg.gamma.size() != 4) throw UsageError("--gamma expects a,b,c,d");
  if (cfg.z.size() != 2) throw UsageError("--z expects re,im");
  const hs::Mat2 g{cfg.gamma[0], cfg.gamma[1], cfg.gamma[2], cfg.gamma[3]};
  const auto x = cfg.x.empty() ? hs::Quaternion::integral(1, 0, 0, 0) : quaternion_from(cfg.x, "--x");
  const auto y = cfg.y.empty() ? x : quaternion_from(cfg.y, "--y");
  json results = json::array();
  bool ok = true;
  hs::io::CsvTable t({"n", "cutoff", "residual", "tail_bound", "identically_zero"});
  for (int n : cfg.ns) {
    const auto r = hs::modularity_check(n, g, {cfg.z[0], cfg.z[1]}, cfg.cutoff, x, y);
    const bool pass = r.residual <= 1e-6 && r.tail_bound < 1e-8;
    run.check(pass, "modularity residual " + format_double(r.residual) + " (tail " + format_double(r.tail_bound) +
                        ") at n=" + std::to_string(n));
    ok = ok && pass;
    results.push_back(hs::io::to_json(r));
    t.add_row({std::to_string(n), std::to_string(r.cutoff), format_double(r.residual), format_double(r.tail_bound),
               r.identically_zero ? "1" : "0"});
  }
  run.write_json("modularity.json", {{"results", results}}, ok);
  run.write_csv("modularity.csv", t);
}

void cmd_petersson(const RunConfig& cfg, Run& run) {
  const bool extended = cfg.precision == "extended";
  hs::io::CsvTable t({"n", "cutoff", "log_rho", "rho", "rho_over_n1.5", "relative_tail"});
  json results = json::array();
  std::vector<double> xs, ys;
  bool ok = true;
  for (int n : cfg.ns) {
    const std::int64_t K = cfg.cutoff > 0 ? cfg.cutoff : std::max<std::int64_t>(10 * n, 200);
    if (K < std::max(10 * n, 1)) throw UsageError("--cutoff must be at least 10 n for the tail certificate");
    const auto e = hs::petersson_estimate(n, K, extended ? hs::Precision::extended : hs::Precision::standard);
    json rec = hs::io::to_json(e);
    run.check(e.relative_tail < 1e-6, "Petersson tail not certified at n=" + std::to_string(n));
    ok = ok && e.relative_tail < 1e-6;
    if (extended) {
      const auto d = hs::petersson_estimate(n, K, hs::Precision::standard);
      const double rel = e.rho > 0 ? std::fabs(d.rho - e.rho) / e.rho : std::fabs(d.rho);
      rec["double_rho"] = d.rho;
      rec["double_relative_change"] = rel;
      run.check(rel < 1e-6, "double and extended rho differ by " + format_double(rel) + " at n=" + std::to_string(n));
      ok = ok && rel < 1e-6;
    }
    results.push_back(rec);
    const double scaled = n > 0 ? e.rho / std::pow(n, 1.5) : e.rho;
    t.add_row({std::to_string(n), std::to_string(K), format_double(e.log_rho), format_double(e.rho),
               format_double(scaled), format_double(e.relative_tail)});
    if (n > 0 && e.rho > 0) {
      xs.push_back(n);
      ys.push_back(e.rho);
    }
  }
  json body = {{"results", results}};
  if (xs.size() >= 2) body["rho_growth"] = hs::io::to_json(hs::loglog_fit(xs, ys));
  // Report-only: n at which rho / n^1.5 fails to decrease.
  json rises = json::array();
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (ys[i] / std::pow(xs[i], 1.5) >= ys[i - 1] / std::pow(xs[i - 1], 1.5)) rises.push_back(static_cast<int>(xs[i]));
  body["rho_over_n1.5_rises_at"] = rises;
  run.write_json("petersson.json", body, ok);
  run.write_csv("petersson.csv", t);
}

void cmd_counting(const RunConfig& cfg, Run& run, unsigned threads) {
  const std::string fam = cfg.family;
  if (fam != "all" && fam != "single" && fam != "dyadic" && fam != "aofx" && fam != "minima")
    throw UsageError("--family must be one of all, single, dyadic, aofx, minima");
  if (!hs::is_dyadic(cfg.r_max)) throw UsageError("--r-max must be a power of two");
  if (!hs::is_dyadic(cfg.m_min) || !hs::is_dyadic(cfg.m_max) || cfg.m_min > cfg.m_max)
    throw UsageError("--m-min and --m-max must be powers of two with m-min <= m-max");
  if (cfg.k_max < 1) throw UsageError("--k-max must be >= 1");
  json body = json::object();
  bool ok = true;
  auto want = [&](const char* f) { return fam == "all" || fam == f; };

  auto count_table = [&](const std::string& name, std::vector<hs::CountRecord>& recs, const char* key) {
    const double c = hs::fit_constant(recs);
    hs::io::CsvTable t({"family", key, "R", "count", "bound", "ratio"});
    for (const auto& r : recs)
      t.add_row({r.family, std::to_string(r.k_or_M), std::to_string(r.R), std::to_string(r.count),
                 format_double(r.bound), format_double(r.ratio())});
    run.write_csv("counting_" + name + ".csv", t);
    body[name] = {{"records", recs.size()}, {"fitted_constant", c}, {"limit", 64}};
    run.check(c <= 64, name + " fitted constant " + format_double(c) + " exceeds 64");
    ok = ok && c <= 64;
  };

  if (want("single")) {
    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    for (std::int64_t k = 1; k <= cfg.k_max; ++k)
      for (std::int64_t R = 1; R <= cfg.r_max; R *= 2) cells.emplace_back(k, R);
    std::vector<hs::CountRecord> recs(cells.size());
    hs::parallel_for(cells.size(), threads,
                     [&](std::size_t i) { recs[i] = hs::shell_class_count(cells[i].first, cells[i].second); });
    count_table("single", recs, "k");
  }
  if (want("dyadic")) {
    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    for (std::int64_t M = cfg.m_min; M <= cfg.m_max; M *= 2)
      for (std::int64_t R = 1; R <= cfg.r_max; R *= 2) cells.emplace_back(M, R);
    std::vector<hs::CountRecord> recs(cells.size());
    hs::parallel_for(cells.size(), threads,
                     [&](std::size_t i) { recs[i] = hs::dyadic_class_count(cells[i].first, cells[i].second); });
    count_table("dyadic", recs, "M");
  }
  if (want("aofx")) {
    std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{64, 128, 256} : cfg.ns;
    hs::io::CsvTable t({"family", "n", "X", "A"});
    json fits = json::array();
    for (int n : ns) {
      if (n < 8) throw UsageError("A(X) growth needs n >= 8");
      const auto series = hs::a_of_x_series(n, n);
      for (std::int64_t X = 1; X <= n; ++X)
        t.add_row({"aofx", std::to_string(n), std::to_string(X), format_double(series[static_cast<std::size_t>(X - 1)])});
      json f = hs::io::to_json(hs::a_of_x_growth(n, n / 8, n));
      f["n"] = n;
      f["window"] = {n / 8, n};
      fits.push_back(f);
    }
    run.write_csv("counting_aofx.csv", t);
    body["aofx"] = fits;
  }
  if (want("minima")) {
    const auto insts = hs::random_gon_instances(cfg.instances, cfg.seed);
    hs::io::CsvTable t({"family", "instance", "body", "covolume", "lambda1", "lambda2", "lambda3", "lambda4", "count",
                        "product_bound", "minkowski"});
    std::size_t holds = 0;
    for (std::size_t i = 0; i < insts.size(); ++i) {
      const auto& in = insts[i];
      const auto pb = hs::product_bound_check(in.lattice, in.body);
      const auto mk = hs::minkowski_check(in.lattice, in.body, pb.minima);
      const bool good = pb.holds && mk.holds;
      holds += good ? 1 : 0;
      run.check(good, "geometry-of-numbers bound fails on instance " + std::to_string(i));
      t.add_row({"minima", std::to_string(i), in.body.describe(), std::to_string(in.lattice.covolume()),
                 format_double(pb.minima.lambda[0]), format_double(pb.minima.lambda[1]),
                 format_double(pb.minima.lambda[2]), format_double(pb.minima.lambda[3]), std::to_string(pb.count),
                 format_double(pb.bound), format_double(mk.normalised)});
    }
    ok = ok && holds == insts.size();
    run.write_csv("counting_minima.csv", t);
    body["minima"] = {{"instances", insts.size()}, {"holding", holds}};
  }
  run.write_json("counting.json", body, ok);
}

void cmd_moments(const RunConfig& cfg, Run& run, unsigned threads) {
  if (cfg.grid < 1) throw UsageError("--grid must be >= 1");
  std::vector<hs::MomentReport> reports;
  hs::io::CsvTable t({"n", "stat", "value"});
  bool ok = true;
  for (int n : cfg.ns) {
    const auto basis = hs::harmonic_basis(n, threads);
    hs::SpectralOptions opt;
    opt.seed = cfg.seed;
    opt.threads = threads;
    const auto dec = hs::joint_eigenspaces<double>(basis, cfg.primes, cfg.extras, opt);
    const auto r = hs::moment_sweep(basis, dec, cfg.grid, cfg.seed, cfg.refine_steps, threads);
    const bool pass = r.closure_error <= 1e-7 && r.fourth_below_family &&
                      r.cauchy_schwarz_floor <= r.family.value * (1 + 1e-9);
    run.check(r.closure_error <= 1e-7, "pre-trace closure off by " + format_double(r.closure_error) +
                                           " at n=" + std::to_string(n));
    run.check(r.fourth_below_family, "fourth moment exceeds the family sum at n=" + std::to_string(n));
    run.check(r.cauchy_schwarz_floor <= r.family.value * (1 + 1e-9),
              "family sup below the Cauchy-Schwarz floor at n=" + std::to_string(n));
    ok = ok && pass;
    run.write_json("moments_" + tag(n) + ".json", hs::io::to_json(r), pass);
    const std::string ns = std::to_string(n);
    t.add_row({ns, "sup_family", format_double(r.family.value)});
    t.add_row({ns, "sup_fourth", format_double(r.fourth.value)});
    t.add_row({ns, "sup_individual", format_double(r.individual.value)});
    t.add_row({ns, "closure_error", format_double(r.closure_error)});
    reports.push_back(r);
  }
  run.write_csv("moments.csv", t);
  json body = json::object();
  try {
    json fits = json::array();
    for (const auto& f : hs::growth_fit(reports)) fits.push_back(hs::io::to_json(f));
    body["growth"] = fits;
  } catch (const hs::DomainError& e) {
    body["growth"] = nullptr;
    body["growth_note"] = e.what();
  }
  run.write_json("moments.json", body, ok);
}

void cmd_report(const RunConfig& cfg, Run& run) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(cfg.out)) throw UsageError("--out directory '" + cfg.out + "' does not exist");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(cfg.out)) {
    const auto name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.rfind("report", 0) != 0) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  hs::io::CsvTable t({"file", "command", "passed"});
  json entries = json::array();
  bool ok = true;
  for (const auto& name : names) {
    json doc;
    try {
      doc = json::parse(hs::io::read_file((fs::path(cfg.out) / name).string()));
    } catch (const json::exception&) {
      run.check(false, name + " is not valid JSON");
      ok = false;
      continue;
    }
    if (!doc.contains("schema") || doc["schema"] != hs::io::kSchema) continue;
    const bool failure_record = doc.value("status", "") == "fail";
    const bool passed = !failure_record && doc.value("passed", false);
    const std::string command = doc.value("command", "");
    run.check(passed, name + " records a failed run");
    ok = ok && passed;
    entries.push_back({{"file", name}, {"command", command}, {"passed", passed}});
    t.add_row({name, command, passed ? "1" : "0"});
  }
  run.write_json("report.json", {{"artifacts", entries}}, ok);
  run.write_csv("report.csv", t);
}

// Per-command defaults for the degree list; resolved before the config is recorded.
void prepare(RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "basis" || c == "hecke-check") resolve_ns(cfg, {2}, false);
  else if (c == "spectral") resolve_ns(cfg, {2}, true);
  else if (c == "pretrace-check") resolve_ns(cfg, {4}, true);
  else if (c == "theta-identity") resolve_ns(cfg, {2, 4, 6, 8}, true);
  else if (c == "modularity") resolve_ns(cfg, {2, 4}, true);
  else if (c == "petersson") resolve_ns(cfg, parse_range("8:64:2"), true);
  else if (c == "moments") resolve_ns(cfg, parse_range("2:24:2"), true);
  else if (c == "counting" && (cfg.n >= 0 || !cfg.n_range.empty())) resolve_ns(cfg, {}, false);
}

void add_common(CLI::App* sub, RunConfig& cfg, bool with_n = true) {
  if (with_n) {
    sub->add_option("--n", cfg.n, "Degree n of the harmonic space")->check(CLI::NonNegativeNumber);
    sub->add_option("--n-range", cfg.n_range, "Degrees a:b[:step]");
  }
  sub->add_option("--primes", cfg.primes, "Odd primes generating the Hecke algebra")->delimiter(',');
  sub->add_option("--cutoff", cfg.cutoff, "Series cutoff K (0 = command default)")->check(CLI::NonNegativeNumber);
  sub->add_option("--grid", cfg.grid, "Grid size on S^3");
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = HECKE_SPHERE_THREADS or hardware)");
  sub->add_option("--out", cfg.out, "Output directory");
  sub->add_option("--precision", cfg.precision, "Floating precision")
      ->check(CLI::IsMember({"double", "extended"}));
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Hecke eigenforms on S^3: exact Hecke matrices, theta identities, counting experiments"};
  app.require_subcommand(1);

  auto* shells = app.add_subcommand("shells", "Dump a norm shell as CSV");
  add_common(shells, cfg, false);
  shells->add_option("--k", cfg.k, "Norm k");
  shells->add_option("--parity", cfg.parity, "integral or coset")->check(CLI::IsMember({"integral", "coset"}));

  auto* basis = app.add_subcommand("basis", "Harmonic basis and Gram matrix");
  add_common(basis, cfg);

  auto* hecke = app.add_subcommand("hecke-check", "Exact Hecke algebra relations");
  add_common(hecke, cfg);
  hecke->add_option("--alpha-max", cfg.alpha_max, "Largest prime power exponent");
  hecke->add_option("--export", cfg.export_matrices, "Also write the integer matrices of these N")->delimiter(',');

  auto* spectral = app.add_subcommand("spectral", "Joint Hecke eigenspaces");
  add_common(spectral, cfg);
  spectral->add_option("--extras", cfg.extras, "Extra N evaluated as Rayleigh quotients")->delimiter(',');

  auto* pretrace = app.add_subcommand("pretrace-check", "Pre-trace formula at random unit pairs");
  add_common(pretrace, cfg);
  pretrace->add_option("--pairs", cfg.pairs, "Number of random pairs");

  auto* theta = app.add_subcommand("theta-identity", "Spectral against geometric theta coefficients");
  add_common(theta, cfg);
  theta->add_option("--x", cfg.x, "Integral quaternion a,b,c,d for x")->delimiter(',');
  theta->add_option("--y", cfg.y, "Integral quaternion a,b,c,d for y")->delimiter(',');
  theta->add_option("--extras", cfg.extras, "Extra N (default 2..cutoff)")->delimiter(',');

  auto* modular = app.add_subcommand("modularity", "Weight n+2 transformation law under Gamma_0(4)");
  add_common(modular, cfg);
  modular->add_option("--gamma", cfg.gamma, "Matrix entries a,b,c,d")->delimiter(',');
  modular->add_option("--z", cfg.z, "Point re,im")->delimiter(',');
  modular->add_option("--x", cfg.x, "Integral quaternion a,b,c,d for x")->delimiter(',');
  modular->add_option("--y", cfg.y, "Integral quaternion a,b,c,d for y")->delimiter(',');

  auto* petersson = app.add_subcommand("petersson", "Normalised Petersson norm estimates");
  add_common(petersson, cfg);

  auto* counting = app.add_subcommand("counting", "Cylinder-class counts, A(X), successive minima");
  add_common(counting, cfg);
  counting->add_option("--family", cfg.family, "all, single, dyadic, aofx or minima");
  counting->add_option("--k-max", cfg.k_max, "Largest shell norm for single counts");
  counting->add_option("--m-min", cfg.m_min, "Smallest dyadic M");
  counting->add_option("--m-max", cfg.m_max, "Largest dyadic M");
  counting->add_option("--r-max", cfg.r_max, "Largest dyadic R");
  counting->add_option("--instances", cfg.instances, "Random lattice instances");

  auto* moments = app.add_subcommand("moments", "Moment sups over a refined grid and growth fits");
  add_common(moments, cfg);
  moments->add_option("--refine-steps", cfg.refine_steps, "Coordinate-ascent rounds");

  auto* report = app.add_subcommand("report", "Summarise the JSON artifacts in --out");
  add_common(report, cfg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const unsigned threads = cfg.threads > 0 ? cfg.threads : hs::default_threads();
  cfg.threads = threads;
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    prepare(cfg);
    Run run(cfg);
    if (cfg.command == "shells") cmd_shells(cfg, run);
    else if (cfg.command == "basis") cmd_basis(cfg, run, threads);
    else if (cfg.command == "hecke-check") cmd_hecke_check(cfg, run, threads);
    else if (cfg.command == "spectral") cmd_spectral(cfg, run, threads);
    else if (cfg.command == "pretrace-check") cmd_pretrace(cfg, run, threads);
    else if (cfg.command == "theta-identity") cmd_theta_identity(cfg, run, threads);
    else if (cfg.command == "modularity") cmd_modularity(cfg, run);
    else if (cfg.command == "petersson") cmd_petersson(cfg, run);
    else if (cfg.command == "counting") cmd_counting(cfg, run, threads);
    else if (cfg.command == "moments") cmd_moments(cfg, run, threads);
    else if (cfg.command == "report") cmd_report(cfg, run);
    return run.finish();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const hs::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
