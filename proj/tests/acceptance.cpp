// Acceptance gate: one line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hecke_sphere/gon.hpp"
#include "hecke_sphere/hecke.hpp"
#include "hecke_sphere/moments.hpp"
#include "hecke_sphere/spectral.hpp"
#include "hecke_sphere/theta.hpp"

namespace fs = std::filesystem;
using namespace hs;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

const std::int64_t kPrimes[] = {3, 5, 7};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::int64_t sigma(std::int64_t k) {
  std::int64_t s = 0;
  for (std::int64_t d = 1; d <= k; ++d)
    if (k % d == 0) s += d;
  return s;
}

Outcome jacobi() {
  for (std::int64_t k = 1; k <= 2000; k += 2)
    if (r4_count(k) != 8 * sigma(k)) return {false, "mismatch at k=" + std::to_string(k)};
  return {true, "1000 odd k checked"};
}

Outcome hecke_algebra() {
  std::size_t identities = 0;
  for (int n = 2; n <= 10; n += 2) {
    const auto rep = hecke_relations_check(n, kPrimes, 2);
    for (const auto& r : rep.results) {
      ++identities;
      if (!r.passed)
        return {false, r.identity + " fails at n=" + std::to_string(n) + " (" + std::to_string(r.M) + "," +
                           std::to_string(r.N) + ")"};
    }
  }
  return {true, std::to_string(identities) + " exact identities over n=2..10"};
}

Outcome t1_odd() {
  for (int n : {1, 3, 5, 7})
    if (!t1_vanishing(n)) return {false, "T1 nonzero at n=" + std::to_string(n)};
  return {true, "n=1,3,5,7"};
}

Outcome pretrace() {
  double worst = 0;
  for (int n = 2; n <= 16; n += 2) {
    const auto basis = harmonic_basis(n);
    const auto dec = joint_eigenspaces<double>(basis, kPrimes, {});
    const auto r = pretrace_check(basis, dec, 100, 1);
    worst = std::max(worst, r.max_residual / r.tolerance);
    if (!r.passed) return {false, "n=" + std::to_string(n) + " residual " + fmt("%.3g", r.max_residual)};
  }
  return {true, "worst residual/tolerance " + fmt("%.3g", worst)};
}

Outcome central_identity() {
  const Quaternion diagonal_points[] = {Quaternion::integral(1, 0, 0, 0), Quaternion::integral(1, 2, 2, 0),
                                        Quaternion::integral(3, 4, 0, 0)};
  const Quaternion px = Quaternion::integral(1, 2, 0, -1), py = Quaternion::integral(2, 1, 1, 0);
  std::vector<std::int64_t> extras;
  for (std::int64_t k = 2; k <= 40; ++k)
    if (k != 3 && k != 5 && k != 7) extras.push_back(k);
  double worst = 0;
  std::size_t checks = 0;
  for (int n = 2; n <= 8; n += 2) {
    const auto basis = harmonic_basis(n);
    const auto dec = joint_eigenspaces<double>(basis, kPrimes, extras);
    std::vector<std::pair<Quaternion, Quaternion>> pairs;
    for (const auto& q : diagonal_points) pairs.emplace_back(q, q);
    pairs.emplace_back(px, py);
    for (const auto& [qx, qy] : pairs) {
      const auto bx = basis_values_at<double>(basis, qx), by = basis_values_at<double>(basis, qy);
      for (std::int64_t k = 1; k <= 40; ++k) {
        const double theta = theta_coefficient(n, qx, qy, k).value.get_d();
        const double spec = spectral_coefficient<double>(dec, bx, by, k);
        const double err = std::fabs(spec - theta) / (1 + std::fabs(theta));
        worst = std::max(worst, err);
        ++checks;
        if (err > 1e-8) return {false, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " error " + fmt("%.3g", err)};
      }
    }
  }
  return {true, std::to_string(checks) + " coefficients, worst scaled error " + fmt("%.3g", worst)};
}

Outcome modularity() {
  const Quaternion qx = Quaternion::integral(1, 2, 0, -1), qy = Quaternion::integral(2, 1, 1, 0);
  std::string detail;
  bool ok = true;
  for (int n : {2, 4}) {
    const auto r = modularity_check(n, {1, 0, 4, 1}, {0, 0.5}, 0, qx, qy);
    ok = ok && r.residual <= 1e-6 && r.tail_bound < 1e-8;
    if (!detail.empty()) detail += "; ";
    detail += "n=" + std::to_string(n) + " K=" + std::to_string(r.cutoff) + " residual " + fmt("%.2g", r.residual) +
              " tail " + fmt("%.2g", r.tail_bound) + (r.identically_zero ? " (F=0)" : "");
  }
  return {ok, detail};
}

Outcome counting() {
  std::vector<CountRecord> recs;
  for (std::int64_t R = 1; R <= 64; R *= 2) {
    for (std::int64_t k = 1; k <= 4096; ++k) recs.push_back(shell_class_count(k, R));
    for (std::int64_t M = 16; M <= 4096; M *= 2) recs.push_back(dyadic_class_count(M, R));
  }
  const double c = fit_constant(recs);
  return {c <= 64, std::to_string(recs.size()) + " records, C = " + fmt("%.4f", c)};
}

Outcome gon() {
  double lo = 1e300, hi = 0;
  for (const auto& inst : random_gon_instances(50, 20240611)) {
    const auto pb = product_bound_check(inst.lattice, inst.body);
    const auto mk = minkowski_check(inst.lattice, inst.body, pb.minima);
    if (!pb.holds || !mk.holds) return {false, "failing instance: " + inst.body.describe()};
    lo = std::min(lo, mk.normalised);
    hi = std::max(hi, mk.normalised);
  }
  return {true, "50 instances, normalised minima product in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]"};
}

Outcome growth() {
  bool ok = true;
  std::string detail = "A(X) slopes";
  for (int n : {64, 128, 256}) {
    const double s = a_of_x_growth(n, n / 8, n).slope;
    ok = ok && s >= 2.5 && s <= 3.2;
    detail += " " + fmt("%.3f", s);
  }
  std::vector<double> xs, ys;
  for (int n = 8; n <= 64; n += 2) {
    xs.push_back(n);
    ys.push_back(petersson_estimate(n, std::max(10 * n, 200)).rho);
  }
  const double rho_slope = loglog_fit(xs, ys).slope;
  ok = ok && rho_slope <= 1.5;
  return {ok, detail + "; rho slope " + fmt("%.3f", rho_slope)};
}

Outcome moments() {
  std::vector<MomentReport> reports;
  double closure = 0;
  for (int n = 2; n <= 24; n += 2) {
    const auto basis = harmonic_basis(n);
    const auto dec = joint_eigenspaces<double>(basis, kPrimes, {});
    reports.push_back(moment_sweep(basis, dec, 5000, 1));
    closure = std::max(closure, reports.back().closure_error);
  }
  bool ok = closure <= 1e-7;
  std::string detail;
  for (const auto& f : growth_fit(reports)) {
    if (f.stat == "sup_individual") continue;
    ok = ok && f.slope >= 2.0 && f.slope <= 3.5;
    detail += f.stat + " slope " + fmt("%.3f", f.slope) + ", ";
  }
  return {ok, detail + "closure " + fmt("%.2g", closure)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string csv_body(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  std::string s = os.str();
  return s.rfind("#", 0) == 0 ? s.substr(s.find('\n') + 1) : s;
}

Outcome determinism() {
  const std::vector<std::string> commands = {
      "shells --k 45 --parity coset",
      "hecke-check --n 4 --export 3,5",
      "spectral --n 6 --extras 9,15",
      "theta-identity --n-range 2:4:2 --cutoff 12",
      "modularity --n 4",
      "petersson --n-range 8:16:2",
      "counting --k-max 512 --m-max 512 --r-max 16 --instances 10",
      "moments --n-range 4:10:2 --grid 500 --refine-steps 5",
  };
  const fs::path root = fs::temp_directory_path() / "hs_acceptance";
  std::size_t files = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path a = root / (std::to_string(c) + "a"), b = root / (std::to_string(c) + "b");
    fs::remove_all(a);
    fs::remove_all(b);
    if (run_cli(commands[c] + " --seed 5 --out " + a.string()) != 0 ||
        run_cli(commands[c] + " --seed 5 --out " + b.string()) != 0)
      return {false, "command failed: " + commands[c]};
    std::size_t seen = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++seen;
      if (csv_body(e.path()) != csv_body(b / e.path().filename()))
        return {false, "CSV differs: " + commands[c] + " -> " + e.path().filename().string()};
    }
    if (seen == 0) return {false, "no CSV from " + commands[c]};
    files += seen;
  }
  fs::remove_all(root);
  return {true, std::to_string(files) + " CSV files over " + std::to_string(commands.size()) + " commands"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 r4(k) = 8 sigma(k), odd k <= 2000", jacobi},
      {"2 Hecke algebra identities, n = 2..10", hecke_algebra},
      {"3 T1 vanishes for odd n", t1_odd},
      {"4 pre-trace formula, n = 2..16", pretrace},
      {"5 central identity, n = 2..8, k <= 40", central_identity},
      {"6 modularity under [[1,0],[4,1]] at z = i/2", modularity},
      {"7 counting constant <= 64", counting},
      {"8 Minkowski sandwich and product bound", gon},
      {"9 A(X) and rho growth", growth},
      {"10 moment growth and closure, n = 2..24", moments},
      {"11 CLI determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.passed;
  }
  std::printf("%d/11 criteria passed\n", 11 - failed);
  return failed ? 1 : 0;
}
