#include "hecke_sphere/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hs::io {

namespace {

json point_json(const Point4& p) { return json::array({p[0], p[1], p[2], p[3]}); }

json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json rational(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str() + "/1";
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

json integer(const mpz_class& z) { return z.get_str(); }

json to_json(const Quaternion& q) {
  const auto& c = q.doubled();
  return {{"doubled", json::array({c[0], c[1], c[2], c[3]})}, {"parity", to_string(q.parity())}, {"norm", q.norm()}};
}

json to_json(const HarmonicBasis& basis) {
  json polys = json::array();
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    json terms = json::array();
    for (const auto& [alpha, c] : basis.basis[i].terms())
      terms.push_back(json::array({alpha[0], alpha[1], alpha[2], alpha[3], rational(c)}));
    const auto& p = basis.pivots[i];
    polys.push_back({{"pivot", json::array({p[0], p[1], p[2], p[3]})}, {"terms", terms}});
  }
  json gram = json::array();
  for (std::size_t i = 0; i < basis.gram.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < basis.gram.cols(); ++j) row.push_back(rational(basis.gram(i, j)));
    gram.push_back(row);
  }
  return {{"n", basis.n}, {"dim", basis.dim()}, {"basis", polys}, {"gram", gram}};
}

json to_json(const RelationsReport& report) {
  json results = json::array();
  for (const auto& r : report.results)
    results.push_back({{"identity", r.identity}, {"M", r.M}, {"N", r.N}, {"passed", r.passed}});
  return {{"n", report.n}, {"computed", report.computed}, {"all_passed", report.all_passed()}, {"results", results}};
}

template <class T>
json decomposition_json(const SpectralDecompositionT<T>& dec) {
  json spaces = json::array();
  for (const auto& sp : dec.spaces) {
    json lambda = json::object();
    for (const auto& [N, v] : sp.lambda) lambda[std::to_string(N)] = v;
    spaces.push_back({{"dim", sp.dim()}, {"t1_flag", sp.t1_flag}, {"lambda", lambda}});
  }
  return {{"n", dec.n},          {"primes", dec.primes},        {"extras", dec.extras},
          {"seed", dec.seed},    {"total_dim", dec.total_dim()}, {"max_residual", dec.max_residual},
          {"spaces", spaces}};
}

json to_json(const SpectralDecomposition& dec) { return decomposition_json(dec); }
json to_json(const SpectralDecompositionQ& dec) { return decomposition_json(dec); }

json to_json(const PretraceReport& report) {
  return {{"n", report.n},
          {"pairs", report.pairs},
          {"seed", report.seed},
          {"max_residual", report.max_residual},
          {"tolerance", report.tolerance},
          {"passed", report.passed}};
}

json to_json(const ModularityResult& r) {
  auto cplx = [](std::complex<double> z) { return json::array({z.real(), z.imag()}); };
  return {{"n", r.n},
          {"gamma", json::array({r.gamma.a, r.gamma.b, r.gamma.c, r.gamma.d})},
          {"z", cplx(r.z)},
          {"gamma_z", cplx(r.gz)},
          {"cutoff", r.cutoff},
          {"F_z", cplx(r.f_z)},
          {"F_gamma_z", cplx(r.f_gz)},
          {"residual", r.residual},
          {"tail_bound", r.tail_bound},
          {"identically_zero", r.identically_zero}};
}

json to_json(const PeterssonEstimate& e) {
  return {{"n", e.n},
          {"cutoff", e.cutoff},
          {"log_I1", finite_or_string(e.log_i1)},
          {"log_I2", finite_or_string(e.log_i2)},
          {"log_rho", finite_or_string(e.log_rho)},
          {"rho", e.rho},
          {"relative_tail", e.relative_tail},
          {"precision", e.extended ? "extended" : "double"}};
}

json to_json(const CountRecord& r) {
  return {{"family", r.family}, {"k_or_M", r.k_or_M}, {"R", r.R},         {"parity", to_string(r.parity)},
          {"count", r.count},   {"rhs", r.rhs},       {"bound", r.bound}, {"constant", r.constant}};
}

json to_json(const MomentReport& r) {
  auto stat = [](const MomentStat& s) {
    return json{{"value", s.value},
                {"grid_value", s.grid_value},
                {"refinement_delta", s.value - s.grid_value},
                {"point", point_json(s.point)},
                {"grid_point", point_json(s.grid_point)}};
  };
  return {{"n", r.n},
          {"grid_size", r.grid_size},
          {"seed", r.seed},
          {"refine_steps", r.refine_steps},
          {"flagged_spaces", r.flagged_spaces},
          {"flagged_dim", r.flagged_dim},
          {"sup_family", stat(r.family)},
          {"sup_fourth", stat(r.fourth)},
          {"sup_individual", stat(r.individual)},
          {"closure_error", r.closure_error},
          {"fourth_below_family", r.fourth_below_family},
          {"cauchy_schwarz_floor", r.cauchy_schwarz_floor}};
}

json to_json(const GrowthFit& fit) {
  return {{"stat", fit.stat},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"residuals", fit.residuals},
          {"n_used", fit.used}};
}

json to_json(const LogLogFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"residuals", fit.residuals}};
}

json document(const std::string& command, const json& config, const json& body) {
  json doc = {{"schema", kSchema}, {"command", command}, {"config", config}};
  for (const auto& [k, v] : body.items()) doc[k] = v;
  return doc;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width differs from the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::body() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

std::string CsvTable::render(const json& config) const {
  return std::string("# schema=") + kSchema + " config=" + config.dump() + "\n" + body();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace hs::io
