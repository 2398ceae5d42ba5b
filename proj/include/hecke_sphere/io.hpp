#pragma once

// JSON and CSV serialisation of experiment results. Rationals travel as
// "p/q" strings; every file carries the schema tag and the run config.

#include <gmpxx.h>

#include <json.hpp>
#include <string>
#include <vector>

#include "hecke_sphere/gon.hpp"
#include "hecke_sphere/harmonic.hpp"
#include "hecke_sphere/hecke.hpp"
#include "hecke_sphere/moments.hpp"
#include "hecke_sphere/spectral.hpp"
#include "hecke_sphere/theta.hpp"

namespace hs::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "hecke-sphere/1";

/// Shortest round-trip decimal form ("%.17g"); "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

json rational(const mpq_class& q);
json integer(const mpz_class& z);

json to_json(const Quaternion& q);
json to_json(const HarmonicBasis& basis);
json to_json(const RelationsReport& report);
json to_json(const SpectralDecomposition& dec);
json to_json(const SpectralDecompositionQ& dec);
json to_json(const PretraceReport& report);
json to_json(const ModularityResult& result);
json to_json(const PeterssonEstimate& estimate);
json to_json(const CountRecord& record);
json to_json(const MomentReport& report);
json to_json(const GrowthFit& fit);
json to_json(const LogLogFit& fit);

/// {"schema", "command", "config", ...body}.
json document(const std::string& command, const json& config, const json& body);

/// CSV with a leading "# schema=... config=..." comment, then a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string render(const json& config) const;
  /// Header and rows only, without the config comment.
  std::string body() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to `path`, creating parent directories. Throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace hs::io
