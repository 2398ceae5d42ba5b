#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "hs_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(HS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string without_comment(const std::string& csv) {
  return csv.rfind("#", 0) == 0 ? csv.substr(csv.find('\n') + 1) : csv;
}

std::size_t data_rows(const std::string& csv) {
  std::size_t lines = 0;
  for (char c : without_comment(csv)) lines += c == '\n';
  return lines - 1;
}

}  // namespace

TEST_CASE("shells writes one row per element") {
  const auto out = kRoot / "shells";
  fs::remove_all(out);
  REQUIRE(run("shells --k 1 --parity integral --out " + out.string()) == 0);
  CHECK(data_rows(slurp(out / "shells_k1_integral.csv")) == 8);
  REQUIRE(run("shells --k 3 --parity integral --out " + out.string()) == 0);
  CHECK(data_rows(slurp(out / "shells_k3_integral.csv")) == 32);
}

TEST_CASE("hecke-check and pretrace-check succeed") {
  const auto out = kRoot / "checks";
  fs::remove_all(out);
  CHECK(run("hecke-check --n 2 --primes 3,5,7 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "hecke-check_n2.json"));
  CHECK(slurp(out / "hecke-check_n2.json").find("\"passed\": true") != std::string::npos);
  CHECK(run("pretrace-check --n 4 --pairs 100 --seed 7 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "pretrace-check_n4.json"));
}

TEST_CASE("invalid input exits with status 2") {
  const auto out = kRoot / "bad";
  CHECK(run("shells --k 1 --no-such-flag --out " + out.string()) == 2);
  CHECK(run("") == 2);
  CHECK(run("spectral --n 3 --out " + out.string()) == 2);
  CHECK(run("shells --k 1 --parity sideways --out " + out.string()) == 2);
}

TEST_CASE("identical seeds give identical CSV bodies") {
  const auto a = kRoot / "det_a", b = kRoot / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string args = "counting --family all --k-max 200 --m-max 64 --r-max 8 --instances 5 --seed 3 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  for (const char* name : {"counting_single.csv", "counting_dyadic.csv", "counting_minima.csv"})
    CHECK(without_comment(slurp(a / name)) == without_comment(slurp(b / name)));
}
