#include <doctest.h>

#include <filesystem>

#include "hecke_sphere/io.hpp"

using namespace hs;

TEST_CASE("number formatting") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(2) == "2");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(std::stod(io::format_double(1.0 / 3)) == 1.0 / 3);
  mpq_class q(6, 4);
  q.canonicalize();
  CHECK(io::rational(q) == "3/2");
  CHECK(io::rational(mpq_class(-5)) == "-5/1");
  CHECK(io::integer(mpz_class("123456789012345678901234567890")) == "123456789012345678901234567890");
}

TEST_CASE("documents carry schema, command and config first") {
  const io::json cfg = {{"n", 2}, {"seed", 7}};
  const auto doc = io::document("basis", cfg, {{"dim", 9}});
  auto it = doc.begin();
  CHECK(it.key() == "schema");
  CHECK(*it == io::kSchema);
  ++it;
  CHECK(it.key() == "command");
  CHECK(doc["config"]["seed"] == 7);
  CHECK(doc["dim"] == 9);
}

TEST_CASE("JSON conversions") {
  const auto q = io::to_json(Quaternion::from_doubled(1, 1, -1, 3));
  CHECK(q["parity"] == "coset");
  CHECK(q["norm"] == 3);
  const auto b = io::to_json(harmonic_basis(1));
  CHECK(b["dim"] == 4);
  CHECK(b["gram"][0][0] == "1/4");
  CHECK(b["gram"][0][1] == "0/1");
  CountRecord r;
  r.family = "single";
  r.count = 8;
  CHECK(io::to_json(r)["count"] == 8);
}

TEST_CASE("CSV rendering") {
  io::CsvTable t({"k", "note"});
  t.add_row({"1", "plain"});
  t.add_row({"2", "has,comma"});
  t.add_row({"3", "has \"quote\""});
  CHECK(t.rows() == 3);
  CHECK(t.body() == "k,note\n1,plain\n2,\"has,comma\"\n3,\"has \"\"quote\"\"\"\n");
  const auto full = t.render({{"seed", 1}});
  CHECK(full.rfind("# schema=hecke-sphere/1 config={\"seed\":1}\n", 0) == 0);
  CHECK(full.substr(full.find('\n') + 1) == t.body());
  CHECK_THROWS_AS(t.add_row({"only one"}), std::invalid_argument);
}

TEST_CASE("file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "hs_test_io" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = (dir / "x.txt").string();
  io::write_file(path, "abc\n");
  CHECK(io::read_file(path) == "abc\n");
  std::filesystem::remove_all(dir.parent_path());
  CHECK_THROWS(io::read_file(path));
}
