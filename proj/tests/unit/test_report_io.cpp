#include <filesystem>

#include "doctest.h"
#include "sedlab/report_io.hpp"

using namespace sedlab;

TEST_CASE("doubles round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12.732395447351628}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv table") {
  CsvTable t({"a", "b"});
  t.add_row({1.0, 0.5});
  CHECK(t.text() == "a,b\n1,0.5\n");
  CHECK_THROWS(t.add_row({1.0}));
  CHECK(t.rows() == 1);
}

TEST_CASE("sha256 known digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("write and read back") {
  const auto dir = std::filesystem::temp_directory_path() / "sedlab_report_io_test";
  std::filesystem::remove_all(dir);
  write_text(dir / "sub" / "f.txt", "hello\n");
  CHECK(read_text(dir / "sub" / "f.txt") == "hello\n");
  std::filesystem::remove_all(dir);
}
