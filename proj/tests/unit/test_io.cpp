#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "../support/fixtures.hpp"
#include "eigdef/error.hpp"
#include "eigdef/io.hpp"

using namespace eigdef;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("eigdef_io_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void expect_equal(const modal::ModeDatabase& a, const modal::ModeDatabase& b) {
  REQUIRE(a.p() == b.p());
  CHECK(a.m == b.m);
  CHECK(a.is_complex == b.is_complex);
  CHECK(a.conjugates_implied == b.conjugates_implied);
  CHECK(a.paired == b.paired);
  CHECK(a.aligned == b.aligned);
  CHECK(a.generator == b.generator);
  CHECK(a.mass == b.mass);
  CHECK(a.has_left() == b.has_left());
  for (Index k = 0; k < a.p(); ++k) {
    const auto& x = a.samples[static_cast<std::size_t>(k)];
    const auto& y = b.samples[static_cast<std::size_t>(k)];
    CHECK(x.mu == y.mu);
    CHECK((x.eigenvalues.array() == y.eigenvalues.array()).all());
    CHECK((x.right.array() == y.right.array()).all());
    if (x.left) CHECK((x.left->array() == y.left->array()).all());
  }
}

ErrorCode load_code(const fs::path& dir, std::string* message = nullptr) {
  try {
    io::load_database(dir);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("load succeeded");
  return ErrorCode::kFormat;
}

}  // namespace

TEST_CASE("real database round trip is bit-exact") {
  TempDir tmp;
  const auto db = testing::heat_rod_database(testing::linspace(0.0, 28.0, 5), 4);
  io::save_database(db, tmp.path);
  expect_equal(db, io::load_database(tmp.path));
}

TEST_CASE("complex database with left modes round trips") {
  TempDir tmp;
  systems::SpringChainParams p;
  p.n_mass = 5;
  const auto sys = systems::first_order_form(systems::spring_chain_with_defect(p));
  const auto db = testing::prepared(modal::sample_spectrum(sys, {0.1, 0.5, 0.9}, 3));
  io::save_database(db, tmp.path);
  expect_equal(db, io::load_database(tmp.path));
}

TEST_CASE("dense mass matrices survive the coordinate format") {
  TempDir tmp;
  auto db = testing::synthetic_database(6, 3, 1, 2);
  RealMatrix e = RealMatrix::Identity(6, 6) * 2.0;
  e(0, 1) = e(1, 0) = 0.1 / 3.0;
  db.mass = MassMatrix(e);
  io::save_database(db, tmp.path);
  CHECK(io::load_database(tmp.path).mass == db.mass);
}

TEST_CASE("tampered array fails its checksum") {
  TempDir tmp;
  io::save_database(testing::synthetic_database(8, 4, 2, 1), tmp.path);
  const fs::path target = tmp.path / "modes_002.bin";
  REQUIRE(fs::exists(target));
  {
    std::fstream f(target, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(3);
    f.put('\x5a');
  }
  std::string message;
  CHECK(load_code(tmp.path, &message) == ErrorCode::kChecksumMismatch);
  CHECK(message.find("modes_002.bin") != std::string::npos);
}

TEST_CASE("manifest counts that disagree are a shape error") {
  TempDir tmp;
  io::save_database(testing::synthetic_database(8, 4, 2, 1), tmp.path);
  auto manifest = nlohmann::json::parse(io::read_file(tmp.path / "manifest.json"));
  manifest["p"] = 5;
  io::write_file_atomic(tmp.path / "manifest.json", manifest.dump());
  CHECK(load_code(tmp.path) == ErrorCode::kShapeMismatch);
  manifest["p"] = 4;
  manifest["m"] = 3;
  io::write_file_atomic(tmp.path / "manifest.json", manifest.dump());
  CHECK(load_code(tmp.path) == ErrorCode::kShapeMismatch);
}

TEST_CASE("missing files") {
  TempDir tmp;
  CHECK(load_code(tmp.path / "nowhere") == ErrorCode::kMissingFile);
  io::save_database(testing::synthetic_database(8, 4, 1, 1), tmp.path);
  fs::remove(tmp.path / "eigenvalues.bin");
  CHECK(load_code(tmp.path) == ErrorCode::kMissingFile);
}

TEST_CASE("wrong manifest kind") {
  TempDir tmp;
  const auto db = testing::synthetic_database(8, 4, 2, 1);
  io::save_edm_bases(edm::compute_all_edm_bases(db, edm::ExplicitRank{2}), tmp.path);
  CHECK(load_code(tmp.path) == ErrorCode::kFormat);
}

TEST_CASE("EDM bases round trip") {
  TempDir tmp;
  const auto db = testing::heat_rod_database(testing::linspace(0.0, 28.0, 6), 3);
  const auto bases = edm::compute_all_edm_bases(db, edm::EnergyThreshold{});
  io::save_edm_bases(bases, tmp.path);
  const auto back = io::load_edm_bases(tmp.path);
  REQUIRE(back.size() == bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    CHECK(back[i].mode_index == bases[i].mode_index);
    CHECK(back[i].side == bases[i].side);
    CHECK(back[i].sample_mus == bases[i].sample_mus);
    CHECK((back[i].mean_mode.array() == bases[i].mean_mode.array()).all());
    CHECK((back[i].edms.array() == bases[i].edms.array()).all());
    CHECK((back[i].coefficients.array() == bases[i].coefficients.array()).all());
    CHECK((back[i].singular_values.array() == bases[i].singular_values.array()).all());
  }
}

TEST_CASE("CSV tables and number formatting") {
  io::CsvTable t({"a [-]", "b [s]"});
  t.add_row({"1", io::format_number(0.1)});
  CHECK(t.str() == "a [-],b [s]\n1,0.1\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
  const double x = 1.0 / 3.0;
  CHECK(std::stod(io::format_number(x)) == x);
  CHECK(io::crc32_hex("123456789") == "cbf43926");
}
