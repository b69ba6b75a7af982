#include "eigdef/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "eigdef/error.hpp"

namespace eigdef::io {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "array files assume a little-endian host");

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kMissingFile, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string crc32_hex(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << static_cast<unsigned long>(crc);
  return os.str();
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "CSV row width differs from header");
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

namespace {

// Array files -----------------------------------------------------------

std::string encode(const ComplexMatrix& m, bool as_complex) {
  const std::size_t count = static_cast<std::size_t>(m.size());
  std::string bytes(count * (as_complex ? 16 : 8), '\0');
  if (as_complex) {
    std::memcpy(bytes.data(), m.data(), bytes.size());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const double re = m.data()[i].real();
      std::memcpy(bytes.data() + 8 * i, &re, 8);
    }
  }
  return bytes;
}

bool all_real(const ComplexMatrix& m) {
  for (Index i = 0; i < m.size(); ++i) {
    if (m.data()[i].imag() != 0.0) return false;
  }
  return true;
}

class ArrayWriter {
 public:
  explicit ArrayWriter(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& file, const ComplexMatrix& m) {
    const bool as_complex = !all_real(m);
    const std::string bytes = encode(m, as_complex);
    write_file_atomic(dir_ / file, bytes);
    entries_.push_back({{"name", name},
                        {"file", file},
                        {"shape", {m.rows(), m.cols()}},
                        {"dtype", as_complex ? "c128" : "f64"},
                        {"crc32", crc32_hex(bytes)}});
  }

  void add_text(const std::string& name, const std::string& file, const std::string& text) {
    write_file_atomic(dir_ / file, text);
    entries_.push_back({{"name", name}, {"file", file}, {"dtype", "coo"}, {"crc32", crc32_hex(text)}});
  }

  json entries() const { return entries_; }

 private:
  fs::path dir_;
  json entries_ = json::array();
};

class ArrayReader {
 public:
  ArrayReader(fs::path dir, const json& entries) : dir_(std::move(dir)) {
    for (const auto& e : entries) by_name_[e.at("name").get<std::string>()] = e;
  }

  bool has(const std::string& name) const { return by_name_.count(name) > 0; }

  const json& entry(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) {
      throw Error(ErrorCode::kFormat, "manifest lists no array named '" + name + "'");
    }
    return it->second;
  }

  std::string verified_bytes(const json& e) const {
    const std::string file = e.at("file").get<std::string>();
    const std::string bytes = read_file(dir_ / file);
    if (crc32_hex(bytes) != e.at("crc32").get<std::string>()) {
      throw Error(ErrorCode::kChecksumMismatch, "checksum mismatch in " + file);
    }
    return bytes;
  }

  ComplexMatrix matrix(const std::string& name, Index rows, Index cols) const {
    const json& e = entry(name);
    const std::string file = e.at("file").get<std::string>();
    const Index r = e.at("shape").at(0).get<Index>();
    const Index c = e.at("shape").at(1).get<Index>();
    if (r != rows || c != cols) {
      std::ostringstream os;
      os << file << ": shape " << r << "x" << c << " but manifest counts imply " << rows << "x" << cols;
      throw Error(ErrorCode::kShapeMismatch, os.str());
    }
    const bool as_complex = e.at("dtype").get<std::string>() == "c128";
    const std::string bytes = verified_bytes(e);
    const std::size_t count = static_cast<std::size_t>(rows * cols);
    if (bytes.size() != count * (as_complex ? 16 : 8)) {
      std::ostringstream os;
      os << file << ": " << bytes.size() << " bytes, expected " << count * (as_complex ? 16 : 8);
      throw Error(ErrorCode::kShapeMismatch, os.str());
    }
    ComplexMatrix m(rows, cols);
    if (as_complex) {
      std::memcpy(m.data(), bytes.data(), bytes.size());
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        double re;
        std::memcpy(&re, bytes.data() + 8 * i, 8);
        m.data()[i] = Complex(re, 0.0);
      }
    }
    return m;
  }

 private:
  fs::path dir_;
  std::map<std::string, json> by_name_;
};

std::string encode_coo(const SparseMatrix& e) {
  std::ostringstream os;
  for (Index c = 0; c < e.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(e, c); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << format_number(it.value()) << '\n';
    }
  }
  return os.str();
}

SparseMatrix decode_coo(const std::string& text, Index n) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long r, c;
    double v;
    if (!(ls >> r >> c >> v) || r < 0 || c < 0 || r >= n || c >= n) {
      std::ostringstream os;
      os << "E.coo line " << lineno << " is not a valid 'row col value' entry for n = " << n;
      throw Error(ErrorCode::kFormat, os.str());
    }
    triplets.emplace_back(static_cast<Index>(r), static_cast<Index>(c), v);
  }
  SparseMatrix e(n, n);
  e.setFromTriplets(triplets.begin(), triplets.end());
  return e;
}

json read_manifest(const fs::path& dir, const std::string& kind) {
  const fs::path path = dir / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  if (manifest.value("format_version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kFormat, path.string() + ": unsupported format_version");
  }
  if (manifest.value("kind", "") != kind) {
    throw Error(ErrorCode::kFormat, path.string() + ": expected a " + kind + " manifest");
  }
  return manifest;
}

std::string sample_file(const char* prefix, std::size_t k) {
  std::ostringstream os;
  os << prefix << '_' << std::setw(3) << std::setfill('0') << k << ".bin";
  return os.str();
}

const char* side_name(edm::ModeSide s) { return s == edm::ModeSide::kLeft ? "left" : "right"; }

}  // namespace

void save_database(const modal::ModeDatabase& db, const fs::path& dir) {
  db.validate();
  fs::create_directories(dir);
  ArrayWriter arrays(dir);

  ComplexMatrix eig(db.m, db.p());
  for (Index k = 0; k < db.p(); ++k) eig.col(k) = db.samples[static_cast<std::size_t>(k)].eigenvalues;
  arrays.add("eigenvalues", "eigenvalues.bin", eig);
  for (std::size_t k = 0; k < db.samples.size(); ++k) {
    const auto& s = db.samples[k];
    arrays.add("right_" + std::to_string(k), sample_file("modes", k), s.right);
    if (s.left) arrays.add("left_" + std::to_string(k), sample_file("left", k), *s.left);
  }
  if (db.coordinates.size() > 0) arrays.add("coordinates", "coords.bin", db.coordinates.cast<Complex>());
  arrays.add_text("mass", "E.coo", encode_coo(db.mass.matrix()));

  json manifest = {{"format_version", kFormatVersion},
                   {"kind", "mode-database"},
                   {"n", db.n()},
                   {"p", db.p()},
                   {"m", db.m},
                   {"complex", db.is_complex},
                   {"conjugates_implied", db.conjugates_implied},
                   {"left_modes", db.has_left()},
                   {"parameters", db.mus()},
                   {"flags", {{"paired", db.paired}, {"aligned", db.aligned}}},
                   {"generator", db.generator},
                   {"warnings", db.warnings},
                   {"arrays", arrays.entries()}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

modal::ModeDatabase load_database(const fs::path& dir) {
  const json manifest = read_manifest(dir, "mode-database");
  ArrayReader arrays(dir, manifest.at("arrays"));

  modal::ModeDatabase db;
  const Index n = manifest.at("n").get<Index>();
  const Index p = manifest.at("p").get<Index>();
  db.m = manifest.at("m").get<Index>();
  const auto params = manifest.at("parameters").get<std::vector<double>>();
  if (static_cast<Index>(params.size()) != p) {
    std::ostringstream os;
    os << "manifest p = " << p << " but " << params.size() << " parameters listed";
    throw Error(ErrorCode::kShapeMismatch, os.str());
  }
  db.is_complex = manifest.at("complex").get<bool>();
  db.conjugates_implied = manifest.value("conjugates_implied", false);
  db.paired = manifest.at("flags").at("paired").get<bool>();
  db.aligned = manifest.at("flags").at("aligned").get<bool>();
  db.generator = manifest.value("generator", json());
  db.warnings = manifest.value("warnings", std::vector<std::string>{});
  const bool left = manifest.value("left_modes", false);

  const json& mass_entry = arrays.entry("mass");
  db.mass = MassMatrix(decode_coo(arrays.verified_bytes(mass_entry), n));

  const ComplexMatrix eig = arrays.matrix("eigenvalues", db.m, p);
  for (Index k = 0; k < p; ++k) {
    modal::ModeSample s;
    s.mu = params[static_cast<std::size_t>(k)];
    s.eigenvalues = eig.col(k);
    s.right = arrays.matrix("right_" + std::to_string(k), n, db.m);
    if (left) s.left = arrays.matrix("left_" + std::to_string(k), n, db.m);
    db.samples.push_back(std::move(s));
  }
  if (arrays.has("coordinates")) db.coordinates = arrays.matrix("coordinates", n, 1).real();
  db.validate();
  return db;
}

void save_edm_bases(const std::vector<edm::EdmBasis>& bases, const fs::path& dir) {
  if (bases.empty()) throw Error(ErrorCode::kInvalidArgument, "no EDM bases to save");
  fs::create_directories(dir);
  ArrayWriter arrays(dir);
  json list = json::array();
  const auto& first = bases.front();
  for (const auto& b : bases) {
    if (b.n() != first.n() || b.sample_mus != first.sample_mus) {
      throw Error(ErrorCode::kShapeMismatch, "EDM bases in one directory must share n and parameters");
    }
    const std::string tag = std::string(side_name(b.side)) + "_" + std::to_string(b.mode_index + 1);
    arrays.add("mean_" + tag, "mean_" + tag + ".bin", b.mean_mode);
    arrays.add("edms_" + tag, "edms_" + tag + ".bin", b.edms);
    arrays.add("sigma_" + tag, "sigma_" + tag + ".bin", b.singular_values.cast<Complex>());
    arrays.add("coeff_" + tag, "coeff_" + tag + ".bin", b.coefficients);
    double energy = 0.0;
    if (b.singular_values.sum() > 0.0) energy = edm::energy_fraction(b.singular_values, b.rank());
    list.push_back({{"mode", b.mode_index + 1},
                    {"side", side_name(b.side)},
                    {"r", b.rank()},
                    {"sigma_count", b.singular_values.size()},
                    {"energy", energy}});
  }
  json manifest = {{"format_version", kFormatVersion},
                   {"kind", "edm-basis"},
                   {"n", first.n()},
                   {"p", first.sample_mus.size()},
                   {"parameters", first.sample_mus},
                   {"bases", list},
                   {"arrays", arrays.entries()}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<edm::EdmBasis> load_edm_bases(const fs::path& dir) {
  const json manifest = read_manifest(dir, "edm-basis");
  ArrayReader arrays(dir, manifest.at("arrays"));
  const Index n = manifest.at("n").get<Index>();
  const Index p = manifest.at("p").get<Index>();
  const auto params = manifest.at("parameters").get<std::vector<double>>();
  if (static_cast<Index>(params.size()) != p) {
    throw Error(ErrorCode::kShapeMismatch, "manifest p disagrees with the parameter list");
  }
  std::vector<edm::EdmBasis> out;
  for (const auto& entry : manifest.at("bases")) {
    edm::EdmBasis b;
    b.mode_index = entry.at("mode").get<Index>() - 1;
    const std::string side = entry.at("side").get<std::string>();
    b.side = side == "left" ? edm::ModeSide::kLeft : edm::ModeSide::kRight;
    const Index r = entry.at("r").get<Index>();
    const Index ns = entry.at("sigma_count").get<Index>();
    const std::string tag = side + "_" + std::to_string(b.mode_index + 1);
    b.sample_mus = params;
    b.mean_mode = arrays.matrix("mean_" + tag, n, 1);
    b.edms = arrays.matrix("edms_" + tag, n, r);
    b.singular_values = arrays.matrix("sigma_" + tag, ns, 1).real();
    b.coefficients = arrays.matrix("coeff_" + tag, r, p);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace eigdef::io
