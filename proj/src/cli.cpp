#include "eigdef/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eigdef/edm.hpp"
#include "eigdef/error.hpp"
#include "eigdef/io.hpp"
#include "eigdef/modal.hpp"
#include "eigdef/rom.hpp"
#include "eigdef/systems.hpp"

namespace fs = std::filesystem;

namespace eigdef::cli {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "grid '" + text + "' is not start:stop:count");
  }
  double start = 0.0;
  double stop = 0.0;
  long count = 0;
  try {
    std::size_t used = 0;
    start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    count = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "grid '" + text + "' is not start:stop:count");
  }
  if (count < 2 || !(stop > start)) {
    throw Error(ErrorCode::kInvalidArgument, "grid '" + text + "' needs stop > start and count >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == count - 1 ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

namespace {

using io::format_number;

fs::path output_path(const std::string& given, const std::string& fallback_name) {
  if (!given.empty()) return given;
  if (const char* dir = std::getenv(kOutDirVariable); dir != nullptr && *dir != '\0') {
    return fs::path(dir) / fallback_name;
  }
  throw Error(ErrorCode::kInvalidArgument,
              std::string("no --out given and ") + kOutDirVariable + " is not set");
}

std::vector<double> uniform_grid(double lo, double hi, Index count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

void prepare(modal::ModeDatabase& db, std::vector<modal::Crossing>* crossings = nullptr) {
  if (!db.paired) {
    auto paired = modal::pair_modes(db);
    db = std::move(paired.db);
    db.warnings.insert(db.warnings.end(), paired.warnings.begin(), paired.warnings.end());
    if (crossings != nullptr) *crossings = std::move(paired.crossings);
  }
  if (!db.aligned) {
    auto aligned = modal::align(db);
    db = std::move(aligned.db);
    db.warnings.insert(db.warnings.end(), aligned.warnings.begin(), aligned.warnings.end());
  }
}

bool is_bump(const modal::ModeDatabase& db) {
  return db.generator.is_object() && db.generator.value("kind", "") == "traveling-bump";
}

// Ground-truth mode at an unsampled μ, rebuilt from the database's generator.
std::function<ComplexVector(double)> truth_source(const modal::ModeDatabase& db, Index mode) {
  if (!db.generator.is_object() || !db.generator.contains("kind")) {
    throw Error(ErrorCode::kInvalidArgument, "database carries no generator to compute reference modes");
  }
  if (is_bump(db)) {
    const auto params = db.generator.at("params");
    const Index n = params.at("n").get<Index>();
    const double width = params.at("width").get<double>();
    return [n, width](double mu) -> ComplexVector {
      return systems::traveling_bump(n, width, mu).cast<Complex>();
    };
  }
  auto sys = std::make_shared<systems::FullOrderSystem>(systems::make_system(db.generator));
  return [sys, &db, mode](double mu) { return modal::reference_mode(*sys, db, mode, mu); };
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stol(item));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "'" + item + "' is not an integer");
    }
  }
  return out;
}

// Tracked mode selection: "all" or a 1-based index.
std::vector<Index> parse_modes(const std::string& text, Index m) {
  if (text == "all") {
    std::vector<Index> out(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
  }
  std::vector<Index> out;
  for (Index one_based : parse_index_list(text)) {
    if (one_based < 1 || one_based > m) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mode " + std::to_string(one_based) + " outside 1.." + std::to_string(m));
    }
    out.push_back(one_based - 1);
  }
  return out;
}

edm::ModeSide parse_side(const std::string& s) {
  if (s == "right") return edm::ModeSide::kRight;
  if (s == "left") return edm::ModeSide::kLeft;
  throw Error(ErrorCode::kInvalidArgument, "side must be 'right' or 'left'");
}

RealVector read_vector_file(const fs::path& path) {
  std::string text = io::read_file(path);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream is(text);
  std::vector<double> values;
  double v = 0.0;
  while (is >> v) values.push_back(v);
  if (!is.eof()) throw Error(ErrorCode::kFormat, "non-numeric entry in " + path.string());
  return Eigen::Map<RealVector>(values.data(), static_cast<Index>(values.size()));
}

RealMatrix read_table_file(const fs::path& path) {
  std::istringstream is(io::read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> row;
    double v = 0.0;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw Error(ErrorCode::kFormat, "non-numeric entry in " + path.string());
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kFormat, path.string() + " holds no rows");
  RealMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw Error(ErrorCode::kShapeMismatch, "ragged rows in " + path.string());
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return out;
}

// Initial state: an equilibrium, a file, or (zero-source systems) a mode shape.
RealVector initial_state(const systems::FullOrderSystem& sys, const std::optional<double>& x0_mu,
                         const std::string& x0_file) {
  if (!x0_file.empty()) {
    RealVector x0 = read_vector_file(x0_file);
    if (x0.size() != sys.n()) throw Error(ErrorCode::kDimensionMismatch, "initial state length differs from n");
    return x0;
  }
  if (!x0_mu) throw Error(ErrorCode::kInvalidArgument, "give --x0-mu or --x0-file");
  // The equilibrium of an out-of-range parameter is allowed: rebuild the
  // generator with its domain widened to cover it.
  nlohmann::json gen = sys.metadata().generator;
  if (gen.is_object() && gen.value("kind", "") == "heat-rod") {
    auto params = gen["params"];
    const double lo = std::min(sys.domain().lower, *x0_mu);
    const double hi = std::max(sys.domain().upper, *x0_mu);
    params["domain"] = {lo, hi};
    gen["params"] = params;
    return systems::equilibrium(systems::make_system(gen), *x0_mu);
  }
  return systems::equilibrium(sys, *x0_mu);
}

// ---- subcommands ---------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::string grid;
  Index m = 6;
  bool raw = false;
  std::string out;
  std::optional<Index> n;
  double length = 1.0;
  double conductivity = 1.0;
  double heat_capacity = 1.0;
  double h_left = 1.0;
  double t_ambient = 293.0;
  double generation = 100.0;
  double mass = 1.0;
  double k_nominal = 1.0;
  double k_defect = 0.05;
  double width = 0.05;
  std::optional<double> mu_max;
};

int run_generate(const GenerateArgs& a, std::ostream& out) {
  const auto mus = parse_grid(a.grid);
  modal::ModeDatabase db;
  if (a.kind == "traveling-bump") {
    db = modal::traveling_bump_database(a.n.value_or(200), a.width, mus);
  } else {
    nlohmann::json gen;
    if (a.kind == "heat-rod") {
      systems::HeatRodParams p;
      p.n = a.n.value_or(p.n);
      p.length = a.length;
      p.conductivity = a.conductivity;
      p.heat_capacity = a.heat_capacity;
      p.h_left = a.h_left;
      p.t_ambient = a.t_ambient;
      p.generation = a.generation;
      if (a.mu_max) p.domain.upper = *a.mu_max;
      gen = {{"kind", a.kind}, {"params", systems::to_json(p)}};
    } else {
      systems::SpringChainParams p;
      p.n_mass = a.n.value_or(p.n_mass);
      p.mass = a.mass;
      p.length = a.length;
      p.k_nominal = a.k_nominal;
      p.k_defect = a.k_defect;
      gen = {{"kind", a.kind}, {"params", systems::to_json(p)}};
    }
    const auto sys = systems::make_system(gen);
    db = modal::sample_spectrum(sys, mus, a.m);
  }
  std::vector<modal::Crossing> crossings;
  if (!a.raw) prepare(db, &crossings);
  const fs::path dir = output_path(a.out, "db");
  io::save_database(db, dir);
  out << "wrote " << dir.string() << ": n = " << db.n() << ", p = " << db.p() << ", m = " << db.m
      << (db.is_complex ? ", complex" : ", real") << ", " << crossings.size() << " crossing gaps, "
      << db.warnings.size() << " warnings\n";
  return 0;
}

int run_modes(const std::string& db_dir, const std::string& out_file, std::ostream& out) {
  const auto db = io::load_database(db_dir);
  io::CsvTable table({"mu [-]", "mode [-]", "re_lambda [1/s]", "im_lambda [1/s]"});
  for (const auto& s : db.samples) {
    for (Index i = 0; i < db.m; ++i) {
      table.add_row({format_number(s.mu), std::to_string(i + 1), format_number(s.eigenvalues(i).real()),
                     format_number(s.eigenvalues(i).imag())});
    }
  }
  if (out_file == "-") {
    out << table.str();
  } else {
    table.save(output_path(out_file, "modes.csv"));
  }
  return 0;
}

int run_pair(const std::string& db_dir, const std::string& out_dir, const std::string& crossing_file,
             std::ostream& out) {
  auto db = io::load_database(db_dir);
  auto result = modal::pair_modes(db);
  result.db.warnings = db.warnings;
  result.db.warnings.insert(result.db.warnings.end(), result.warnings.begin(), result.warnings.end());
  io::save_database(result.db, out_dir.empty() ? fs::path(db_dir) : fs::path(out_dir));
  if (!crossing_file.empty()) {
    io::CsvTable table({"gap [-]", "mu_from [-]", "mu_to [-]", "chain [-]"});
    for (const auto& c : result.crossings) {
      for (Index chain : c.chains) {
        table.add_row({std::to_string(c.gap + 1), format_number(c.mu_from), format_number(c.mu_to),
                       std::to_string(chain + 1)});
      }
    }
    table.save(crossing_file);
  }
  for (const auto& w : result.warnings) out << "warning: " << w << "\n";
  out << "paired " << db.m << " chains across " << db.p() << " samples, " << result.crossings.size()
      << " gaps with crossings\n";
  return 0;
}

int run_align(const std::string& db_dir, const std::string& out_dir, std::ostream& out) {
  auto db = io::load_database(db_dir);
  if (!db.paired) throw Error(ErrorCode::kNotAligned, "pair the database before aligning it");
  auto result = modal::align(db);
  result.db.warnings = db.warnings;
  result.db.warnings.insert(result.db.warnings.end(), result.warnings.begin(), result.warnings.end());
  io::save_database(result.db, out_dir.empty() ? fs::path(db_dir) : fs::path(out_dir));
  for (const auto& w : result.warnings) out << "warning: " << w << "\n";
  out << "aligned " << db.m << " chains (" << (db.is_complex ? "phase" : "sign") << ")\n";
  return 0;
}

struct EdmArgs {
  std::string db;
  std::string modes = "all";
  std::optional<Index> rank;
  std::optional<double> energy;
  std::string side = "right";
  std::string out;
};

int run_edm(const EdmArgs& a, std::ostream& out) {
  const auto db = io::load_database(a.db);
  edm::RankSpec rank_spec = edm::EnergyThreshold{a.energy.value_or(edm::kDefaultEnergyThreshold)};
  if (a.rank) rank_spec = edm::ExplicitRank{*a.rank};
  const auto side = parse_side(a.side);
  std::vector<edm::EdmBasis> bases;
  for (Index mode : parse_modes(a.modes, db.m)) bases.push_back(edm::compute_edm_basis(db, mode, rank_spec, side));
  const fs::path dir = output_path(a.out, "edm");
  io::save_edm_bases(bases, dir);
  for (const auto& b : bases) {
    out << "mode " << b.mode_index + 1 << ": r = " << b.rank();
    if (b.singular_values.sum() > 0.0) out << ", energy = " << edm::energy_fraction(b.singular_values, b.rank());
    out << "\n";
  }
  return 0;
}

struct InterpArgs {
  std::string db;
  std::string edm_dir;
  Index mode = 1;
  double mu = 0.0;
  std::string scheme = "linear";
  std::string side = "right";
  std::string out;
};

int run_interp(const InterpArgs& a, std::ostream& out) {
  const auto db = io::load_database(a.db);
  const auto scheme = parse_scheme(a.scheme);
  const auto side = parse_side(a.side);
  if (a.mode < 1 || a.mode > db.m) throw Error(ErrorCode::kInvalidArgument, "mode outside 1..m");
  ComplexVector v;
  if (!a.edm_dir.empty()) {
    const auto bases = io::load_edm_bases(a.edm_dir);
    auto it = std::find_if(bases.begin(), bases.end(), [&](const edm::EdmBasis& b) {
      return b.mode_index == a.mode - 1 && b.side == side;
    });
    if (it == bases.end()) throw Error(ErrorCode::kMissingFile, "EDM directory holds no basis for that mode");
    v = edm::interpolate_mode(*it, a.mu, scheme);
  } else {
    if (!db.paired || !db.aligned) throw Error(ErrorCode::kNotAligned, "database must be paired and aligned");
    v = edm::direct_interpolate(db, a.mode - 1, a.mu, scheme, side);
  }
  io::CsvTable table({"node [-]", "coordinate [m]", "re [-]", "im [-]"});
  for (Index i = 0; i < v.size(); ++i) {
    const double x = db.coordinates.size() == v.size() ? db.coordinates(i) : static_cast<double>(i);
    table.add_row({std::to_string(i + 1), format_number(x), format_number(v(i).real()), format_number(v(i).imag())});
  }
  if (a.out == "-") {
    out << table.str();
  } else {
    table.save(output_path(a.out, "mode.csv"));
  }
  return 0;
}

struct RomArgs {
  std::string db;
  std::string edm_dir;
  double mu = 0.0;
  std::string strategy = "edm";
  Index m = 6;
  std::optional<double> x0_mu;
  std::string x0_file;
  std::optional<double> horizon;
  Index steps = 1000;
  std::string scheme_modes = "linear";
  std::string scheme_eigenvalues = "cubic";
  bool reference = false;
  std::string out;
};

int run_rom(const RomArgs& a, std::ostream& out) {
  auto db = io::load_database(a.db);
  if (!db.paired || !db.aligned) throw Error(ErrorCode::kNotAligned, "database must be paired and aligned");
  const auto sys = systems::make_system(db.generator);
  const RealVector xbar = systems::equilibrium(sys, a.mu);
  const RealVector x0 = initial_state(sys, a.x0_mu, a.x0_file);
  const auto times = rom::uniform_times(a.horizon.value_or(rom::characteristic_horizon(db)), a.steps);
  const rom::RomSchemes schemes{parse_scheme(a.scheme_modes), parse_scheme(a.scheme_eigenvalues)};
  const auto strategy = rom::parse_strategy(a.strategy);
  const Index m = std::min(a.m, db.m);

  rom::Trajectory traj;
  double defect = 0.0;
  if (strategy == rom::Strategy::kSolutionInterpolation) {
    std::vector<rom::Rom> roms;
    for (double mu_k : db.mus()) roms.push_back(rom::build_rom_at_sample(db, mu_k, m, xbar));
    traj = rom::solution_interpolation(roms, a.mu, x0, times, schemes.modes, xbar);
  } else {
    std::vector<edm::EdmBasis> right;
    std::vector<edm::EdmBasis> left;
    if (strategy == rom::Strategy::kEdm) {
      if (!a.edm_dir.empty()) {
        for (auto& b : io::load_edm_bases(a.edm_dir)) {
          (b.side == edm::ModeSide::kLeft ? left : right).push_back(std::move(b));
        }
        auto by_mode = [](const edm::EdmBasis& x, const edm::EdmBasis& y) { return x.mode_index < y.mode_index; };
        std::sort(right.begin(), right.end(), by_mode);
        std::sort(left.begin(), left.end(), by_mode);
      } else {
        right = edm::compute_all_edm_bases(db, edm::EnergyThreshold{});
        if (db.has_left()) left = edm::compute_all_edm_bases(db, edm::EnergyThreshold{}, edm::ModeSide::kLeft);
      }
    }
    const auto r = rom::build_rom_interpolated(db, right.empty() ? nullptr : &right,
                                               left.empty() ? nullptr : &left, a.mu, m, strategy,
                                               schemes, xbar);
    defect = r.biorthogonality_defect;
    traj = rom::simulate_rom(r, x0, times);
  }

  std::optional<rom::Trajectory> full;
  if (a.reference) full = rom::simulate_full(sys, a.mu, x0, times);

  std::vector<std::string> header{"t [s]", "node [-]", "x [state]"};
  if (full) header.emplace_back("x_full [state]");
  io::CsvTable table(header);
  for (std::size_t t = 0; t < times.size(); ++t) {
    for (Index i = 0; i < traj.states.rows(); ++i) {
      std::vector<std::string> row{format_number(times[t]), std::to_string(i + 1),
                                   format_number(traj.states(i, static_cast<Index>(t)))};
      if (full) row.push_back(format_number(full->states(i, static_cast<Index>(t))));
      table.add_row(std::move(row));
    }
  }
  table.save(output_path(a.out, "trajectory.csv"));
  for (const auto& w : traj.warnings) out << "warning: " << w << "\n";
  out << "strategy " << rom::to_string(strategy) << " at mu = " << a.mu << ": " << times.size()
      << " time points, biorthogonality defect = " << defect;
  if (full) out << ", integrated error = " << rom::trajectory_error(*full, traj, db.mass).integrated;
  out << "\n";
  if (full) {
    for (const auto& w : full->warnings) out << "warning: " << w << "\n";
  }
  return 0;
}

struct ReportArgs {
  std::string db;
  std::string edm_dir;
  std::string modes = "1";
  Index grid = 100;
  std::string ranks;
  std::string scheme = "linear";
  Index rank = 2;
  Index m = 6;
  std::optional<double> x0_mu;
  std::string x0_file;
  int repetitions = 100;
  std::string out;
};

int run_error_sweep(const ReportArgs& a, std::ostream& out) {
  const auto db = io::load_database(a.db);
  Index mode = parse_modes(a.modes, db.m).front();
  if (!a.edm_dir.empty()) {
    const auto bases = io::load_edm_bases(a.edm_dir);
    if (bases.front().sample_mus != db.mus()) {
      throw Error(ErrorCode::kShapeMismatch, "EDM basis was built from different sample parameters");
    }
    mode = bases.front().mode_index;
  }
  std::vector<Index> ranks;
  if (a.ranks.empty()) {
    for (Index r = 0; r <= std::min(db.n(), db.p()); ++r) ranks.push_back(r);
  } else {
    ranks = parse_index_list(a.ranks);
  }
  const auto mus = uniform_grid(db.samples.front().mu, db.samples.back().mu, a.grid);
  const auto rows = edm::error_sweep(db, mode, mus, ranks, parse_scheme(a.scheme), truth_source(db, mode));
  io::CsvTable table({"mu [-]", "r [-]", "strategy", "error [-]"});
  for (const auto& row : rows) {
    table.add_row({format_number(row.mu), row.r < 0 ? "" : std::to_string(row.r), row.strategy,
                   format_number(row.error)});
  }
  table.save(output_path(a.out, "errors.csv"));
  for (const auto& avg : edm::average_by_rank(rows)) {
    out << avg.strategy;
    if (avg.r >= 0) out << " r=" << avg.r;
    out << ": mean error " << avg.error << "\n";
  }
  return 0;
}

int run_energy(const ReportArgs& a, std::ostream& out) {
  const auto db = io::load_database(a.db);
  io::CsvTable table({"mode [-]", "r [-]", "sigma [-]", "energy [fraction]"});
  for (Index mode : parse_modes(a.modes, db.m)) {
    const auto basis = edm::compute_edm_basis(db, mode, edm::ExplicitRank{0});
    const RealVector& s = basis.singular_values;
    for (Index r = 1; r <= s.size(); ++r) {
      const std::string frac = s.sum() > 0.0 ? format_number(edm::energy_fraction(s, r)) : "";
      table.add_row({std::to_string(mode + 1), std::to_string(r), format_number(s(r - 1)), frac});
    }
    if (s.sum() > 0.0) {
      out << "mode " << mode + 1 << ": r(99%) = " << edm::select_rank(s, 0.99)
          << ", r(99.9%) = " << edm::select_rank(s, 0.999) << "\n";
    }
  }
  table.save(output_path(a.out, "energy.csv"));
  return 0;
}

int run_strategies(const ReportArgs& a, std::ostream& out) {
  const auto db = io::load_database(a.db);
  if (!db.paired || !db.aligned) throw Error(ErrorCode::kNotAligned, "database must be paired and aligned");
  const auto sys = systems::make_system(db.generator);
  rom::BenchmarkConfig config;
  config.m = std::min(a.m, db.m);
  config.x0 = initial_state(sys, a.x0_mu, a.x0_file);
  config.times = rom::uniform_times(rom::characteristic_horizon(db));
  config.repetitions = a.repetitions;
  const auto bases = edm::compute_all_edm_bases(db, edm::ExplicitRank{std::min(a.rank, std::min(db.n(), db.p()))});
  const auto mus = uniform_grid(db.samples.front().mu, db.samples.back().mu, a.grid);
  const auto rows = rom::benchmark_strategies(sys, db, bases, mus, config);
  io::CsvTable table({"mu [-]", "strategy", "error [-]", "time [s]", "defect [-]"});
  for (const auto& row : rows) {
    table.add_row({format_number(row.mu), row.strategy, format_number(row.error), format_number(row.seconds),
                   format_number(row.defect)});
  }
  table.save(output_path(a.out, "strategies.csv"));
  out << rows.size() << " benchmark rows\n";
  return 0;
}

// Generic layout accepted by `ingest`:
//   parameters.txt    p parameter values
//   eigenvalues.csv   p rows, 2m columns (re, im per mode)
//   modes_<k>.csv     k = 1..p, n rows, 2m columns (re, im per mode)
//   weights.txt       optional, n diagonal mass entries (identity otherwise)
//   left_<k>.csv      optional left eigenvectors, same shape as modes_<k>.csv
int run_ingest(const std::string& src, const std::string& out_dir, bool raw, std::ostream& out) {
#ifdef EIGDEF_WITH_INGEST
  const fs::path root(src);
  if (!fs::is_directory(root)) throw Error(ErrorCode::kMissingFile, "no dataset directory " + src);
  const RealVector mus = read_vector_file(root / "parameters.txt");
  const RealMatrix lambdas = read_table_file(root / "eigenvalues.csv");
  const Index p = mus.size();
  if (lambdas.rows() != p || lambdas.cols() % 2 != 0) {
    throw Error(ErrorCode::kShapeMismatch, "eigenvalues.csv must have p rows and 2m columns");
  }
  modal::ModeDatabase db;
  db.m = lambdas.cols() / 2;
  auto complex_block = [&](const RealMatrix& t) {
    ComplexMatrix c(t.rows(), db.m);
    for (Index j = 0; j < db.m; ++j) {
      for (Index i = 0; i < t.rows(); ++i) c(i, j) = Complex(t(i, 2 * j), t(i, 2 * j + 1));
    }
    return c;
  };
  for (Index k = 0; k < p; ++k) {
    modal::ModeSample s;
    s.mu = mus(k);
    s.eigenvalues = complex_block(lambdas.row(k)).transpose();
    const std::string suffix = std::to_string(k + 1) + ".csv";
    const RealMatrix modes = read_table_file(root / ("modes_" + suffix));
    if (modes.cols() != 2 * db.m) throw Error(ErrorCode::kShapeMismatch, "modes_" + suffix + " needs 2m columns");
    s.right = complex_block(modes);
    if (fs::exists(root / ("left_" + suffix))) s.left = complex_block(read_table_file(root / ("left_" + suffix)));
    db.samples.push_back(std::move(s));
  }
  const Index n = db.samples.front().right.rows();
  db.mass = fs::exists(root / "weights.txt") ? MassMatrix::diagonal(read_vector_file(root / "weights.txt"))
                                             : MassMatrix::identity(n);
  for (const auto& s : db.samples) {
    for (Index i = 0; i < db.m; ++i) db.is_complex = db.is_complex || s.eigenvalues(i).imag() != 0.0 ||
                                                    s.right.col(i).imag().cwiseAbs().maxCoeff() > 0.0;
  }
  db.generator = {{"kind", "ingested"}, {"source", fs::absolute(root).string()}};
  db.validate();
  // E-normalize so that MACs and the alignment objective are meaningful.
  for (auto& s : db.samples) {
    for (Index i = 0; i < db.m; ++i) {
      const double norm = db.mass.norm(s.right.col(i));
      if (!(norm > 0.0)) continue;
      s.right.col(i) /= norm;
      if (s.left) s.left->col(i) *= norm;  // keeps ψᴴEφ unchanged
    }
  }
  if (!raw) prepare(db);
  const fs::path dir = output_path(out_dir, "db");
  io::save_database(db, dir);
  out << "ingested " << p << " samples of " << db.m << " modes, n = " << n << "\n";
  return 0;
#else
  (void)src;
  (void)out_dir;
  (void)raw;
  (void)out;
  throw Error(ErrorCode::kInvalidArgument, "this build was configured without dataset ingestion");
#endif
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigen-deformation modes for parameterized eigenproblems", "eigdef"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "sample a generated system into a mode database");
  generate->add_option("kind", gen.kind, "system kind")
      ->required()
      ->check(CLI::IsMember({"heat-rod", "spring-chain", "spring-chain-first-order", "traveling-bump"}));
  generate->add_option("--mu-grid", gen.grid, "parameter samples as start:stop:count")->required();
  generate->add_option("--m", gen.m, "tracked modes per sample");
  generate->add_option("--n", gen.n, "grid points, masses or bump samples");
  generate->add_flag("--raw", gen.raw, "skip pairing and alignment");
  generate->add_option("--length", gen.length, "rod or chain length [m]");
  generate->add_option("--conductivity", gen.conductivity, "heat-rod conductivity [W/(m K)]");
  generate->add_option("--heat-capacity", gen.heat_capacity, "heat-rod rho*c [J/(m^3 K)]");
  generate->add_option("--h-left", gen.h_left, "heat-rod left film coefficient [W/(m^2 K)]");
  generate->add_option("--t-ambient", gen.t_ambient, "heat-rod ambient temperature [K]");
  generate->add_option("--generation", gen.generation, "heat-rod volumetric source [W/m^3]");
  generate->add_option("--mu-max", gen.mu_max, "heat-rod upper parameter bound");
  generate->add_option("--mass", gen.mass, "spring-chain mass per node [kg]");
  generate->add_option("--k-nominal", gen.k_nominal, "spring-chain stiffness [N/m]");
  generate->add_option("--k-defect", gen.k_defect, "spring-chain defect stiffness [N/m]");
  generate->add_option("--width", gen.width, "traveling-bump width, fraction of the domain");
  generate->add_option("--out", gen.out, "output database directory");

  std::string db_dir;
  std::string out_path;
  auto* modes = app.add_subcommand("modes", "list sampled eigenvalues");
  modes->add_option("--db", db_dir, "database directory")->required();
  modes->add_option("--out", out_path, "CSV file, '-' for stdout");

  std::string crossings;
  auto* pair = app.add_subcommand("pair", "pair modes across samples by MAC");
  pair->add_option("--db", db_dir, "database directory")->required();
  pair->add_option("--out", out_path, "output directory (default: in place)");
  pair->add_option("--crossings", crossings, "CSV report of eigenvalue crossings");

  auto* align = app.add_subcommand("align", "align signs or phases of paired modes");
  align->add_option("--db", db_dir, "database directory")->required();
  align->add_option("--out", out_path, "output directory (default: in place)");

  EdmArgs edm_args;
  auto* edm_cmd = app.add_subcommand("edm", "extract eigen-deformation modes");
  edm_cmd->add_option("--db", edm_args.db, "database directory")->required();
  edm_cmd->add_option("--mode", edm_args.modes, "1-based mode index, list, or 'all'");
  auto* rank_opt = edm_cmd->add_option("--rank", edm_args.rank, "explicit rank r");
  edm_cmd->add_option("--energy", edm_args.energy, "energy threshold in (0, 1]")->excludes(rank_opt);
  edm_cmd->add_option("--side", edm_args.side, "right or left modes");
  edm_cmd->add_option("--out", edm_args.out, "output directory");

  InterpArgs interp_args;
  auto* interp = app.add_subcommand("interp", "interpolate one mode at a new parameter");
  interp->add_option("--db", interp_args.db, "database directory")->required();
  interp->add_option("--edm", interp_args.edm_dir, "EDM directory (direct interpolation otherwise)");
  interp->add_option("--mode", interp_args.mode, "1-based mode index");
  interp->add_option("--mu", interp_args.mu, "query parameter")->required();
  interp->add_option("--scheme", interp_args.scheme, "linear or cubic");
  interp->add_option("--side", interp_args.side, "right or left modes");
  interp->add_option("--out", interp_args.out, "CSV file, '-' for stdout");

  RomArgs rom_args;
  auto* rom_cmd = app.add_subcommand("rom", "build and simulate a reduced-order model");
  rom_cmd->add_option("--db", rom_args.db, "database directory")->required();
  rom_cmd->add_option("--edm", rom_args.edm_dir, "EDM directory for the edm strategy");
  rom_cmd->add_option("--mu", rom_args.mu, "query parameter")->required();
  rom_cmd->add_option("--strategy", rom_args.strategy, "edm, direct or solution-interpolation");
  rom_cmd->add_option("--m", rom_args.m, "ROM order");
  rom_cmd->add_option("--x0-mu", rom_args.x0_mu, "start from the equilibrium at this parameter");
  rom_cmd->add_option("--x0-file", rom_args.x0_file, "start from the state listed in this file");
  rom_cmd->add_option("--horizon", rom_args.horizon, "simulated time [s]");
  rom_cmd->add_option("--steps", rom_args.steps, "time points");
  rom_cmd->add_option("--mode-scheme", rom_args.scheme_modes, "mode interpolation scheme");
  rom_cmd->add_option("--eigenvalue-scheme", rom_args.scheme_eigenvalues, "eigenvalue interpolation scheme");
  rom_cmd->add_flag("--reference", rom_args.reference, "also simulate the full-order model");
  rom_cmd->add_option("--out", rom_args.out, "trajectory CSV");

  ReportArgs report_args;
  std::string report_kind;
  auto* report = app.add_subcommand("report", "plot-ready CSV reports");
  report->add_option("kind", report_kind, "report kind")
      ->required()
      ->check(CLI::IsMember({"error-sweep", "strategies", "energy"}));
  report->add_option("--db", report_args.db, "database directory")->required();
  report->add_option("--edm", report_args.edm_dir, "EDM directory (error-sweep)");
  report->add_option("--mode", report_args.modes, "1-based mode index, list, or 'all'");
  report->add_option("--grid", report_args.grid, "validation parameters");
  report->add_option("--ranks", report_args.ranks, "comma-separated EDM ranks (error-sweep)");
  report->add_option("--scheme", report_args.scheme, "linear or cubic");
  report->add_option("--rank", report_args.rank, "EDM rank (strategies)");
  report->add_option("--m", report_args.m, "ROM order (strategies)");
  report->add_option("--x0-mu", report_args.x0_mu, "initial equilibrium parameter (strategies)");
  report->add_option("--x0-file", report_args.x0_file, "initial state file (strategies)");
  report->add_option("--reps", report_args.repetitions, "timing repetitions (strategies)");
  report->add_option("--out", report_args.out, "CSV file");

  std::string ingest_src;
  bool ingest_raw = false;
  auto* ingest = app.add_subcommand("ingest", "convert an external eigenmode dataset");
  ingest->add_option("--src", ingest_src, "dataset directory")->required();
  ingest->add_flag("--raw", ingest_raw, "skip pairing and alignment");
  ingest->add_option("--out", out_path, "output database directory");

  std::vector<const char*> argv{"eigdef"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "eigdef: " << one_line(e.what()) << "\n" << app.help();
    return 2;
  }

  try {
    if (generate->parsed()) return run_generate(gen, out);
    if (modes->parsed()) return run_modes(db_dir, out_path, out);
    if (pair->parsed()) return run_pair(db_dir, out_path, crossings, out);
    if (align->parsed()) return run_align(db_dir, out_path, out);
    if (edm_cmd->parsed()) return run_edm(edm_args, out);
    if (interp->parsed()) return run_interp(interp_args, out);
    if (rom_cmd->parsed()) return run_rom(rom_args, out);
    if (report->parsed()) {
      if (report_kind == "error-sweep") return run_error_sweep(report_args, out);
      if (report_kind == "energy") return run_energy(report_args, out);
      return run_strategies(report_args, out);
    }
    if (ingest->parsed()) return run_ingest(ingest_src, out_path, ingest_raw, out);
  } catch (const Error& e) {
    err << "eigdef: error [" << to_string(e.code()) << "]: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "eigdef: error: " << one_line(e.what()) << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace eigdef::cli
