#ifndef QWELL_PIPELINE_HPP
#define QWELL_PIPELINE_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qwell/eigensolver.hpp"
#include "qwell/errors.hpp"
#include "qwell/infomeasures.hpp"
#include "qwell/quantum_state.hpp"

namespace qwell {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct RunConfig {
  SystemKind system = SystemKind::dswp;
  DswpParams dswp;
  IswpParams iswp;
  PhysicalConstants constants;
  PairChoice pair = PairChoice::ground;
  Side initial_side = Side::left;
  int n_times = 65;
  int n_grid = 4001;
  std::string output_dir = "out";
  bool display_scaled = false;
  std::vector<double> renyi_orders{0.5, 2.0, 3.0};

  void validate() const {
    dswp.validate();
    iswp.validate();
    constants.validate();
    if (n_times < 8) throw ValidationError("n_times: must be >= 8");
    if (n_grid < 256) throw ValidationError("n_grid: must be >= 256");
    if (output_dir.empty()) throw ValidationError("output_dir: must be nonempty");
    for (double a : renyi_orders)
      if (!(a > 0.0) || std::fabs(a - 1.0) < 1e-12)
        throw ValidationError("renyi_orders: orders must be positive and != 1");
  }
};

namespace pipedetail {

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": value of '" + key +
                     "' is not a number: '" + v + "'");
  }
}

inline int parse_int(const std::string& v, const std::string& key, int line) {
  double d = parse_double(v, key, line);
  if (d != std::floor(d))
    throw ParseError("line " + std::to_string(line) + ": value of '" + key +
                     "' is not an integer");
  return static_cast<int>(d);
}

inline bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("line " + std::to_string(line) + ": value of '" + key +
                   "' must be true or false");
}

}  // namespace pipedetail

/// Parses the key = value configuration text. Unknown keys and constraint
/// violations raise ValidationError; malformed lines raise ParseError with
/// the line and column.
inline RunConfig parse_config_text(std::string_view text) {
  using pipedetail::trim;
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view sv = raw;
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    if (trim(sv).empty()) continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("line " + std::to_string(line) + ", col " +
                       std::to_string(sv.size()) + ": expected 'key = value'");
    std::string key = trim(sv.substr(0, eq));
    std::string val = trim(sv.substr(eq + 1));
    if (key.empty())
      throw ParseError("line " + std::to_string(line) + ", col 1: empty key");

    if (key == "system") {
      if (val == "dswp") cfg.system = SystemKind::dswp;
      else if (val == "iswp") cfg.system = SystemKind::iswp;
      else throw ValidationError("system: must be dswp or iswp");
    } else if (key == "v0_eV") {
      cfg.dswp.v0_ev = pipedetail::parse_double(val, key, line);
    } else if (key == "v1_eV") {
      cfg.dswp.v1_ev = pipedetail::parse_double(val, key, line);
    } else if (key == "l0_angstrom") {
      cfg.dswp.l0_angstrom = pipedetail::parse_double(val, key, line);
    } else if (key == "l1_angstrom") {
      cfg.dswp.l1_angstrom = pipedetail::parse_double(val, key, line);
    } else if (key == "mass_multiple_of_mh") {
      cfg.constants.mass_multiple = pipedetail::parse_double(val, key, line);
    } else if (key == "iswp_width_angstrom") {
      cfg.iswp.width_angstrom = pipedetail::parse_double(val, key, line);
    } else if (key == "pair") {
      if (val == "ground") cfg.pair = PairChoice::ground;
      else if (val == "excited") cfg.pair = PairChoice::excited;
      else throw ValidationError("pair: must be ground or excited");
    } else if (key == "initial_side") {
      if (val == "left") cfg.initial_side = Side::left;
      else if (val == "right") cfg.initial_side = Side::right;
      else throw ValidationError("initial_side: must be left or right");
    } else if (key == "n_times") {
      cfg.n_times = pipedetail::parse_int(val, key, line);
    } else if (key == "n_grid") {
      cfg.n_grid = pipedetail::parse_int(val, key, line);
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "display_scaled") {
      cfg.display_scaled = pipedetail::parse_bool(val, key, line);
    } else if (key == "renyi_orders") {
      cfg.renyi_orders.clear();
      std::istringstream vs(val);
      std::string item;
      while (std::getline(vs, item, ','))
        cfg.renyi_orders.push_back(pipedetail::parse_double(pipedetail::trim(item), key, line));
      if (cfg.renyi_orders.empty())
        throw ValidationError("renyi_orders: list must be nonempty");
    } else {
      throw ValidationError("unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// CSV + manifest emission
// ---------------------------------------------------------------------------

namespace pipedetail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// fractions of the period at which density profiles are tabulated
inline const std::vector<std::pair<int, int>>& density_time_fractions() {
  static const std::vector<std::pair<int, int>> f = {
      {0, 1},  {1, 9},  {1, 6},  {1, 4}, {1, 3}, {7, 18}, {1, 2},
      {11, 18}, {2, 3}, {3, 4}, {5, 6}, {8, 9}, {1, 1}};
  return f;
}

}  // namespace pipedetail

struct FileRecord {
  std::string name;
  std::string fnv1a64;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string tool_version{kToolVersion};
  nlohmann::json config_snapshot;
  std::vector<FileRecord> files;
  double wall_clock_s = 0.0;
  std::string timestamp_utc;
  nlohmann::json tolerance_report;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["config"] = config_snapshot;
    nlohmann::json files_j = nlohmann::json::object();
    for (const auto& f : files)
      files_j[f.name] = {{"fnv1a64", f.fnv1a64}, {"bytes", f.bytes}};
    j["files"] = files_j;
    j["wall_clock_s"] = wall_clock_s;
    j["timestamp_utc"] = timestamp_utc;
    j["tolerances"] = tolerance_report;
    return j;
  }
};

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["system"] = cfg.system == SystemKind::dswp ? "dswp" : "iswp";
  j["v0_eV"] = cfg.dswp.v0_ev;
  j["v1_eV"] = cfg.dswp.v1_ev;
  j["l0_angstrom"] = cfg.dswp.l0_angstrom;
  j["l1_angstrom"] = cfg.dswp.l1_angstrom;
  j["mass_multiple_of_mh"] = cfg.constants.mass_multiple;
  j["iswp_width_angstrom"] = cfg.iswp.width_angstrom;
  j["pair"] = cfg.pair == PairChoice::ground ? "ground" : "excited";
  j["initial_side"] = cfg.initial_side == Side::left ? "left" : "right";
  j["n_times"] = cfg.n_times;
  j["n_grid"] = cfg.n_grid;
  j["output_dir"] = cfg.output_dir;
  j["display_scaled"] = cfg.display_scaled;
  j["renyi_orders"] = cfg.renyi_orders;
  return j;
}

namespace pipedetail {

struct StageGuard {
  const char* stage;
  template <class Fn>
  auto run(Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const BoundViolation& e) {
      throw BoundViolation(std::string("stage ") + stage + ": " + e.what());
    } catch (const Error& e) {
      throw Error(std::string("stage ") + stage + ": " + e.what());
    }
  }
};

inline void write_eigen_csv(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  out << "index,parity,energy_eV,phase_rad,a2,a3_or_b3,node_count,match_residual\n";
  if (cfg.system == SystemKind::dswp) {
    auto states = solve_spectrum(cfg.dswp, cfg.constants);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& st = states[i];
      out << i << ',' << (st.parity == Parity::even ? "even" : "odd") << ','
          << fmt(st.energy_ev) << ',' << fmt(st.phase) << ',' << fmt(st.a2) << ','
          << fmt(st.a3_or_b3) << ',' << st.node_count << ','
          << fmt(std::max(st.residual.at_l0, st.residual.at_l1)) << '\n';
    }
  } else {
    for (int n = 1; n <= 2; ++n) {
      IswpState st = iswp_state(cfg.iswp, cfg.constants, n);
      out << (n - 1) << ",-," << fmt(st.energy_ev) << ',' << fmt(0.0) << ',' << fmt(0.0)
          << ',' << fmt(0.0) << ',' << (n - 1) << ',' << fmt(0.0) << '\n';
    }
  }
}

inline void write_density_csv(const std::filesystem::path& path, const SuperpositionState& s,
                              Space space, const RunConfig& cfg) {
  std::ofstream out(path);
  const bool pos = space == Space::position;
  out << "t_over_T," << (pos ? "x_m" : "k_per_m") << ','
      << (pos ? "density_per_m" : "density_m");
  if (cfg.display_scaled) out << ",density_scaled";
  out << '\n';
  std::vector<double> grid =
      pos ? default_position_grid(s, cfg.n_grid) : default_momentum_grid(s, cfg.n_grid);
  double T = s.period();
  for (auto [num, den] : density_time_fractions()) {
    double frac = static_cast<double>(num) / den;
    DensitySample d = pos ? density_position(s, frac * T, grid)
                          : density_momentum(s, frac * T, grid);
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
      out << fmt(frac) << ',' << fmt(d.grid[i]) << ',' << fmt(d.values[i]);
      if (cfg.display_scaled) out << ',' << fmt(d.values[i] * d.display_scale);
      out << '\n';
    }
  }
}

inline void write_measures_csv(const std::filesystem::path& path,
                               const std::vector<MeasureRecord>& series,
                               const RunConfig& cfg) {
  std::ofstream out(path);
  out << "t_over_T,dx_m,dk_per_m,dx_dk,s_x_nats,s_k_nats,s_t_nats,"
         "i_x_per_m2,i_k_m2,i_t,d_x_per_m,d_k_m,d_t,c_t,norm_x,norm_k";
  for (double a : cfg.renyi_orders) {
    std::ostringstream tag;
    tag << a;
    out << ",renyi_x_" << tag.str() << "_nats"
        << ",renyi_k_" << tag.str() << "_nats";
  }
  out << '\n';
  for (const auto& r : series) {
    out << fmt(r.t_over_T) << ',' << fmt(r.dx) << ',' << fmt(r.dk) << ',' << fmt(r.dx_dk)
        << ',' << fmt(r.s_x) << ',' << fmt(r.s_k) << ',' << fmt(r.s_t) << ',' << fmt(r.i_x)
        << ',' << fmt(r.i_k) << ',' << fmt(r.i_t) << ',' << fmt(r.d_x) << ',' << fmt(r.d_k)
        << ',' << fmt(r.d_t) << ',' << fmt(r.c_t) << ',' << fmt(r.norm_x) << ','
        << fmt(r.norm_k);
    for (const auto& e : r.renyi) out << ',' << fmt(e.position) << ',' << fmt(e.momentum);
    out << '\n';
  }
}

inline void write_fit_csv(const std::filesystem::path& path, const MeasureFits& fits) {
  std::ofstream out(path);
  out << "name,alpha0,alpha1,alpha2,alpha3,alpha4,rmse\n";
  auto row = [&](const char* name, const numerics::PolyFit& f) {
    out << name;
    for (double c : f.coefficients) out << ',' << fmt(c);
    out << ',' << fmt(f.rmse) << '\n';
  };
  row("s_t", fits.s_t);
  row("i_t", fits.i_t);
}

}  // namespace pipedetail

/// Runs one scenario end to end: eigenstates, density profiles, measure
/// series, fits, and the manifest. Identical configurations produce
/// byte-identical CSV bodies.
inline RunManifest run_scenario(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  RunManifest manifest;
  manifest.config_snapshot = config_to_json(cfg);

  SuperpositionState s = pipedetail::StageGuard{"superposition"}.run([&] {
    return cfg.system == SystemKind::dswp
               ? make_superposition(cfg.dswp, cfg.constants, cfg.pair, cfg.initial_side)
               : make_superposition(cfg.iswp, cfg.constants, cfg.initial_side);
  });

  pipedetail::StageGuard{"eigen"}.run([&] {
    pipedetail::write_eigen_csv(dir / "eigen.csv", cfg);
    return 0;
  });
  pipedetail::StageGuard{"densities"}.run([&] {
    pipedetail::write_density_csv(dir / "densities_position.csv", s, Space::position, cfg);
    pipedetail::write_density_csv(dir / "densities_momentum.csv", s, Space::momentum, cfg);
    return 0;
  });

  SeriesOptions sopt;
  sopt.renyi_orders = cfg.renyi_orders;
  std::vector<MeasureRecord> series = pipedetail::StageGuard{"measures"}.run(
      [&] { return measure_series(s, cfg.n_times, sopt); });
  pipedetail::StageGuard{"measures"}.run([&] {
    pipedetail::write_measures_csv(dir / "measures.csv", series, cfg);
    return 0;
  });

  MeasureFits fits = pipedetail::StageGuard{"fit"}.run([&] { return fit_measures(series); });
  pipedetail::StageGuard{"fit"}.run([&] {
    pipedetail::write_fit_csv(dir / "fit.csv", fits);
    return 0;
  });

  manifest.tolerance_report = {
      {"series_rel_tol", SeriesOptions{}.rel_tol},
      {"root_tol_ev", SpectrumOptions{}.root_tol_ev},
      {"scan_panels", SpectrumOptions{}.scan_panels},
      {"momentum_tail_threshold", SeriesOptions{}.momentum_tail_threshold},
      {"position_tail_factor", SeriesOptions{}.position_tail_factor},
      {"momentum_grid_cut_per_m", momentum_cut(s, cfg.n_grid)},
      {"bounds_enforced", true}};

  for (const char* name : {"eigen.csv", "densities_position.csv", "densities_momentum.csv",
                           "measures.csv", "fit.csv"}) {
    std::string bytes = pipedetail::read_file(dir / name);
    manifest.files.push_back(
        {name, pipedetail::hex64(pipedetail::fnv1a64(bytes)), bytes.size()});
  }

  auto t_end = std::chrono::steady_clock::now();
  manifest.wall_clock_s = std::chrono::duration<double>(t_end - t_start).count();
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  manifest.timestamp_utc = ts;

  std::ofstream mout(dir / "manifest.json");
  mout << manifest.to_json().dump(2) << '\n';
  return manifest;
}

// ---------------------------------------------------------------------------
// Comparison of two completed runs
// ---------------------------------------------------------------------------

struct Extremum {
  std::string measure;
  double t_over_T = 0.0;
  bool is_max = false;
};

struct SystemPattern {
  std::string label;
  std::vector<Extremum> extrema;  // of s_t and i_t over the full period
  bool tunneling_signature = false;
};

struct CompareReport {
  SystemPattern a, b;
  std::string verdict;
};

namespace pipedetail {

struct MeasuresTable {
  std::vector<double> t;
  std::vector<double> s_t;
  std::vector<double> i_t;
};

inline MeasuresTable read_measures_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty measures file: " + path.string());
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return i;
    throw ParseError("measures file missing column " + name);
  };
  std::size_t ct = col("t_over_T"), cs = col("s_t_nats"), ci = col("i_t");
  MeasuresTable tab;
  std::string row;
  while (std::getline(in, row)) {
    if (trim(row).empty()) continue;
    std::istringstream rs(row);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(rs, cell, ',')) vals.push_back(std::stod(cell));
    tab.t.push_back(vals.at(ct));
    tab.s_t.push_back(vals.at(cs));
    tab.i_t.push_back(vals.at(ci));
  }
  return tab;
}

inline std::vector<Extremum> local_extrema(const std::string& name,
                                           const std::vector<double>& t,
                                           const std::vector<double>& v) {
  std::vector<Extremum> out;
  std::size_t n = v.size();
  for (std::size_t j = 0; j < n; ++j) {
    bool gt_prev = j == 0 || v[j] > v[j - 1];
    bool gt_next = j + 1 == n || v[j] > v[j + 1];
    bool lt_prev = j == 0 || v[j] < v[j - 1];
    bool lt_next = j + 1 == n || v[j] < v[j + 1];
    if (gt_prev && gt_next) out.push_back({name, t[j], true});
    else if (lt_prev && lt_next) out.push_back({name, t[j], false});
  }
  return out;
}

// tunneling pattern: over the half period (0, 1/2), both S_T and I_T rise to
// a single interior maximum near t = T/4; the no-tunneling pattern instead
// shows an S_T local minimum there
inline bool classify_tunneling(const MeasuresTable& tab) {
  auto interior = [&](const std::vector<double>& v, bool want_max) {
    int count = 0;
    double where = -1.0;
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
      if (tab.t[j] <= 0.0 || tab.t[j] >= 0.5) continue;
      bool is_max = v[j] > v[j - 1] && v[j] > v[j + 1];
      bool is_min = v[j] < v[j - 1] && v[j] < v[j + 1];
      if ((want_max && is_max) || (!want_max && is_min)) {
        ++count;
        where = tab.t[j];
      }
    }
    return std::pair<int, double>{count, where};
  };
  auto [smax_count, smax_at] = interior(tab.s_t, true);
  auto [smin_count, smin_at] = interior(tab.s_t, false);
  auto [imax_count, imax_at] = interior(tab.i_t, true);
  const double tol = 1.0 / 64.0;
  bool s_peak_at_quarter = smax_count == 1 && smin_count == 0 &&
                           std::fabs(smax_at - 0.25) <= tol;
  bool i_peak_at_quarter = imax_count == 1 && std::fabs(imax_at - 0.25) <= tol;
  return s_peak_at_quarter && i_peak_at_quarter;
}

}  // namespace pipedetail

/// Compares the measure series of two completed runs and classifies each
/// against the tunneling extremum pattern. Throws IncompatibleSampling when
/// the time grids differ.
inline CompareReport compare_systems(const std::string& run_dir_a,
                                     const std::string& run_dir_b) {
  namespace fs = std::filesystem;
  auto ta = pipedetail::read_measures_csv(fs::path(run_dir_a) / "measures.csv");
  auto tb = pipedetail::read_measures_csv(fs::path(run_dir_b) / "measures.csv");
  if (ta.t.size() != tb.t.size())
    throw IncompatibleSampling("compare_systems: time grids have different sizes");
  for (std::size_t i = 0; i < ta.t.size(); ++i)
    if (std::fabs(ta.t[i] - tb.t[i]) > 1e-12)
      throw IncompatibleSampling("compare_systems: time grids differ");

  CompareReport rep;
  auto build = [&](const std::string& label, const pipedetail::MeasuresTable& tab) {
    SystemPattern p;
    p.label = label;
    auto se = pipedetail::local_extrema("s_t", tab.t, tab.s_t);
    auto ie = pipedetail::local_extrema("i_t", tab.t, tab.i_t);
    p.extrema.insert(p.extrema.end(), se.begin(), se.end());
    p.extrema.insert(p.extrema.end(), ie.begin(), ie.end());
    p.tunneling_signature = pipedetail::classify_tunneling(tab);
    return p;
  };
  rep.a = build(run_dir_a, ta);
  rep.b = build(run_dir_b, tb);
  rep.verdict = (rep.a.tunneling_signature == rep.b.tunneling_signature)
                    ? "no discriminating difference"
                    : "discriminating difference: tunneling signature present in " +
                          (rep.a.tunneling_signature ? rep.a.label : rep.b.label) + " only";
  return rep;
}

inline void write_compare_csv(const CompareReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "compare.csv");
    out << "run,measure,t_over_T,kind\n";
    for (const SystemPattern* p : {&rep.a, &rep.b})
      for (const auto& e : p->extrema)
        out << p->label << ',' << e.measure << ',' << pipedetail::fmt(e.t_over_T) << ','
            << (e.is_max ? "max" : "min") << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "compare_summary.csv");
    out << "run,tunneling_signature\n";
    for (const SystemPattern* p : {&rep.a, &rep.b})
      out << p->label << ',' << (p->tunneling_signature ? "present" : "absent") << '\n';
    out << "# verdict: " << rep.verdict << '\n';
  }
}

}  // namespace qwell

#endif  // QWELL_PIPELINE_HPP
