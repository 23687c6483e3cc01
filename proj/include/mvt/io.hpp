#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvt/errors.hpp"
#include "mvt/euler_scheme.hpp"
#include "mvt/measure.hpp"
#include "mvt/trajectory.hpp"
#include "mvt/weak_residual.hpp"

namespace mvt {

// Shortest decimal form that parses back to the identical double, so CSV
// round trips are bit-exact.
inline std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw BadSpec("expected a number in " + where + ", got '" + token + "'");
  }
  return value;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out.is_open()) throw BadSpec("cannot open for writing: " + path.string());
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace detail

inline void write_measure_csv(const std::filesystem::path& path, const ParticleMeasure& mu) {
  std::ofstream out = detail::open_for_write(path);
  out << "position,weight\n";
  for (const Atom& a : mu.atoms()) {
    out << format_double(a.position) << "," << format_double(a.weight) << "\n";
  }
}

inline ParticleMeasure read_measure_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw BadSpec("cannot open measure file: " + path.string());
  std::vector<Atom> atoms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("position", 0) == 0) continue;  // header
    std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw BadSpec(path.string() + ":" + std::to_string(line_no) + ": expected position,weight");
    }
    std::string where = path.string() + ":" + std::to_string(line_no);
    atoms.push_back({parse_double(fields[0], where), parse_double(fields[1], where)});
  }
  return ParticleMeasure(std::move(atoms));
}

inline nlohmann::json measure_to_json(const ParticleMeasure& mu) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Atom& a : mu.atoms()) arr.push_back({a.position, a.weight});
  return arr;
}

inline ParticleMeasure measure_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw BadSpec("measure JSON must be an array of [position, weight] pairs");
  std::vector<Atom> atoms;
  for (const nlohmann::json& entry : arr) {
    if (!entry.is_array() || entry.size() != 2) {
      throw BadSpec("measure JSON entries must be [position, weight] pairs");
    }
    atoms.push_back({entry[0].get<double>(), entry[1].get<double>()});
  }
  return ParticleMeasure(std::move(atoms));
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out = detail::open_for_write(path);
  out << "time,atom_index,position,weight\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const std::vector<Atom>& atoms = traj.slices[k].atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      out << format_double(traj.times[k]) << "," << i << ","
          << format_double(atoms[i].position) << "," << format_double(atoms[i].weight) << "\n";
    }
  }
}

inline void write_summary_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out = detail::open_for_write(path);
  out << "time,tv_norm,first_moment\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_double(traj.times[k]) << "," << format_double(tv_norm(traj.slices[k])) << ","
        << format_double(first_moment(traj.slices[k])) << "\n";
  }
}

inline void write_convergence_csv(const std::filesystem::path& path,
                                  const std::vector<ConvergenceRow>& rows) {
  std::ofstream out = detail::open_for_write(path);
  out << "k,N_k,mesh,sup_flat_gap,ratio\n";
  for (const ConvergenceRow& r : rows) {
    out << r.k << "," << r.n_intervals << "," << format_double(r.mesh) << ","
        << format_double(r.sup_flat_gap) << "," << format_double(r.ratio) << "\n";
  }
}

inline void write_residual_csv(const std::filesystem::path& path,
                               const std::vector<std::pair<std::string, std::vector<DefectRow>>>&
                                   sweeps_by_resolution) {
  std::ofstream out = detail::open_for_write(path);
  out << "psi_id,k_or_resolution,defect\n";
  for (const auto& [resolution, rows] : sweeps_by_resolution) {
    for (const DefectRow& r : rows) {
      out << r.psi_id << "," << resolution << "," << format_double(r.defect) << "\n";
    }
  }
}

}  // namespace mvt
