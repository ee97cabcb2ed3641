#include "satflow/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace satflow {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void write_field_header(std::ofstream& out, int species, bool two_d) {
  out << (two_d ? "x,y" : "x");
  for (int p = 0; p < species; ++p) out << ",species_" << p + 1;
  out << "\n";
}

}  // namespace

void write_fields_csv(const std::string& path, const CellField& state, const Grid1D& grid) {
  auto out = open_or_throw(path);
  write_field_header(out, state.num_species(), false);
  for (int i = 0; i < grid.num_cells; ++i) {
    out << format_double(grid.center(i));
    for (int p = 0; p < state.num_species(); ++p) out << ',' << format_double(state(p, i));
    out << "\n";
  }
}

void write_fields_csv_2d(const std::string& path, const CellField& state, const Grid2D& grid) {
  auto out = open_or_throw(path);
  write_field_header(out, state.num_species(), true);
  for (int j = 0; j < grid.y.num_cells; ++j)
    for (int i = 0; i < grid.x.num_cells; ++i) {
      out << format_double(grid.x.center(i)) << ',' << format_double(grid.y.center(j));
      for (int p = 0; p < state.num_species(); ++p)
        out << ',' << format_double(state(p, grid.index(i, j)));
      out << "\n";
    }
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsSeries& series,
                           int num_species) {
  auto out = open_or_throw(path);
  out << "t";
  for (int p = 0; p < num_species; ++p) out << ",mass_" << p + 1;
  out << ",min_rho,max_rho,max_sigma";
  if (series.has_energy) out << ",energy";
  out << "\n";
  for (size_t k = 0; k < series.size(); ++k) {
    out << format_double(series.times[k]);
    for (int p = 0; p < num_species; ++p)
      out << ',' << format_double(series.mass_per_species[k][p]);
    out << ',' << format_double(series.min_density[k]) << ','
        << format_double(series.max_density[k]) << ',' << format_double(series.max_sigma[k]);
    if (series.has_energy) out << ',' << format_double(series.energy[k]);
    out << "\n";
  }
}

void write_meta(const std::string& path, const std::map<std::string, std::string>& entries) {
  auto out = open_or_throw(path);
  for (const auto& [key, value] : entries) out << key << '=' << value << "\n";
}

std::map<std::string, std::string> read_key_value_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace satflow
