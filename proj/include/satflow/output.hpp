#pragma once

#include <map>
#include <string>

#include "satflow/diagnostics.hpp"
#include "satflow/driver.hpp"

namespace satflow {

// Field snapshot: header "x[,y],species_1,...,species_P", one row per cell,
// 17 significant digits (round-trip exact for doubles).
void write_fields_csv(const std::string& path, const CellField& state, const Grid1D& grid);
void write_fields_csv_2d(const std::string& path, const CellField& state, const Grid2D& grid);

// Columns: t,mass_1..P,min_rho,max_rho,max_sigma[,energy].
void write_diagnostics_csv(const std::string& path, const DiagnosticsSeries& series,
                           int num_species);

void write_meta(const std::string& path, const std::map<std::string, std::string>& entries);

// Flat key=value text file; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_key_value_config(const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace satflow
