#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsqg/diagnostics.hpp"
#include "dsqg/inequalities.hpp"
#include "dsqg/solver.hpp"

namespace dsqg {

inline constexpr std::uint8_t kCheckpointVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Flat little-endian checkpoint:
///   "SQGB" | u8 version | u32 N | f64 L | f64 t | u64 step | u64 config hash | u64 count | count x f64
/// with the coefficients in the row-major (m, n) order of SpectralField.
struct Checkpoint {
  int n = 0;
  double side_length = 0.0;
  double t = 0.0;
  std::uint64_t step = 0;
  std::uint64_t config_hash = 0;
  std::vector<double> coefficients;
};

Checkpoint make_checkpoint(const SolverState& state, std::uint64_t config_hash);
void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& path);
/// Builds the field on a fresh geometry of the stored size.
SpectralField checkpoint_field(const Checkpoint& checkpoint);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// Column names of a diagnostics CSV for these parameters.
std::vector<std::string> diagnostics_columns(const DiagnosticsParams& params);
/// Unit of each column, in the same order; L is a length and theta the unit of the scalar.
std::vector<std::string> diagnostics_units(const DiagnosticsParams& params);
std::string diagnostics_row(const DiagnosticsRecord& record, const DiagnosticsParams& params);
/// "# ..." comment lines (seed, description, units) followed by the column header.
void write_diagnostics_header(std::ostream& out, const DiagnosticsParams& params, std::uint64_t seed,
                              const std::string& description);

std::string report_json(const InequalityReport& report);
void write_report(const std::string& directory, const InequalityReport& report);

/// x,y,value rows for every interior node.
void write_grid_csv(const std::string& path, const GridField& field);

}  // namespace dsqg
