#pragma once

#include <string>

#include "fpml/diagnostics.hpp"
#include "fpml/field.hpp"

namespace fpml {

/// One node per row: coordinates then value, 17 significant digits.
void write_field_csv(const Field& u, const std::string& path);

/// Compact snapshot, little-endian: int32 dim, float64 half_length,
/// int32 points_per_dim, int32 boundary, then node values as float64.
void write_field_binary(const Field& u, const std::string& path);
Field read_field_binary(const std::string& path);

/// Fixed diagnostics columns: t,mass,l1,l2,lmp1,linf,min,energy (17 digits).
void write_series_csv(const DiagnosticsSeries& s, const std::string& path);

/// Plot-ready companion: the same columns plus base-10 logs of t and of the
/// positive norm columns (empty cells where undefined).
void write_series_plot_csv(const DiagnosticsSeries& s, const std::string& path);

}  // namespace fpml
