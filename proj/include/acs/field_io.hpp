#pragma once

// ACSFIELD v1: one ASCII header line
//   ACSFIELD v1 m=<m> extents=<e1,...,em> h=<h> origin=<o1,...,om> boundary=<periodic|dirichlet>
// followed by little-endian float64 values, points in grid order, each matrix
// row-major.

#include <iosfwd>
#include <string>

#include "acs/field.hpp"

namespace acs {

std::string field_header(const Grid& grid);
Grid parse_field_header(const std::string& line);

void write_field(std::ostream& out, const MatrixField& field);
MatrixField read_field(std::istream& in);

/// Writes to a temporary sibling and renames it into place, so a failed
/// write never leaves a truncated file at `path`.
void write_field_file(const std::string& path, const MatrixField& field);
MatrixField read_field_file(const std::string& path);

/// Writes `contents` to path via a temporary file and rename.
void write_text_file(const std::string& path, const std::string& contents);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace acs
