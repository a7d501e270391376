#pragma once

#include <iosfwd>
#include <string>

#include "linfest/field.hpp"

namespace linfest::geom {

// Binary container: text header terminated by a line "end", then raw little-endian doubles.
void write_field(const std::string& path, const ScalarField& f);
void write_field(const std::string& path, const HermitianField& f);
ScalarField read_scalar_field(const std::string& path);
HermitianField read_hermitian_field(const std::string& path);
// "scalar" or "hermitian"
std::string peek_field_kind(const std::string& path);

// One row per stored node (non-exterior on balls): index, coordinates, kind, value(s).
void write_csv(std::ostream& os, const ScalarField& f);
void write_csv(std::ostream& os, const HermitianField& f);

}  // namespace linfest::geom
