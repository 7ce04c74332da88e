#pragma once

#include "nsch/grid.hpp"
#include "nsch/state.hpp"

#include <string>

namespace nsch {

// Flat little-endian binary field files. Layout: magic "NSCHF1", then
// u32 dim, u32 cells per axis, f64 spacing per axis, u32 kind
// (0 = cell scalar, 1 = face component), u32 axis, u64 value count, then
// the values as 64-bit floats, row-major with x fastest.

void write_scalar_field(const std::string& path, const ScalarField& f);
ScalarField read_scalar_field(const std::string& path, BcTag tag = BcTag::none);

void write_vector_field(const std::string& path_prefix, const VectorField& v);
VectorField read_vector_field(const std::string& path_prefix, const Grid& grid);

/// One row per cell: coordinates, value.
void write_field_csv(const std::string& path, const ScalarField& f);

/// State snapshot under dir/ with a zero-padded step suffix.
void write_state(const std::string& dir, const State& s, int index);
State read_state(const std::string& dir, const Grid& grid, int index, Scalar eps);

}  // namespace nsch
