#pragma once

#include <string>

#include "pmflow/grid.hpp"

namespace pmflow {

// Binary snapshot: magic "PMFLD01\n", then int32 dim, int32 nx, int32 ny,
// float64 Lx, float64 Ly, then nx*ny float64 values with ix fastest.
// Little-endian, bit-exact round trip.
void write_field_binary(const std::string& path, const ScalarField& f);
ScalarField read_field_binary(const std::string& path);

// "x,value" or "x,y,value" rows, %.17g
void write_field_csv(const std::string& path, const ScalarField& f);

}  // namespace pmflow
