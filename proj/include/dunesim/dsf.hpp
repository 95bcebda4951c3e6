#pragma once

// DSF1 field-dump container.  Layout, byte-exact:
//   bytes 0..3   magic "DSF1"
//   bytes 4..7   u32 little-endian: n (points per axis)
//   bytes 8..11  u32 little-endian: field count
//   bytes 12..15 reserved, zero
//   then count * n * n float64 little-endian samples, row-major per field.

#include <string>
#include <vector>

#include "dunesim/field.hpp"

namespace dunesim {

void write_dsf1(const std::string& path, const std::vector<ScalarField>& fields);
std::vector<ScalarField> read_dsf1(const std::string& path);

}  // namespace dunesim
