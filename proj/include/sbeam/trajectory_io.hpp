#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sbeam/dynamics.hpp"

namespace sbeam {

// Flat binary layout, all fields little-endian:
//   char[8] magic "SBTRAJ01", u64 params hash, f64 sample interval,
//   u64 sample count, u64 column count, then count*columns f64 values in
//   row order (t, Re J, Im J[, Re alpha, Im alpha]).
struct BinaryHeader {
  std::uint64_t params_hash = 0;
  double dt_sample = 0.0;
  std::uint64_t length = 0;
  std::uint64_t columns = 0;
};

void write_binary(std::ostream& out, const TrajectoryRecord& rec, std::uint64_t params_hash);
TrajectoryRecord read_binary(std::istream& in, BinaryHeader* header = nullptr);

// CSV body with header row t,re_j,im_j[,re_alpha,im_alpha]; numbers use %.17g.
void write_csv(std::ostream& out, const TrajectoryRecord& rec);

std::string format_double(double v);

}  // namespace sbeam
