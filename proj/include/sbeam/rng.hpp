#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace sbeam {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based key derivation: the same (seed, a, b) always maps to the same
// 64-bit value regardless of call order.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Random source for one trajectory. Entry spins are keyed on the atom index,
// Gaussian noise comes from a sequential stream keyed on the run index.
class TrajectoryRng {
 public:
  TrajectoryRng(std::uint64_t master_seed, std::uint64_t run_index);

  // (sx, sy) in {-1, +1}^2, independent and equiprobable
  std::array<double, 2> entry_spins(std::uint64_t atom_index) const;

  double gaussian() { return normal_(noise_); }
  double exponential(double mean);

 private:
  std::uint64_t spin_key_;
  std::mt19937_64 noise_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sbeam
