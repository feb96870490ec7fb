#include "sbeam/rng.hpp"

#include <cmath>

namespace sbeam {

namespace {
constexpr std::uint64_t kSpinStream = 0x5350494e53ULL;   // "SPINS"
constexpr std::uint64_t kNoiseStream = 0x4e4f495345ULL;  // "NOISE"
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

TrajectoryRng::TrajectoryRng(std::uint64_t master_seed, std::uint64_t run_index)
    : spin_key_(derive_key(master_seed, run_index, kSpinStream)),
      noise_(derive_key(master_seed, run_index, kNoiseStream)) {}

std::array<double, 2> TrajectoryRng::entry_spins(std::uint64_t atom_index) const {
  const std::uint64_t bits = splitmix64(spin_key_ ^ splitmix64(atom_index));
  return {(bits >> 63) ? 1.0 : -1.0, ((bits >> 62) & 1ULL) ? 1.0 : -1.0};
}

double TrajectoryRng::exponential(double mean) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return -mean * std::log1p(-u(noise_));
}

}  // namespace sbeam
