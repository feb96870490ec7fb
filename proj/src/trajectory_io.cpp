#include "sbeam/trajectory_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sbeam {

static_assert(std::endian::native == std::endian::little,
              "binary trajectory I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'B', 'T', 'R', 'A', 'J', '0', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated trajectory file");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_binary(std::ostream& out, const TrajectoryRecord& rec, std::uint64_t params_hash) {
  const std::uint64_t cols = rec.has_field() ? 5 : 3;
  const double dts = rec.size() > 1 ? rec.times[1] - rec.times[0] : 0.0;
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, params_hash);
  put<double>(out, dts);
  put<std::uint64_t>(out, rec.size());
  put<std::uint64_t>(out, cols);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    put(out, rec.times[i]);
    put(out, rec.j[i].real());
    put(out, rec.j[i].imag());
    if (cols == 5) {
      put(out, rec.alpha[i].real());
      put(out, rec.alpha[i].imag());
    }
  }
}

TrajectoryRecord read_binary(std::istream& in, BinaryHeader* header) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("not a trajectory file");
  BinaryHeader h;
  h.params_hash = get<std::uint64_t>(in);
  h.dt_sample = get<double>(in);
  h.length = get<std::uint64_t>(in);
  h.columns = get<std::uint64_t>(in);
  if (h.columns != 3 && h.columns != 5) throw std::runtime_error("bad column count");
  TrajectoryRecord rec;
  rec.times.reserve(h.length);
  rec.j.reserve(h.length);
  for (std::uint64_t i = 0; i < h.length; ++i) {
    rec.times.push_back(get<double>(in));
    const double re = get<double>(in);
    const double im = get<double>(in);
    rec.j.emplace_back(re, im);
    if (h.columns == 5) {
      const double ar = get<double>(in);
      const double ai = get<double>(in);
      rec.alpha.emplace_back(ar, ai);
    }
  }
  if (header) *header = h;
  return rec;
}

void write_csv(std::ostream& out, const TrajectoryRecord& rec) {
  const bool field = rec.has_field();
  out << (field ? "t,re_j,im_j,re_alpha,im_alpha\n" : "t,re_j,im_j\n");
  for (std::size_t i = 0; i < rec.size(); ++i) {
    out << format_double(rec.times[i]) << ',' << format_double(rec.j[i].real()) << ','
        << format_double(rec.j[i].imag());
    if (field)
      out << ',' << format_double(rec.alpha[i].real()) << ','
          << format_double(rec.alpha[i].imag());
    out << '\n';
  }
}

}  // namespace sbeam
