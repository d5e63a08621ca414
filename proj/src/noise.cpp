#include "sns/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace sns {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// 53-bit uniform strictly inside (0, 1).
inline double open_uniform(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

NoiseGrid::NoiseGrid(int n) : n_noise(n) {
  if (n < 1) throw std::invalid_argument("NoiseGrid: n_noise must be >= 1, got " + std::to_string(n));
}

int NoiseGrid::cell_index(double x, double y) const {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw std::out_of_range("NoiseGrid: point outside the unit square");
  }
  const int i = std::min(static_cast<int>(std::floor(x * n_noise)), n_noise - 1);
  const int j = std::min(static_cast<int>(std::floor(y * n_noise)), n_noise - 1);
  return j * n_noise + i;
}

NoiseField NoiseField::from_values(NoiseGrid grid, double sigma, std::vector<Vec2> zeta) {
  if (static_cast<int>(zeta.size()) != grid.num_cells()) {
    throw std::invalid_argument("NoiseField: expected one draw pair per cell");
  }
  NoiseField field{grid, sigma, std::move(zeta)};
  return field;
}

Vec2 NoiseField::cell_value(int k) const {
  const double scale = sigma / std::sqrt(grid.cell_volume());
  return {scale * zeta[k][0], scale * zeta[k][1]};
}

NoiseField sample_noise(const NoiseGrid& grid, double sigma, std::uint64_t seed,
                        std::uint64_t stream) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sample_noise: sigma must be >= 0");
  NoiseField field{grid, sigma, {}, seed, stream};
  field.zeta.resize(grid.num_cells());
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (int k = 0; k < grid.num_cells(); ++k) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(stream),
                                  static_cast<std::uint32_t>(stream >> 32), 0u};
    const auto bits = Philox4x32::generate(ctr, key);
    // Box-Muller: one uniform pair yields the two components of the cell.
    const double u1 = open_uniform(bits[0], bits[1]);
    const double u2 = open_uniform(bits[2], bits[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    field.zeta[k] = {r * std::cos(theta), r * std::sin(theta)};
  }
  return field;
}

Vec2 evaluate_noise(const NoiseField& field, double x, double y) {
  return field.cell_value(field.grid.cell_index(x, y));
}

double noise_l2_norm(const NoiseField& field) {
  double sum = 0.0;
  for (const Vec2& z : field.zeta) sum += z[0] * z[0] + z[1] * z[1];
  return field.sigma * std::sqrt(sum);
}

void write_noise_csv(std::ostream& out, const NoiseField& field) {
  out.precision(17);
  out << "cell_i,cell_j,zeta_x,zeta_y\n";
  for (int k = 0; k < field.grid.num_cells(); ++k) {
    const auto [i, j] = field.grid.cell_coords(k);
    out << i << ',' << j << ',' << field.zeta[k][0] << ',' << field.zeta[k][1] << '\n';
  }
}

}  // namespace sns
