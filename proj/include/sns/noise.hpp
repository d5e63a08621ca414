#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sns/element.hpp"

namespace sns {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Uniform square partition of the unit square into n_noise^2 cells.
struct NoiseGrid {
  int n_noise = 1;

  explicit NoiseGrid(int n);
  int num_cells() const { return n_noise * n_noise; }
  double cell_volume() const { return 1.0 / (static_cast<double>(n_noise) * n_noise); }
  /// Cell containing (x, y); cell boundaries belong to the cell above/right of
  /// them except on the far edges of the domain.
  int cell_index(double x, double y) const;
  std::array<int, 2> cell_coords(int k) const { return {k % n_noise, k / n_noise}; }
};

/// One realization of the piecewise-constant white-noise approximation
///   dW/dx = sum_k sigma / sqrt(V_k) * zeta_k * chi_k(x)
/// with independent standard normal draws per cell and velocity component.
struct NoiseField {
  NoiseGrid grid;
  double sigma = 0.0;
  std::vector<Vec2> zeta;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Realization with prescribed draws (testing and replay).
  static NoiseField from_values(NoiseGrid grid, double sigma, std::vector<Vec2> zeta);

  /// sigma / sqrt(V_k) * zeta_k on cell k
  Vec2 cell_value(int k) const;
};

/// Draws 2 * n_noise^2 standard normals. Cell k of stream s uses Philox
/// counter (k, s_lo, s_hi, 0) under key `seed`, so distinct streams never
/// share a counter.
NoiseField sample_noise(const NoiseGrid& grid, double sigma, std::uint64_t seed,
                        std::uint64_t stream = 0);

/// Throws std::out_of_range for points outside the closed unit square.
Vec2 evaluate_noise(const NoiseField& field, double x, double y);

/// Exact L2 norm of the piecewise-constant forcing: sigma * sqrt(sum |zeta_k|^2).
double noise_l2_norm(const NoiseField& field);

/// CSV dump: cell_i, cell_j, zeta_x, zeta_y.
void write_noise_csv(std::ostream& out, const NoiseField& field);

}  // namespace sns
