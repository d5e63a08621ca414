#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sns/noise.hpp"

using namespace sns;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                             {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                             {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("grid geometry and cell lookup") {
  const NoiseGrid g(4);
  CHECK(g.num_cells() == 16);
  CHECK(g.cell_volume() == 1.0 / 16.0);
  CHECK(g.cell_index(0.0, 0.0) == 0);
  CHECK(g.cell_index(0.25, 0.0) == 1);
  CHECK(g.cell_index(1.0, 1.0) == 15);
  CHECK(g.cell_index(0.99, 0.3) == 7);
  CHECK(g.cell_coords(7) == std::array<int, 2>{3, 1});
  CHECK_THROWS_AS(g.cell_index(-0.1, 0.5), std::out_of_range);
  CHECK_THROWS_AS(g.cell_index(0.5, 1.5), std::out_of_range);
  CHECK_THROWS_AS(NoiseGrid(0), std::invalid_argument);
}

TEST_CASE("sampling is deterministic, finite and stream-dependent") {
  const NoiseGrid g(6);
  const NoiseField a = sample_noise(g, 1.0, 42, 3);
  const NoiseField b = sample_noise(g, 1.0, 42, 3);
  const NoiseField c = sample_noise(g, 1.0, 42, 4);
  const NoiseField d = sample_noise(g, 1.0, 43, 3);
  REQUIRE(a.zeta.size() == 36);
  CHECK(a.zeta == b.zeta);
  CHECK(a.zeta != c.zeta);
  CHECK(a.zeta != d.zeta);
  for (const auto& z : a.zeta) {
    CHECK(std::isfinite(z[0]));
    CHECK(std::isfinite(z[1]));
  }
  CHECK_THROWS_AS(sample_noise(g, -1.0, 1, 0), std::invalid_argument);
}

TEST_CASE("draw statistics over 10^4 streams") {
  const NoiseGrid g(3);
  const int draws = 10000;
  const int cells = g.num_cells();
  std::vector<double> sum(2 * cells, 0.0), sq(2 * cells, 0.0);
  double cross = 0.0, cross_comp = 0.0, lag = 0.0;
  double prev = 0.0;
  for (int s = 0; s < draws; ++s) {
    const NoiseField f = sample_noise(g, 1.0, 2024, static_cast<std::uint64_t>(s));
    for (int k = 0; k < cells; ++k) {
      for (int c = 0; c < 2; ++c) {
        sum[2 * k + c] += f.zeta[k][c];
        sq[2 * k + c] += f.zeta[k][c] * f.zeta[k][c];
      }
    }
    cross += f.zeta[0][0] * f.zeta[4][0];
    cross_comp += f.zeta[2][0] * f.zeta[2][1];
    if (s > 0) lag += prev * f.zeta[0][0];
    prev = f.zeta[0][0];
  }
  for (int i = 0; i < 2 * cells; ++i) {
    const double mean = sum[i] / draws;
    const double var = sq[i] / draws - mean * mean;
    CHECK(std::abs(mean) <= 0.03);
    CHECK(var >= 0.95);
    CHECK(var <= 1.05);
  }
  const double m0 = sum[0] / draws, m4 = sum[8] / draws;
  CHECK(std::abs(cross / draws - m0 * m4) <= 0.03);
  CHECK(std::abs(cross_comp / draws - (sum[4] / draws) * (sum[5] / draws)) <= 0.03);
  // consecutive sample streams are uncorrelated
  CHECK(std::abs(lag / (draws - 1)) <= 0.03);
}

TEST_CASE("evaluation") {
  SUBCASE("single cell, sigma = 2") {
    const NoiseField f = NoiseField::from_values(NoiseGrid(1), 2.0, {{1.0, 1.0}});
    for (double x : {0.0, 0.3, 1.0}) {
      const Vec2 v = evaluate_noise(f, x, 0.7);
      CHECK(v[0] == 2.0);
      CHECK(v[1] == 2.0);
    }
  }
  SUBCASE("2x2 grid reads cell (1, 1) scaled by 2 sigma") {
    const double sigma = 0.7;
    const NoiseField f = NoiseField::from_values(NoiseGrid(2), sigma,
                                                 {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {-1.5, 0.25}});
    const Vec2 v = evaluate_noise(f, 0.9, 0.9);
    CHECK(v[0] == doctest::Approx(2.0 * sigma * -1.5).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(2.0 * sigma * 0.25).epsilon(1e-15));
    CHECK_THROWS_AS(evaluate_noise(f, 1.2, 0.5), std::out_of_range);
  }
  SUBCASE("sigma = 0 vanishes everywhere") {
    const NoiseField f = sample_noise(NoiseGrid(5), 0.0, 9, 1);
    for (double x : {0.05, 0.5, 0.95}) {
      const Vec2 v = evaluate_noise(f, x, 1.0 - x);
      CHECK(v[0] == 0.0);
      CHECK(v[1] == 0.0);
    }
  }
  CHECK_THROWS_AS(NoiseField::from_values(NoiseGrid(2), 1.0, {{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("L2 norm of the forcing") {
  CHECK(noise_l2_norm(NoiseField::from_values(NoiseGrid(2), 1.0, std::vector<Vec2>(4, {0.0, 0.0}))) ==
        0.0);
  CHECK(noise_l2_norm(NoiseField::from_values(NoiseGrid(1), 1.0, {{3.0, 4.0}})) ==
        doctest::Approx(5.0).epsilon(1e-15));

  const NoiseField a = sample_noise(NoiseGrid(4), 0.5, 3, 8);
  const NoiseField b = NoiseField::from_values(NoiseGrid(4), 1.5, a.zeta);
  CHECK(noise_l2_norm(b) == doctest::Approx(3.0 * noise_l2_norm(a)).epsilon(1e-15));

  // direct quadrature of |sigma / sqrt(V) zeta|^2 over cells
  double direct = 0.0;
  for (int k = 0; k < a.grid.num_cells(); ++k) {
    const Vec2 v = a.cell_value(k);
    direct += a.grid.cell_volume() * (v[0] * v[0] + v[1] * v[1]);
  }
  CHECK(noise_l2_norm(a) == doctest::Approx(std::sqrt(direct)).epsilon(1e-14));

  const double sigma = 0.9;
  const int n = 5;
  double mean_sq = 0.0;
  const int samples = 1000;
  for (int s = 0; s < samples; ++s) {
    const double r = noise_l2_norm(sample_noise(NoiseGrid(n), sigma, 77, static_cast<std::uint64_t>(s)));
    mean_sq += r * r / samples;
  }
  const double expected = sigma * sigma * 2.0 * n * n;
  CHECK(std::abs(mean_sq / expected - 1.0) <= 0.1);
}

TEST_CASE("noise csv") {
  std::ostringstream out;
  write_noise_csv(out, NoiseField::from_values(NoiseGrid(2), 1.0, std::vector<Vec2>(4, {0.5, -0.5})));
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 5);
}
