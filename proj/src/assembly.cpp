#include "sns/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "sns/element.hpp"

namespace sns {

void ProblemParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("ProblemParams: nu must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("ProblemParams: sigma must be >= 0");
  }
}

namespace {

using LocalMatrix = std::array<std::array<double, 12>, 12>;

// Local velocity index: component * 6 + local node.
void scatter_velocity(const DofMap& dofs, std::size_t t, const LocalMatrix& local,
                      std::vector<Triplet>& out) {
  std::array<int, 12> global;
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 6; ++a) global[c * 6 + a] = dofs.velocity_dof(t, a, c);
  }
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      if (local[i][j] != 0.0) out.emplace_back(global[i], global[j], local[i][j]);
    }
  }
}

Vec2 interpolate_at(const DofMap& dofs, std::size_t t, const P2Basis& basis,
                    const Eigen::VectorXd& w) {
  Vec2 value{0.0, 0.0};
  for (int a = 0; a < 6; ++a) {
    value[0] += basis.value[a] * w[dofs.velocity_dof(t, a, 0)];
    value[1] += basis.value[a] * w[dofs.velocity_dof(t, a, 1)];
  }
  return value;
}

// grad[d][c] = d w_d / d x_c
std::array<Vec2, 2> gradient_at(const DofMap& dofs, std::size_t t, const P2Basis& basis,
                                const Eigen::VectorXd& w) {
  std::array<Vec2, 2> grad{};
  for (int a = 0; a < 6; ++a) {
    for (int d = 0; d < 2; ++d) {
      const double coeff = w[dofs.velocity_dof(t, a, d)];
      grad[d][0] += coeff * basis.grad[a][0];
      grad[d][1] += coeff * basis.grad[a][1];
    }
  }
  return grad;
}

void check_velocity(const DofMap& dofs, const Eigen::VectorXd& w, const char* who) {
  if (w.size() != dofs.num_velocity_dofs()) {
    throw std::invalid_argument(std::string(who) + ": velocity vector length mismatch");
  }
}

}  // namespace

SparseOperator assemble_viscous(const TriMesh& mesh, const DofMap& dofs, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("assemble_viscous: nu must be > 0");
  const QuadratureRule& rule = default_rule();
  std::vector<Triplet> entries;
  entries.reserve(mesh.num_triangles() * 72);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    LocalMatrix local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const P2Basis basis(geo, rule.points[q]);
      const double wq = nu * rule.weights[q] * geo.area;
      for (int b = 0; b < 6; ++b) {
        for (int a = 0; a < 6; ++a) {
          const double g = wq * (basis.grad[a][0] * basis.grad[b][0] +
                                 basis.grad[a][1] * basis.grad[b][1]);
          local[b][a] += g;
          local[6 + b][6 + a] += g;
        }
      }
    }
    scatter_velocity(dofs, t, local, entries);
  }
  return SparseOperator(dofs.num_velocity_dofs(), dofs.num_velocity_dofs(), entries);
}

SparseOperator assemble_divergence(const TriMesh& mesh, const DofMap& dofs) {
  const QuadratureRule& rule = default_rule();
  std::vector<Triplet> entries;
  entries.reserve(mesh.num_triangles() * 36);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    std::array<std::array<double, 12>, 3> local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Bary& l = rule.points[q];
      const P2Basis basis(geo, l);
      const double wq = rule.weights[q] * geo.area;
      for (int i = 0; i < 3; ++i) {
        for (int a = 0; a < 6; ++a) {
          local[i][a] -= wq * l[i] * basis.grad[a][0];
          local[i][6 + a] -= wq * l[i] * basis.grad[a][1];
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      const int row = dofs.pressure_dof(t, i);
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 6; ++a) {
          entries.emplace_back(row, dofs.velocity_dof(t, a, c), local[i][c * 6 + a]);
        }
      }
    }
  }
  return SparseOperator(dofs.num_pressure_dofs(), dofs.num_velocity_dofs(), entries);
}

Eigen::VectorXd assemble_pressure_gauge(const TriMesh& mesh, const DofMap& dofs) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dofs.num_pressure_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double third = mesh.signed_area(t) / 3.0;
    for (int i = 0; i < 3; ++i) g[dofs.pressure_dof(t, i)] += third;
  }
  return g;
}

std::pair<SparseOperator, SparseOperator> assemble_convection_linearized(
    const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& w,
    ConvectionOptions options) {
  check_velocity(dofs, w, "assemble_convection_linearized");
  const QuadratureRule& rule = default_rule();
  const double flip = options.inject_sign_error ? -1.0 : 1.0;
  std::vector<Triplet> n1;
  std::vector<Triplet> n2;
  n1.reserve(mesh.num_triangles() * 72);
  n2.reserve(mesh.num_triangles() * 144);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    LocalMatrix local1{};
    LocalMatrix local2{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const P2Basis basis(geo, rule.points[q]);
      const double wq = rule.weights[q] * geo.area;
      const Vec2 wv = interpolate_at(dofs, t, basis, w);
      const auto grad = gradient_at(dofs, t, basis, w);
      for (int a = 0; a < 6; ++a) {
        const double transport = wv[0] * basis.grad[a][0] + flip * wv[1] * basis.grad[a][1];
        for (int b = 0; b < 6; ++b) {
          const double v1 = wq * transport * basis.value[b];
          local1[b][a] += v1;
          local1[6 + b][6 + a] += v1;
          const double mass = wq * basis.value[a] * basis.value[b];
          for (int d = 0; d < 2; ++d) {
            for (int c = 0; c < 2; ++c) local2[d * 6 + b][c * 6 + a] += mass * grad[d][c];
          }
        }
      }
    }
    scatter_velocity(dofs, t, local1, n1);
    scatter_velocity(dofs, t, local2, n2);
  }
  const int nv = dofs.num_velocity_dofs();
  return {SparseOperator(nv, nv, n1), SparseOperator(nv, nv, n2)};
}

SparseOperator assemble_convection_jacobian(const TriMesh& mesh, const DofMap& dofs,
                                            const Eigen::VectorXd& w) {
  check_velocity(dofs, w, "assemble_convection_jacobian");
  const QuadratureRule& rule = default_rule();
  std::vector<Triplet> entries;
  entries.reserve(mesh.num_triangles() * 144);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    LocalMatrix local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const P2Basis basis(geo, rule.points[q]);
      const double wq = rule.weights[q] * geo.area;
      const Vec2 wv = interpolate_at(dofs, t, basis, w);
      const auto grad = gradient_at(dofs, t, basis, w);
      for (int a = 0; a < 6; ++a) {
        const double transport = wv[0] * basis.grad[a][0] + wv[1] * basis.grad[a][1];
        for (int b = 0; b < 6; ++b) {
          const double v1 = wq * transport * basis.value[b];
          const double mass = wq * basis.value[a] * basis.value[b];
          local[b][a] += v1 + mass * grad[0][0];
          local[b][6 + a] += mass * grad[0][1];
          local[6 + b][a] += mass * grad[1][0];
          local[6 + b][6 + a] += v1 + mass * grad[1][1];
        }
      }
    }
    scatter_velocity(dofs, t, local, entries);
  }
  const int nv = dofs.num_velocity_dofs();
  return SparseOperator(nv, nv, entries);
}

Eigen::VectorXd convection_action(const TriMesh& mesh, const DofMap& dofs,
                                  const Eigen::VectorXd& w, const Eigen::VectorXd& u) {
  check_velocity(dofs, w, "convection_action");
  check_velocity(dofs, u, "convection_action");
  const QuadratureRule& rule = default_rule();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs.num_velocity_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const P2Basis basis(geo, rule.points[q]);
      const double wq = rule.weights[q] * geo.area;
      const Vec2 wv = interpolate_at(dofs, t, basis, w);
      const auto grad = gradient_at(dofs, t, basis, u);
      for (int d = 0; d < 2; ++d) {
        const double transported = wq * (wv[0] * grad[d][0] + wv[1] * grad[d][1]);
        for (int b = 0; b < 6; ++b) r[dofs.velocity_dof(t, b, d)] += transported * basis.value[b];
      }
    }
  }
  return r;
}

Eigen::VectorXd assemble_load(const TriMesh& mesh, const DofMap& dofs, const VectorFunction& f,
                              const QuadratureRule& rule) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.num_velocity_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const P2Basis basis(geo, rule.points[q]);
      const Point2 x = geo.to_physical(rule.points[q]);
      const Vec2 fx = f(x.x, x.y);
      const double wq = rule.weights[q] * geo.area;
      for (int b = 0; b < 6; ++b) {
        load[dofs.velocity_dof(t, b, 0)] += wq * fx[0] * basis.value[b];
        load[dofs.velocity_dof(t, b, 1)] += wq * fx[1] * basis.value[b];
      }
    }
  }
  return load;
}

Eigen::VectorXd assemble_noise_load(const TriMesh& mesh, const DofMap& dofs,
                                    const NoiseField& noise) {
  const NoiseGrid& grid = noise.grid;
  if (grid.num_cells() < 1 || static_cast<int>(noise.zeta.size()) != grid.num_cells()) {
    throw std::invalid_argument("assemble_noise_load: noise grid has no cells");
  }
  const QuadratureRule& rule = default_rule();
  const double n = grid.n_noise;
  constexpr double tol = 1e-12;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.num_velocity_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo(mesh, t);
    const Point2 centroid = geo.to_physical({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    const int k = grid.cell_index(centroid.x, centroid.y);
    const auto [ci, cj] = grid.cell_coords(k);
    for (const Point2& v : geo.vertices) {
      const double sx = v.x * n - ci;
      const double sy = v.y * n - cj;
      if (sx < -tol || sx > 1.0 + tol || sy < -tol || sy > 1.0 + tol) {
        throw std::invalid_argument(
            "assemble_noise_load: noise grid is not nested in the mesh (n_noise must divide the "
            "mesh resolution)");
      }
    }
    const Vec2 value = noise.cell_value(k);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const P2Basis basis(geo, rule.points[q]);
      const double wq = rule.weights[q] * geo.area;
      for (int b = 0; b < 6; ++b) {
        load[dofs.velocity_dof(t, b, 0)] += wq * value[0] * basis.value[b];
        load[dofs.velocity_dof(t, b, 1)] += wq * value[1] * basis.value[b];
      }
    }
  }
  return load;
}

}  // namespace sns
