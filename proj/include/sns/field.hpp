#pragma once

#include <Eigen/Core>
#include <functional>

#include "sns/element.hpp"
#include "sns/mesh.hpp"

namespace sns {

using VectorFunction = std::function<Vec2(double x, double y)>;
using ScalarFunction = std::function<double(double x, double y)>;

/// Velocity/pressure coefficient pair in the Taylor-Hood space. Holds a
/// non-owning reference to its DofMap, which must outlive the field.
class FEField {
 public:
  explicit FEField(const DofMap& dofs);
  FEField(const DofMap& dofs, Eigen::VectorXd velocity, Eigen::VectorXd pressure);

  /// Split an assembled [velocity | pressure | multiplier] vector.
  static FEField from_system_vector(const DofMap& dofs, const Eigen::VectorXd& x);
  Eigen::VectorXd to_system_vector() const;

  const DofMap& dofs() const { return *dofs_; }
  const Eigen::VectorXd& velocity() const { return velocity_; }
  const Eigen::VectorXd& pressure() const { return pressure_; }
  Eigen::VectorXd& velocity() { return velocity_; }
  Eigen::VectorXd& pressure() { return pressure_; }

  Vec2 velocity_at(std::size_t triangle, const Bary& l) const;
  double pressure_at(std::size_t triangle, const Bary& l) const;

  bool same_layout(const FEField& other) const;

  FEField& operator+=(const FEField& other);
  FEField& operator-=(const FEField& other);
  FEField& operator*=(double s);

 private:
  const DofMap* dofs_;
  Eigen::VectorXd velocity_;
  Eigen::VectorXd pressure_;
};

FEField operator+(FEField a, const FEField& b);
FEField operator-(FEField a, const FEField& b);

/// Nodal P2 interpolation of a velocity field (pressure left zero).
FEField interpolate_velocity(const DofMap& dofs, const VectorFunction& u);
/// Nodal P1 interpolation of a pressure field into `field`.
void interpolate_pressure(FEField& field, const ScalarFunction& p);

/// Integral of the P1 pressure over the domain.
double pressure_mean(const FEField& field);

}  // namespace sns
