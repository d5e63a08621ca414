#include "sns/field.hpp"

#include <stdexcept>
#include <utility>

namespace sns {

FEField::FEField(const DofMap& dofs)
    : dofs_(&dofs),
      velocity_(Eigen::VectorXd::Zero(dofs.num_velocity_dofs())),
      pressure_(Eigen::VectorXd::Zero(dofs.num_pressure_dofs())) {}

FEField::FEField(const DofMap& dofs, Eigen::VectorXd velocity, Eigen::VectorXd pressure)
    : dofs_(&dofs), velocity_(std::move(velocity)), pressure_(std::move(pressure)) {
  if (velocity_.size() != dofs.num_velocity_dofs() ||
      pressure_.size() != dofs.num_pressure_dofs()) {
    throw std::invalid_argument("FEField: coefficient length does not match the dof map");
  }
}

FEField FEField::from_system_vector(const DofMap& dofs, const Eigen::VectorXd& x) {
  if (x.size() != dofs.num_system_dofs()) {
    throw std::invalid_argument("FEField: system vector length does not match the dof map");
  }
  return FEField(dofs, x.head(dofs.num_velocity_dofs()),
                 x.segment(dofs.pressure_offset(), dofs.num_pressure_dofs()));
}

Eigen::VectorXd FEField::to_system_vector() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dofs_->num_system_dofs());
  x.head(velocity_.size()) = velocity_;
  x.segment(dofs_->pressure_offset(), pressure_.size()) = pressure_;
  return x;
}

Vec2 FEField::velocity_at(std::size_t triangle, const Bary& l) const {
  const ElementGeometry geo(*dofs_, triangle);
  const P2Basis basis(geo, l);
  Vec2 u{0.0, 0.0};
  for (int a = 0; a < 6; ++a) {
    u[0] += basis.value[a] * velocity_[dofs_->velocity_dof(triangle, a, 0)];
    u[1] += basis.value[a] * velocity_[dofs_->velocity_dof(triangle, a, 1)];
  }
  return u;
}

double FEField::pressure_at(std::size_t triangle, const Bary& l) const {
  double p = 0.0;
  for (int a = 0; a < 3; ++a) p += l[a] * pressure_[dofs_->pressure_dof(triangle, a)];
  return p;
}

bool FEField::same_layout(const FEField& other) const {
  return dofs_ == other.dofs_ ||
         (dofs_->num_nodes() == other.dofs_->num_nodes() &&
          dofs_->num_pressure_dofs() == other.dofs_->num_pressure_dofs() &&
          dofs_->num_triangles() == other.dofs_->num_triangles());
}

FEField& FEField::operator+=(const FEField& other) {
  if (!same_layout(other)) throw std::invalid_argument("FEField: mismatched dof maps");
  velocity_ += other.velocity_;
  pressure_ += other.pressure_;
  return *this;
}

FEField& FEField::operator-=(const FEField& other) {
  if (!same_layout(other)) throw std::invalid_argument("FEField: mismatched dof maps");
  velocity_ -= other.velocity_;
  pressure_ -= other.pressure_;
  return *this;
}

FEField& FEField::operator*=(double s) {
  velocity_ *= s;
  pressure_ *= s;
  return *this;
}

FEField operator+(FEField a, const FEField& b) { return a += b; }
FEField operator-(FEField a, const FEField& b) { return a -= b; }

FEField interpolate_velocity(const DofMap& dofs, const VectorFunction& u) {
  FEField field(dofs);
  for (int k = 0; k < dofs.num_nodes(); ++k) {
    const Point2 p = dofs.node_coordinate(k);
    const Vec2 value = u(p.x, p.y);
    field.velocity()[k] = value[0];
    field.velocity()[dofs.num_nodes() + k] = value[1];
  }
  return field;
}

void interpolate_pressure(FEField& field, const ScalarFunction& p) {
  const DofMap& dofs = field.dofs();
  for (int k = 0; k < dofs.num_pressure_dofs(); ++k) {
    const Point2 x = dofs.node_coordinate(k);
    field.pressure()[k] = p(x.x, x.y);
  }
}

double pressure_mean(const FEField& field) {
  const DofMap& dofs = field.dofs();
  double total = 0.0;
  for (std::size_t t = 0; t < dofs.num_triangles(); ++t) {
    const ElementGeometry geo(dofs, t);
    double sum = 0.0;
    for (int a = 0; a < 3; ++a) sum += field.pressure()[dofs.pressure_dof(t, a)];
    total += geo.area * sum / 3.0;
  }
  return total;
}

}  // namespace sns
