#include "kw/state.hpp"

#include "kw/errors.hpp"

namespace kw {

MildState MildState::zeros(const TorusGrid& grid) {
  return {SpectralField(grid, 1), SpectralField(grid, grid.dim()), SpectralField(grid, grid.dim())};
}

void MildState::validate() const {
  require_same_grid(q, m1, "MildState");
  require_same_grid(q, m2, "MildState");
  const int d = q.grid().dim();
  if (q.components() != 1 || m1.components() != d || m2.components() != d)
    throw ShapeError("MildState: expects scalar q and vector m1, m2");
}

MildState& MildState::operator+=(const MildState& o) {
  q += o.q;
  m1 += o.m1;
  m2 += o.m2;
  return *this;
}
MildState& MildState::operator-=(const MildState& o) {
  q -= o.q;
  m1 -= o.m1;
  m2 -= o.m2;
  return *this;
}
MildState& MildState::operator*=(double s) {
  q *= s;
  m1 *= s;
  m2 *= s;
  return *this;
}
MildState operator+(MildState a, const MildState& b) { return a += b; }
MildState operator-(MildState a, const MildState& b) { return a -= b; }

void Trajectory::validate() const {
  if (times.empty() || times.size() != states.size()) throw ShapeError("Trajectory: times and states must match");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("Trajectory: times must increase strictly");
  if (times.front() < 0.0) throw DomainError("Trajectory: negative time");
  for (const auto& s : states) {
    s.validate();
    require_same_grid(s.q, states.front().q, "Trajectory");
  }
}

}  // namespace kw
