#include "fbmchar/types.hpp"

#include <cmath>
#include <sstream>

namespace fbm {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream os;
    os << "Hurst index must lie in the open interval (0,1), got " << value;
    throw InvalidArgument(os.str());
  }
}

bool HurstIndex::near_half(double tol) const noexcept { return std::abs(value_ - 0.5) < tol; }

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    std::ostringstream os;
    os << "time horizon must be positive and finite, got " << horizon;
    throw InvalidArgument(os.str());
  }
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
  return t;
}

TimeGrid TimeGrid::coarsened(std::size_t factor) const {
  if (factor == 0 || steps_ % factor != 0) {
    throw InvalidArgument("grid with " + std::to_string(steps_) +
                          " steps cannot be coarsened by " + std::to_string(factor));
  }
  return TimeGrid(horizon_, steps_ / factor);
}

std::string_view to_string(PathRole role) {
  switch (role) {
    case PathRole::X: return "X";
    case PathRole::Y: return "Y";
    case PathRole::M: return "M";
    case PathRole::W: return "W";
    case PathRole::Other: return "other";
  }
  return "other";
}

PathRole path_role_from_string(std::string_view name) {
  if (name == "X") return PathRole::X;
  if (name == "Y") return PathRole::Y;
  if (name == "M") return PathRole::M;
  if (name == "W") return PathRole::W;
  if (name == "other") return PathRole::Other;
  throw InvalidArgument("unknown path role '" + std::string(name) + "'");
}

SamplePath::SamplePath(TimeGrid grid, std::vector<double> values, PathRole role)
    : grid_(grid), values_(std::move(values)), role_(role) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("path has " + std::to_string(values_.size()) + " values but grid has " +
                          std::to_string(grid_.size()) + " points");
  }
  if (values_.front() != 0.0) {
    std::ostringstream os;
    os << "path must start at 0, got " << values_.front();
    throw InvalidArgument(os.str());
  }
}

std::vector<double> SamplePath::increments() const {
  std::vector<double> d(values_.size() - 1);
  for (std::size_t k = 1; k < values_.size(); ++k) d[k - 1] = values_[k] - values_[k - 1];
  return d;
}

SamplePath SamplePath::scaled(double c) const {
  std::vector<double> v(values_);
  for (auto& x : v) x *= c;
  return SamplePath(grid_, std::move(v), role_);
}

SamplePath SamplePath::with_role(PathRole role) const { return SamplePath(grid_, values_, role); }

SamplePath SamplePath::coarsened(std::size_t factor) const {
  TimeGrid g = grid_.coarsened(factor);
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k * factor];
  return SamplePath(g, std::move(v), role_);
}

SamplePath SamplePath::truncated(std::size_t m) const {
  if (m == 0 || m > grid_.steps()) {
    throw InvalidArgument("truncation index " + std::to_string(m) + " outside 1.." +
                          std::to_string(grid_.steps()));
  }
  return SamplePath(TimeGrid(grid_.time(m), m),
                    std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(m) + 1),
                    role_);
}

}  // namespace fbm
