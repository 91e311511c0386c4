#include "fewg/geometry.hpp"

#include "detail/interpolators.hpp"

#include "fewg/errors.hpp"

namespace fewg {

struct Routing::Spline {
  boost::math::interpolators::pchip<std::vector<double>> interp;
};

Routing::Routing() = default;

Routing::Routing(std::vector<double> z, std::vector<double> r)
    : z_(std::move(z)), r_(std::move(r)) {
  if (z_.size() != r_.size() || z_.size() < 4) {
    throw ConfigError("routing needs at least 4 (z, R) samples of equal count");
  }
  for (std::size_t k = 1; k < z_.size(); ++k) {
    if (!(z_[k] > z_[k - 1]) || !(r_[k] > r_[k - 1])) {
      throw ConfigError("routing samples must be strictly increasing in z and R");
    }
  }
  auto zc = z_;
  auto rc = r_;
  spline_ = std::make_shared<const Spline>(
      Spline{boost::math::interpolators::pchip<std::vector<double>>(
          std::move(zc), std::move(rc))});
}

double Routing::value(double z) const {
  if (is_straight()) return z;
  if (z < z_.front() || z > z_.back()) {
    throw DomainError("routing evaluated outside its sampled range");
  }
  return spline_->interp(z);
}

double Routing::derivative(double z) const {
  if (is_straight()) return 1.0;
  if (z < z_.front() || z > z_.back()) {
    throw DomainError("routing evaluated outside its sampled range");
  }
  return spline_->interp.prime(z);
}

void WaveguideGeometry::validate() const {
  if (!(core_width > 0.0)) throw ConfigError("geometry.core_width must be > 0");
  if (!(core_thickness > 0.0)) {
    throw ConfigError("geometry.core_thickness must be > 0");
  }
  if (core_material.empty() || substrate_material.empty() ||
      top_cladding_material.empty()) {
    throw ConfigError("geometry materials must be named");
  }
}

}  // namespace fewg
