#pragma once

#include <memory>
#include <string>
#include <vector>

namespace fewg {

/// Longitudinal waveguide path R_par(z): arc length along the waveguide at
/// the point next to electron position z. Straight routing is the identity.
///
/// Sampled routings are interpolated with a monotone piecewise-cubic
/// (PCHIP) spline; samples must be strictly increasing in both z and R.
class Routing {
 public:
  Routing();  // identity
  Routing(std::vector<double> z, std::vector<double> r);

  static Routing straight() { return Routing(); }

  bool is_straight() const { return z_.empty(); }
  double value(double z) const;
  double derivative(double z) const;
  const std::vector<double>& z_samples() const { return z_; }
  const std::vector<double>& r_samples() const { return r_; }

 private:
  struct Spline;
  std::vector<double> z_;
  std::vector<double> r_;
  std::shared_ptr<const Spline> spline_;
};

enum class CoreLayout {
  Embedded,  // core top flush with the substrate surface
  Ridge,     // core sits on top of the substrate surface
};

/// Rectangular-core waveguide cross-section. The core top surface is the
/// plane y = 0 and the core is centered at x = 0.
struct WaveguideGeometry {
  double core_width = 800e-9;
  double core_thickness = 650e-9;
  std::string core_material = "Si3N4";
  std::string substrate_material = "SiO2";
  std::string top_cladding_material = "vacuum";
  CoreLayout layout = CoreLayout::Embedded;
  Routing routing;

  void validate() const;
};

}  // namespace fewg
