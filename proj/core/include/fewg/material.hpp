#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fewg {

/// One Sellmeier oscillator: B lambda^2 / (lambda^2 - C), C in um^2.
struct SellmeierTerm {
  double B = 0.0;
  double C_um2 = 0.0;
};

/// Lossless dispersive material described by a Sellmeier fit.
///
/// Evaluation is restricted to the fit's validity band; requests outside it
/// throw OutOfBand instead of extrapolating.
class Material {
 public:
  Material(std::string id, std::vector<SellmeierTerm> terms,
           double band_min_m, double band_max_m, std::string source = {});

  static Material vacuum();
  /// Fused silica, Malitson (1965) three-term fit.
  static Material silica();
  /// Stoichiometric LPCVD Si3N4, Luke et al. (2015) two-term fit.
  static Material silicon_nitride();
  /// Dispersionless material with constant index (testing and what-if runs).
  static Material constant(std::string id, double index, double band_min_m,
                           double band_max_m);

  const std::string& id() const { return id_; }
  const std::vector<SellmeierTerm>& terms() const { return terms_; }
  double band_min() const { return band_min_; }
  double band_max() const { return band_max_; }
  const std::string& source() const { return source_; }

  bool in_band(double lambda_m) const;
  double index_at_wavelength(double lambda_m) const;
  double refractive_index(double omega) const;
  double permittivity(double omega) const;

 private:
  double index_unchecked(double lambda_m) const;

  std::string id_;
  std::vector<SellmeierTerm> terms_;
  double band_min_;
  double band_max_;
  std::string source_;
};

inline double refractive_index(const Material& material, double omega) {
  return material.refractive_index(omega);
}

/// The studied band: 780 nm to 2.5 um.
inline constexpr double studied_band_min_m = 780e-9;
inline constexpr double studied_band_max_m = 2500e-9;

/// Id-indexed material set with built-in vacuum, SiO2 and Si3N4 entries.
class MaterialLibrary {
 public:
  MaterialLibrary();

  /// Loads `{ id, B: [..], C: [..], band_nm: [min, max] }` objects, either a
  /// single object or an array of them. Later entries replace earlier ones.
  void load_file(const std::filesystem::path& path);
  void add(Material material);

  const Material& get(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Material> materials_;
};

}  // namespace fewg
