#include "fewg/material.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"

namespace fewg {

namespace {

// Band edges are compared with a small relative slack so that grids built
// exactly on the edges do not trip over rounding in omega <-> lambda.
constexpr double band_slack = 1e-12;

std::string format_nm(double meters) {
  std::ostringstream os;
  os << meters * 1e9 << " nm";
  return os.str();
}

}  // namespace

Material::Material(std::string id, std::vector<SellmeierTerm> terms,
                   double band_min_m, double band_max_m, std::string source)
    : id_(std::move(id)),
      terms_(std::move(terms)),
      band_min_(band_min_m),
      band_max_(band_max_m),
      source_(std::move(source)) {
  if (id_.empty()) throw ConfigError("material id must not be empty");
  if (!(band_min_ > 0.0) || !(band_max_ > band_min_)) {
    throw ConfigError("material '" + id_ + "': invalid validity band");
  }
  // Reject fits with a pole or n < 1 anywhere inside the band.
  const double upper = std::isfinite(band_max_) ? band_max_ : 100e-6;
  constexpr int probes = 257;
  for (int k = 0; k < probes; ++k) {
    const double lambda =
        band_min_ + (upper - band_min_) * static_cast<double>(k) / (probes - 1);
    const double n = index_unchecked(lambda);
    if (!std::isfinite(n) || n < 1.0) {
      throw ConfigError("material '" + id_ + "': Sellmeier fit gives n < 1 or a "
                        "pole at " + format_nm(lambda));
    }
  }
}

Material Material::vacuum() {
  return Material("vacuum", {}, std::numeric_limits<double>::min(),
                  std::numeric_limits<double>::infinity(), "identity");
}

Material Material::silica() {
  return Material("SiO2",
                  {{0.6961663, 0.0684043 * 0.0684043},
                   {0.4079426, 0.1162414 * 0.1162414},
                   {0.8974794, 9.896161 * 9.896161}},
                  studied_band_min_m, studied_band_max_m,
                  "Malitson 1965 Sellmeier");
}

Material Material::silicon_nitride() {
  return Material("Si3N4",
                  {{3.0249, 0.1353406 * 0.1353406},
                   {40314.0, 1239.842 * 1239.842}},
                  studied_band_min_m, studied_band_max_m,
                  "Luke et al. 2015 Sellmeier");
}

Material Material::constant(std::string id, double index, double band_min_m,
                            double band_max_m) {
  if (!(index >= 1.0)) throw ConfigError("constant material index must be >= 1");
  return Material(std::move(id), {{index * index - 1.0, 0.0}}, band_min_m,
                  band_max_m, "constant");
}

bool Material::in_band(double lambda_m) const {
  return lambda_m >= band_min_ * (1.0 - band_slack) &&
         lambda_m <= band_max_ * (1.0 + band_slack);
}

double Material::index_unchecked(double lambda_m) const {
  const double l2 = (lambda_m * 1e6) * (lambda_m * 1e6);
  double n2 = 1.0;
  for (const auto& t : terms_) n2 += t.B * l2 / (l2 - t.C_um2);
  return std::sqrt(n2);
}

double Material::index_at_wavelength(double lambda_m) const {
  if (!in_band(lambda_m)) {
    throw OutOfBand("material '" + id_ + "' evaluated at " + format_nm(lambda_m) +
                    ", valid band is [" + format_nm(band_min_) + ", " +
                    format_nm(band_max_) + "]");
  }
  return index_unchecked(lambda_m);
}

double Material::refractive_index(double omega) const {
  if (!(omega > 0.0)) throw OutOfBand("non-positive angular frequency");
  return index_at_wavelength(wavelength_from_omega(omega));
}

double Material::permittivity(double omega) const {
  const double n = refractive_index(omega);
  return n * n;
}

MaterialLibrary::MaterialLibrary() {
  add(Material::vacuum());
  add(Material::silica());
  add(Material::silicon_nitride());
}

void MaterialLibrary::add(Material material) {
  const std::string id = material.id();
  materials_.insert_or_assign(id, std::move(material));
}

void MaterialLibrary::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open material file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("material file " + path.string() + ": " + e.what());
  }
  auto load_one = [&](const nlohmann::json& j) {
    try {
      const auto id = j.at("id").get<std::string>();
      const auto B = j.at("B").get<std::vector<double>>();
      const auto C = j.at("C").get<std::vector<double>>();
      const auto band = j.at("band_nm").get<std::vector<double>>();
      if (B.size() != C.size()) {
        throw ConfigError("material '" + id + "': B and C differ in length");
      }
      if (band.size() != 2) {
        throw ConfigError("material '" + id + "': band_nm needs [min, max]");
      }
      std::vector<SellmeierTerm> terms;
      for (std::size_t k = 0; k < B.size(); ++k) terms.push_back({B[k], C[k]});
      add(Material(id, std::move(terms), band[0] * 1e-9, band[1] * 1e-9,
                   "file:" + path.filename().string()));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("material file " + path.string() + ": " + e.what());
    }
  };
  if (doc.is_array()) {
    for (const auto& j : doc) load_one(j);
  } else {
    load_one(doc);
  }
}

const Material& MaterialLibrary::get(const std::string& id) const {
  auto it = materials_.find(id);
  if (it == materials_.end()) throw ConfigError("unknown material '" + id + "'");
  return it->second;
}

bool MaterialLibrary::contains(const std::string& id) const {
  return materials_.count(id) != 0;
}

std::vector<std::string> MaterialLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, m] : materials_) out.push_back(id);
  return out;
}

}  // namespace fewg
