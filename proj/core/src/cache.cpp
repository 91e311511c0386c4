#include "fewg/cache.hpp"

#include <algorithm>

#include <cstring>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "fewg/errors.hpp"
#include "fewg/io.hpp"

namespace fewg {

namespace {

constexpr char kMagic[8] = {'F', 'E', 'W', 'G', 'M', 'O', 'D', 'E'};

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    buf_ += s;
  }
  void put_floats(const std::vector<float>& v) {
    put(static_cast<std::uint64_t>(v.size()));
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(float));
  }
  std::string& str() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::vector<float> get_floats() {
    const auto n = get<std::uint64_t>();
    if (n > (s_.size() - pos_) / sizeof(float)) throw CacheCorrupt("array length out of range");
    std::vector<float> v(n);
    std::memcpy(v.data(), s_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
    return v;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > s_.size() - pos_) throw CacheCorrupt("truncated entry");
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

nlohmann::json material_json(const Material& m) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : m.terms()) terms.push_back({format_number(t.B), format_number(t.C_um2)});
  return {{"id", m.id()},
          {"terms", terms},
          {"band", {format_number(m.band_min()), format_number(m.band_max())}}};
}

}  // namespace

std::string mode_cache_key(const WaveguideGeometry& geometry, const MaterialLibrary& materials,
                           double omega, const GridSpec& grid, const SolveOptions& options) {
  const nlohmann::json j = {
      {"core_width", format_number(geometry.core_width)},
      {"core_thickness", format_number(geometry.core_thickness)},
      {"layout", geometry.layout == CoreLayout::Embedded ? "embedded" : "ridge"},
      {"core", material_json(materials.get(geometry.core_material))},
      {"substrate", material_json(materials.get(geometry.substrate_material))},
      {"top", material_json(materials.get(geometry.top_cladding_material))},
      {"omega", format_number(omega)},
      {"grid",
       {format_number(grid.dx), format_number(grid.dy), format_number(grid.width),
        format_number(grid.height), format_number(grid.top_space), format_number(grid.margin),
        grid.enforce_margin, static_cast<int>(grid.bc_x), static_cast<int>(grid.bc_y)}},
      {"solve",
       {options.n_modes, options.quasi_te, options.quasi_tm,
        format_number(options.max_tail_ratio), format_number(options.tolerance)}},
  };
  return sha256_hex(j.dump());
}

std::string serialize_modes(const std::vector<ModeSolution>& modes) {
  Writer w;
  // Permittivity maps are shared between modes of one frequency.
  std::vector<const std::vector<float>*> tables;
  std::vector<std::int32_t> index(modes.size(), -1);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (!modes[m].field || !modes[m].field->eps) continue;
    const auto* p = modes[m].field->eps.get();
    auto it = std::find(tables.begin(), tables.end(), p);
    if (it == tables.end()) {
      tables.push_back(p);
      it = tables.end() - 1;
    }
    index[m] = static_cast<std::int32_t>(it - tables.begin());
  }
  w.put(static_cast<std::uint32_t>(tables.size()));
  for (const auto* t : tables) w.put_floats(*t);
  w.put(static_cast<std::uint32_t>(modes.size()));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto& s = modes[m];
    w.put_string(s.family);
    w.put(static_cast<std::uint8_t>(s.polarization));
    w.put(static_cast<std::int32_t>(s.nodes_x));
    w.put(static_cast<std::int32_t>(s.nodes_y));
    for (double v : {s.omega, s.n_eff, s.n_g, s.polarization_fraction, s.tail_ratio,
                     s.eig_imag_ratio}) {
      w.put(v);
    }
    w.put(static_cast<std::uint8_t>(s.field ? 1 : 0));
    if (!s.field) continue;
    const auto& f = *s.field;
    w.put(static_cast<std::int32_t>(f.grid.nx));
    w.put(static_cast<std::int32_t>(f.grid.ny));
    for (double v : {f.grid.dx, f.grid.dy, f.grid.x0, f.grid.y0}) w.put(v);
    w.put(static_cast<std::uint8_t>(f.polarization));
    w.put_floats(f.et);
    w.put_floats(f.ez);
    w.put(index[m]);
  }
  return std::move(w.str());
}

std::vector<ModeSolution> deserialize_modes(const std::string& payload) {
  Reader r(payload);
  std::vector<std::shared_ptr<const std::vector<float>>> tables;
  const auto n_tables = r.get<std::uint32_t>();
  for (std::uint32_t t = 0; t < n_tables; ++t) {
    tables.push_back(std::make_shared<const std::vector<float>>(r.get_floats()));
  }
  const auto count = r.get<std::uint32_t>();
  std::vector<ModeSolution> modes;
  for (std::uint32_t m = 0; m < count; ++m) {
    ModeSolution s;
    s.family = r.get_string();
    s.polarization = static_cast<Polarization>(r.get<std::uint8_t>());
    s.nodes_x = r.get<std::int32_t>();
    s.nodes_y = r.get<std::int32_t>();
    s.omega = r.get<double>();
    s.n_eff = r.get<double>();
    s.n_g = r.get<double>();
    s.polarization_fraction = r.get<double>();
    s.tail_ratio = r.get<double>();
    s.eig_imag_ratio = r.get<double>();
    if (r.get<std::uint8_t>()) {
      auto f = std::make_shared<ModeField>();
      f->grid.nx = r.get<std::int32_t>();
      f->grid.ny = r.get<std::int32_t>();
      f->grid.dx = r.get<double>();
      f->grid.dy = r.get<double>();
      f->grid.x0 = r.get<double>();
      f->grid.y0 = r.get<double>();
      f->polarization = static_cast<Polarization>(r.get<std::uint8_t>());
      f->et = r.get_floats();
      f->ez = r.get_floats();
      const auto idx = r.get<std::int32_t>();
      if (idx >= 0) {
        if (static_cast<std::size_t>(idx) >= tables.size()) throw CacheCorrupt("bad table index");
        f->eps = tables[static_cast<std::size_t>(idx)];
      }
      if (f->grid.nx <= 0 || f->grid.ny <= 0 || f->et.size() != f->grid.size() ||
          f->ez.size() != f->grid.size() || (f->eps && f->eps->size() != f->grid.size())) {
        throw CacheCorrupt("field size does not match its grid");
      }
      s.field = std::move(f);
    }
    modes.push_back(std::move(s));
  }
  if (!r.done()) throw CacheCorrupt("trailing bytes");
  return modes;
}

ModeCache::ModeCache(std::filesystem::path dir, std::uint32_t version)
    : dir_(std::move(dir)), version_(version) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ModeCache::entry_path(const std::string& key) const {
  return dir_ / (key + ".modes");
}

std::shared_ptr<std::mutex> ModeCache::key_lock(const std::string& key) {
  std::lock_guard<std::mutex> g(locks_mutex_);
  auto& p = locks_[key];
  if (!p) p = std::make_shared<std::mutex>();
  return p;
}

bool ModeCache::try_load(const std::string& key, std::vector<ModeSolution>& out) {
  const auto path = entry_path(key);
  if (!std::filesystem::exists(path)) return false;
  try {
    const std::string data = read_file(path);
    const std::size_t head = sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t) + 64;
    if (data.size() < head || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
      throw CacheCorrupt("bad header");
    }
    std::uint32_t version = 0;
    std::uint64_t length = 0;
    std::memcpy(&version, data.data() + 8, sizeof(version));
    std::memcpy(&length, data.data() + 12, sizeof(length));
    if (version != version_) return false;  // stale solver output, recompute
    const std::string checksum = data.substr(20, 64);
    if (data.size() != head + length) throw CacheCorrupt("length mismatch");
    const std::string payload = data.substr(head);
    if (sha256_hex(payload) != checksum) throw CacheCorrupt("checksum mismatch");
    out = deserialize_modes(payload);
    return true;
  } catch (const std::exception&) {
    std::error_code ec;
    std::filesystem::rename(path, path.string() + ".corrupt", ec);
    ++quarantined_;
    return false;
  }
}

std::vector<ModeSolution> ModeCache::get_or_solve(const std::string& key, const Solver& solve) {
  const auto lock = key_lock(key);
  std::lock_guard<std::mutex> g(*lock);
  std::vector<ModeSolution> modes;
  if (try_load(key, modes)) {
    ++hits_;
    return modes;
  }
  ++misses_;
  try {
    modes = solve();
  } catch (const NoGuidedMode&) {
    modes.clear();  // cached as an empty set
  }
  const std::string payload = serialize_modes(modes);
  std::string data(kMagic, sizeof(kMagic));
  const std::uint32_t version = version_;
  const std::uint64_t length = payload.size();
  data.append(reinterpret_cast<const char*>(&version), sizeof(version));
  data.append(reinterpret_cast<const char*>(&length), sizeof(length));
  data += sha256_hex(payload);
  data += payload;
  write_file_atomic(entry_path(key), data);
  ++writes_;
  return modes;
}

}  // namespace fewg
