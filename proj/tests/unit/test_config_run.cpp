#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>
#include <set>

#include <rapidjson/document.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include "fewg/config.hpp"
#include "fewg/errors.hpp"
#include "fewg/io.hpp"
#include "fewg/run.hpp"

using namespace fewg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir = FEWG_SOURCE_DIR;

// Coarse guide that solves in seconds; shared cache across tests.
json cheap_config(const std::string& task) {
  return {
      {"task", task},
      {"materials", {{"files", {(source_dir / "data" / "materials.json").string()}}}},
      {"geometry", {{"core_width_nm", 800}, {"core_thickness_nm", 650}}},
      {"beam", {{"beta", 0.65}, {"gap_nm", 100}, {"length_um", 50}}},
      {"solver",
       {{"grid_nm", 50}, {"margin_um", 1.5}, {"modes_per_polarization", 2}, {"omega_points", 24}}},
      {"band", {{"points", 300}, {"refine", 2}}},
      {"map", {{"beta_min", 0.55}, {"beta_max", 0.75}, {"beta_steps", 11}, {"omega_points", 80}}},
      {"ideality", {{"betas", {0.6, 0.65}}}},
      {"tradeoff", {{"gaps_nm", {100, 200}}}},
      {"cache", {{"dir", (fs::path(FEWG_TEST_CACHE_DIR) / "cheap").string()}}},
  };
}

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

rapidjson::SchemaDocument load_schema(const std::string& name) {
  rapidjson::Document d;
  d.Parse(read_file(source_dir / "schemas" / name).c_str());
  EXPECT_FALSE(d.HasParseError()) << name;
  return rapidjson::SchemaDocument(d);
}

bool schema_valid(const rapidjson::SchemaDocument& schema, const json& value, std::string* why) {
  rapidjson::Document d;
  d.Parse(value.dump().c_str());
  rapidjson::SchemaValidator v(schema);
  if (d.Accept(v)) return true;
  rapidjson::StringBuffer sb;
  v.GetInvalidSchemaPointer().StringifyUriFragment(sb);
  *why = std::string(sb.GetString()) + " " + v.GetInvalidSchemaKeyword();
  return false;
}

// Text with the timestamp lines and fields blanked.
std::string without_timestamps(const fs::path& p) {
  static const std::regex stamp(R"(("?generated_at"?:\s*"?)[0-9T:\-Z]+)");
  return std::regex_replace(read_file(p), stamp, "$1");
}

}  // namespace

TEST(Config, UnknownKeyNamesField) {
  auto j = cheap_config("map");
  j["beam"]["gapp_nm"] = 100;
  EXPECT_NE(config_error(j).find("beam.gapp_nm"), std::string::npos) << config_error(j);
  j = cheap_config("map");
  j["colour"] = "red";
  EXPECT_NE(config_error(j).find("colour"), std::string::npos);
}

TEST(Config, WrongTypeAndRangeNameField) {
  auto j = cheap_config("map");
  j["solver"]["grid_nm"] = "fine";
  EXPECT_NE(config_error(j).find("solver.grid_nm"), std::string::npos) << config_error(j);
  j = cheap_config("tradeoff");
  j["tradeoff"]["gaps_nm"] = {20};
  EXPECT_NE(config_error(j).find("tradeoff.gaps_nm"), std::string::npos) << config_error(j);
  j = cheap_config("map");
  j["beam"]["kinetic_energy_keV"] = 100;
  EXPECT_NE(config_error(j).find("beam"), std::string::npos);
  j = cheap_config("nonsense");
  EXPECT_NE(config_error(j).find("task"), std::string::npos);
}

TEST(Config, EmptyBetaGridRejectedBeforeComputation) {
  auto j = cheap_config("map");
  j["map"]["beta_steps"] = 0;
  j["output"] = {{"dir", (fs::temp_directory_path() / "fewg_empty_grid").string()}};
  fs::remove_all(j["output"]["dir"].get<std::string>());
  const auto before = eigensolve_count();
  const auto msg = config_error(j);
  EXPECT_NE(msg.find("map.beta_steps"), std::string::npos) << msg;
  EXPECT_EQ(eigensolve_count(), before);
  EXPECT_FALSE(fs::exists(j["output"]["dir"].get<std::string>()));
  j["map"]["beta_steps"] = 11;
  j["map"]["beta_min"] = 0.8;
  j["map"]["beta_max"] = 0.5;
  EXPECT_FALSE(config_error(j).empty());
}

TEST(Config, MissingMaterialFile) {
  auto j = cheap_config("map");
  j["materials"]["files"] = {"no/such/file.json"};
  EXPECT_NE(config_error(j).find("materials.files"), std::string::npos);
}

TEST(Config, KineticEnergyForm) {
  auto j = cheap_config("map");
  j["beam"].erase("beta");
  j["beam"]["kinetic_energy_keV"] = 161.42630055032449;
  EXPECT_NEAR(config_from_json(j).beam.beta, 0.65, 1e-12);
}

TEST(Config, EffectiveConfigRoundTrip) {
  for (const auto& entry : fs::directory_iterator(source_dir / "configs")) {
    const auto c = load_config(entry.path());
    const auto once = config_to_json(c);
    const auto c2 = config_from_json(once, c.base_dir);
    EXPECT_EQ(config_to_json(c2), once) << entry.path();
    EXPECT_EQ(config_hash(c2), config_hash(c)) << entry.path();
  }
}

TEST(Config, HashIgnoresOutputCacheAndJobs) {
  auto c = config_from_json(cheap_config("map"));
  const auto h = config_hash(c);
  c.output_dir = "elsewhere";
  c.cache_dir = "";
  c.jobs = 7;
  EXPECT_EQ(config_hash(c), h);
  c.beam.gap = 120e-9;
  EXPECT_NE(config_hash(c), h);
}

TEST(Config, CacheDirectoryEnvironmentOverride) {
  const auto dir = fs::temp_directory_path() / "fewg_env_config";
  fs::create_directories(dir);
  auto j = cheap_config("map");
  j["cache"]["dir"] = "from_file";
  write_file_atomic(dir / "c.json", j.dump());
  ::unsetenv("FEWG_CACHE_DIR");
  EXPECT_EQ(load_config(dir / "c.json").cache_dir, "from_file");
  ::setenv("FEWG_CACHE_DIR", "/tmp/from_env", 1);
  EXPECT_EQ(load_config(dir / "c.json").cache_dir, "/tmp/from_env");
  ::unsetenv("FEWG_CACHE_DIR");
}

TEST(Config, ShippedConfigsMatchSchema) {
  const auto schema = load_schema("config.schema.json");
  for (const auto& entry : fs::directory_iterator(source_dir / "configs")) {
    std::string why;
    EXPECT_TRUE(schema_valid(schema, read_json(entry.path()), &why)) << entry.path() << why;
  }
  auto bad = cheap_config("map");
  bad["beam"]["gapp_nm"] = 1;
  std::string why;
  EXPECT_FALSE(schema_valid(schema, bad, &why));
}

class RunAllTasks : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "fewg_run_tasks";
    fs::remove_all(root_);
    for (const char* task : {"modes", "map", "ideality", "tradeoff", "spectrum", "waveform",
                             "resonator"}) {
      // Same config twice; each pass is snapshotted under a/ or b/.
      auto j = cheap_config(task);
      j["output"] = {{"dir", (root_ / "live" / task).string()}};
      for (const char* pass : {"a", "b"}) {
        results_[std::string(pass) + task] = run(config_from_json(j));
        fs::create_directories(root_ / pass);
        fs::copy(root_ / "live" / task, root_ / pass / task, fs::copy_options::recursive);
      }
    }
  }
  static inline fs::path root_;
  static inline std::map<std::string, RunResult> results_;
};

TEST_F(RunAllTasks, SucceedWithWarmCache) {
  for (const auto& [name, r] : results_) {
    EXPECT_EQ(r.exit_code, ExitSuccess) << name;
    EXPECT_TRUE(r.failures.empty()) << name;
    EXPECT_FALSE(r.outputs.empty()) << name;
    if (name[0] == 'b') {
      EXPECT_EQ(r.cache_misses, 0u) << name;
    }
  }
}

TEST_F(RunAllTasks, RerunIsByteIdenticalExceptTimestamps) {
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto twin = root_ / "b" / fs::relative(entry.path(), root_ / "a");
    ASSERT_TRUE(fs::exists(twin)) << twin;
    EXPECT_EQ(without_timestamps(entry.path()), without_timestamps(twin)) << entry.path();
    ++compared;
  }
  EXPECT_GE(compared, 15);
}

TEST_F(RunAllTasks, JsonOutputsMatchSchema) {
  const auto schema = load_schema("output.schema.json");
  const auto config_schema = load_schema("config.schema.json");
  int checked = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "a")) {
    if (entry.path().extension() != ".json") continue;
    const auto j = read_json(entry.path());
    std::string why;
    EXPECT_TRUE(schema_valid(schema, j, &why)) << entry.path() << " " << why;
    EXPECT_TRUE(schema_valid(config_schema, j.at("config"), &why)) << entry.path() << " " << why;
    ++checked;
  }
  EXPECT_EQ(checked, 7);
}

TEST_F(RunAllTasks, CsvOutputsFollowColumnContract) {
  const auto contract = read_json(source_dir / "schemas" / "csv_columns.json");
  std::set<std::string> seen;
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "a")) {
    if (entry.path().extension() != ".csv") continue;
    const auto name = entry.path().filename().string();
    ASSERT_TRUE(contract["files"].contains(name)) << name;
    const auto& spec = contract["files"][name];
    const auto t = read_csv(entry.path());
    for (const auto& key : contract["required_metadata"]) {
      EXPECT_FALSE(t.meta(key.get<std::string>()).empty()) << name << " " << key;
    }
    const auto fixed = spec["columns"].get<std::vector<std::string>>();
    ASSERT_GE(t.columns.size(), fixed.size()) << name;
    EXPECT_TRUE(std::equal(fixed.begin(), fixed.end(), t.columns.begin())) << name;
    std::size_t n = fixed.size();
    if (spec.contains("family_columns")) {
      const std::regex family(spec["family_columns"].get<std::string>());
      while (n < t.columns.size() && std::regex_match(t.columns[n], family)) ++n;
      EXPECT_GT(n, fixed.size()) << name;
      for (const auto& c : spec["trailing"]) EXPECT_EQ(t.columns.at(n++), c.get<std::string>());
    }
    EXPECT_EQ(n, t.columns.size()) << name;
    EXPECT_FALSE(t.rows.empty()) << name;
    for (const auto& row : t.rows) ASSERT_EQ(row.size(), t.columns.size()) << name;
    seen.insert(name);
  }
  EXPECT_EQ(seen.size(), contract["files"].size());
}

TEST_F(RunAllTasks, MetadataConfigReloadsToSameRun) {
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "a")) {
    if (entry.path().extension() != ".csv") continue;
    const auto t = read_csv(entry.path());
    const auto c = config_from_json(json::parse(t.meta("config")));
    EXPECT_EQ(config_hash(c), t.meta("config_hash")) << entry.path();
    EXPECT_EQ(t.meta("solver_version"), std::to_string(solver_version));
  }
}

TEST(Run, PartialFailureWritesManifest) {
  auto j = cheap_config("ideality");
  // Below the Cherenkov velocity for the guide no band fits in the window.
  j["ideality"]["betas"] = {0.3, 0.65};
  const auto out = fs::temp_directory_path() / "fewg_partial";
  fs::remove_all(out);
  j["output"] = {{"dir", out.string()}};
  const auto r = run(config_from_json(j));
  EXPECT_EQ(r.exit_code, ExitPartialFailure);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].find("beta=0.3"), std::string::npos);
  const auto manifest = read_json(out / "failures.json");
  EXPECT_EQ(manifest["failures"].size(), 1u);
  EXPECT_EQ(read_csv(out / "ideality.csv").rows.size(), 1u);
  // A clean rerun into the same directory removes the stale manifest.
  j["ideality"]["betas"] = {0.65};
  EXPECT_EQ(run(config_from_json(j)).exit_code, ExitSuccess);
  EXPECT_FALSE(fs::exists(out / "failures.json"));
}
