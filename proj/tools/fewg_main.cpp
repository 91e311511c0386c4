#include <iostream>

#include <CLI11.hpp>

#include "fewg/errors.hpp"
#include "fewg/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Electron-waveguide coupling spectra, ideality and waveforms"};
  std::string config_path;
  std::string task;
  std::string cache;
  std::string out;
  int jobs = 0;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--task", task, "Overrides the config task");
  app.add_option("--cache", cache, "Mode cache directory");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory");
  app.set_version_flag("--version", FEWG_VERSION);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fewg::ExitConfigError;
  }

  try {
    fewg::RunConfig config = fewg::load_config(config_path);
    if (!task.empty()) config.task = fewg::task_from_string(task);
    if (!cache.empty()) config.cache_dir = cache;
    if (jobs > 0) config.jobs = jobs;
    if (!out.empty()) config.output_dir = out;
    const auto result = fewg::run(config);
    for (const auto& p : result.outputs) std::cout << p.string() << "\n";
    if (!config.cache_dir.empty()) {
      std::cerr << "cache: " << result.cache_hits << " hits, " << result.cache_misses
                << " misses\n";
    }
    for (const auto& f : result.failures) std::cerr << "failed: " << f << "\n";
    return result.exit_code;
  } catch (const fewg::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return fewg::ExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return fewg::ExitPartialFailure;
  }
}
