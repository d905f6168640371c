#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

#include "ultrajet/config.hpp"
#include "ultrajet/error.hpp"
#include "ultrajet/pipeline.hpp"
#include "ultrajet/report.hpp"

int main(int argc, char** argv) {
  using namespace ultrajet;
  CLI::App app{"ultrajet: weight sequences, weight functions and jet extension checks"};
  std::string command, config_path, out_dir = "out";
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  app.add_option("command", command, "seq | fn | matrix | check | cubes | pou | extend | verify | all")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "experiment config (JSON); defaults apply when omitted");
  app.add_option("--out", out_dir, "output directory for report.json and CSV files");
  app.add_option("--workers", workers, "worker threads; 0 uses every hardware thread");
  app.add_option("--seed", seed, "seed for sampled points (overrides the config)");
  app.add_flag("--strict", strict, "treat finite-range warnings as failures");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? parse_config({{"schema_version", kSchemaVersion}}) : load_config(config_path);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
      try {
        write_json((std::filesystem::path(out_dir) / "report.json").string(), config_error_report(command, e.what()));
      } catch (const Error&) {
      }
    }
    return 2;
  }
  if (seed) cfg.seed = *seed;
  if (strict) cfg.strict = true;
  cfg.workers = workers ? workers : std::max(1u, std::thread::hardware_concurrency());

  try {
    const auto out = run(command, cfg, out_dir);
    const auto& rep = out.report;
    std::size_t held = 0;
    for (const auto& v : rep["verdicts"]) held += v["holds"].get<bool>();
    std::cout << command << ": " << rep["status"].get<std::string>() << " (" << held << "/" << rep["verdicts"].size()
              << " checks hold, " << rep["warnings"].size() << " warnings, " << rep["errors"].size() << " errors)\n";
    for (const auto& v : rep["verdicts"])
      if (!v["holds"].get<bool>()) std::cout << "  failed: " << v["stage"].get<std::string>() << "/"
                                             << v["condition"].get<std::string>() << '\n';
    for (const auto& e : rep["errors"]) std::cout << "  error: " << e["message"].get<std::string>() << '\n';
    std::cout << "  report: " << (std::filesystem::path(out_dir) / cfg.report_name).string() << '\n';
    return out.exit_code;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  }
}
