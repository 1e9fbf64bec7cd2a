// Command-line front end: run one experiment or a parameter sweep from a
// JSON config and emit CSV/JSON results plus a manifest.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dspmem/runner.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path resolve_out_dir(const std::string& cli_out, const dspmem::ExperimentConfig& cfg,
                                      const std::string& leaf) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.output.empty()) return cfg.output;
  const char* root = std::getenv("DSPMEM_OUT_ROOT");
  return std::filesystem::path(root ? root : "runs") / leaf;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool lenient = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir,
                  "output directory (default: config 'output', then $DSPMEM_OUT_ROOT/<kind>)");
  cmd->add_option("--threads", opts.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  cmd->add_flag("--lenient,!--strict", opts.lenient,
                "tolerate unknown config keys (default: strict)");
}

dspmem::ParseResult load(const CommonOpts& opts, const std::string& expected_kind,
                         std::string& text_out) {
  text_out = read_text(opts.config_path);
  dspmem::ParseResult parsed = dspmem::parse_config(text_out, !opts.lenient);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  if (!expected_kind.empty() && dspmem::kind_name(parsed.config.kind) != expected_kind)
    throw std::runtime_error("config kind '" + dspmem::kind_name(parsed.config.kind) +
                             "' does not match subcommand '" + expected_kind + "'");
  return parsed;
}

int report(const dspmem::RunManifest& manifest, const std::filesystem::path& dir) {
  std::cout << manifest.kind << ": " << (manifest.passed ? "pass" : "FAIL") << "  ("
            << manifest.files.size() << " files in " << dir.string();
  if (!manifest.headline_name.empty())
    std::cout << "; " << manifest.headline_name << " = " << manifest.headline;
  std::cout << ")\n";
  return manifest.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-spin-wave quantum memory simulator"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"commutators", "spectrum",     "connection",
                                          "passage",     "memory-cycle", "finite-N-sweep"};
  std::map<std::string, CommonOpts> opts;
  for (const auto& kind : kinds) {
    CLI::App* cmd = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    add_common(cmd, opts[kind]);
  }

  CommonOpts sweep_opts;
  std::string axis;
  std::vector<double> values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one experiment per axis value");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "numeric config field to scan")->required();
  sweep_cmd->add_option("--values", values, "axis values")->required()->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_cmd->parsed()) {
      std::string text;
      dspmem::ParseResult parsed = load(sweep_opts, "", text);
      const auto dir = resolve_out_dir(sweep_opts.out_dir, parsed.config,
                                       "sweep-" + dspmem::kind_name(parsed.config.kind));
      dspmem::RunManifest manifest =
          dspmem::sweep(parsed.config, text, axis, values, dir, sweep_opts.threads);
      return report(manifest, dir);
    }
    for (const auto& kind : kinds) {
      if (!app.get_subcommand(kind)->parsed()) continue;
      std::string text;
      dspmem::ParseResult parsed = load(opts[kind], kind, text);
      const auto dir = resolve_out_dir(opts[kind].out_dir, parsed.config, kind);
      dspmem::RunManifest manifest = dspmem::run_experiment(parsed.config, text, dir);
      return report(manifest, dir);
    }
  } catch (const dspmem::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
