// psbar-xsec: cross sections for anti-H+ formation in Ps + anti-H collisions.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "psbar/error.hpp"
#include "psbar/sweep.hpp"

namespace {

struct Flags {
  std::string config;
  std::string state;
  std::string energy;
  std::string mu;
  std::string angles;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_theta;
  std::optional<int> replicates;
  std::optional<int> threads;
  std::optional<double> affinity;
  std::string out;
  std::string format;
  bool m_resolved = false;
  bool gnuplot = false;
};

void add_grid_options(CLI::App* app, Flags& f) {
  app->add_option("--state", f.state, "Ps state labels, e.g. 1s or 1s,2p");
  app->add_option("--energy-ev", f.energy, "incident energies (eV): list a,b,c or range start:stop:count");
  app->add_option("--mu", f.mu, "screening parameters (a.u.): list or range");
  app->add_option("--samples", f.samples, "quasi-Monte Carlo points per (state, energy)");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--replicates", f.replicates, "randomized shifts per estimate (>= 8)");
  app->add_flag("--m-resolved", f.m_resolved, "report p-state substates separately");
  app->add_option("--affinity-ev", f.affinity, "anti-H+ binding relative to anti-H (eV), default 0.75");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antihydrogen positive-ion formation cross sections in a Debye plasma"};
  app.require_subcommand(0, 1);
  Flags f;
  app.add_option("--config", f.config, "key = value run configuration file");
  app.add_option("--out", f.out, "output file (default: standard output)");
  app.add_option("--format", f.format, "csv or json (default: from --out extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", f.threads, "worker threads (default: PSBAR_THREADS or all cores)");
  app.add_flag("--gnuplot", f.gnuplot, "also write <out>.gp plotting the CSV");

  CLI::App* sdcs = app.add_subcommand("sdcs", "single-differential cross sections vs ejection angle");
  add_grid_options(sdcs, f);
  sdcs->add_option("--angles", f.angles, "ejection angles (deg), default 0:180:19");
  CLI::App* tcs = app.add_subcommand("tcs", "total cross sections");
  add_grid_options(tcs, f);
  tcs->add_option("--n-theta", f.n_theta, "Gauss-Legendre order in cos(theta), default 16");
  for (CLI::App* sub : {sdcs, tcs}) {
    sub->fallthrough();
    sub->add_option("--config", f.config, "key = value run configuration file");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    psbar::RunConfig config;
    if (!f.config.empty()) config = psbar::load_config(f.config, config);
    if (sdcs->parsed()) config.mode = psbar::Mode::Sdcs;
    if (tcs->parsed()) config.mode = psbar::Mode::Tcs;
    if (f.config.empty() && !sdcs->parsed() && !tcs->parsed()) {
      std::cerr << "psbar-xsec: give a subcommand (sdcs or tcs) or --config\n" << app.help();
      return 2;
    }
    auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) psbar::apply_setting(config, key, v);
    };
    set("states", f.state);
    set("energies", f.energy);
    set("mus", f.mu);
    set("angles", f.angles);
    set("output", f.out);
    set("format", f.format);
    if (f.samples) config.samples = *f.samples;
    if (f.seed) config.seed = *f.seed;
    if (f.n_theta) config.n_theta = *f.n_theta;
    if (f.replicates) config.replicates = *f.replicates;
    if (f.threads) config.threads = *f.threads;
    if (f.affinity) config.affinity_ev = *f.affinity;
    if (f.m_resolved) config.m_resolved = true;
    if (f.format.empty() && config.output.size() > 5 &&
        config.output.substr(config.output.size() - 5) == ".json") {
      config.format = psbar::OutputFormat::Json;
    }
    if (config.mus.empty()) config.mus = {0.0};
    if (f.gnuplot && (config.output.empty() || config.format != psbar::OutputFormat::Csv)) {
      throw psbar::ConfigError("--gnuplot needs CSV output written to a file (--out)");
    }

    const auto records = psbar::run(config);
    psbar::emit(records, config.format, config.output);
    if (f.gnuplot) {
      const std::string gp = config.output + ".gp";
      std::ofstream script(gp);
      script << psbar::gnuplot_script(config, std::filesystem::path(config.output).filename().string());
      if (!script) throw psbar::IoError("cannot write '" + gp + "'");
    }
  } catch (const psbar::ConfigError& e) {
    std::cerr << "psbar-xsec: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "psbar-xsec: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
