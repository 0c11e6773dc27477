#pragma once

// Configuration-driven sweeps over (state, E_i, mu, theta) and their output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psbar/xsec.hpp"

namespace psbar {

enum class Mode { Sdcs, Tcs };
enum class OutputFormat { Csv, Json };

struct RunConfig {
  Mode mode = Mode::Sdcs;
  std::vector<std::string> states;
  std::vector<double> energies;  ///< eV
  std::vector<double> mus;       ///< a.u.
  std::vector<double> angles;    ///< degrees; default 0:180:19
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int replicates = 16;
  int n_theta = 16;
  std::string output;  ///< empty: standard output
  OutputFormat format = OutputFormat::Csv;
  std::optional<double> affinity_ev;  ///< replaces the 0.75 eV ion affinity
  bool m_resolved = false;
  int threads = 1;

  RunConfig();

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// "a,b,c" or "start:stop:count" (count points, both ends included).
/// Throws ConfigError.
std::vector<double> parse_number_list(std::string_view text);

/// Comma-separated state labels.
std::vector<std::string> parse_state_list(std::string_view text);

/// Applies one key = value setting. Throws ConfigError.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads key = value lines ('#' starts a comment) on top of `base`.
/// Errors carry "source:line".
RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Runs every grid point, ordered by (state, E, mu, theta). Below-threshold
/// points appear as rows with status BelowThreshold.
std::vector<CrossSectionRecord> run(const RunConfig& config);

/// Number of rows run(config) produces.
std::size_t grid_cardinality(const RunConfig& config);

inline constexpr std::string_view kCsvHeader =
    "state,E_i_eV,mu_au,theta_deg,value_au,std_err_au,status";

std::string format_csv(const std::vector<CrossSectionRecord>& records);
std::string format_json(const std::vector<CrossSectionRecord>& records);

/// Writes records to `path` (standard output when empty). Throws
/// DomainError for an empty record list and IoError on write failure.
void emit(const std::vector<CrossSectionRecord>& records, OutputFormat format,
          const std::string& path);

/// Parses output of format_csv. Throws ConfigError on malformed input.
std::vector<CrossSectionRecord> parse_csv(std::istream& in);

/// Gnuplot script plotting the CSV at `csv_path`.
std::string gnuplot_script(const RunConfig& config, const std::string& csv_path);

}  // namespace psbar
