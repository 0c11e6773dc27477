#include "psbar/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "psbar/error.hpp"
#include "psbar/parallel.hpp"

namespace psbar {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(std::string(what) + ": expected a boolean, got '" + std::string(t) + "'");
}

std::string normalize_key(std::string_view key) {
  std::string k(trim(key));
  for (char& c : k) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return k;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

const char* status_name(RecordStatus s) {
  return s == RecordStatus::Ok ? "ok" : "below_threshold";
}

struct GridState {
  PsState state;
  bool m_resolved;
};

std::vector<GridState> expand_states(const RunConfig& config) {
  std::vector<GridState> out;
  for (const auto& label : config.states) {
    PsState s(1, 0, 0);
    try {
      s = PsState::parse(label);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("states: ") + e.what());
    }
    const bool explicit_m = label.size() > 2;
    if (explicit_m) {
      out.push_back({s, true});
    } else if (config.m_resolved && s.l > 0) {
      for (int m = -s.l; m <= s.l; ++m) out.push_back({PsState(s.n, s.l, m), true});
    } else {
      out.push_back({s, false});
    }
  }
  return out;
}

std::string grid_point(const GridState& g, double e) {
  std::ostringstream os;
  os << "state " << g.state.label(g.m_resolved) << ", E_i = " << e << " eV";
  return os.str();
}

}  // namespace

RunConfig::RunConfig() : angles(parse_number_list("0:180:19")), threads(default_thread_count()) {}

void RunConfig::validate() const {
  if (states.empty()) throw ConfigError("states: at least one state is required");
  (void)expand_states(*this);
  if (energies.empty()) throw ConfigError("energies: at least one energy is required");
  for (double e : energies) {
    if (!(e > 0.0)) throw ConfigError("energies: incident energies must be positive");
  }
  if (mus.empty()) throw ConfigError("mus: at least one screening value is required");
  for (double mu : mus) {
    if (!(mu >= 0.0)) throw ConfigError("mus: screening values must be >= 0");
  }
  if (mode == Mode::Sdcs) {
    if (angles.empty()) throw ConfigError("angles: at least one angle is required");
    for (double a : angles) {
      if (!(a >= 0.0 && a <= 180.0)) throw ConfigError("angles: angles must lie in [0, 180] degrees");
    }
  }
  if (samples < 1000) throw ConfigError("samples: must be >= 1000");
  if (replicates < 8) throw ConfigError("replicates: must be >= 8");
  if (n_theta < 8) throw ConfigError("n_theta: must be >= 8");
  if (threads < 1) throw ConfigError("threads: must be >= 1");
  if (affinity_ev && !std::isfinite(*affinity_ev)) throw ConfigError("affinity_ev: must be finite");
}

std::vector<double> parse_number_list(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty number list");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:count, got '" + std::string(text) + "'");
    const double start = parse_double(parts[0], "range start");
    const double stop = parse_double(parts[1], "range stop");
    const long count = parse_int<long>(parts[2], "range count");
    if (count < 1) throw ConfigError("range count must be >= 1");
    if (count == 1) return {start};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) out[i] = start + (stop - start) * double(i) / double(count - 1);
    out.back() = stop;
    return out;
  }
  std::vector<double> out;
  for (auto item : split(text, ',')) out.push_back(parse_double(item, "list item"));
  return out;
}

std::vector<std::string> parse_state_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto item : split(text, ',')) {
    const auto t = trim(item);
    if (t.empty()) throw ConfigError("states: empty state label");
    out.emplace_back(t);
  }
  return out;
}

void apply_setting(RunConfig& c, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string_view value = trim(raw_value);
  try {
    if (key == "mode") {
      if (value == "sdcs") {
        c.mode = Mode::Sdcs;
      } else if (value == "tcs") {
        c.mode = Mode::Tcs;
      } else {
        throw ConfigError("expected sdcs or tcs, got '" + std::string(value) + "'");
      }
    } else if (key == "states" || key == "state") {
      c.states = parse_state_list(value);
    } else if (key == "energies" || key == "energy_ev" || key == "energies_ev") {
      c.energies = parse_number_list(value);
    } else if (key == "mus" || key == "mu") {
      c.mus = parse_number_list(value);
    } else if (key == "angles") {
      c.angles = parse_number_list(value);
    } else if (key == "samples") {
      c.samples = parse_int<std::int64_t>(value, "value");
    } else if (key == "seed") {
      c.seed = parse_int<std::uint64_t>(value, "value");
    } else if (key == "replicates") {
      c.replicates = parse_int<int>(value, "value");
    } else if (key == "n_theta") {
      c.n_theta = parse_int<int>(value, "value");
    } else if (key == "output" || key == "out") {
      c.output = std::string(value);
    } else if (key == "format") {
      if (value == "csv") {
        c.format = OutputFormat::Csv;
      } else if (value == "json") {
        c.format = OutputFormat::Json;
      } else {
        throw ConfigError("expected csv or json, got '" + std::string(value) + "'");
      }
    } else if (key == "affinity_ev" || key == "eps_hplus_override") {
      c.affinity_ev = parse_double(value, "value");
    } else if (key == "m_resolved") {
      c.m_resolved = parse_bool(value, "value");
    } else if (key == "threads") {
      c.threads = parse_int<int>(value, "value");
    } else {
      throw ConfigError("unknown key");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    try {
      if (eq == std::string_view::npos) throw ConfigError("expected key = value");
      apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, path, std::move(base));
}

std::size_t grid_cardinality(const RunConfig& config) {
  const std::size_t per = config.mus.size() * (config.mode == Mode::Sdcs ? config.angles.size() : 1);
  return expand_states(config).size() * config.energies.size() * per;
}

std::vector<CrossSectionRecord> run(const RunConfig& config) {
  config.validate();
  const std::vector<GridState> states = expand_states(config);
  const std::size_t n_e = config.energies.size();
  const std::size_t n_tasks = states.size() * n_e;
  const bool outer = n_tasks >= static_cast<std::size_t>(config.threads);

  std::vector<std::vector<CrossSectionRecord>> rows(n_tasks);
  parallel_for(n_tasks, outer ? config.threads : 1, [&](std::size_t task) {
    const GridState& g = states[task / n_e];
    const double e = config.energies[task % n_e];
    XsecOptions options;
    options.spec.samples = config.samples;
    options.spec.replicates = config.replicates;
    options.spec.seed = task_seed(config.seed, g.state, g.m_resolved, e);
    options.spec.threads = outer ? 1 : config.threads;
    options.m_resolved = g.m_resolved;
    if (config.affinity_ev) options.eps_hplus_override = kEpsHbarDefault - ev_to_au(*config.affinity_ev);

    auto& out = rows[task];
    auto row = [&](double mu, std::optional<double> theta) {
      CrossSectionRecord r;
      r.state = g.state;
      r.m_resolved = g.m_resolved;
      r.E_i_ev = e;
      r.mu = mu;
      r.theta_deg = theta;
      return r;
    };
    try {
      if (config.mode == Mode::Sdcs) {
        const auto est = sdcs_grid(e, g.state, config.mus, config.angles, options);
        for (std::size_t s = 0; s < config.mus.size(); ++s) {
          for (std::size_t a = 0; a < config.angles.size(); ++a) {
            auto r = row(config.mus[s], config.angles[a]);
            const Estimate& v = est[s * config.angles.size() + a];
            r.value = v.value;
            r.std_err = v.std_err();
            out.push_back(r);
          }
        }
      } else {
        const auto est = tcs_grid(e, g.state, config.mus, config.n_theta, options);
        for (std::size_t s = 0; s < config.mus.size(); ++s) {
          auto r = row(config.mus[s], std::nullopt);
          r.value = est[s].value.value;
          r.std_err = est[s].std_err();
          out.push_back(r);
        }
      }
    } catch (const BelowThresholdError&) {
      out.clear();
      for (double mu : config.mus) {
        if (config.mode == Mode::Sdcs) {
          for (double a : config.angles) {
            auto r = row(mu, a);
            r.status = RecordStatus::BelowThreshold;
            out.push_back(r);
          }
        } else {
          auto r = row(mu, std::nullopt);
          r.status = RecordStatus::BelowThreshold;
          out.push_back(r);
        }
      }
    } catch (const NonConvergenceError& err) {
      throw NonConvergenceError(grid_point(g, e) + ": " + err.what());
    } catch (const Error& err) {
      throw Error(grid_point(g, e) + ": " + err.what());
    }
  });

  std::vector<CrossSectionRecord> all;
  all.reserve(grid_cardinality(config));
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  return all;
}

std::string format_csv(const std::vector<CrossSectionRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    const bool ok = r.status == RecordStatus::Ok;
    out += r.state_label();
    out += ',' + number(r.E_i_ev);
    out += ',' + number(r.mu);
    out += ',' + (r.theta_deg ? number(*r.theta_deg) : std::string());
    out += ',' + (ok ? number(r.value) : std::string());
    out += ',' + (ok ? number(r.std_err) : std::string());
    out += ',';
    out += status_name(r.status);
    out += '\n';
  }
  return out;
}

std::string format_json(const std::vector<CrossSectionRecord>& records) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const bool ok = r.status == RecordStatus::Ok;
    out += "  {\"state\": \"" + r.state_label() + "\"";
    out += ", \"E_i_eV\": " + number(r.E_i_ev);
    out += ", \"mu_au\": " + number(r.mu);
    out += ", \"theta_deg\": " + (r.theta_deg ? number(*r.theta_deg) : std::string("null"));
    out += ", \"value_au\": " + (ok ? number(r.value) : std::string("null"));
    out += ", \"std_err_au\": " + (ok ? number(r.std_err) : std::string("null"));
    out += ", \"status\": \"" + std::string(status_name(r.status)) + "\"}";
    out += i + 1 < records.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

void emit(const std::vector<CrossSectionRecord>& records, OutputFormat format,
          const std::string& path) {
  if (records.empty()) throw DomainError("emit: no records to write");
  const std::string text = format == OutputFormat::Csv ? format_csv(records) : format_json(records);
  if (path.empty()) {
    std::cout << text << std::flush;
    if (!std::cout) throw IoError("emit: failed writing to standard output");
    return;
  }
  const std::string tmp = path + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("emit: cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("emit: failed writing '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("emit: cannot create '" + path + "'");
  }
}

std::vector<CrossSectionRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv: missing or unexpected header");
  std::vector<CrossSectionRecord> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto f = split(line, ',');
      if (f.size() != 7) throw ConfigError("expected 7 fields");
      CrossSectionRecord r;
      try {
        r.state = PsState::parse(f[0]);
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
      r.m_resolved = f[0].size() > 2;
      r.E_i_ev = parse_double(f[1], "E_i_eV");
      r.mu = parse_double(f[2], "mu_au");
      if (!f[3].empty()) r.theta_deg = parse_double(f[3], "theta_deg");
      if (f[6] == "ok") {
        r.status = RecordStatus::Ok;
        r.value = parse_double(f[4], "value_au");
        r.std_err = parse_double(f[5], "std_err_au");
      } else if (f[6] == "below_threshold") {
        r.status = RecordStatus::BelowThreshold;
        if (!f[4].empty() || !f[5].empty()) throw ConfigError("below_threshold rows carry no value");
      } else {
        throw ConfigError("unknown status '" + std::string(f[6]) + "'");
      }
      out.push_back(r);
    } catch (const ConfigError& e) {
      throw ConfigError("csv line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string gnuplot_script(const RunConfig& config, const std::string& csv_path) {
  std::ostringstream os;
  const bool sdcs = config.mode == Mode::Sdcs;
  os << "# gnuplot script for " << csv_path << "\n"
     << "set datafile separator ','\n"
     << "set logscale y\n"
     << "set format y '%.1e'\n"
     << "set key outside right\n";
  if (sdcs) {
    os << "set xlabel 'ejection angle (deg)'\nset ylabel 'SDCS (a.u.)'\nset xrange [0:180]\n";
  } else {
    os << "set xlabel 'incident energy (eV)'\nset ylabel 'TCS (a.u.)'\n";
  }
  std::vector<std::string> labels;
  for (const auto& g : expand_states(config)) labels.push_back(g.state.label(g.m_resolved));
  std::vector<std::string> clauses;
  auto filter = [&](const std::string& cond) {
    return "'< awk -F, \"NR > 1 && $7 == \\\"ok\\\" && " + cond + "\" " + csv_path + "'";
  };
  for (const auto& label : labels) {
    if (sdcs) {
      for (double e : config.energies) {
        for (double mu : config.mus) {
          std::ostringstream cond, title;
          cond << "$1 == \\\"" << label << "\\\" && $2 == " << number(e) << " && $3 == " << number(mu);
          title << label << " " << e << " eV, mu = " << mu;
          clauses.push_back(filter(cond.str()) + " using 4:5:6 with yerrorlines title '" + title.str() + "'");
        }
      }
    } else {
      for (double mu : config.mus) {
        std::ostringstream cond, title;
        cond << "$1 == \\\"" << label << "\\\" && $3 == " << number(mu);
        title << label << ", mu = " << mu;
        clauses.push_back(filter(cond.str()) + " using 2:5:6 with yerrorlines title '" + title.str() + "'");
      }
    }
  }
  os << "plot ";
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    os << clauses[i] << (i + 1 < clauses.size() ? ", \\\n     " : "\n");
  }
  os << "pause mouse close\n";
  return os.str();
}

}  // namespace psbar
