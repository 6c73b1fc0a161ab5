// Command-line front end: one subcommand per pipeline stage with file
// handoff. Every output embeds {tool, version, config, input_sha256} and is
// written atomically; errors leave a one-line JSON object on stderr and a
// nonzero exit status. Payloads contain no timestamps, so identical inputs
// reproduce byte-identical outputs.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cenobreak/binning.hpp"
#include "cenobreak/breakpoints.hpp"
#include "cenobreak/csv.hpp"
#include "cenobreak/inference.hpp"
#include "cenobreak/ingest.hpp"
#include "cenobreak/json_out.hpp"
#include "cenobreak/sha256.hpp"
#include "cenobreak/simulation.hpp"
#include "cenobreak/types.hpp"

namespace cb = cenobreak;
using cb::ojson;

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Uses the path as given when it exists; otherwise retries relative paths
/// under $CENOBREAK_DATA_DIR.
std::string resolve_input(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (!fs::path(path).is_absolute()) {
    if (const char* dir = std::getenv("CENOBREAK_DATA_DIR")) {
      const fs::path candidate = fs::path(dir) / path;
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  return path;
}

cb::ModelSpec parse_spec(const std::string& s) {
  cb::ModelSpec spec;
  if (!cb::spec_from_string(s, spec)) {
    throw CLI::ValidationError("--spec", "unknown model spec: " + s);
  }
  return spec;
}

cb::KernelKind parse_kernel(const std::string& s) {
  cb::KernelKind k;
  if (!cb::kernel_kind_from_string(s, k)) {
    throw CLI::ValidationError("--kernel", "unknown kernel: " + s);
  }
  return k;
}

// ---------------------------------------------------------------------------
// Binned-series CSV handoff format
// ---------------------------------------------------------------------------

constexpr const char* kBinnedMagic = "# cenobreak-binned-v1";

std::string binned_csv_text(const cb::BinnedSeries& s, const ojson& meta) {
  ojson series_info;
  series_info["bin_kyr"] = s.bin_kyr;
  series_info["start_age_ma"] = s.start_age_ma;
  series_info["reversed"] = s.reversed;
  series_info["bins"] = s.size();

  std::string out;
  out += kBinnedMagic;
  out += "\n# meta: " + meta.dump() + "\n";
  out += "# series: " + series_info.dump() + "\n";
  out += "bin_index,age_ma,value,interpolated,n_source\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += fmt_double(s.age_of(i));
    out += ',';
    out += fmt_double(s.value[i]);
    out += ',';
    out += s.interpolated[i] ? '1' : '0';
    out += ',';
    out += std::to_string(s.n_source[i]);
    out += '\n';
  }
  return out;
}

cb::BinnedSeries read_binned_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open binned series file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kBinnedMagic) {
    throw std::runtime_error(path + " is not a binned-series file (missing marker line)");
  }
  ojson series_info;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    constexpr std::string_view tag = "# series: ";
    if (line.rfind(tag, 0) == 0) {
      series_info = ojson::parse(line.substr(tag.size()));
    }
  }
  if (series_info.is_null()) {
    throw std::runtime_error(path + " lacks the '# series:' metadata line");
  }
  // `line` now holds the column header; rows follow.
  cb::BinnedSeries s;
  s.bin_kyr = series_info.at("bin_kyr").get<double>();
  s.start_age_ma = series_info.at("start_age_ma").get<double>();
  s.reversed = series_info.at("reversed").get<bool>();
  const auto expected = series_info.at("bins").get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = cb::split_line(line, ',');
    if (cells.size() != 5) {
      throw std::runtime_error(path + ": malformed binned row: " + line);
    }
    bool missing = false;
    const auto value = cb::parse_cell(cells[2], &missing);
    if (!value) throw std::runtime_error(path + ": non-numeric value cell: " + cells[2]);
    s.value.push_back(*value);
    s.interpolated.push_back(cells[3] == "1" ? 1 : 0);
    s.n_source.push_back(static_cast<std::uint32_t>(std::stoul(cells[4])));
  }
  if (s.size() != expected) {
    throw std::runtime_error(path + ": row count disagrees with metadata");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Shared JSON fragments
// ---------------------------------------------------------------------------

ojson series_json(const cb::BinnedSeries& s) {
  std::size_t interpolated = 0;
  for (const auto f : s.interpolated) interpolated += f;
  ojson j;
  j["bins"] = s.size();
  j["bin_kyr"] = s.bin_kyr;
  j["start_age_ma"] = s.start_age_ma;
  j["end_age_ma"] = s.size() ? s.age_of(s.size() - 1) : 0.0;
  j["reversed"] = s.reversed;
  j["interpolated_bins"] = interpolated;
  return j;
}

ojson ci_json(const cb::BreakCI& ci) {
  ojson j;
  j["level"] = ci.level;
  j["unbounded"] = ci.unbounded;
  if (ci.unbounded) return j;
  j["lower_index"] = ci.lower_index;
  j["upper_index"] = ci.upper_index;
  if (std::isfinite(ci.lower_age_ma) && std::isfinite(ci.upper_age_ma)) {
    j["older_age_ma"] = std::max(ci.lower_age_ma, ci.upper_age_ma);
    j["younger_age_ma"] = std::min(ci.lower_age_ma, ci.upper_age_ma);
  }
  j["xi"] = ci.xi;
  j["phi_ratio"] = ci.phi_ratio;
  j["scale"] = ci.scale_c;
  return j;
}

ojson fit_json(const cb::BreakFit& fit, const cb::BinnedSeries* series,
               const std::vector<cb::BreakCI>* cis) {
  ojson j;
  j["spec"] = cb::to_string(fit.spec);
  j["m"] = fit.m;
  j["min_segment_obs"] = fit.min_segment_obs;
  j["sample_rows"] = fit.sample_rows;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  if (!fit.beta.beta.empty()) {
    j["beta"] = {{"phi", fit.beta.beta[0]}, {"se_ols", fit.beta_se_ols}};
  } else {
    j["beta"] = ojson::object();
  }
  j["total_ssr"] = fit.total_ssr;

  ojson breaks = ojson::array();
  for (std::size_t i = 0; i < fit.m; ++i) {
    ojson b;
    b["number"] = i;
    b["index"] = fit.break_indices[i];
    if (i < fit.break_ages_ma.size()) b["age_ma"] = fit.break_ages_ma[i];
    if (cis && i < cis->size()) b["ci"] = ci_json((*cis)[i]);
    breaks.push_back(std::move(b));
  }
  j["breaks"] = std::move(breaks);

  const std::size_t offset = cb::sample_offset(fit.spec);
  ojson segments = ojson::array();
  for (const cb::SegmentFit& seg : fit.segments) {
    ojson sj;
    sj["start_row"] = seg.start;
    sj["end_row"] = seg.end;
    sj["n"] = seg.end - seg.start + 1;
    if (series) {
      const double a = series->age_of(seg.start + offset);
      const double b = series->age_of(seg.end + offset);
      sj["older_age_ma"] = std::max(a, b);
      sj["younger_age_ma"] = std::min(a, b);
    }
    sj["delta"] = seg.delta;
    sj["sigma2"] = seg.sigma2;
    sj["ssr"] = seg.ssr;
    sj["degenerate"] = seg.degenerate;
    segments.push_back(std::move(sj));
  }
  j["segments"] = std::move(segments);
  return j;
}

void emit_plot_data(const std::string& prefix, const cb::BinnedSeries& series,
                    const std::vector<const cb::BreakFit*>& fits,
                    const std::vector<std::vector<cb::BreakCI>>& cis,
                    const std::vector<double>& reference_ma, const ojson& meta) {
  const std::string meta_line = "# meta: " + meta.dump() + "\n";

  std::string sl = meta_line + "bin_index,age_ma,value,interpolated\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    sl += std::to_string(i) + ',' + fmt_double(series.age_of(i)) + ',' +
          fmt_double(series.value[i]) + ',' + (series.interpolated[i] ? '1' : '0') +
          '\n';
  }
  cb::atomic_write_file(prefix + "_series.csv", sl);

  std::string bl = meta_line +
                   "m,break_number,break_index,age_ma,ci_older_ma,ci_younger_ma,"
                   "ci_lower_index,ci_upper_index,ci_unbounded\n";
  for (std::size_t f = 0; f < fits.size(); ++f) {
    const cb::BreakFit& fit = *fits[f];
    for (std::size_t i = 0; i < fit.m; ++i) {
      bl += std::to_string(fit.m) + ',' + std::to_string(i) + ',' +
            std::to_string(fit.break_indices[i]) + ',' +
            fmt_double(fit.break_ages_ma[i]) + ',';
      if (f < cis.size() && i < cis[f].size() && !cis[f][i].unbounded) {
        const cb::BreakCI& ci = cis[f][i];
        bl += fmt_double(std::max(ci.lower_age_ma, ci.upper_age_ma)) + ',' +
              fmt_double(std::min(ci.lower_age_ma, ci.upper_age_ma)) + ',' +
              std::to_string(ci.lower_index) + ',' + std::to_string(ci.upper_index) +
              ",0\n";
      } else {
        bl += ",,,,1\n";
      }
    }
  }
  cb::atomic_write_file(prefix + "_breaks.csv", bl);

  std::string rl = meta_line + "boundary_age_ma\n";
  for (const double b : reference_ma) rl += fmt_double(b) + '\n';
  cb::atomic_write_file(prefix + "_reference.csv", rl);
}

void print_or_write(const std::string& out_path, const ojson& payload) {
  if (out_path.empty()) {
    std::cout << payload.dump(2) << "\n";
  } else {
    cb::write_json_file(out_path, payload);
  }
}

// ---------------------------------------------------------------------------
// Per-command option bags
// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string age_col = "age_Ma";
  std::string value_col = "d18O_corr";
  double gap_threshold_kyr = 10.0;
  std::string out;
};

struct BinArgs {
  IngestArgs load;
  std::vector<double> bin_kyr;  // empty -> {10, 25}
  std::string out;
};

struct EstimateArgs {
  IngestArgs load;
  bool binned_input = false;
  double bin_kyr = 25.0;
  std::string spec = "fixed-ar";
  std::size_t m = 1;
  std::size_t m_max = 15;
  double h_myr = 2.5;
  std::size_t min_len = 0;
  double ci_level = 0.95;
  bool no_prewhiten = false;
  double hac_bandwidth = -1.0;
  std::string out;
  std::string plot_prefix;
  std::vector<double> reference_ma{56.0, 47.0, 34.0, 13.9, 3.3};
};

struct SelectArgs {
  IngestArgs load;
  bool binned_input = false;
  double bin_kyr = 25.0;
  std::string spec = "fixed-ar";
  std::size_t m_max = 26;
  double h_myr = 2.5;
  std::size_t min_len = 0;
  std::string out;
  std::string table;
};

struct AdfArgs {
  IngestArgs load;
  bool binned_input = false;
  double bin_kyr = 25.0;
  double older_ma = -1.0;    // restrict to center ages in (younger, older]
  double younger_ma = -1.0;
  std::string out;
};

struct SimulateArgs {
  int dgp = 0;
  bool arma = false;
  double sigma = -1.0, c1 = 0.0, c2 = 0.0, phi1 = 0.0, phi2 = 0.0;  // overrides
  std::size_t T = 500;
  std::size_t break_at = 250;
  std::string spec = "fixed-ar";
  std::string mode = "fixed";
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  std::size_t m = 1;
  std::size_t m_max = 3;
  std::size_t min_len = 25;
  double ci_level = 0.95;
  std::string out;
  std::string config_file;
};

struct ReverseArgs {
  std::string input;
  std::string out;
};

// Loads (raw csv -> binned) or reads a binned handoff file.
struct LoadedSeries {
  cb::BinnedSeries series;
  std::string sha256;
  std::string resolved_path;
};

LoadedSeries load_series(const IngestArgs& load, bool binned_input, double bin_kyr) {
  LoadedSeries out;
  out.resolved_path = resolve_input(load.input);
  out.sha256 = cb::Sha256::of_file(out.resolved_path);
  if (binned_input) {
    out.series = read_binned_csv(out.resolved_path);
  } else {
    cb::LoadOptions opt;
    opt.age_column = load.age_col;
    opt.value_column = load.value_col;
    const cb::RawSeries raw = cb::load_csv(out.resolved_path, opt);
    out.series = cb::bin_mean(raw, bin_kyr);
  }
  return out;
}

void add_load_flags(CLI::App* cmd, IngestArgs& args) {
  cmd->add_option("--input", args.input, "input file")->required();
  cmd->add_option("--age-col", args.age_col, "age column name (Ma)");
  cmd->add_option("--value-col", args.value_col, "value column name");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int run_ingest(const IngestArgs& args) {
  const std::string path = resolve_input(args.input);
  cb::LoadOptions opt;
  opt.age_column = args.age_col;
  opt.value_column = args.value_col;
  cb::IngestAudit audit;
  const cb::RawSeries raw = cb::load_csv(path, opt, &audit);
  const cb::GapReport gaps = cb::gap_statistics(raw, args.gap_threshold_kyr);

  ojson config;
  config["command"] = "ingest";
  config["input"] = args.input;
  config["age_col"] = args.age_col;
  config["value_col"] = args.value_col;
  config["gap_threshold_kyr"] = args.gap_threshold_kyr;

  ojson payload;
  payload["meta"] = cb::make_meta(config, cb::Sha256::of_file(path));
  ojson audit_json;
  audit_json["rows_total"] = audit.rows_total;
  audit_json["rows_kept"] = audit.rows_kept;
  audit_json["rows_missing_value"] = audit.rows_missing_value;
  audit_json["rows_bad_number"] = audit.rows_bad_number;
  audit_json["detected_delimiter"] = audit.detected_delimiter;
  audit_json["age_column"] = audit.age_column;
  audit_json["value_column"] = audit.value_column;
  audit_json["dropped"] = audit.dropped;
  payload["audit"] = std::move(audit_json);
  ojson gaps_json;
  gaps_json["n_obs"] = gaps.n_obs;
  gaps_json["age_min_ma"] = gaps.age_min_ma;
  gaps_json["age_max_ma"] = gaps.age_max_ma;
  gaps_json["mean_gap_kyr"] = gaps.mean_gap_kyr;
  gaps_json["max_gap_kyr"] = gaps.max_gap_kyr;
  gaps_json["threshold_kyr"] = gaps.threshold_kyr;
  gaps_json["gaps_over_threshold"] = gaps.gaps_over_threshold;
  gaps_json["duplicate_instances"] = gaps.duplicate_instances;
  payload["gaps"] = std::move(gaps_json);
  print_or_write(args.out, payload);
  return 0;
}

std::string bin_output_path(const std::string& out, double width, bool multiple) {
  const std::string tag = fmt_double(width) + "kyr";
  const auto brace = out.find("{k}");
  if (brace != std::string::npos) {
    return out.substr(0, brace) + tag + out.substr(brace + 3);
  }
  if (!multiple) return out;
  const auto dot = out.rfind('.');
  if (dot == std::string::npos || dot == 0) return out + "_" + tag;
  return out.substr(0, dot) + "_" + tag + out.substr(dot);
}

int run_bin(const BinArgs& args) {
  const std::string path = resolve_input(args.load.input);
  cb::LoadOptions opt;
  opt.age_column = args.load.age_col;
  opt.value_column = args.load.value_col;
  const cb::RawSeries raw = cb::load_csv(path, opt);
  const std::string sha = cb::Sha256::of_file(path);

  const std::vector<double> widths =
      args.bin_kyr.empty() ? std::vector<double>{10.0, 25.0} : args.bin_kyr;

  ojson written = ojson::array();
  for (const double width : widths) {
    const cb::BinnedSeries binned = cb::bin_mean(raw, width);
    ojson config;
    config["command"] = "bin";
    config["input"] = args.load.input;
    config["age_col"] = args.load.age_col;
    config["value_col"] = args.load.value_col;
    config["bin_kyr"] = width;
    const ojson meta = cb::make_meta(config, sha);
    const std::string out_path = bin_output_path(args.out, width, widths.size() > 1);
    cb::atomic_write_file(out_path, binned_csv_text(binned, meta));

    double mean = 0.0;
    for (const double v : binned.value) mean += v;
    mean /= static_cast<double>(binned.size());
    double var = 0.0;
    for (const double v : binned.value) var += (v - mean) * (v - mean);
    const double sd = binned.size() > 1
                          ? std::sqrt(var / (static_cast<double>(binned.size()) - 1.0))
                          : 0.0;
    ojson row = series_json(binned);
    row["path"] = out_path;
    row["mean"] = mean;
    row["sd"] = sd;
    written.push_back(std::move(row));
  }
  ojson summary;
  summary["written"] = std::move(written);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_estimate(const EstimateArgs& args, bool path_mode, cb::KernelKind kernel) {
  const LoadedSeries loaded = load_series(args.load, args.binned_input, args.bin_kyr);

  ojson config;
  config["command"] = path_mode ? "path" : "estimate";
  config["input"] = args.load.input;
  config["binned_input"] = args.binned_input;
  if (!args.binned_input) config["bin_kyr"] = args.bin_kyr;
  config["spec"] = args.spec;
  if (path_mode) {
    config["m_max"] = args.m_max;
  } else {
    config["m"] = args.m;
  }
  config["h_myr"] = args.h_myr;
  config["min_len"] = args.min_len;
  config["ci_level"] = args.ci_level;
  config["prewhiten"] = !args.no_prewhiten;
  config["hac_bandwidth"] = args.hac_bandwidth;
  config["kernel"] = cb::to_string(kernel);
  const ojson meta = cb::make_meta(config, loaded.sha256);

  const cb::ModelSpec spec = parse_spec(args.spec);
  cb::EngineOptions opt;
  opt.h_myr = args.h_myr;
  opt.min_segment_obs = args.min_len;
  opt.kernel = kernel;
  cb::HacConfig hac;
  hac.prewhiten = !args.no_prewhiten;
  hac.bandwidth_override = args.hac_bandwidth;

  ojson payload;
  payload["meta"] = meta;
  payload["series"] = series_json(loaded.series);

  std::vector<cb::BreakFit> fits;
  if (path_mode) {
    fits = cb::estimate_path(loaded.series, spec, args.m_max, opt);
  } else {
    fits.push_back(cb::estimate(loaded.series, spec, args.m, opt));
  }

  std::vector<std::vector<cb::BreakCI>> cis;
  cis.reserve(fits.size());
  for (const cb::BreakFit& fit : fits) {
    cis.push_back(cb::break_confidence_intervals(loaded.series, fit, args.ci_level,
                                                 hac, kernel));
  }

  if (path_mode) {
    ojson arr = ojson::array();
    for (std::size_t i = 0; i < fits.size(); ++i) {
      arr.push_back(fit_json(fits[i], &loaded.series, &cis[i]));
    }
    payload["fits"] = std::move(arr);
  } else {
    payload["fit"] = fit_json(fits[0], &loaded.series, &cis[0]);
  }
  print_or_write(args.out, payload);

  if (!args.plot_prefix.empty()) {
    std::vector<const cb::BreakFit*> fit_ptrs;
    fit_ptrs.reserve(fits.size());
    for (const cb::BreakFit& fit : fits) fit_ptrs.push_back(&fit);
    emit_plot_data(args.plot_prefix, loaded.series, fit_ptrs, cis, args.reference_ma,
                   meta);
  }
  return 0;
}

int run_select(const SelectArgs& args, cb::KernelKind kernel) {
  const LoadedSeries loaded = load_series(args.load, args.binned_input, args.bin_kyr);

  ojson config;
  config["command"] = "select";
  config["input"] = args.load.input;
  config["binned_input"] = args.binned_input;
  if (!args.binned_input) config["bin_kyr"] = args.bin_kyr;
  config["spec"] = args.spec;
  config["m_max"] = args.m_max;
  config["h_myr"] = args.h_myr;
  config["min_len"] = args.min_len;
  config["kernel"] = cb::to_string(kernel);
  const ojson meta = cb::make_meta(config, loaded.sha256);

  const cb::ModelSpec spec = parse_spec(args.spec);
  cb::EngineOptions opt;
  opt.h_myr = args.h_myr;
  opt.min_segment_obs = args.min_len;
  opt.max_breaks = args.m_max;
  opt.kernel = kernel;

  const std::vector<cb::BreakFit> fits =
      cb::estimate_all(loaded.series, spec, args.m_max, opt);
  std::vector<double> ssr;
  ssr.reserve(fits.size());
  for (const cb::BreakFit& f : fits) ssr.push_back(f.total_ssr);
  const cb::IcTable table = cb::information_criteria(
      ssr, fits.front().sample_rows, static_cast<std::size_t>(cb::regime_param_count(spec)),
      static_cast<std::size_t>(cb::global_param_count(spec)));

  ojson payload;
  payload["meta"] = meta;
  payload["series"] = series_json(loaded.series);
  ojson rows = ojson::array();
  for (const cb::IcRow& r : table.rows) {
    ojson row;
    row["m"] = r.m;
    row["ssr"] = r.ssr;
    row["bic"] = r.bic;
    row["lwz"] = r.lwz;
    row["kt"] = r.kt;
    rows.push_back(std::move(row));
  }
  payload["table"] = std::move(rows);
  payload["selected"] = {{"bic", table.selected_bic}, {"lwz", table.selected_lwz}};
  // Retained for reference; not part of the recommended selection output.
  payload["kt_selected"] = table.selected_kt;
  ojson breaks_at;
  breaks_at["bic"] = fits[table.selected_bic].break_ages_ma;
  breaks_at["lwz"] = fits[table.selected_lwz].break_ages_ma;
  payload["selected_break_ages_ma"] = std::move(breaks_at);
  print_or_write(args.out, payload);

  if (!args.table.empty()) {
    std::string csv = "# meta: " + meta.dump() + "\nm,ssr,bic,lwz,kt\n";
    for (const cb::IcRow& r : table.rows) {
      csv += std::to_string(r.m) + ',' + fmt_double(r.ssr) + ',' + fmt_double(r.bic) +
             ',' + fmt_double(r.lwz) + ',' + fmt_double(r.kt) + '\n';
    }
    cb::atomic_write_file(args.table, csv);
  }
  return 0;
}

int run_adf(const AdfArgs& args) {
  const LoadedSeries loaded = load_series(args.load, args.binned_input, args.bin_kyr);
  const cb::BinnedSeries& s = loaded.series;

  std::vector<double> values;
  double older = -std::numeric_limits<double>::infinity();
  double younger = std::numeric_limits<double>::infinity();
  const bool restrict = args.older_ma >= 0.0 || args.younger_ma >= 0.0;
  if (restrict) {
    const double hi = args.older_ma >= 0.0 ? args.older_ma
                                           : std::numeric_limits<double>::infinity();
    const double lo = args.younger_ma >= 0.0 ? args.younger_ma : 0.0;
    if (hi <= lo) throw std::runtime_error("--older-ma must exceed --younger-ma");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double age = s.age_of(i);
      if (age > lo && age <= hi) values.push_back(s.value[i]);
    }
    older = hi;
    younger = lo;
  } else {
    values = s.value;
    if (s.size()) {
      older = std::max(s.age_of(0), s.age_of(s.size() - 1));
      younger = std::min(s.age_of(0), s.age_of(s.size() - 1));
    }
  }

  const cb::AdfResult adf = cb::adf_test(values);

  ojson config;
  config["command"] = "adf";
  config["input"] = args.load.input;
  config["binned_input"] = args.binned_input;
  if (!args.binned_input) config["bin_kyr"] = args.bin_kyr;
  if (args.older_ma >= 0.0) config["older_ma"] = args.older_ma;
  if (args.younger_ma >= 0.0) config["younger_ma"] = args.younger_ma;

  ojson payload;
  payload["meta"] = cb::make_meta(config, loaded.sha256);
  ojson sample;
  sample["n"] = values.size();
  sample["older_ma"] = older;
  sample["younger_ma"] = younger;
  payload["sample"] = std::move(sample);
  ojson res;
  res["statistic"] = adf.statistic;
  res["lag_order"] = adf.lag_order;
  res["critical_value_1pct"] = adf.critical_value_1pct;
  res["reject_at_1pct"] = adf.reject_at_1pct;
  res["nobs"] = adf.nobs;
  payload["adf"] = std::move(res);
  print_or_write(args.out, payload);
  return 0;
}

ojson dgp_json(const cb::DgpConfig& d) {
  ojson j;
  j["sigma"] = d.sigma;
  j["c1"] = d.c1;
  j["c2"] = d.c2;
  j["phi1"] = d.phi1;
  j["phi2"] = d.phi2;
  j["T"] = d.T;
  j["break_at"] = d.break_at;
  j["error_kind"] = d.error_kind == cb::ErrorKind::Arma ? "arma" : "iid";
  if (d.error_kind == cb::ErrorKind::Arma) {
    j["psi"] = d.psi;
    j["theta"] = d.theta;
  }
  return j;
}

int run_simulate(const SimulateArgs& args, const CLI::App* cmd, cb::KernelKind kernel) {
  SimulateArgs eff = args;
  std::set<std::string> provided;
  for (const char* flag : {"--dgp", "--arma", "--sigma", "--c1", "--c2", "--phi1",
                           "--phi2", "--t", "--break-at"}) {
    if (cmd->count(flag)) provided.insert(flag);
  }
  if (!args.config_file.empty()) {
    std::ifstream in(resolve_input(args.config_file));
    if (!in) throw std::runtime_error("cannot open config file: " + args.config_file);
    const ojson cfg = ojson::parse(in);
    const auto take = [&](const char* flag, const char* key, auto& slot) {
      if (cmd->count(flag) == 0 && cfg.contains(key)) {
        cfg.at(key).get_to(slot);
        provided.insert(flag);
      }
    };
    take("--dgp", "dgp", eff.dgp);
    take("--arma", "arma", eff.arma);
    take("--sigma", "sigma", eff.sigma);
    take("--c1", "c1", eff.c1);
    take("--c2", "c2", eff.c2);
    take("--phi1", "phi1", eff.phi1);
    take("--phi2", "phi2", eff.phi2);
    take("--t", "T", eff.T);
    take("--break-at", "break_at", eff.break_at);
    take("--spec", "spec", eff.spec);
    take("--mode", "mode", eff.mode);
    take("--reps", "reps", eff.reps);
    take("--seed", "seed", eff.seed);
    take("--m", "m", eff.m);
    take("--m-max", "m_max", eff.m_max);
    take("--min-len", "min_len", eff.min_len);
    take("--ci-level", "ci_level", eff.ci_level);
  }
  if (eff.dgp < 1 || eff.dgp > 8) {
    throw CLI::ValidationError("--dgp", "DGP id must be 1..8 (via flag or config file)");
  }

  cb::StudyConfig study;
  study.dgp = cb::dgp_preset(eff.dgp, eff.arma);
  if (provided.count("--sigma")) study.dgp.sigma = eff.sigma;
  if (provided.count("--c1")) study.dgp.c1 = eff.c1;
  if (provided.count("--c2")) study.dgp.c2 = eff.c2;
  if (provided.count("--phi1")) study.dgp.phi1 = eff.phi1;
  if (provided.count("--phi2")) study.dgp.phi2 = eff.phi2;
  study.dgp.T = eff.T;
  study.dgp.break_at = eff.break_at;
  study.spec = parse_spec(eff.spec);
  if (eff.mode == "fixed") {
    study.mode = cb::StudyMode::FixedM;
  } else if (eff.mode == "select") {
    study.mode = cb::StudyMode::SelectM;
  } else {
    throw CLI::ValidationError("--mode", "mode must be 'fixed' or 'select'");
  }
  study.replications = eff.reps;
  study.seed = eff.seed;
  study.m_fixed = eff.m;
  study.m_max = eff.m_max;
  study.min_len = eff.min_len;
  study.ci_level = eff.ci_level;

  const cb::StudyResult result = cb::run_study(study, kernel);

  ojson config;
  config["command"] = "simulate";
  config["dgp"] = eff.dgp;
  config["dgp_params"] = dgp_json(study.dgp);
  config["spec"] = eff.spec;
  config["mode"] = eff.mode;
  config["reps"] = eff.reps;
  config["seed"] = eff.seed;
  config["m"] = eff.m;
  config["m_max"] = eff.m_max;
  config["min_len"] = eff.min_len;
  config["ci_level"] = eff.ci_level;
  config["kernel"] = cb::to_string(kernel);
  const ojson meta = cb::make_meta(config, "");
  const std::string meta_line = "# meta: " + meta.dump() + "\n";

  // Per-replication CSV.
  std::string csv = meta_line +
                    "rep,ok,error,breaks,m_bic,m_lwz,m_kt,ci_lower,ci_upper,"
                    "ci_unbounded,covered\n";
  for (const cb::Replication& r : result.replications) {
    csv += std::to_string(r.rep) + ',' + (r.ok ? '1' : '0') + ',' + r.error + ',';
    for (std::size_t i = 0; i < r.breaks.size(); ++i) {
      if (i) csv += ';';
      csv += std::to_string(r.breaks[i]);
    }
    csv += ',';
    if (r.m_bic >= 0) csv += std::to_string(r.m_bic);
    csv += ',';
    if (r.m_lwz >= 0) csv += std::to_string(r.m_lwz);
    csv += ',';
    if (r.m_kt >= 0) csv += std::to_string(r.m_kt);
    csv += ',';
    if (study.mode == cb::StudyMode::FixedM && r.ok && !r.ci_unbounded) {
      csv += std::to_string(r.ci_lower);
      csv += ',';
      csv += std::to_string(r.ci_upper);
    } else {
      csv += ',';
    }
    csv += ',';
    csv += r.ci_unbounded ? '1' : '0';
    csv += ',';
    csv += r.covered ? '1' : '0';
    csv += '\n';
  }
  cb::atomic_write_file(eff.out + "_replications.csv", csv);

  // Aggregate JSON.
  ojson payload;
  payload["meta"] = meta;
  ojson agg;
  agg["replications"] = result.replications.size();
  agg["failures"] = result.failures;
  if (study.mode == cb::StudyMode::FixedM) {
    agg["mean_break"] = result.mean_break;
    agg["median_ci_lower"] = result.median_lower;
    agg["median_ci_upper"] = result.median_upper;
    agg["coverage"] = result.coverage;
    agg["true_break"] = study.dgp.break_at;
  } else {
    agg["true_breaks"] = study.dgp.true_breaks();
    agg["mean_m"] = {{"bic", result.mean_m_bic},
                     {"lwz", result.mean_m_lwz},
                     {"kt", result.mean_m_kt}};
    agg["correct"] = {{"bic", result.correct_bic},
                      {"lwz", result.correct_lwz},
                      {"kt", result.correct_kt}};
    agg["share_m"] = {{"bic", result.share_m_bic},
                      {"lwz", result.share_m_lwz},
                      {"kt", result.share_m_kt}};
  }
  payload["aggregates"] = std::move(agg);

  // Density CSV (skipped gracefully when there are too few break estimates).
  bool density_written = false;
  try {
    const auto density = cb::density_export(result);
    std::string dcsv = meta_line + "t,count,share,kde\n";
    for (const cb::DensityPoint& p : density) {
      dcsv += std::to_string(p.t) + ',' + std::to_string(p.count) + ',' +
              fmt_double(p.density) + ',' + fmt_double(p.kde) + '\n';
    }
    cb::atomic_write_file(eff.out + "_density.csv", dcsv);
    density_written = true;
  } catch (const std::runtime_error&) {
  }
  payload["files"] = {{"replications", eff.out + "_replications.csv"},
                      {"density", density_written ? ojson(eff.out + "_density.csv")
                                                  : ojson(nullptr)}};
  cb::write_json_file(eff.out + "_summary.json", payload);
  return 0;
}

int run_reverse(const ReverseArgs& args) {
  const std::string path = resolve_input(args.input);
  const cb::BinnedSeries series = read_binned_csv(path);
  const cb::BinnedSeries reversed = cb::reverse_time(series);
  ojson config;
  config["command"] = "reverse";
  config["input"] = args.input;
  const ojson meta = cb::make_meta(config, cb::Sha256::of_file(path));
  cb::atomic_write_file(args.out, binned_csv_text(reversed, meta));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural-breakpoint estimation for binned paleoclimate series"};
  app.require_subcommand(1);
  std::string kernel_str = "auto";
  app.add_option("--kernel", kernel_str, "compute kernels: auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "load a raw series and report audit + gap statistics");
  add_load_flags(ingest, ingest_args);
  ingest->add_option("--gap-threshold-kyr", ingest_args.gap_threshold_kyr,
                     "gap-count threshold (kyr)");
  ingest->add_option("--out", ingest_args.out, "output JSON path (default: stdout)");

  BinArgs bin_args;
  auto* bin = app.add_subcommand("bin", "bin a raw series onto fixed intervals");
  add_load_flags(bin, bin_args.load);
  bin->add_option("--bin-kyr", bin_args.bin_kyr,
                  "bin width(s) in kyr (repeatable; default {10, 25})");
  bin->add_option("--out", bin_args.out,
                  "output path; '{k}' expands to the width, multi-width runs insert _<K>kyr")
      ->required();

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "fit an m-break model with confidence intervals");
  add_load_flags(estimate, est_args.load);
  estimate->add_flag("--binned", est_args.binned_input, "input is a binned-series file from 'bin'");
  estimate->add_option("--bin-kyr", est_args.bin_kyr, "bin width in kyr (raw input)");
  estimate->add_option("--spec", est_args.spec, "model spec: mean|fixed-ar|ar");
  estimate->add_option("--m", est_args.m, "number of breaks")->required();
  estimate->add_option("--h-myr", est_args.h_myr, "minimum state length (Myr)");
  estimate->add_option("--min-len", est_args.min_len,
                       "minimum state length in observations (overrides --h-myr)");
  estimate->add_option("--ci-level", est_args.ci_level, "confidence level");
  estimate->add_flag("--no-prewhiten", est_args.no_prewhiten,
                     "disable VAR(1) prewhitening in the HAC estimator");
  estimate->add_option("--hac-bandwidth", est_args.hac_bandwidth,
                       "fixed HAC bandwidth (>= 0; default automatic)");
  estimate->add_option("--out", est_args.out, "output JSON path (default: stdout)");
  estimate->add_option("--plot-data", est_args.plot_prefix,
                       "prefix for figure-data CSV layers");
  estimate->add_option("--reference-ma", est_args.reference_ma,
                       "reference boundary ages for the plot overlay");

  EstimateArgs path_args;
  path_args.h_myr = 1.0;
  auto* path_cmd = app.add_subcommand("path", "fit every break count m = 1..m-max");
  add_load_flags(path_cmd, path_args.load);
  path_cmd->add_flag("--binned", path_args.binned_input, "input is a binned-series file from 'bin'");
  path_cmd->add_option("--bin-kyr", path_args.bin_kyr, "bin width in kyr (raw input)");
  path_cmd->add_option("--spec", path_args.spec, "model spec: mean|fixed-ar|ar");
  path_cmd->add_option("--m-max", path_args.m_max, "largest break count");
  path_cmd->add_option("--h-myr", path_args.h_myr, "minimum state length (Myr)");
  path_cmd->add_option("--min-len", path_args.min_len,
                       "minimum state length in observations (overrides --h-myr)");
  path_cmd->add_option("--ci-level", path_args.ci_level, "confidence level");
  path_cmd->add_flag("--no-prewhiten", path_args.no_prewhiten,
                     "disable VAR(1) prewhitening in the HAC estimator");
  path_cmd->add_option("--hac-bandwidth", path_args.hac_bandwidth,
                       "fixed HAC bandwidth (>= 0; default automatic)");
  path_cmd->add_option("--out", path_args.out, "output JSON path (default: stdout)");
  path_cmd->add_option("--plot-data", path_args.plot_prefix,
                       "prefix for figure-data CSV layers");
  path_cmd->add_option("--reference-ma", path_args.reference_ma,
                       "reference boundary ages for the plot overlay");

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "choose the break count by information criteria");
  add_load_flags(select, select_args.load);
  select->add_flag("--binned", select_args.binned_input, "input is a binned-series file from 'bin'");
  select->add_option("--bin-kyr", select_args.bin_kyr, "bin width in kyr (raw input)");
  select->add_option("--spec", select_args.spec, "model spec: mean|fixed-ar|ar");
  select->add_option("--m-max", select_args.m_max, "largest break count considered");
  select->add_option("--h-myr", select_args.h_myr, "minimum state length (Myr)");
  select->add_option("--min-len", select_args.min_len,
                     "minimum state length in observations (overrides --h-myr)");
  select->add_option("--out", select_args.out, "output JSON path (default: stdout)");
  select->add_option("--table", select_args.table, "also write the IC table as CSV");

  AdfArgs adf_args;
  auto* adf = app.add_subcommand("adf", "unit-root screen (intercept, no trend, 1% level)");
  add_load_flags(adf, adf_args.load);
  adf->add_flag("--binned", adf_args.binned_input, "input is a binned-series file from 'bin'");
  adf->add_option("--bin-kyr", adf_args.bin_kyr, "bin width in kyr (raw input)");
  adf->add_option("--older-ma", adf_args.older_ma,
                  "restrict to center ages <= this bound (Ma)");
  adf->add_option("--younger-ma", adf_args.younger_ma,
                  "restrict to center ages > this bound (Ma)");
  adf->add_option("--out", adf_args.out, "output JSON path (default: stdout)");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo break estimation study");
  simulate->add_option("--dgp", sim_args.dgp, "design id 1..8");
  simulate->add_flag("--arma", sim_args.arma, "ARMA(1,1) errors (psi = theta = 0.5)");
  simulate->add_option("--sigma", sim_args.sigma, "override: error sd");
  simulate->add_option("--c1", sim_args.c1, "override: pre-break intercept");
  simulate->add_option("--c2", sim_args.c2, "override: post-break intercept");
  simulate->add_option("--phi1", sim_args.phi1, "override: pre-break AR coefficient");
  simulate->add_option("--phi2", sim_args.phi2, "override: post-break AR coefficient");
  simulate->add_option("--t", sim_args.T, "series length");
  simulate->add_option("--break-at", sim_args.break_at, "true break date");
  simulate->add_option("--spec", sim_args.spec, "model spec: mean|fixed-ar|ar");
  simulate->add_option("--mode", sim_args.mode, "fixed|select");
  simulate->add_option("--reps", sim_args.reps, "replications");
  simulate->add_option("--seed", sim_args.seed, "base seed (replication r uses seed + r)");
  simulate->add_option("--m", sim_args.m, "imposed break count (fixed mode)");
  simulate->add_option("--m-max", sim_args.m_max, "selection cap (select mode)");
  simulate->add_option("--min-len", sim_args.min_len, "minimum regime length (observations)");
  simulate->add_option("--ci-level", sim_args.ci_level, "confidence level");
  simulate->add_option("--config", sim_args.config_file,
                       "JSON study config (flags override file values)");
  simulate->add_option("--out", sim_args.out, "output prefix")->required();

  ReverseArgs reverse_args;
  auto* reverse = app.add_subcommand("reverse", "reverse a binned series' observation order");
  reverse->add_option("--input", reverse_args.input, "binned-series file")->required();
  reverse->add_option("--out", reverse_args.out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << cb::error_json("config", e.what()) << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    const cb::KernelKind kernel = parse_kernel(kernel_str);
    if (ingest->parsed()) return run_ingest(ingest_args);
    if (bin->parsed()) return run_bin(bin_args);
    if (estimate->parsed()) return run_estimate(est_args, false, kernel);
    if (path_cmd->parsed()) return run_estimate(path_args, true, kernel);
    if (select->parsed()) return run_select(select_args, kernel);
    if (adf->parsed()) return run_adf(adf_args);
    if (simulate->parsed()) return run_simulate(sim_args, simulate, kernel);
    if (reverse->parsed()) return run_reverse(reverse_args);
    std::cerr << cb::error_json("config", "no subcommand given") << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    std::cerr << cb::error_json("config", e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << cb::error_json("runtime", e.what()) << "\n";
    return 1;
  }
}
