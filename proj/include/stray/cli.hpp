#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stray/baseline.hpp"
#include "stray/core.hpp"
#include "stray/csv.hpp"
#include "stray/detect.hpp"
#include "stray/streaming.hpp"
#include "stray/synth.hpp"
#include "stray/threshold.hpp"

// Command-line front end. run() is the whole program; main() only forwards
// argv and the standard streams, so tests drive it in-process.
namespace stray::cli {

enum ExitCode : int { kOk = 0, kAnomalies = 1, kUsage = 2, kDataError = 3 };

namespace detail {

using nlohmann::json;

inline const CLI::Validator positive_count{
    [](std::string& text) {
      const auto nonzero = text.find_first_not_of("0+ ");
      if (text.find('-') != std::string::npos || nonzero == std::string::npos) {
        return std::string("must be a positive integer, got '") + text + "'";
      }
      return std::string();
    },
    "POSITIVE"};

struct DetectOptions {
  std::size_t k = StrayConfig{}.k;
  double alpha = StrayConfig{}.alpha;
  std::string method = "brute";
  double eps = 0.0;
  bool no_normalize = false;
  double p = StrayConfig{}.start_proportion;
  std::size_t tn = StrayConfig{}.tail_count;
  std::string format = "csv";
  bool fail_on_anomaly = false;
  std::string input;
  std::string output;

  StrayConfig config() const {
    StrayConfig c;
    c.k = k;
    c.alpha = alpha;
    c.search_method = method == "kdtree" ? SearchMethod::kdtree : SearchMethod::brute;
    c.eps = eps;
    c.normalize = no_normalize ? Normalization::none : Normalization::unitize;
    c.start_proportion = p;
    c.tail_count = tn;
    c.validate();
    return c;
  }
};

inline void add_detect_options(CLI::App& cmd, DetectOptions& o) {
  cmd.add_option("--k", o.k, "neighbourhood size")->check(positive_count);
  cmd.add_option("--alpha", o.alpha, "tail probability in (0, 1)");
  cmd.add_option("--method", o.method, "k-NN search")->check(CLI::IsMember({"brute", "kdtree"}));
  cmd.add_option("--eps", o.eps, "kd-tree approximation factor (0 = exact)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_flag("--no-normalize", o.no_normalize, "skip min-max normalisation");
  cmd.add_option("--p", o.p, "start proportion of the threshold search");
  cmd.add_option("--tn", o.tn, "cap on the exponential fit window");
  cmd.add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_flag("--fail-on-anomaly", o.fail_on_anomaly, "exit 1 when anything is flagged");
  cmd.add_option("-o,--output", o.output, "output path (default stdout)");
}

/// Output sink: a file when a path is given, else the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DataError("cannot open output file '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& get() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

inline csv::Table read_table(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return csv::read(in);
  std::ifstream file(path);
  if (!file) throw DataError("cannot open input file '" + path + "'");
  return csv::read(file);
}

inline json threshold_json(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

inline std::string threshold_text(const std::optional<double>& t) {
  return t ? csv::format_number(*t) : std::string("none");
}

inline json rows_json(const AnomalyReport& report, std::size_t offset) {
  json rows = json::array();
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    rows.push_back({{"row_id", offset + i},
                    {"score", report.scores[i]},
                    {"gap_index", report.gap_index[i]},
                    {"flag", static_cast<bool>(report.flags[i])}});
  }
  return rows;
}

inline void write_rows_csv(std::ostream& out, const AnomalyReport& report, std::size_t offset,
                    std::optional<std::size_t> window) {
  out << (window ? "window_id," : "") << "row_id,score,gap_index,flag\n";
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    if (window) out << *window << ',';
    out << offset + i << ',' << csv::format_number(report.scores[i]) << ','
        << report.gap_index[i] << ',' << (report.flags[i] ? 1 : 0) << '\n';
  }
}

inline void write_report(std::ostream& out, const AnomalyReport& report, const DetectOptions& o) {
  if (o.format == "json") {
    json doc = {{"threshold", threshold_json(report.threshold)},
                {"k", o.k},
                {"alpha", o.alpha},
                {"method", o.method},
                {"rows", rows_json(report, 0)}};
    out << doc.dump() << '\n';
    return;
  }
  out << "# threshold=" << threshold_text(report.threshold) << ",k=" << o.k
      << ",alpha=" << csv::format_number(o.alpha) << ",method=" << o.method << '\n';
  write_rows_csv(out, report, 0, std::nullopt);
}

inline void write_window(std::ostream& out, const WindowReport& w, const DetectOptions& o) {
  if (o.format == "json") {
    json doc = {{"window_id", w.window_id},
                {"begin", w.range.begin},
                {"end", w.range.end},
                {"threshold", threshold_json(w.report.threshold)},
                {"k", o.k},
                {"alpha", o.alpha},
                {"method", o.method},
                {"rows", rows_json(w.report, w.range.begin)}};
    out << doc.dump() << '\n';
  } else {
    out << "# window=" << w.window_id << ",begin=" << w.range.begin << ",end=" << w.range.end
        << ",threshold=" << threshold_text(w.report.threshold) << ",k=" << o.k
        << ",alpha=" << csv::format_number(o.alpha) << ",method=" << o.method << '\n';
    write_rows_csv(out, w.report, w.range.begin, w.window_id);
  }
  out.flush();
}

inline int run_detect(const DetectOptions& o, std::istream& in, std::ostream& out) {
  const StrayConfig config = o.config();
  const csv::Table table = read_table(o.input, in);
  const AnomalyReport report = detect(table.data, config);
  Sink sink(o.output, out);
  write_report(sink.get(), report, o);
  return o.fail_on_anomaly && report.flagged_count() > 0 ? kAnomalies : kOk;
}

inline int run_stream(const DetectOptions& o, std::size_t width, std::size_t step, std::istream& in,
               std::ostream& out) {
  WindowedDetector detector(o.config(), WindowSpec{width, step == 0 ? width : step});
  std::ifstream file;
  std::istream* source = &in;
  if (!o.input.empty() && o.input != "-") {
    file.open(o.input);
    if (!file) throw DataError("cannot open input file '" + o.input + "'");
    source = &file;
  }
  Sink sink(o.output, out);
  bool any = false;
  bool first = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*source, line)) {
    ++line_no;
    if (csv::is_blank(line)) continue;
    std::vector<double> row;
    try {
      row = csv::parse_row(line, line_no);
    } catch (const csv::ParseError&) {
      // a non-numeric first line is a header
      if (!first) throw;
      first = false;
      continue;
    }
    first = false;
    try {
      if (auto report = detector.push(row)) {
        any = any || report->report.flagged_count() > 0;
        write_window(sink.get(), *report, o);
      }
    } catch (const WindowError&) {
      throw;
    } catch (const DataError& e) {
      throw csv::ParseError(line_no, 1, e.what());
    }
  }
  if (detector.rows_seen() < width) {
    throw DataError("stream ended after " + std::to_string(detector.rows_seen()) +
                    " rows, fewer than one window of " + std::to_string(width));
  }
  if (auto report = detector.finish()) {
    any = any || report->report.flagged_count() > 0;
    write_window(sink.get(), *report, o);
  }
  return o.fail_on_anomaly && any ? kAnomalies : kOk;
}

inline int run_scenario(const std::string& name, std::uint64_t seed, const std::string& output,
                 std::string labels, std::ostream& out) {
  const auto ds = synth::scenario(name, seed);
  {
    Sink sink(output, out);
    csv::write(sink.get(), ds.data, {"x", "y"});
  }
  if (labels.empty() && !output.empty() && output != "-") {
    const std::filesystem::path p(output);
    labels = (p.parent_path() / (p.stem().string() + "_labels" + p.extension().string())).string();
  }
  if (!labels.empty()) {
    Sink sink(labels, out);
    sink.get() << "row_id,is_planted\n";
    const auto planted = ds.is_planted();
    for (std::size_t i = 0; i < planted.size(); ++i) {
      sink.get() << i << ',' << (planted[i] ? 1 : 0) << '\n';
    }
  }
  return kOk;
}

inline std::vector<synth::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<synth::Method> out;
  for (const auto& n : names) out.push_back(synth::parse_method(n));
  return out;
}

}  // namespace detail

/// Runs one CLI invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  using namespace detail;
  CLI::App app{"stray: anomaly detection with k-NN max-gap scores and an EVT threshold", "stray"};
  app.require_subcommand(1);

  DetectOptions det;
  auto* detect_cmd = app.add_subcommand("detect", "score and flag every row of a CSV file");
  add_detect_options(*detect_cmd, det);
  detect_cmd->add_option("input", det.input, "CSV input (default stdin)");

  DetectOptions str;
  std::size_t width = 0;
  std::size_t step = 0;
  auto* stream_cmd =
      app.add_subcommand("stream", "sliding-window detection over rows read from stdin");
  add_detect_options(*stream_cmd, str);
  stream_cmd->add_option("--window", width, "window width in rows")
      ->required()
      ->check(positive_count);
  stream_cmd->add_option("--step", step, "rows between window starts (default: width)")
      ->check(positive_count);
  stream_cmd->add_option("input", str.input, "input file (default stdin)");

  std::string scenario_name;
  std::uint64_t scenario_seed = synth::kDefaultSeed;
  std::string scenario_out;
  std::string scenario_labels;
  auto* scenario_cmd = app.add_subcommand("scenario", "emit a synthetic labelled dataset as CSV");
  std::vector<std::string> scenario_choices(synth::scenario_names().begin(),
                                            synth::scenario_names().end());
  scenario_cmd->add_option("name", scenario_name, "scenario name")
      ->required()
      ->check(CLI::IsMember(scenario_choices));
  scenario_cmd->add_option("--seed", scenario_seed, "random seed");
  scenario_cmd->add_option("-o,--output", scenario_out, "data CSV path (default stdout)");
  scenario_cmd->add_option("--labels", scenario_labels,
                           "label CSV path (default <output>_labels.csv)");

  std::size_t fpr_n = 100;
  std::size_t fpr_d = 1;
  double fpr_alpha = 0.05;
  std::size_t fpr_k = 10;
  std::size_t fpr_iters = 1000;
  std::string fpr_method = "stray_brute";
  std::uint64_t fpr_seed = synth::kDefaultSeed;
  std::string fpr_format = "csv";
  std::string fpr_out;
  std::vector<std::string> method_choices(synth::method_names().begin(),
                                          synth::method_names().end());
  auto* fpr_cmd = app.add_subcommand("fpr", "false-positive rate on anomaly-free normal data");
  fpr_cmd->add_option("--n", fpr_n, "rows per dataset")->check(positive_count);
  fpr_cmd->add_option("--d", fpr_d, "columns per dataset")->check(positive_count);
  fpr_cmd->add_option("--alpha", fpr_alpha, "tail probability in (0, 1)");
  fpr_cmd->add_option("--k", fpr_k, "neighbourhood size")->check(positive_count);
  fpr_cmd->add_option("--iters", fpr_iters, "number of datasets")->check(positive_count);
  fpr_cmd->add_option("--method", fpr_method, "detector")->check(CLI::IsMember(method_choices));
  fpr_cmd->add_option("--seed", fpr_seed, "master seed");
  fpr_cmd->add_option("--format", fpr_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  fpr_cmd->add_option("-o,--output", fpr_out, "output path (default stdout)");

  std::vector<std::size_t> bench_n{1000, 2000, 4000};
  std::vector<std::size_t> bench_d{2, 10, 100};
  std::vector<std::string> bench_methods{"stray_brute", "stray_kdtree"};
  std::size_t bench_repeats = 3;
  std::uint64_t bench_seed = synth::kDefaultSeed;
  std::string bench_format = "csv";
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "median wall-clock time over an (n, d) grid");
  bench_cmd->add_option("--n", bench_n, "row counts")->delimiter(',');
  bench_cmd->add_option("--d", bench_d, "column counts")->delimiter(',');
  bench_cmd->add_option("--methods", bench_methods, "detectors")
      ->delimiter(',')
      ->check(CLI::IsMember(method_choices));
  bench_cmd->add_option("--repeats", bench_repeats, "timings per cell (median reported)")
      ->check(positive_count);
  bench_cmd->add_option("--seed", bench_seed, "master seed");
  bench_cmd->add_option("--format", bench_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  bench_cmd->add_option("-o,--output", bench_out, "output path (default stdout)");

  std::string sp_input;
  std::size_t sp_normal = 0;
  std::size_t sp_replicates = 1;
  std::size_t sp_kmax = 10;
  std::uint64_t sp_seed = synth::kDefaultSeed;
  std::string sp_format = "csv";
  std::string sp_out;
  auto* sp_cmd = app.add_subcommand(
      "spacings", "upper order statistics and standardized spacings of a sample");
  sp_cmd->add_option("input", sp_input, "CSV sample, every cell is one value (default stdin)");
  sp_cmd->add_option("--normal", sp_normal, "draw this many standard normals instead of reading");
  sp_cmd->add_option("--replicates", sp_replicates, "number of --normal samples")
      ->check(positive_count);
  sp_cmd->add_option("--kmax", sp_kmax, "number of spacings")->check(positive_count);
  sp_cmd->add_option("--seed", sp_seed, "master seed for --normal");
  sp_cmd->add_option("--format", sp_format, "output format")->check(CLI::IsMember({"csv", "json"}));
  sp_cmd->add_option("-o,--output", sp_out, "output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*detect_cmd) return run_detect(det, in, out);
    if (*stream_cmd) return run_stream(str, width, step, in, out);
    if (*scenario_cmd) {
      return run_scenario(scenario_name, scenario_seed, scenario_out, scenario_labels, out);
    }
    if (*fpr_cmd) {
      const auto est = synth::null_experiment(fpr_n, fpr_d, fpr_iters, fpr_alpha, fpr_k,
                                              synth::parse_method(fpr_method), fpr_seed);
      Sink sink(fpr_out, out);
      if (fpr_format == "json") {
        sink.get() << json{{"method", fpr_method}, {"n", fpr_n},         {"d", fpr_d},
                           {"k", fpr_k},           {"alpha", fpr_alpha}, {"iters", fpr_iters},
                           {"seed", fpr_seed},     {"mean_fpr", est.mean},
                           {"std_error", est.std_error}}
                              .dump()
                       << '\n';
      } else {
        sink.get() << "method,n,d,k,alpha,iters,seed,mean_fpr,std_error\n"
                   << fpr_method << ',' << fpr_n << ',' << fpr_d << ',' << fpr_k << ','
                   << csv::format_number(fpr_alpha) << ',' << fpr_iters << ',' << fpr_seed << ','
                   << csv::format_number(est.mean) << ',' << csv::format_number(est.std_error)
                   << '\n';
      }
      return kOk;
    }
    if (*bench_cmd) {
      const auto cells = synth::timing_grid(bench_n, bench_d, parse_methods(bench_methods),
                                            bench_seed, bench_repeats);
      Sink sink(bench_out, out);
      if (bench_format == "json") {
        json rows = json::array();
        for (const auto& c : cells) {
          rows.push_back({{"n", c.n},
                          {"d", c.d},
                          {"method", std::string(synth::to_string(c.method))},
                          {"seconds", c.seconds}});
        }
        sink.get() << rows.dump() << '\n';
      } else {
        sink.get() << "n,d,method,seconds\n";
        for (const auto& c : cells) {
          sink.get() << c.n << ',' << c.d << ',' << synth::to_string(c.method) << ','
                     << csv::format_number(c.seconds) << '\n';
        }
      }
      return kOk;
    }
    if (*sp_cmd) {
      std::vector<std::vector<double>> samples;
      if (sp_normal > 0) {
        for (std::size_t r = 0; r < sp_replicates; ++r) {
          Rng rng(derive_seed(sp_seed, r));
          std::vector<double> x(sp_normal);
          for (double& v : x) v = rng.normal();
          samples.push_back(std::move(x));
        }
      } else {
        const auto table = read_table(sp_input, in);
        const auto v = table.data.values();
        samples.emplace_back(v.begin(), v.end());
      }
      Sink sink(sp_out, out);
      json doc = json::array();
      if (sp_format == "csv") sink.get() << "replicate,i,order_stat,spacing,standardized\n";
      for (std::size_t r = 0; r < samples.size(); ++r) {
        const auto diag = standardized_spacings(samples[r], sp_kmax);
        for (std::size_t i = 0; i < sp_kmax; ++i) {
          if (sp_format == "csv") {
            sink.get() << r << ',' << i + 1 << ',' << csv::format_number(diag.order_stats[i])
                       << ',' << csv::format_number(diag.spacings[i]) << ','
                       << csv::format_number(diag.standardized[i]) << '\n';
          } else {
            doc.push_back({{"replicate", r},
                           {"i", i + 1},
                           {"order_stat", diag.order_stats[i]},
                           {"spacing", diag.spacings[i]},
                           {"standardized", diag.standardized[i]}});
          }
        }
      }
      if (sp_format == "json") sink.get() << doc.dump() << '\n';
      return kOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace stray::cli
