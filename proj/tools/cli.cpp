/*
 * Copyright 2026 The SLATE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "slate/data.hpp"
#include "slate/error.hpp"
#include "slate/metrics.hpp"
#include "slate/model.hpp"
#include "slate/sim.hpp"
#include "slate/topology.hpp"

namespace slate::cli {
namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  return cells;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw UsageError("'" + path + "' is empty");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv_line(line));
  }
  return t;
}

int cmd_gen_data(std::size_t n, std::size_t dim, double pos_frac,
                 double separation, std::uint64_t seed, const std::string& path,
                 std::ostream& out) {
  if (!(pos_frac > 0.0 && pos_frac < 1.0))
    throw UsageError("--pos-frac must lie in (0, 1)");
  if (n < 2) throw UsageError("--n must be >= 2");
  if (dim < 1) throw UsageError("--dim must be >= 1");
  const Dataset ds = gen_synthetic(n, dim, pos_frac, separation, seed);
  if (path.empty() || path == "-") {
    write_libsvm(out, ds);
  } else {
    save_libsvm(path, ds);
  }
  return kOk;
}

int cmd_partition(const std::string& data_path, std::size_t nodes,
                  const std::string& scheme, std::uint64_t seed,
                  const std::string& prefix, std::ostream& out) {
  const Dataset ds = load_libsvm(data_path);
  const Partition part =
      partition(ds, nodes, parse_partition_scheme(scheme), seed);
  out << "shard,size,positives,file\n";
  for (std::size_t s = 0; s < part.n_nodes(); ++s) {
    const auto& idx = part.shards[s];
    const std::string file = fmt::format("{}.{}.idx", prefix, s);
    std::ofstream f(file);
    if (!f) throw Error("cannot write '" + file + "'");
    for (std::size_t i : idx) f << i << '\n';
    const auto pos = std::count_if(idx.begin(), idx.end(),
                                   [&](std::size_t i) { return ds[i].positive(); });
    out << fmt::format("{},{},{},{}\n", s, idx.size(), pos, file);
  }
  return kOk;
}

int cmd_topology(const std::string& kind, std::size_t n, std::size_t q,
                 const std::string& file, std::ostream& out) {
  if (kind == "federated") {
    const auto sched = TopologySchedule::federated(n, q);
    out << fmt::format("n {}\nperiod {}\n", n, sched.period());
    out << fmt::format("lambda_local {:.6f}\n", spectral_gap(identity(n)));
    out << fmt::format("lambda_sync {:.6f}\n", spectral_gap(complete(n)));
    out << "valid true\n";
    return kOk;
  }
  std::optional<MixingMatrix> w;
  if (kind == "ring") {
    w = ring(n);
  } else if (kind == "complete") {
    w = complete(n);
  } else if (kind == "identity") {
    w = identity(n);
  } else if (kind == "file") {
    if (file.empty()) throw UsageError("--file is required for --kind file");
    w = from_file(file);
  } else {
    throw UsageError("unknown --kind '" + kind + "'");
  }
  out << fmt::format("n {}\nlambda {:.6f}\nvalid true\n", w->n(),
                     spectral_gap(*w));
  return kOk;
}

std::string resolved_path(const ExperimentConfig& cfg) {
  return cfg.output.empty() ? std::string("resolved-config.cfg")
                            : cfg.output + ".resolved.cfg";
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig cfg = load_config(config_path);
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    std::string arg = overrides[i];
    if (arg.rfind("--", 0) != 0)
      throw UsageError("unexpected argument '" + arg + "'");
    arg.erase(0, 2);
    std::string key, value;
    if (auto eq = arg.find('='); eq != std::string::npos) {
      key = arg.substr(0, eq);
      value = arg.substr(eq + 1);
    } else if (i + 1 < overrides.size()) {
      key = arg;
      value = overrides[++i];
    } else {
      throw UsageError("override --" + arg + " has no value");
    }
    set_config_value(cfg, key, value);
  }
  if (auto errs = validate_config(cfg); !errs.empty()) {
    for (const auto& e : errs) err << "config error: " << e << '\n';
    return kUsage;
  }
  {
    const std::string path = resolved_path(cfg);
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path + "'");
    write_config(f, cfg);
  }
  const ExperimentResult res = run_experiment(cfg);
  const MetricsRow& last = res.rows.back();
  out << fmt::format("rounds {}\ntest_ap {:.6f}\nconsensus_error {:.6g}\n",
                     last.round, last.test_ap, last.consensus_error);
  return kOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             int digits, const std::string& pr_path, std::ostream& out) {
  const ModelParams p = load_model(model_path);
  const Dataset ds = load_libsvm(data_path, p.spec.input_dim);
  if (ds.dim != p.spec.input_dim)
    throw UsageError(fmt::format("model expects {} features, data has {}",
                                 p.spec.input_dim, ds.dim));
  const EvalResult r = evaluate(p, ds);
  out << fmt::format("ap {:.{}f}\nn {}\nn_pos {}\n", r.ap, digits, r.n, r.n_pos);
  if (!pr_path.empty()) {
    std::ofstream f(pr_path);
    if (!f) throw Error("cannot write '" + pr_path + "'");
    write_pr_csv(f, pr_curve(score_dataset(p, ds)));
  }
  return kOk;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& column,
             const std::string& out_path, std::ostream& out) {
  std::vector<Series> series;
  for (const auto& path : csvs) {
    const CsvTable t = read_csv(path);
    auto col = std::find(t.header.begin(), t.header.end(), column);
    if (col == t.header.end()) {
      std::string avail;
      for (const auto& h : t.header) avail += (avail.empty() ? "" : ", ") + h;
      throw UsageError(fmt::format("'{}' has no column '{}'; available: {}",
                                   path, column, avail));
    }
    auto round_col = std::find(t.header.begin(), t.header.end(), "round");
    if (round_col == t.header.end())
      throw UsageError("'" + path + "' has no 'round' column");
    if (t.rows.empty()) throw UsageError("'" + path + "' has no data rows");
    const auto yi = static_cast<std::size_t>(col - t.header.begin());
    const auto xi = static_cast<std::size_t>(round_col - t.header.begin());
    Series s;
    s.label = std::filesystem::path(path).stem().string();
    for (const auto& row : t.rows) {
      if (row.size() != t.header.size())
        throw UsageError("'" + path + "' has a ragged row");
      try {
        s.x.push_back(std::stod(row[xi]));
        s.y.push_back(std::stod(row[yi]));
      } catch (const std::exception&) {
        throw UsageError("'" + path + "' has a non-numeric cell");
      }
    }
    series.push_back(std::move(s));
  }
  const std::string svg = render_svg(series, "round", column);
  if (out_path.empty() || out_path == "-") {
    out << svg;
  } else {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write '" + out_path + "'");
    f << svg;
  }
  return kOk;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series,
                       const std::string& x_label, const std::string& y_label) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  const double width = 720, height = 440;
  const double left = 70, right = 170, top = 20, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string svg;
  svg += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      "width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format(
      "<g stroke=\"black\" stroke-width=\"1\">"
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>"
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{3:.2f}\"/>"
      "</g>\n",
      left, top + ph, left + pw, top);
  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.6g}</text>\n",
        px(xv), top + ph + 16, xv);
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n",
        left - 6, py(yv) + 4, yv);
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" "
      "font-size=\"13\">{}</text>\n",
      left + pw / 2, height - 10, x_label);
  svg += fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"13\" "
      "transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
      top + ph / 2, top + ph / 2, y_label);
  svg += "</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(s.x[i]), py(s.y[i]));
    svg += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" "
        "points=\"{}\"/>\n",
        color, pts);
  }
  svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    const char* color = kColors[k % std::size(kColors)];
    svg += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"14\" height=\"3\" "
        "fill=\"{}\"/><text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n",
        left + pw + 12, ly - 4, color, left + pw + 32, ly, series[k].label);
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Decentralized AUPRC maximization simulator", "slate"};
  app.require_subcommand(1);

  std::size_t n = 1000, dim = 10, nodes = 1, q = 5;
  double pos_frac = 0.05, separation = 1.0;
  std::uint64_t seed = 1;
  std::string out_path, data_path, scheme = "iid", prefix = "shard";
  std::string kind = "ring", file, config_path, model_path, pr_path, column;
  std::vector<std::string> csvs;
  int digits = 6;

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic LIBSVM dataset");
  gen->add_option("--n", n, "Number of samples")->required();
  gen->add_option("--dim", dim, "Feature dimension")->required();
  gen->add_option("--pos-frac", pos_frac, "Fraction of positives")->required();
  gen->add_option("--separation", separation, "Class mean separation");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", out_path, "Output path (stdout when omitted)");

  auto* part = app.add_subcommand("partition", "Split a dataset across nodes");
  part->add_option("--data", data_path, "LIBSVM file")->required();
  part->add_option("--nodes", nodes, "Number of nodes")->required();
  part->add_option("--scheme", scheme, "iid or label_skew");
  part->add_option("--seed", seed, "Random seed");
  part->add_option("--out-prefix", prefix, "Shard files are <prefix>.<k>.idx");

  auto* topo = app.add_subcommand("topology", "Inspect a mixing matrix");
  topo->add_option("--kind", kind, "ring, complete, identity, federated, file");
  topo->add_option("--n", n, "Number of nodes");
  topo->add_option("--q", q, "Federated averaging period");
  topo->add_option("--file", file, "Matrix file for --kind file");

  auto* runc = app.add_subcommand("run", "Run an experiment from a config file");
  runc->add_option("config", config_path, "Config file")->required();
  runc->allow_extras();

  auto* evalc = app.add_subcommand("eval", "Average precision of a saved model");
  evalc->add_option("--model", model_path, "Model file")->required();
  evalc->add_option("--data", data_path, "LIBSVM file")->required();
  evalc->add_option("--digits", digits, "Decimals printed for ap")
      ->check(CLI::Range(0, 30));
  evalc->add_option("--pr-csv", pr_path, "Also write the PR curve here");

  auto* plot = app.add_subcommand("plot", "Render metric CSVs as an SVG chart");
  plot->add_option("csv", csvs, "Metric CSV files")->required();
  plot->add_option("--column", column, "Column to plot")->required();
  plot->add_option("--out", out_path, "SVG path (stdout when omitted)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen_data(n, dim, pos_frac, separation, seed, out_path, out);
    if (*part) return cmd_partition(data_path, nodes, scheme, seed, prefix, out);
    if (*topo) {
      if (kind != "file" && n < 1) throw UsageError("--n must be >= 1");
      return cmd_topology(kind, n, q, file, out);
    }
    if (*runc) return cmd_run(config_path, runc->remaining(), out, err);
    if (*evalc) return cmd_eval(model_path, data_path, digits, pr_path, out);
    if (*plot) return cmd_plot(csvs, column, out_path, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "invalid matrix: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace slate::cli
