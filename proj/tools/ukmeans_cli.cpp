// ukmeans: generate uncertain datasets, cluster them with UK-means under the
// four assignment strategies, and sweep n / k / block size for timing and
// pruning metrics. Exit codes: 0 ok, 1 usage, 2 I/O, 3 invariant violation.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ukmeans/bench.hpp"
#include "ukmeans/clustering.hpp"
#include "ukmeans/data_io.hpp"
#include "ukmeans/random.hpp"
#include "ukmeans/rstar_tree.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kInvariant = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
std::vector<T> split_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad ") + what + " value: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

std::vector<ukm::Algorithm> parse_algos(const std::string& text) {
  std::vector<ukm::Algorithm> algos;
  for (const auto& name : split_list<std::string>(text, "algorithm")) {
    auto a = ukm::parse_algorithm(name);
    if (!a) throw UsageError("unknown algorithm: " + name + " (baseline|mmbb|vcp|rmm-vcp)");
    algos.push_back(*a);
  }
  return algos;
}

void write_dataset(const std::string& out, std::span<const ukm::UncertainObject> objects) {
  if (out.empty() || out == "-") {
    ukm::save_dataset(std::cout, objects);
  } else {
    ukm::save_dataset(std::filesystem::path(out), objects);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  return os;
}

void add_param_flags(CLI::App& cmd, ukm::Params& p) {
  cmd.add_option("-n", p.n, "number of uncertain objects")->check(CLI::PositiveNumber);
  cmd.add_option("-k", p.k, "number of clusters")->check(CLI::PositiveNumber);
  cmd.add_option("-l", p.l, "max MBR side length")->check(CLI::Range(1e-300, 100.0));
  cmd.add_option("-s", p.s, "samples per object")->check(CLI::PositiveNumber);
  cmd.add_option("-d", p.d, "dimensions")->check(CLI::PositiveNumber);
  cmd.add_option("-b", p.b, "tree block size in bytes")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", p.seed, "PRNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UK-means clustering of uncertain objects with MM-BB, VCP and R-tree pruning"};
  app.require_subcommand(1);

  ukm::Params params;
  std::string out_path;
  std::size_t threads = 1;

  auto* gen = app.add_subcommand("generate", "write a synthetic uncertain dataset");
  add_param_flags(*gen, params);
  gen->add_option("--out", out_path, "dataset file (stdout if omitted)");

  std::string data_path;
  std::string algo_name = "rmm-vcp";
  std::string json_path;
  std::string dump_path;
  bool verify = false;
  auto* cluster = app.add_subcommand("cluster", "run UK-means on a dataset file");
  cluster->add_option("--data", data_path, "dataset file")->required();
  cluster->add_option("--algo", algo_name, "baseline|mmbb|vcp|rmm-vcp");
  cluster->add_option("-k", params.k, "number of clusters")->check(CLI::PositiveNumber);
  cluster->add_option("-b", params.b, "tree block size in bytes")->check(CLI::PositiveNumber);
  cluster->add_option("--seed", params.seed, "seed for the initial representatives");
  cluster->add_option("--max-iters", params.max_iters, "iteration cap")->check(CLI::PositiveNumber);
  cluster->add_option("--move-tol", params.move_tol, "rep displacement tolerance");
  cluster->add_option("--threads", threads, "assignment threads (1 = reference)")
      ->check(CLI::PositiveNumber);
  cluster->add_option("--out", out_path, "assignment CSV (object_id,cluster)");
  cluster->add_option("--json", json_path, "write the run result as JSON");
  cluster->add_option("--dump-tree", dump_path, "write the tree layout (rmm-vcp only)");
  cluster->add_flag("--verify", verify, "check the assignment against a baseline run");

  std::string vary;
  std::string values_text;
  std::string algos_text = "mmbb,vcp,rmm-vcp";
  std::size_t repetitions = 3;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep n, k or block size; CSV to --out/stdout");
  add_param_flags(*sweep_cmd, params);
  sweep_cmd->add_option("--vary", vary, "axis: n|k|b")->required()->check(
      CLI::IsMember({"n", "k", "b"}));
  sweep_cmd->add_option("--values", values_text, "comma-separated axis values")->required();
  sweep_cmd->add_option("--algo", algos_text, "comma-separated algorithms");
  sweep_cmd->add_option("--reps", repetitions, "seeds per point")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--max-iters", params.max_iters, "iteration cap")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads, "assignment threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_path, "CSV file (stdout if omitted)");

  std::string csv_path;
  std::string columns_text = "0,1";
  std::string delimiter = ",";
  bool header = false;
  double rescale_lo = 0.0;
  double rescale_hi = ukm::kWorkspaceExtent;
  double sample_fraction = 1.0;
  auto* ingest = app.add_subcommand("ingest", "turn a point CSV into an uncertain dataset");
  ingest->add_option("--csv", csv_path, "input CSV")->required();
  ingest->add_option("--columns", columns_text, "zero-based numeric columns");
  ingest->add_option("--delimiter", delimiter, "field delimiter (one character)");
  ingest->add_flag("--header", header, "skip the first line");
  ingest->add_option("--rescale-lo", rescale_lo, "lower rescale bound");
  ingest->add_option("--rescale-hi", rescale_hi, "upper rescale bound");
  ingest->add_option("--sample-fraction", sample_fraction, "keep this fraction of rows (seeded)")
      ->check(CLI::Range(1e-300, 1.0));
  ingest->add_option("-l", params.l, "max MBR side length")->check(CLI::Range(1e-300, 100.0));
  ingest->add_option("-s", params.s, "samples per object")->check(CLI::PositiveNumber);
  ingest->add_option("--seed", params.seed, "PRNG seed");
  ingest->add_option("--out", out_path, "dataset file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      write_dataset(out_path, ukm::generate(params));
      return kOk;
    }

    if (*cluster) {
      const auto algo = ukm::parse_algorithm(algo_name);
      if (!algo) throw UsageError("unknown algorithm: " + algo_name);
      const auto objects = ukm::load_dataset(std::filesystem::path(data_path));
      if (const auto diags = ukm::validate_dataset(objects); !diags.empty()) {
        for (const auto& d : diags)
          std::cerr << "object " << d.object_id << ": " << d.message << '\n';
        throw std::ios_base::failure("dataset failed validation: " + data_path);
      }
      const ukm::Measurement m = ukm::measure(objects, params, *algo, threads);
      std::cout << ukm::metrics_csv_header() << '\n' << ukm::to_csv(m.row) << '\n';
      if (!out_path.empty()) {
        auto os = open_out(out_path);
        ukm::save_assignments(os, objects, m.result.final_state.assignment);
      }
      if (!json_path.empty()) open_out(json_path) << ukm::to_json(m.row, m.result) << '\n';
      if (!dump_path.empty()) {
        if (!ukm::uses_tree(*algo)) throw UsageError("--dump-tree needs --algo rmm-vcp");
        auto os = open_out(dump_path);
        ukm::RStarTree::bulk_load(objects, params.b).dump(os);
      }
      if (verify && *algo != ukm::Algorithm::kBaseline) {
        const auto ref = ukm::measure(objects, params, ukm::Algorithm::kBaseline, threads);
        if (ref.result.final_state.assignment != m.result.final_state.assignment)
          throw InvariantError("assignment differs from the baseline run");
      }
      return kOk;
    }

    if (*sweep_cmd) {
      ukm::SweepSpec spec;
      spec.axis = *ukm::parse_axis(vary);
      spec.values = split_list<std::size_t>(values_text, "axis");
      spec.algos = parse_algos(algos_text);
      spec.repetitions = repetitions;
      spec.base = params;
      spec.threads = threads;
      if (spec.axis == ukm::SweepAxis::kB &&
          std::none_of(spec.algos.begin(), spec.algos.end(), ukm::uses_tree))
        std::cerr << "notice: none of the selected algorithms uses the tree; block size has no "
                     "effect on them\n";

      std::ofstream file;
      if (!out_path.empty()) file = open_out(out_path);
      std::ostream& os = out_path.empty() ? std::cout : file;
      os << ukm::metrics_csv_header() << '\n';
      const auto raw = ukm::sweep(spec, [&os](const ukm::MetricsRow& row) {
        os << ukm::to_csv(row) << '\n';
        os.flush();
      });
      for (const auto& row : ukm::mean_rows(raw)) os << ukm::to_csv(row) << '\n';
      return kOk;
    }

    if (*ingest) {
      if (delimiter.size() != 1) throw UsageError("--delimiter must be one character");
      ukm::CsvOptions opts;
      opts.delimiter = delimiter.front();
      opts.columns = split_list<std::size_t>(columns_text, "column");
      opts.header = header;
      std::ifstream in(csv_path);
      if (!in) throw std::ios_base::failure("cannot open " + csv_path);
      auto points = ukm::read_csv_points(in, opts);
      if (sample_fraction < 1.0) {
        ukm::Rng rng(params.seed, 0x53414d50);  // "SAMP"
        std::erase_if(points, [&](const ukm::Point&) { return rng.uniform01() >= sample_fraction; });
      }
      if (rescale_hi < rescale_lo) throw UsageError("--rescale-hi below --rescale-lo");
      ukm::rescale(points, rescale_lo, rescale_hi);
      write_dataset(out_path, ukm::uncertainize(points, params.l, params.s, params.seed));
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ukm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  return kUsage;
}
