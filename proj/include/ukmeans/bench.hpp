#ifndef UKMEANS_BENCH_HPP
#define UKMEANS_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ukmeans/clustering.hpp"
#include "ukmeans/uncertain_object.hpp"

namespace ukm {

/// Value of the leading `schema` column; bump when columns change.
inline constexpr std::string_view kMetricsSchema = "ukm-metrics-v1";

/// One measurement (row_kind "raw") or the mean over repetitions ("mean").
///   t1_ms  = total assignment+readjust time / iterations
///   n_ed   = ed_evals / (n * iterations)
///   n_cand = cand_pairs / (n * iterations)
/// The *_by_counts columns split t1 by counter weight: one ED costs s units,
/// one candidate pair costs one unit. They are estimates, not timers.
struct MetricsRow {
  std::string row_kind = "raw";
  std::string algo;
  std::size_t n = 0;
  std::size_t k = 0;
  double l = 0.0;
  std::size_t s = 0;
  std::size_t d = 0;
  std::size_t b = 0;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  double iterations = 0.0;
  double converged = 0.0;
  double t1_ms = 0.0;
  double n_ed = 0.0;
  double n_cand = 0.0;
  double objective = 0.0;
  double build_ms = 0.0;
  double ed_evals = 0.0;
  double cand_pairs = 0.0;
  double tree_height = 0.0;
  double tree_nodes = 0.0;
  double t1_ed_ms_by_counts = 0.0;
  double t1_prune_ms_by_counts = 0.0;
};

struct Measurement {
  MetricsRow row;
  RunResult result;
};

/// Builds the tree when the algorithm needs one (timed as build_ms), runs
/// from init_reps(params, params.seed) and fills the metrics row.
Measurement measure(std::span<const UncertainObject> objects, const Params& params,
                    Algorithm algo, std::size_t threads = 1);

MetricsRow make_metrics_row(Algorithm algo, const Params& params, const RunResult& result,
                            double build_ms, std::size_t tree_height, std::size_t tree_nodes);

std::string metrics_csv_header();
std::string to_csv(const MetricsRow& row);

/// Named-field JSON for a row plus the run's final reps and objective history.
std::string to_json(const MetricsRow& row, const RunResult& result);

enum class SweepAxis { kN, kK, kB };
std::optional<SweepAxis> parse_axis(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kN;
  std::vector<std::size_t> values;
  std::size_t repetitions = 3;  ///< seeds base.seed, base.seed + 1, ...
  std::vector<Algorithm> algos;
  Params base;
  std::size_t threads = 1;
};

/// One raw row per (value, repetition, algo), in that nesting order.
/// `on_row` sees each row as soon as it is measured.
std::vector<MetricsRow> sweep(const SweepSpec& spec,
                              const std::function<void(const MetricsRow&)>& on_row = {});

/// Mean rows per (algo, n, k, b), in first-appearance order.
std::vector<MetricsRow> mean_rows(std::span<const MetricsRow> raw);

}  // namespace ukm

#endif  // UKMEANS_BENCH_HPP
