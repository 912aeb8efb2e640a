#include "ukmeans/bench.hpp"

#include <chrono>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "ukmeans/data_io.hpp"
#include "ukmeans/rstar_tree.hpp"

namespace ukm {

MetricsRow make_metrics_row(Algorithm algo, const Params& params, const RunResult& result,
                            double build_ms, std::size_t tree_height, std::size_t tree_nodes) {
  MetricsRow row;
  row.algo = std::string(to_string(algo));
  row.n = params.n;
  row.k = params.k;
  row.l = params.l;
  row.s = params.s;
  row.d = params.d;
  row.b = params.b;
  row.seed = params.seed;
  row.iterations = static_cast<double>(result.iterations);
  row.converged = result.converged ? 1.0 : 0.0;
  row.t1_ms = result.total_ms / row.iterations;
  const double per = static_cast<double>(params.n) * row.iterations;
  row.ed_evals = static_cast<double>(result.counters.ed_evals);
  row.cand_pairs = static_cast<double>(result.counters.cand_pairs);
  row.n_ed = row.ed_evals / per;
  row.n_cand = row.cand_pairs / per;
  row.objective = result.objective;
  row.build_ms = build_ms;
  row.tree_height = static_cast<double>(tree_height);
  row.tree_nodes = static_cast<double>(tree_nodes);
  const double ed_units = row.ed_evals * static_cast<double>(params.s);
  const double total_units = ed_units + row.cand_pairs;
  const double ed_share = total_units > 0.0 ? ed_units / total_units : 0.0;
  row.t1_ed_ms_by_counts = row.t1_ms * ed_share;
  row.t1_prune_ms_by_counts = row.t1_ms - row.t1_ed_ms_by_counts;
  return row;
}

Measurement measure(std::span<const UncertainObject> objects, const Params& params,
                    Algorithm algo, std::size_t threads) {
  if (objects.empty()) throw std::invalid_argument("measure: empty dataset");
  Params p = params;
  p.n = objects.size();
  p.d = objects.front().dims();
  p.s = objects.front().pdf.size();

  RunOptions options;
  options.max_iters = p.max_iters;
  options.move_tol = p.move_tol;
  options.threads = threads;
  std::vector<Point> reps = init_reps(p, p.seed);

  if (uses_tree(algo)) {
    const auto start = std::chrono::steady_clock::now();
    const RStarTree tree = RStarTree::bulk_load(objects, p.b);
    const double build_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    RunResult result = run(objects, std::move(reps), options, AssignStrategy::rmm_vcp(tree));
    MetricsRow row =
        make_metrics_row(algo, p, result, build_ms, tree.height(), tree.node_count());
    return {std::move(row), std::move(result)};
  }
  AssignStrategy strategy = algo == Algorithm::kBaseline ? AssignStrategy::baseline()
                            : algo == Algorithm::kMmbb   ? AssignStrategy::mmbb()
                                                         : AssignStrategy::vcp();
  RunResult result = run(objects, std::move(reps), options, strategy);
  MetricsRow row = make_metrics_row(algo, p, result, 0.0, 0, 0);
  return {std::move(row), std::move(result)};
}

std::string metrics_csv_header() {
  return "schema,row_kind,algo,n,k,l,s,d,b,seed,reps,iterations,converged,t1_ms,n_ed,n_cand,"
         "objective,build_ms,ed_evals,cand_pairs,tree_height,tree_nodes,t1_ed_ms_by_counts,"
         "t1_prune_ms_by_counts";
}

std::string to_csv(const MetricsRow& r) {
  std::ostringstream os;
  auto f = [](double v) { return format_double(v); };
  os << kMetricsSchema << ',' << r.row_kind << ',' << r.algo << ',' << r.n << ',' << r.k << ','
     << f(r.l) << ',' << r.s << ',' << r.d << ',' << r.b << ',' << r.seed << ',' << r.reps << ','
     << f(r.iterations) << ',' << f(r.converged) << ',' << f(r.t1_ms) << ',' << f(r.n_ed) << ','
     << f(r.n_cand) << ',' << f(r.objective) << ',' << f(r.build_ms) << ',' << f(r.ed_evals)
     << ',' << f(r.cand_pairs) << ',' << f(r.tree_height) << ',' << f(r.tree_nodes) << ','
     << f(r.t1_ed_ms_by_counts) << ',' << f(r.t1_prune_ms_by_counts);
  return os.str();
}

std::string to_json(const MetricsRow& r, const RunResult& result) {
  nlohmann::ordered_json j;
  j["schema"] = kMetricsSchema;
  j["algo"] = r.algo;
  j["params"] = {{"n", r.n}, {"k", r.k}, {"l", r.l}, {"s", r.s},
                 {"d", r.d}, {"b", r.b}, {"seed", r.seed}};
  j["t1_ms"] = r.t1_ms;
  j["n_ed"] = r.n_ed;
  j["n_cand"] = r.n_cand;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["objective"] = result.objective;
  j["objective_ed"] = result.objective_ed;
  j["objective_history"] = result.objective_history;
  j["ed_evals"] = result.counters.ed_evals;
  j["cand_pairs"] = result.counters.cand_pairs;
  j["build_ms"] = r.build_ms;
  j["total_ms"] = result.total_ms;
  j["tree_height"] = r.tree_height;
  j["tree_nodes"] = r.tree_nodes;
  j["t1_ed_ms_by_counts"] = r.t1_ed_ms_by_counts;
  j["t1_prune_ms_by_counts"] = r.t1_prune_ms_by_counts;
  j["reps"] = result.final_state.reps;
  return j.dump(2);
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
  if (name == "n") return SweepAxis::kN;
  if (name == "k") return SweepAxis::kK;
  if (name == "b") return SweepAxis::kB;
  return std::nullopt;
}

std::vector<MetricsRow> sweep(const SweepSpec& spec,
                              const std::function<void(const MetricsRow&)>& on_row) {
  if (spec.values.empty()) throw std::invalid_argument("sweep: no values");
  if (spec.algos.empty()) throw std::invalid_argument("sweep: no algorithms");
  if (spec.repetitions == 0) throw std::invalid_argument("sweep: repetitions must be >= 1");

  std::vector<MetricsRow> rows;
  // Datasets depend on (n, seed) only within a sweep; cache per key.
  std::map<std::pair<std::size_t, std::uint64_t>, std::vector<UncertainObject>> datasets;
  for (std::size_t value : spec.values) {
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      Params p = spec.base;
      p.seed = spec.base.seed + rep;
      switch (spec.axis) {
        case SweepAxis::kN:
          p.n = value;
          break;
        case SweepAxis::kK:
          p.k = value;
          break;
        case SweepAxis::kB:
          p.b = value;
          break;
      }
      auto key = std::make_pair(p.n, p.seed);
      auto it = datasets.find(key);
      if (it == datasets.end()) {
        if (spec.axis == SweepAxis::kN) datasets.clear();
        it = datasets.emplace(key, generate(p)).first;
      }
      for (Algorithm algo : spec.algos) {
        MetricsRow row = measure(it->second, p, algo, spec.threads).row;
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<MetricsRow> mean_rows(std::span<const MetricsRow> raw) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<const MetricsRow*>> groups;
  for (const auto& r : raw) {
    Key key{r.algo, r.n, r.k, r.b};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<MetricsRow> out;
  for (const auto& key : order) {
    const auto& members = groups[key];
    MetricsRow m = *members.front();
    m.row_kind = "mean";
    m.reps = members.size();
    auto mean = [&](double MetricsRow::*field) {
      double acc = 0.0;
      for (const MetricsRow* r : members) acc += r->*field;
      return acc / static_cast<double>(members.size());
    };
    for (auto field : {&MetricsRow::iterations, &MetricsRow::converged, &MetricsRow::t1_ms,
                       &MetricsRow::n_ed, &MetricsRow::n_cand, &MetricsRow::objective,
                       &MetricsRow::build_ms, &MetricsRow::ed_evals, &MetricsRow::cand_pairs,
                       &MetricsRow::tree_height, &MetricsRow::tree_nodes,
                       &MetricsRow::t1_ed_ms_by_counts, &MetricsRow::t1_prune_ms_by_counts})
      m.*field = mean(field);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ukm
