#pragma once

// Simulation grid: sample -> embed -> measure -> cluster -> score, over a grid
// of (n, m) cells and replicates, written to CSV in a fixed order.

#include "clustering.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "spectral.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace hsbm {

struct ExperimentGrid
{
  std::vector<Index> m_values;
  std::vector<Index> n_values;
  std::vector<Regime> regimes{Regime::kGrowing};
  int replicates = 10;
  std::uint64_t seed = 1;
  double alpha = 0.4;
  int fixed_k_max = 5;
  SelectionMode::Kind selection = SelectionMode::Kind::kMatched;
  bool timing = false;

  /// m = 999 * 3^{0..5}, n = 10 * 2^{0..5}.
  static ExperimentGrid full()
  {
    ExperimentGrid g;
    g.m_values = {999, 2997, 8991, 26973, 80919, 242757};
    g.n_values = {10, 20, 40, 80, 160, 320};
    return g;
  }

  /// The full grid truncated to m <= 8991 and n <= 80.
  static ExperimentGrid desk()
  {
    ExperimentGrid g;
    g.m_values = {999, 2997, 8991};
    g.n_values = {10, 20, 40, 80};
    return g;
  }
};

struct GridCell
{
  Regime regime = Regime::kGrowing;
  Index n = 0;
  Index m = 0;
};

/// Outcome of one replicate in one cell.
struct CellResult
{
  GridCell cell;
  int rep = 0;
  std::uint64_t seed = 0;
  double ari_true_k = std::numeric_limits<double>::quiet_NaN();
  double ari_gap_k = std::numeric_limits<double>::quiet_NaN();
  Index k_true = 0;
  Index k_gap = 0;
  DiagnosticsReport norms;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  /// Smallest distance between noiseless positions of distinct types.
  double separation = std::numeric_limits<double>::quiet_NaN();
  /// Whether some dendrogram cut reproduces the type partition exactly.
  bool perfect_cut = false;
  double runtime_ms = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Number of distinct type vectors the design can produce; used to bound the
/// gap search.
inline Index possible_types(const SimulationDesign& design)
{
  const Index k_max = design.k_max();
  const Index pure = k_max - design.pure_k_min + 1;
  Index mixed = 0;
  for (Index k = 2; k <= k_max; ++k) mixed += k - 1;
  return 2 * pure + mixed;
}

/// Empty when the cell is runnable, otherwise the reason it is skipped.
inline std::string skip_reason(const SimulationDesign& design)
{
  if (design.m < design.n) return "m < n";
  if (design.n % SimulationDesign::kClasses != 0) return "n not divisible by the class count";
  if (design.m % 3 != 0) return "m not divisible by 3";
  if (design.k_max() > design.n / SimulationDesign::kClasses) return "k_max exceeds the class size";
  return {};
}

inline std::uint64_t cell_key(const GridCell& c, int rep)
{
  return stream_key({static_cast<std::uint64_t>(c.n), static_cast<std::uint64_t>(c.m),
                     static_cast<std::uint64_t>(c.regime), static_cast<std::uint64_t>(rep)});
}

inline SimulationDesign cell_design(const ExperimentGrid& grid, const GridCell& c)
{
  SimulationDesign design;
  design.n = c.n;
  design.m = c.m;
  design.regime = c.regime;
  design.alpha = grid.alpha;
  design.fixed_k_max = grid.fixed_k_max;
  design.seed = grid.seed;
  return design;
}

inline SelectionMode make_selection(SelectionMode::Kind kind, const ExpectedGramStructure& s, const SignalGap& gap)
{
  switch (kind) {
  case SelectionMode::Kind::kOracle: return SelectionMode::oracle(s.bulk_values, gap.b);
  case SelectionMode::Kind::kMatched: return SelectionMode::matched(s);
  default: return SelectionMode::empirical();
  }
}

/// Runs one replicate. Pipeline errors are caught and stored in `error`.
inline CellResult run_cell(const ExperimentGrid& grid, const GridCell& c, int rep)
{
  const auto start = std::chrono::steady_clock::now();
  CellResult res;
  res.cell = c;
  res.rep = rep;
  res.seed = grid.seed;
  try {
    const SimulationDesign design = cell_design(grid, c);
    const RngStream rng(grid.seed, cell_key(c, rep));
    const DesignInstance inst = generate_design(design, rng);
    const IncidenceMatrix r(inst.hypergraph);
    const ExpectedGramStructure structure = expected_gram_structure(inst.spec);
    const SignalGap gap = signal_gap(inst.spec, structure);
    res.delta = gap.delta;
    res.b = gap.b;

    const Index d = inst.spec.num_classes();
    const EmbeddingResult emb = embed_interactions(r, d, make_selection(grid.selection, structure, gap));
    const TheoreticalEmbedding theo = theoretical_embedding(inst.spec);
    res.norms = diagnostics(r, inst.spec, emb, theo);

    const std::vector<Index> ids = type_ids(inst.spec.type_matrix());
    const Partition truth = make_partition(ids);
    res.k_true = truth.k;
    res.separation = type_separation(theo.embedding, ids);

    const Dendrogram dend = complete_linkage(emb.embedding);
    const Partition at_true = cut_at_k(dend, truth.k);
    res.ari_true_k = adjusted_rand_index(at_true, truth);
    res.perfect_cut = at_true.labels == truth.labels;
    res.k_gap = choose_k_by_gap(dend, std::min<Index>(c.m, 4 * possible_types(design)));
    res.ari_gap_k = adjusted_rand_index(cut_at_k(dend, res.k_gap), truth);
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  res.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

inline constexpr const char* kGridCsvHeader =
    "regime,n,m,rep,seed,ari_true_k,ari_gap_k,k_gap,norm_R_Gamma,norm_hollow,norm_SW,norm_Sinv,"
    "norm_V_2inf,norm_VS_2inf,delta,b,runtime_ms";

/// One CSV row. runtime_ms is left empty unless `timing`, so that reruns are
/// byte-identical.
inline void write_grid_row(std::ostream& out, const CellResult& r, bool timing)
{
  using detail::format_double;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto num = [&](double x) { return r.ok() ? format_double(x) : format_double(nan); };
  out << to_string(r.cell.regime) << ',' << r.cell.n << ',' << r.cell.m << ',' << r.rep + 1 << ',' << r.seed << ','
      << num(r.ari_true_k) << ',' << num(r.ari_gap_k) << ',' << (r.ok() ? r.k_gap : 0) << ','
      << num(r.norms.norm_r_gamma) << ',' << num(r.norms.norm_hollow) << ',' << num(r.norms.norm_sw) << ','
      << num(r.norms.norm_sinv) << ',' << num(r.norms.norm_v_2inf) << ',' << num(r.norms.norm_vs_2inf) << ','
      << format_double(r.delta) << ',' << format_double(r.b) << ',';
  if (timing) out << format_double(r.runtime_ms);
  out << '\n';
}

/// Cells in (regime, n, m) order, with the skipped ones reported to `log`.
inline std::vector<GridCell> retained_cells(const ExperimentGrid& grid, std::ostream* log = nullptr)
{
  std::vector<GridCell> cells;
  for (Regime regime : grid.regimes)
    for (Index n : grid.n_values)
      for (Index m : grid.m_values) {
        const GridCell c{regime, n, m};
        const std::string why = skip_reason(cell_design(grid, c));
        if (why.empty()) cells.push_back(c);
        else if (log) *log << "skip " << to_string(regime) << " n=" << n << " m=" << m << ": " << why << '\n';
      }
  return cells;
}

/// Runs every (cell, replicate) on `threads` workers. Results are handed to
/// `sink` strictly in (cell, replicate) order whatever the scheduling.
inline void run_grid(const ExperimentGrid& grid, int threads, const std::function<void(const CellResult&)>& sink,
                     std::ostream* log = nullptr)
{
  if (grid.replicates < 1) throw std::invalid_argument("need at least one replicate");
  for (Index v : grid.m_values)
    if (v < 1) throw std::invalid_argument("m values must be positive");
  for (Index v : grid.n_values)
    if (v < 1) throw std::invalid_argument("n values must be positive");

  const std::vector<GridCell> cells = retained_cells(grid, log);
  const std::size_t total = cells.size() * static_cast<std::size_t>(grid.replicates);
  std::vector<std::optional<CellResult>> slots(total);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const auto& cell = cells[task / static_cast<std::size_t>(grid.replicates)];
      CellResult res = run_cell(grid, cell, static_cast<int>(task % static_cast<std::size_t>(grid.replicates)));
      {
        std::lock_guard lock(mutex);
        slots[task] = std::move(res);
      }
      ready.notify_all();
    }
  };

  const int workers = std::max(1, threads);
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);

  for (std::size_t i = 0; i < total; ++i) {
    CellResult res;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      res = std::move(*slots[i]);
      slots[i].reset();
    }
    if (log && !res.ok())
      *log << "error " << to_string(res.cell.regime) << " n=" << res.cell.n << " m=" << res.cell.m
           << " rep=" << res.rep + 1 << ": " << res.error << '\n';
    sink(res);
  }
}

/// run_grid writing the grid CSV to `out`.
inline void run_grid_csv(const ExperimentGrid& grid, int threads, std::ostream& out, std::ostream* log = nullptr)
{
  out << kGridCsvHeader << '\n';
  run_grid(grid, threads, [&](const CellResult& r) { write_grid_row(out, r, grid.timing); }, log);
}

} // namespace hsbm
