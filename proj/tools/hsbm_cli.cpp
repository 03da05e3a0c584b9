// hsbm: sample Hyper-SBM hypergraphs, embed and cluster interactions, run the
// simulation grid, and plot the results.
//
// Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 eigenvalue
// selection failure.

#include <hsbm/clustering.hpp>
#include <hsbm/error.hpp>
#include <hsbm/harness.hpp>
#include <hsbm/io.hpp>
#include <hsbm/sampler.hpp>
#include <hsbm/spectral.hpp>
#include <hsbm/svg.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace hsbm;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Globals
{
  std::uint64_t seed = 1;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out = "-";
  std::string config;
};

// Writes the whole document at once so a failed command leaves no file.
void emit(const std::string& path, const std::string& content)
{
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string output_path(const std::string& out, const std::string& default_name)
{
  if (out != "-" && std::filesystem::is_directory(out)) return (std::filesystem::path(out) / default_name).string();
  return out;
}

SelectionMode::Kind parse_selection(const std::string& s)
{
  if (s == "oracle") return SelectionMode::Kind::kOracle;
  if (s == "matched") return SelectionMode::Kind::kMatched;
  if (s == "empirical") return SelectionMode::Kind::kEmpirical;
  throw UsageError("unknown selection mode '" + s + "'");
}

std::vector<Regime> parse_regimes(const std::string& s)
{
  if (s == "both") return {Regime::kGrowing, Regime::kFixed};
  try {
    return {parse_regime(s)};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

CsvTable read_csv_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

std::vector<Index> read_communities_file(const std::string& path, Index* classes)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_communities(in, classes);
}

/// Spec for an observed hypergraph: node labels from a community file, types
/// counted from the hypergraph itself.
BlockModelSpec observed_spec(const InteractionHypergraph& h, const std::string& communities_path)
{
  Index classes = 0;
  std::vector<Index> labels = read_communities_file(communities_path, &classes);
  if (static_cast<Index>(labels.size()) != h.num_nodes())
    throw ParseError("community file has " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(h.num_nodes()) + " nodes");
  return block_model(h, labels, classes);
}

// Config values replace whatever the command line said.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  for (const auto& [key, value] : read_config(in)) {
    CLI::Option* opt = nullptr;
    const std::string name = "--" + key;
    if (sub) {
      try {
        opt = sub->get_option(name);
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt) {
      try {
        opt = app.get_option(name);
      } catch (const CLI::OptionNotFound&) {
        throw UsageError("config key '" + key + "' is not an option of this command");
      }
    }
    opt->clear();
    if (opt->get_type_size() == 0) {
      if (value != "true" && value != "false" && value != "1" && value != "0")
        throw UsageError("config key '" + key + "' expects true or false");
    }
    opt->add_result(value);
    opt->run_callback();
  }
}

void log_spectrum(const EmbeddingResult& e)
{
  std::cerr << "selected eigenvalues:";
  for (Eigen::Index i = 0; i < e.lambda_hat.size(); ++i) std::cerr << ' ' << detail::format_double(e.lambda_hat(i));
  std::cerr << "\nselected positions:";
  for (Index i : e.selected) std::cerr << ' ' << i + 1;
  std::cerr << "\nspectrum (eigenvalue, nearest-neighbour gap):\n";
  for (Eigen::Index i = 0; i < e.spectrum.size(); ++i)
    std::cerr << "  " << i + 1 << ' ' << detail::format_double(e.spectrum(i)) << ' '
              << detail::format_double(e.neighbour_gaps(i)) << '\n';
}

struct DesignFlags
{
  Index n = 10;
  Index m = 999;
  std::string regime = "growing";
  double alpha = 0.4;
  int fixed_k_max = 5;

  void add(CLI::App* cmd)
  {
    cmd->add_option("--n", n, "node count (two equal classes)");
    cmd->add_option("--m", m, "interaction count (multiple of 3)");
    cmd->add_option("--regime", regime, "growing or fixed");
    cmd->add_option("--alpha", alpha, "size-law success probability");
    cmd->add_option("--fixed-kmax", fixed_k_max, "k_max in the fixed regime");
  }

  SimulationDesign design(std::uint64_t seed) const
  {
    SimulationDesign d;
    d.n = n;
    d.m = m;
    if (regime == "both") throw UsageError("--regime must be growing or fixed here");
    d.regime = parse_regimes(regime).at(0);
    d.alpha = alpha;
    d.fixed_k_max = fixed_k_max;
    d.seed = seed;
    return d;
  }
};

// Stream used by simulate and diagnose for a design sampled outside the grid.
RngStream design_stream(const SimulationDesign& d)
{
  return {d.seed, stream_key({static_cast<std::uint64_t>(d.n), static_cast<std::uint64_t>(d.m),
                              static_cast<std::uint64_t>(d.regime)})};
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Hyper-SBM simulation, interaction embedding and clustering"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file or directory ('-' for stdout)");
  app.add_option("--config", g.config, "key=value file; its values override flags");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "sample one instance of the simulation design");
  DesignFlags sim_flags;
  sim_flags.add(simulate);
  std::string sim_communities;
  std::string sim_types;
  simulate->add_option("--communities", sim_communities, "also write node labels here");
  simulate->add_option("--types", sim_types, "also write the type id of each interaction here");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "run the simulation grid and write the results CSV");
  std::string grid_regime = "growing";
  std::vector<Index> m_values;
  std::vector<Index> n_values;
  int reps = 10;
  bool full = false;
  std::string grid_selection = "matched";
  bool timing = false;
  double grid_alpha = 0.4;
  int grid_fixed_k_max = 5;
  grid_cmd->add_option("--regime", grid_regime, "growing, fixed, or both");
  grid_cmd->add_option("--m-values", m_values, "interaction counts")->delimiter(',');
  grid_cmd->add_option("--n-values", n_values, "node counts")->delimiter(',');
  grid_cmd->add_option("--reps", reps, "replicates per cell")->check(CLI::PositiveNumber);
  grid_cmd->add_flag("--full", full, "use the full 6 x 6 grid instead of the desk-scale one");
  grid_cmd->add_option("--selection", grid_selection, "oracle, matched, or empirical");
  grid_cmd->add_flag("--timing", timing, "fill the runtime_ms column (breaks byte-identical reruns)");
  grid_cmd->add_option("--alpha", grid_alpha, "size-law success probability");
  grid_cmd->add_option("--fixed-kmax", grid_fixed_k_max, "k_max in the fixed regime");

  // embed
  auto* embed = app.add_subcommand("embed", "embed the interactions of a hypergraph file");
  std::string embed_input;
  Index embed_d = 2;
  std::string embed_mode = "empirical";
  std::string embed_communities;
  embed->add_option("--input", embed_input, "interaction file")->required();
  embed->add_option("--d", embed_d, "embedding dimension")->check(CLI::PositiveNumber);
  embed->add_option("--mode", embed_mode, "empirical, matched, or oracle (the last two need --communities)");
  embed->add_option("--communities", embed_communities, "node labels; adds a type column");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "complete-linkage clustering of an embedding CSV");
  std::string cluster_input;
  Index cluster_k = 0;
  bool use_gap = false;
  Index gap_k_max = 20;
  std::string dendrogram_out;
  cluster->add_option("--input", cluster_input, "embedding CSV")->required();
  auto* k_opt = cluster->add_option("--k", cluster_k, "number of clusters")->check(CLI::PositiveNumber);
  auto* gap_opt = cluster->add_flag("--gap", use_gap, "choose k by the largest relative height jump");
  k_opt->excludes(gap_opt);
  cluster->add_option("--kmax", gap_k_max, "largest k considered by --gap")->check(CLI::PositiveNumber);
  cluster->add_option("--dendrogram", dendrogram_out, "also write the merge sequence here");

  // plot
  auto* plot = app.add_subcommand("plot", "render a results or embedding CSV as SVG");
  std::string plot_input;
  std::string plot_kind;
  bool no_timestamp = false;
  plot->add_option("--input", plot_input, "CSV file")->required();
  plot->add_option("--kind", plot_kind, "ari-table, convergence, diagnostics, or scatter")
      ->required()
      ->check(CLI::IsMember({"ari-table", "convergence", "diagnostics", "scatter"}));
  plot->add_flag("--no-timestamp", no_timestamp, "omit the generation timestamp comment");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "error norms of one instance against its model");
  DesignFlags diag_flags;
  diag_flags.add(diagnose);
  std::string diag_input;
  std::string diag_communities;
  std::string diag_mode = "matched";
  diagnose->add_option("--input", diag_input, "interaction file (otherwise a design instance is sampled)");
  diagnose->add_option("--communities", diag_communities, "node labels for --input");
  diagnose->add_option("--mode", diag_mode, "oracle, matched, or empirical");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!g.config.empty()) apply_config(app, sub, g.config);

    if (sub == simulate) {
      const SimulationDesign design = sim_flags.design(g.seed);
      const DesignInstance inst = generate_design(design, design_stream(design));
      std::ostringstream out;
      write_interactions(out, inst.hypergraph);
      emit(output_path(g.out, "interactions.txt"), out.str());
      if (!sim_communities.empty()) {
        std::ostringstream c;
        write_communities(c, inst.spec.labels());
        emit(sim_communities, c.str());
      }
      if (!sim_types.empty()) {
        std::ostringstream t;
        t << "interaction,type\n";
        const auto ids = type_ids(inst.spec.type_matrix());
        for (std::size_t p = 0; p < ids.size(); ++p) t << p + 1 << ',' << ids[p] + 1 << '\n';
        emit(sim_types, t.str());
      }
      return 0;
    }

    if (sub == grid_cmd) {
      ExperimentGrid grid = full ? ExperimentGrid::full() : ExperimentGrid::desk();
      if (!m_values.empty()) grid.m_values = m_values;
      if (!n_values.empty()) grid.n_values = n_values;
      grid.regimes = parse_regimes(grid_regime);
      grid.replicates = reps;
      grid.seed = g.seed;
      grid.alpha = grid_alpha;
      grid.fixed_k_max = grid_fixed_k_max;
      grid.selection = parse_selection(grid_selection);
      grid.timing = timing;
      std::ostringstream out;
      run_grid_csv(grid, g.threads, out, &std::cerr);
      emit(output_path(g.out, "grid.csv"), out.str());
      return 0;
    }

    if (sub == embed) {
      const InteractionHypergraph h = read_interactions_file(embed_input);
      const IncidenceMatrix r(h);
      const SelectionMode::Kind kind = parse_selection(embed_mode);
      std::vector<Index> ids;
      SelectionMode mode = SelectionMode::empirical();
      if (!embed_communities.empty()) {
        const BlockModelSpec spec = observed_spec(h, embed_communities);
        ids = type_ids(spec.type_matrix());
        if (kind != SelectionMode::Kind::kEmpirical) {
          if (spec.num_classes() != embed_d)
            throw UsageError("--d must equal the number of classes for " + embed_mode + " selection");
          const ExpectedGramStructure s = expected_gram_structure(spec);
          mode = make_selection(kind, s, signal_gap(spec, s));
        }
      } else if (kind != SelectionMode::Kind::kEmpirical) {
        throw UsageError(embed_mode + " selection needs --communities");
      }
      const EmbeddingResult e = embed_interactions(r, embed_d, mode);
      log_spectrum(e);
      std::ostringstream out;
      write_embedding_csv(out, e.embedding, ids);
      emit(output_path(g.out, "embedding.csv"), out.str());
      return 0;
    }

    if (sub == cluster) {
      if (cluster_k == 0 && !use_gap) throw UsageError("give --k or --gap");
      const CsvTable t = read_csv_file(cluster_input);
      if (t.rows.empty()) throw ParseError("embedding CSV has no rows");
      std::vector<std::size_t> coords;
      for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c].size() > 1 && t.header[c][0] == 'x') coords.push_back(c);
      if (coords.empty()) throw ParseError("embedding CSV has no x1.. columns");
      Eigen::MatrixXd points(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(coords.size()));
      for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < coords.size(); ++c) points(r, c) = t.number(r, coords[c]);
      const Dendrogram dend = complete_linkage(points);
      const Index k = use_gap ? choose_k_by_gap(dend, gap_k_max) : cluster_k;
      if (use_gap) std::cerr << "gap-selected k = " << k << '\n';
      const Partition part = cut_at_k(dend, k);
      if (auto tc = t.column("type")) {
        std::vector<Index> types;
        for (std::size_t r = 0; r < t.rows.size(); ++r) types.push_back(static_cast<Index>(t.number(r, *tc)));
        std::cerr << "ARI against type column = " << adjusted_rand_index(part.labels, types) << '\n';
      }
      std::ostringstream out;
      write_partition_csv(out, part);
      emit(output_path(g.out, "partition.csv"), out.str());
      if (!dendrogram_out.empty()) {
        std::ostringstream d;
        write_dendrogram_csv(d, dend);
        emit(dendrogram_out, d.str());
      }
      return 0;
    }

    if (sub == plot) {
      const CsvTable t = read_csv_file(plot_input);
      std::string doc;
      if (plot_kind == "ari-table") doc = svg::plot_ari_table(t, !no_timestamp);
      else if (plot_kind == "convergence") doc = svg::plot_convergence(t, !no_timestamp);
      else if (plot_kind == "diagnostics") doc = svg::plot_diagnostics(t, !no_timestamp);
      else doc = svg::plot_scatter(t, !no_timestamp);
      emit(output_path(g.out, plot_kind + ".svg"), doc);
      return 0;
    }

    if (sub == diagnose) {
      std::optional<InteractionHypergraph> h;
      std::optional<BlockModelSpec> spec;
      std::string regime = "file";
      Index n = 0, m = 0;
      if (!diag_input.empty()) {
        if (diag_communities.empty()) throw UsageError("--input needs --communities");
        h = read_interactions_file(diag_input);
        spec = observed_spec(*h, diag_communities);
      } else {
        const SimulationDesign design = diag_flags.design(g.seed);
        DesignInstance inst = generate_design(design, design_stream(design));
        h = std::move(inst.hypergraph);
        spec = std::move(inst.spec);
        regime = to_string(design.regime);
      }
      n = h->num_nodes();
      m = h->num_interactions();
      const IncidenceMatrix r(*h);
      const ExpectedGramStructure s = expected_gram_structure(*spec);
      const SignalGap gap = signal_gap(*spec, s);
      const EmbeddingResult e = embed_interactions(r, spec->num_classes(), make_selection(parse_selection(diag_mode), s, gap));
      const TheoreticalEmbedding theo = theoretical_embedding(*spec);
      const DiagnosticsReport rep = diagnostics(r, *spec, e, theo);
      const std::vector<std::pair<std::string, double>> metrics{
          {"norm_R_Gamma", rep.norm_r_gamma},
          {"norm_hollow", rep.norm_hollow},
          {"norm_SW", rep.norm_sw},
          {"norm_Sinv", rep.norm_sinv},
          {"norm_V_2inf", rep.norm_v_2inf},
          {"norm_VS_2inf", rep.norm_vs_2inf},
          {"delta", gap.delta},
          {"b", gap.b},
          {"separation", type_separation(theo.embedding, type_ids(spec->type_matrix()))},
          {"projected_residual", projected_residual_norm(r, *spec, theo.u)},
      };
      std::ostringstream out;
      out << "n,m,regime,seed,metric,value\n";
      for (const auto& [name, value] : metrics)
        out << n << ',' << m << ',' << regime << ',' << g.seed << ',' << name << ',' << detail::format_double(value)
            << '\n';
      emit(output_path(g.out, "diagnostics.csv"), out.str());
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const SelectionError& e) {
    std::cerr << "selection failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
