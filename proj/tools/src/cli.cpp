#include "netcrop_cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <netcrop/netcrop.hpp>

namespace netcrop::cli {

namespace {

using Json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string edges = "-";
  int index_base = 0;
  std::optional<double> p_test;
  std::optional<std::size_t> overlap;
  std::optional<std::size_t> subnets;
  int reps = 1;
  std::string loss = "sq";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string report = "netcrop-report.json";
  std::string config;
  bool record_timings = false;
  bool quiet = false;
};

struct SimFlags {
  std::string model = "sbm";
  std::size_t n = 200;
  int k = 3;
  int d = 2;
  std::optional<double> alpha;
  double beta = 0.3;
  double zeta = 0.75;
  std::optional<double> mean_degree;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string truth;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--edges", f.edges, "Edge list path, '-' for standard input");
  cmd->add_option("--index-base", f.index_base, "First node id in the edge list (0 or 1)")->check(CLI::IsMember({0, 1}));
  cmd->add_option("--ptest", f.p_test, "Target fraction of node pairs held out");
  cmd->add_option("--overlap", f.overlap, "Overlap size o (with --subnets instead of --ptest)");
  cmd->add_option("--subnets", f.subnets, "Subnetwork count s (with --overlap)");
  cmd->add_option("--reps", f.reps, "Repetitions R")->check(CLI::PositiveNumber);
  cmd->add_option("--loss", f.loss, "Loss: sq, dev or auc")->check(CLI::IsMember({"sq", "dev", "auc"}));
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--report", f.report, "Report path");
  cmd->add_option("--config", f.config, "JSON file with solver settings");
  cmd->add_flag("--record-timings", f.record_timings, "Store wall-clock phase timings in the report");
  cmd->add_flag("--quiet", f.quiet, "No progress messages on standard error");
}

template <typename T>
void read_key(const Json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw UsageError("unknown setting '" + item.key() + "' in " + where);
  }
}

EngineOptions load_options(const std::string& path) {
  EngineOptions o;
  if (path.empty()) return o;
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open config file " + path);
  Json doc;
  try {
    doc = Json::parse(file);
    check_keys(doc, {"eigen", "kmeans", "spherical_backend", "matching", "dcbm_estimator", "latent"}, "config");
    if (doc.contains("eigen")) {
      const Json& e = doc["eigen"];
      check_keys(e, {"dense_threshold", "tolerance", "max_restarts", "krylov_dim"}, "eigen");
      read_key(e, "dense_threshold", o.clustering.eigen.dense_threshold);
      read_key(e, "tolerance", o.clustering.eigen.tolerance);
      read_key(e, "max_restarts", o.clustering.eigen.max_restarts);
      read_key(e, "krylov_dim", o.clustering.eigen.krylov_dim);
    }
    if (doc.contains("kmeans")) {
      const Json& k = doc["kmeans"];
      check_keys(k, {"restarts", "max_iterations", "tolerance"}, "kmeans");
      read_key(k, "restarts", o.clustering.kmeans.restarts);
      read_key(k, "max_iterations", o.clustering.kmeans.max_iterations);
      read_key(k, "tolerance", o.clustering.kmeans.tolerance);
    }
    if (doc.contains("spherical_backend")) {
      const auto v = doc["spherical_backend"].get<std::string>();
      if (v != "kmeans" && v != "kmedian") throw UsageError("spherical_backend must be kmeans or kmedian");
      o.clustering.spherical = v == "kmeans" ? SphericalBackend::KMeans : SphericalBackend::KMedian;
    }
    if (doc.contains("matching")) {
      const auto v = doc["matching"].get<std::string>();
      if (v == "auto") {
        o.matching = MatchingRule::Auto;
      } else if (v == "bf") {
        o.matching = MatchingRule::BruteForce;
      } else if (v == "greedy") {
        o.matching = MatchingRule::Greedy;
      } else {
        throw UsageError("matching must be auto, bf or greedy");
      }
    }
    if (doc.contains("dcbm_estimator")) {
      const auto v = doc["dcbm_estimator"].get<std::string>();
      if (v != "poisson" && v != "eigen") throw UsageError("dcbm_estimator must be poisson or eigen");
      o.dcbm = v == "poisson" ? DcbmEstimator::Poisson : DcbmEstimator::Eigen;
    }
    if (doc.contains("latent")) {
      const Json& l = doc["latent"];
      check_keys(l, {"max_iterations", "tolerance", "radius", "initial_step"}, "latent");
      read_key(l, "max_iterations", o.latent.max_iterations);
      read_key(l, "tolerance", o.latent.tolerance);
      read_key(l, "radius", o.latent.radius);
      read_key(l, "initial_step", o.latent.initial_step);
    }
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad config file: ") + e.what());
  }
  return o;
}

AdjacencyMatrix load_graph(const CommonFlags& f, std::istream& in) {
  EdgeListOptions opts;
  opts.index_base = f.index_base;
  if (f.edges == "-") return load_edge_list(in, opts);
  std::ifstream file(f.edges);
  if (!file) throw DomainError("cannot open edge list " + f.edges);
  return load_edge_list(file, opts);
}

CvConfig make_config(const CommonFlags& f, std::size_t n) {
  const bool explicit_split = f.overlap.has_value() || f.subnets.has_value();
  if (explicit_split && f.p_test) throw UsageError("give either --ptest or --overlap/--subnets, not both");
  if (explicit_split && !(f.overlap && f.subnets)) throw UsageError("--overlap and --subnets go together");
  CvConfig c = explicit_split ? CvConfig::from_overlap(n, *f.overlap, *f.subnets)
                              : CvConfig::from_test_fraction(n, f.p_test.value_or(default_test_fraction(n)));
  c.repetitions = f.reps;
  c.loss = parse_loss(f.loss);
  c.seed = f.seed;
  c.threads = f.threads;
  return c;
}

std::vector<double> parse_tau_grid(const std::string& text) {
  std::vector<double> taus;
  try {
    if (text.find(':') != std::string::npos) {
      // start:stop:step
      std::vector<double> parts;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
      if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw UsageError("bad tau range " + text);
      const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
      for (long i = 0; i <= count; ++i) {
        const double t = parts[0] + static_cast<double>(i) * parts[2];
        taus.push_back(std::round(t * 1e9) / 1e9);
      }
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) taus.push_back(std::stod(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad tau grid '" + text + "'");
  }
  if (taus.empty()) throw UsageError("empty tau grid");
  return taus;
}

void print_summary(std::ostream& out, const SelectionReport& report) {
  out << "winner\t" << report.final_winner.name() << '\n';
  const auto names = candidate_labels(report);
  const auto means = report.mean_losses();
  out << std::setprecision(10);
  for (std::size_t c = 0; c < names.size(); ++c) out << names[c] << '\t' << means[c] << '\n';
}

void finish(const CommonFlags& f, const SelectionReport& report, std::ostream& out, std::ostream& err) {
  std::ofstream file(f.report, std::ios::binary);
  if (!file) throw DomainError("cannot write report " + f.report);
  write_report(file, report);
  print_summary(out, report);
  if (!f.quiet) err << "netcrop: report written to " << f.report << '\n';
}

template <typename Pipeline>
int run_selection(const std::string& name, const CommonFlags& f, std::istream& in, std::ostream& out,
                  std::ostream& err, Pipeline&& pipeline) {
  const EngineOptions options = [&] {
    EngineOptions o = load_options(f.config);
    o.record_timings = f.record_timings;
    return o;
  }();
  const AdjacencyMatrix a = load_graph(f, in);
  const CvConfig config = make_config(f, a.size());
  if (!f.quiet) {
    err << "netcrop: " << name << " on " << a.size() << " nodes, " << a.edge_count() << " edges; o=" << config.o
        << " s=" << config.s << " m=" << config.m << " R=" << config.repetitions << '\n';
  }
  SelectionReport report = pipeline(a, config, options);
  report.config.emplace(report.config.begin() + 1, "edges", f.edges);
  report.config.emplace(report.config.begin() + 2, "index_base", static_cast<std::int64_t>(f.index_base));
  finish(f, report, out, err);
  return kOk;
}

void write_truth_csv(const std::string& path, const std::string& header_prefix, const Eigen::MatrixXd& values,
                     const std::vector<int>* labels, int base) {
  std::ofstream file(path);
  if (!file) throw DomainError("cannot write " + path);
  file << std::setprecision(17) << "node";
  if (labels) file << ",label";
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    file << ',' << header_prefix;
    if (values.cols() > 1 || !labels) file << c + 1;
  }
  file << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    file << i + base;
    if (labels) file << ',' << (*labels)[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < values.cols(); ++c) file << ',' << values(i, c);
    file << '\n';
  }
}

int run_simulate(const SimFlags& f, std::ostream& out, std::ostream& err, bool quiet) {
  Rng rng(f.seed);
  AdjacencyMatrix a;
  if (f.model == "sbm" || f.model == "dcbm") {
    const bool dc = f.model == "dcbm";
    if (f.alpha && f.mean_degree) throw UsageError("give either --alpha or --mean-degree");
    const double alpha = f.mean_degree ? alpha_for_mean_degree(f.n, f.k, f.beta, *f.mean_degree, dc) : f.alpha.value_or(0.1);
    BlockmodelSpec spec{f.n, planted_partition_B(f.k, alpha, f.beta), dc ? inverse_beta_degrees() : DegreeSampler{}};
    BlockmodelSample s = sample_blockmodel(spec, std::nullopt, rng);
    if (!f.truth.empty()) write_truth_csv(f.truth, "psi", s.psi, &s.labels, 0);
    a = std::move(s.adjacency);
  } else if (f.model == "rdpg") {
    RdpgSample s = sample_rdpg({f.n, f.d, f.zeta}, rng);
    if (!f.truth.empty()) write_truth_csv(f.truth, "x", s.X, nullptr, 0);
    a = std::move(s.adjacency);
  } else if (f.model == "latent") {
    LatentSample s = sample_latent({f.n, f.d, f.alpha.value_or(1.0)}, rng);
    if (!f.truth.empty()) write_truth_csv(f.truth, "z", s.Z, nullptr, 0);
    a = std::move(s.adjacency);
  } else {
    throw UsageError("unknown model " + f.model);
  }
  if (f.out == "-") {
    write_edge_list(out, a);
  } else {
    std::ofstream file(f.out);
    if (!file) throw DomainError("cannot write " + f.out);
    write_edge_list(file, a);
  }
  if (!quiet) err << "netcrop: simulated " << f.model << " with " << a.size() << " nodes, " << a.edge_count() << " edges\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"NETCROP network cross-validation"};
  app.name("netcrop");
  app.require_subcommand(1);

  CommonFlags bm, rdpg, latent, rsc;
  int kmax = 6;
  int rdpg_dmax = 10;
  int latent_dmax = 5;
  int rsc_k = 2;
  std::string tau_grid = "0:2:0.1";
  std::string labels_out;
  SimFlags sim;
  bool sim_quiet = false;
  int sim_threads = 1;

  auto* c_bm = app.add_subcommand("select-blockmodel", "Choose K and SBM vs DCBM");
  add_common(c_bm, bm);
  c_bm->add_option("--kmax", kmax, "Largest candidate K")->check(CLI::PositiveNumber);

  auto* c_rdpg = app.add_subcommand("select-rdpg", "Choose the RDPG dimension");
  add_common(c_rdpg, rdpg);
  c_rdpg->add_option("--dmax", rdpg_dmax, "Largest candidate dimension")->check(CLI::PositiveNumber);

  auto* c_lat = app.add_subcommand("select-latent", "Choose the latent space dimension");
  add_common(c_lat, latent);
  c_lat->add_option("--dmax", latent_dmax, "Largest candidate dimension")->check(CLI::PositiveNumber);

  auto* c_rsc = app.add_subcommand("tune-rsc", "Choose tau for regularized spectral clustering");
  add_common(c_rsc, rsc);
  c_rsc->add_option("--k", rsc_k, "Number of communities")->check(CLI::PositiveNumber);
  c_rsc->add_option("--tau-grid", tau_grid, "Comma list or start:stop:step");
  c_rsc->add_option("--labels-out", labels_out, "CSV of stitched labels at the chosen tau");

  auto* c_sim = app.add_subcommand("simulate", "Sample a synthetic network");
  c_sim->add_option("--model", sim.model, "sbm, dcbm, rdpg or latent")
      ->check(CLI::IsMember({"sbm", "dcbm", "rdpg", "latent"}));
  c_sim->add_option("--n", sim.n, "Node count")->check(CLI::PositiveNumber);
  c_sim->add_option("--k", sim.k, "Communities (sbm, dcbm)")->check(CLI::PositiveNumber);
  c_sim->add_option("--d", sim.d, "Dimension (rdpg, latent)")->check(CLI::PositiveNumber);
  c_sim->add_option("--alpha", sim.alpha, "Within-community probability, or latent intercept");
  c_sim->add_option("--beta", sim.beta, "Out-in ratio");
  c_sim->add_option("--zeta", sim.zeta, "RDPG sparsity scale");
  c_sim->add_option("--mean-degree", sim.mean_degree, "Pick alpha for this expected mean degree (sbm, dcbm)");
  c_sim->add_option("--seed", sim.seed, "Seed");
  c_sim->add_option("--out", sim.out, "Edge list path, '-' for standard output");
  c_sim->add_option("--truth", sim.truth, "CSV of true labels or positions");
  c_sim->add_option("--threads", sim_threads, "Accepted for symmetry; sampling is sequential");
  c_sim->add_flag("--quiet", sim_quiet, "No progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "netcrop: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (c_bm->parsed()) {
      return run_selection("select-blockmodel", bm, in, out, err, [&](const auto& a, const auto& c, const auto& o) {
        return select_blockmodel(a, c, kmax, o);
      });
    }
    if (c_rdpg->parsed()) {
      return run_selection("select-rdpg", rdpg, in, out, err, [&](const auto& a, const auto& c, const auto& o) {
        return select_rdpg_dim(a, c, rdpg_dmax, o);
      });
    }
    if (c_lat->parsed()) {
      return run_selection("select-latent", latent, in, out, err, [&](const auto& a, const auto& c, const auto& o) {
        return select_latent_dim(a, c, latent_dmax, o);
      });
    }
    if (c_rsc->parsed()) {
      const auto taus = parse_tau_grid(tau_grid);
      return run_selection("tune-rsc", rsc, in, out, err, [&](const auto& a, const auto& c, const auto& o) {
        RscSelection r = tune_rsc(a, c, rsc_k, taus, o);
        if (!labels_out.empty()) {
          std::ofstream file(labels_out);
          if (!file) throw DomainError("cannot write " + labels_out);
          file << "node,label\n";
          for (std::size_t i = 0; i < r.labels.size(); ++i) file << i + static_cast<std::size_t>(rsc.index_base) << ',' << r.labels[i] << '\n';
        }
        return std::move(r.report);
      });
    }
    return run_simulate(sim, out, err, sim_quiet);
  } catch (const UsageError& e) {
    err << "netcrop: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverError& e) {
    err << "netcrop: numerical failure: " << e.what() << " (residual " << e.achieved_residual() << ")\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "netcrop: numerical failure: " << e.what() << " (iteration " << e.iteration() << ")\n";
    return kNumerical;
  } catch (const ConsistencyError& e) {
    err << "netcrop: internal error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ParseError& e) {
    err << "netcrop: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "netcrop: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace netcrop::cli
