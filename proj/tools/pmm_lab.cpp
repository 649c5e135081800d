// pmm-lab: command-line front end for the facilitated-exclusion laboratory.
// Subcommands: validate, classify, connect, exact, simulate, hydro, entropy,
// rerun. Every run writes a manifest that regenerates its outputs.

#include <bit>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pmm/classify.hpp"
#include "pmm/connect.hpp"
#include "pmm/entropy.hpp"
#include "pmm/exact.hpp"
#include "pmm/hydro.hpp"
#include "pmm/kmc.hpp"
#include "pmm/lattice.hpp"
#include "pmm/manifest.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::json;

int default_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PMM_LAB_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 12345;
}

pmm::ConstraintFamily load_family(const std::string& path) {
  if (path.empty()) return pmm::pmm_family();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open family file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return pmm::family_from_json(buf.str());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void emit_manifest(const std::string& prefix, const std::string& subcommand,
                   const std::vector<std::string>& argv, std::uint64_t seed,
                   const pmm::ConstraintFamily& family,
                   std::vector<std::string> outputs) {
  pmm::RunManifest m;
  m.subcommand = subcommand;
  m.arguments = argv;
  m.seed = seed;
  m.family_fingerprint = pmm::fingerprint_hex(family.fingerprint());
  m.outputs = std::move(outputs);
  m.write(prefix + "_manifest.json");
}

int dispatch(const std::vector<std::string>& argv);

struct CommonOpts {
  std::string family_path;
  std::string out_prefix = "pmm";
  int jobs = 0;
  std::uint64_t seed = default_seed();

  int effective_jobs() const { return jobs > 0 ? jobs : default_jobs(); }
};

int cmd_validate(const CommonOpts& common, const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);
  auto report = pmm::validate_family(family);
  json doc;
  doc["nonnegative"] = report.nonnegative;
  doc["swap_symmetric"] = report.swap_symmetric;
  doc["positivity"] = report.positivity;
  doc["structural"] = report.structural;
  doc["failures"] = report.failures;
  doc["pass"] = report.pass();
  std::string out = common.out_prefix + "_validate.json";
  write_text(out, doc.dump(2) + "\n");
  emit_manifest(common.out_prefix, "validate", argv, common.seed, family, {out});
  std::cout << doc.dump(2) << "\n";
  return report.pass() ? 0 : 1;
}

int cmd_classify(const CommonOpts& common, const std::string& config_text,
                 const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);
  auto ep = pmm::EventuallyPeriodic::parse(config_text);
  auto label = pmm::classify_infinite(ep);
  json doc;
  doc["config"] = ep.to_string();
  doc["label"] = label.to_string();
  if (label.k >= 0) doc["k"] = label.k;
  std::string out = common.out_prefix + "_classify.json";
  write_text(out, doc.dump(2) + "\n");
  emit_manifest(common.out_prefix, "classify", argv, common.seed, family, {out});
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_connect(const CommonOpts& common, int certify_n, bool no_planner,
                const std::string& from, const std::string& to,
                const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);

  if (certify_n > 0) {
    auto report = pmm::certify_connectivity(family, certify_n, !no_planner,
                                            common.effective_jobs());
    json doc;
    doc["window_length"] = report.window_length;
    doc["cluster_states"] = report.cluster_states;
    doc["counts_checked"] = report.counts_checked;
    doc["pairs_connected"] = report.pairs_connected;
    doc["planner_pairs"] = report.planner_pairs;
    doc["failures"] = report.failures;
    doc["pass"] = report.pass();
    std::string out = common.out_prefix + "_certificate.json";
    write_text(out, doc.dump(2) + "\n");
    emit_manifest(common.out_prefix, "connect", argv, common.seed, family, {out});
    std::cout << doc.dump(2) << "\n";
    return report.pass() ? 0 : 1;
  }

  if (from.empty() || to.empty()) {
    std::cerr << "connect needs either --certify N or --from/--to\n";
    return 2;
  }
  auto a = pmm::Configuration::from_string(from);
  auto b = pmm::Configuration::from_string(to);
  emit_manifest(common.out_prefix, "connect", argv, common.seed, family, {});
  if (a.count() != b.count() || !pmm::connected(family, a, b)) {
    std::cout << "unreachable\n";
    return 1;
  }
  if (pmm::has_mobile_cluster(a) && pmm::has_mobile_cluster(b)) {
    auto path = pmm::plan_transport(family, a, b);
    for (std::size_t i = 0; i < path.moves.size(); ++i)
      std::cout << (i ? " " : "") << path.moves[i];
    std::cout << "\n";
  } else {
    std::cout << "\n";  // reachable with no planned moves (identical states)
  }
  return 0;
}

int cmd_exact(const CommonOpts& common, int ring, int interval,
              std::optional<int> count, double rho, double tol,
              const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);
  const bool is_ring = ring > 0;
  const int length = is_ring ? ring : interval;
  if (length <= 0) {
    std::cerr << "exact needs --ring L or --interval L\n";
    return 2;
  }
  auto model = pmm::build_model(
      family, length, is_ring ? pmm::Boundary::Periodic : pmm::Boundary::Empty,
      count);

  json doc;
  doc["length"] = length;
  doc["boundary"] = is_ring ? "periodic" : "empty";
  doc["states"] = model.n_states();
  auto& classes = doc["classes"] = json::array();
  for (const auto& members : model.classes) {
    json c;
    c["size"] = members.size();
    c["frozen"] = model.state_frozen[members[0]] && members.size() == 1;
    c["count"] = std::popcount(model.states[members[0]]);
    classes.push_back(c);
  }

  auto measures = pmm::stationary_measures(model);
  double worst_stat = 0.0, worst_balance = 0.0, worst_spread = 0.0;
  for (const auto& nu : measures) {
    worst_stat = std::max(worst_stat, pmm::check_stationary(model, nu));
    worst_balance = std::max(worst_balance, pmm::check_detailed_balance(model, nu));
    worst_spread =
        std::max(worst_spread, pmm::check_exchangeability(model, nu).max_spread);
  }
  doc["residuals"]["extremal_stationarity"] = worst_stat;
  doc["residuals"]["extremal_detailed_balance"] = worst_balance;
  doc["spreads"]["extremal_exchangeability"] = worst_spread;

  bool pass = worst_stat <= tol && worst_balance <= tol && worst_spread <= tol;
  if (is_ring) {
    auto mu = pmm::bernoulli_product(model, rho);
    doc["residuals"]["product_stationarity"] = pmm::check_stationary(model, mu);
    doc["residuals"]["product_detailed_balance"] =
        pmm::check_detailed_balance(model, mu);
    doc["spreads"]["product_exchangeability"] =
        pmm::check_exchangeability(model, mu).max_spread;
    auto d = pmm::decompose(model, mu);
    doc["decomposition"]["alpha_frozen"] = d.alpha_frozen;
    doc["decomposition"]["alpha_ergodic"] = d.alpha_ergodic;
    doc["decomposition"]["residual_frozen"] = d.residual_frozen;
    doc["decomposition"]["residual_ergodic"] = d.residual_ergodic;
    pass = pass && doc["residuals"]["product_stationarity"].get<double>() <= tol &&
           doc["residuals"]["product_detailed_balance"].get<double>() <= tol;
  }
  doc["tolerance"] = tol;
  doc["pass"] = pass;

  std::string out = common.out_prefix + "_exact.json";
  write_text(out, doc.dump(2) + "\n");
  emit_manifest(common.out_prefix, "exact", argv, common.seed, family, {out});
  std::cout << doc.dump(2) << "\n";
  return pass ? 0 : 1;
}

int cmd_simulate(const CommonOpts& common, int ring, double rho,
                 const std::string& init, double horizon, int samples,
                 int replicas, const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);

  pmm::Configuration initial;
  if (!init.empty()) {
    std::string bits = init;
    std::ifstream in(init);
    if (in) std::getline(in, bits);
    initial = pmm::Configuration::from_string(bits, 0, pmm::Boundary::Periodic);
  } else {
    if (ring <= 0) {
      std::cerr << "simulate needs --ring L (with --rho) or --init\n";
      return 2;
    }
    initial = pmm::sample_profile_ring(ring, std::vector<double>(ring, rho),
                                       common.seed, 0xfeedu);
  }

  pmm::RunOptions opt;
  opt.horizon = horizon;
  opt.samples = samples;
  auto merged = pmm::run_ensemble(family, initial, opt, replicas, common.seed,
                                  common.effective_jobs());

  std::ostringstream csv;
  csv << "time,site,mean_occupation\n";
  for (std::size_t s = 0; s < merged.sample_times.size(); ++s)
    for (std::size_t j = 0; j < merged.mean_snapshots[s].size(); ++j)
      csv << merged.sample_times[s] << "," << j << ","
          << merged.mean_snapshots[s][j] << "\n";
  for (std::size_t j = 0; j < merged.mean_time_average.bins.size(); ++j)
    csv << "time_average," << j << "," << merged.mean_time_average.bins[j]
        << "\n";

  std::string out_csv = common.out_prefix + "_profile.csv";
  write_text(out_csv, csv.str());

  json doc;
  doc["ring"] = initial.length();
  doc["replicas"] = replicas;
  doc["horizon"] = horizon;
  doc["samples"] = samples;
  doc["seed"] = common.seed;
  doc["total_events"] = merged.total_events;
  std::string out_json = common.out_prefix + "_run.json";
  write_text(out_json, doc.dump(2) + "\n");
  emit_manifest(common.out_prefix, "simulate", argv, common.seed, family,
                {out_csv, out_json});
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_hydro(const CommonOpts& common, int lattice, int replicas, double tmacro,
              const std::string& profile_name,
              const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);
  pmm::InitialProfile profile;
  if (profile_name == "step")
    profile = pmm::InitialProfile::Step;
  else if (profile_name == "bump")
    profile = pmm::InitialProfile::Bump;
  else if (profile_name == "flat")
    profile = pmm::InitialProfile::Flat;
  else {
    std::cerr << "unknown profile: " << profile_name << "\n";
    return 2;
  }

  auto result = pmm::hydro_experiment(family, lattice, replicas, tmacro, profile,
                                      common.seed, common.effective_jobs());

  std::ostringstream csv;
  csv << "block,empirical,pde\n";
  for (std::size_t b = 0; b < result.empirical_blocks.size(); ++b)
    csv << b << "," << result.empirical_blocks[b] << "," << result.pde_blocks[b]
        << "\n";
  std::string out_csv = common.out_prefix + "_hydro.csv";
  write_text(out_csv, csv.str());

  json doc;
  doc["lattice_sites"] = result.lattice_sites;
  doc["replicas"] = result.replicas;
  doc["t_macro"] = result.t_macro;
  doc["l2_discrepancy"] = result.discrepancy.l2;
  doc["sup_discrepancy"] = result.discrepancy.sup;
  doc["blocks"] = result.discrepancy.blocks;
  doc["total_events"] = result.total_events;
  std::string out_json = common.out_prefix + "_hydro.json";
  write_text(out_json, doc.dump(2) + "\n");
  emit_manifest(common.out_prefix, "hydro", argv, common.seed, family,
                {out_csv, out_json});
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_entropy(const CommonOpts& common, int ring, double rho,
                const std::string& measure_kind, std::optional<int> count,
                const std::vector<std::string>& argv) {
  auto family = load_family(common.family_path);
  auto model = pmm::build_model(family, ring, pmm::Boundary::Periodic, count);

  pmm::Measure nu;
  if (measure_kind == "mu") {
    nu = pmm::bernoulli_product(model, rho);
  } else if (measure_kind == "uniform-class") {
    auto measures = pmm::stationary_measures(model);
    std::size_t best = 0;
    for (std::size_t i = 0; i < model.classes.size(); ++i)
      if (model.classes[i].size() > model.classes[best].size()) best = i;
    nu = measures[best];
  } else {
    std::ifstream in(measure_kind);
    if (!in) {
      std::cerr << "unknown measure (use mu, uniform-class, or a file): "
                << measure_kind << "\n";
      return 2;
    }
    auto doc = json::parse(in);
    nu.w = doc.at("weights").get<std::vector<double>>();
    if (static_cast<int>(nu.w.size()) != model.n_states()) {
      std::cerr << "weight vector has the wrong length\n";
      return 2;
    }
    nu.normalize();
  }

  auto report = pmm::entropy_report(model, nu, rho);
  json doc;
  doc["ring"] = ring;
  doc["rho"] = rho;
  doc["relative_entropy"] = report.relative_entropy;
  doc["alpha"] = report.alpha;
  doc["beta"] = report.beta;
  doc["balance_residual"] = report.balance_residual;
  std::string out = common.out_prefix + "_entropy.json";
  write_text(out, doc.dump(2) + "\n");
  emit_manifest(common.out_prefix, "entropy", argv, common.seed, family, {out});
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_rerun(const std::string& manifest_path) {
  auto manifest = pmm::RunManifest::read(manifest_path);
  return dispatch(manifest.arguments);
}

int dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"Laboratory for facilitated exclusion dynamics"};
  app.require_subcommand(1);

  CommonOpts common;
  app.fallthrough();  // global options may follow the subcommand name
  app.add_option("--family", common.family_path,
                 "constraint family as a JSON rate table (default: built-in)");
  app.add_option("--out", common.out_prefix, "output file prefix");
  app.add_option("--jobs", common.jobs, "worker pool size (0 = all cores)");
  app.add_option("--seed", common.seed, "random seed (or env PMM_LAB_SEED)");

  auto* validate = app.add_subcommand("validate", "check a constraint family");

  auto* classify = app.add_subcommand("classify", "label an infinite configuration");
  std::string config_text;
  classify->add_option("--config", config_text, "e.g. \"(100)* 11 (100)*\"")
      ->required();

  auto* connect = app.add_subcommand("connect", "reachability and transport");
  int certify_n = 0;
  bool no_planner = false;
  std::string from, to;
  connect->add_option("--certify", certify_n, "exhaustive sweep at this window length");
  connect->add_flag("--no-planner", no_planner, "skip planner replay in the sweep");
  connect->add_option("--from", from, "start occupation string");
  connect->add_option("--to", to, "target occupation string");

  auto* exact = app.add_subcommand("exact", "generator, classes and measures");
  int ring = 0, interval = 0;
  std::optional<int> count;
  double rho = 0.5, tol = 1e-10;
  exact->add_option("--ring", ring, "ring length");
  exact->add_option("--interval", interval, "empty-boundary window length");
  exact->add_option("--count", count, "restrict to one particle count");
  exact->add_option("--rho", rho, "product-measure density");
  exact->add_option("--tol", tol, "acceptance tolerance");

  auto* simulate = app.add_subcommand("simulate", "event-driven dynamics on a ring");
  int sim_ring = 0, samples = 10, replicas = 1;
  double sim_rho = 0.5, horizon = 100.0;
  std::string init;
  simulate->add_option("--ring", sim_ring, "ring length");
  simulate->add_option("--rho", sim_rho, "initial density");
  simulate->add_option("--init", init, "initial occupation string or file");
  simulate->add_option("--horizon", horizon, "time horizon");
  simulate->add_option("--samples", samples, "profile sample count");
  simulate->add_option("--replicas", replicas, "independent replicas");

  auto* hydro = app.add_subcommand("hydro", "diffusive-scaling comparison");
  int lattice = 512, h_replicas = 200;
  double tmacro = 0.05;
  std::string profile_name = "step";
  hydro->add_option("--L", lattice, "lattice sites");
  hydro->add_option("--replicas", h_replicas, "independent replicas");
  hydro->add_option("--tmacro", tmacro, "macroscopic time");
  hydro->add_option("--profile", profile_name, "step | bump | flat");

  auto* entropy = app.add_subcommand("entropy", "entropy functionals on a ring");
  int e_ring = 5;
  double e_rho = 0.5;
  std::string measure_kind = "mu";
  std::optional<int> e_count;
  entropy->add_option("--ring", e_ring, "ring length");
  entropy->add_option("--rho", e_rho, "reference density");
  entropy->add_option("--measure", measure_kind, "mu | uniform-class | file");
  entropy->add_option("--count", e_count, "restrict to one particle count");

  auto* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest");
  std::string manifest_path;
  rerun->add_option("--manifest", manifest_path, "manifest file")->required();

  std::vector<const char*> cargs;
  cargs.reserve(argv.size());
  for (const auto& a : argv) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(common, argv);
    if (app.got_subcommand(classify)) return cmd_classify(common, config_text, argv);
    if (app.got_subcommand(connect))
      return cmd_connect(common, certify_n, no_planner, from, to, argv);
    if (app.got_subcommand(exact))
      return cmd_exact(common, ring, interval, count, rho, tol, argv);
    if (app.got_subcommand(simulate))
      return cmd_simulate(common, sim_ring, sim_rho, init, horizon, samples,
                          replicas, argv);
    if (app.got_subcommand(hydro))
      return cmd_hydro(common, lattice, h_replicas, tmacro, profile_name, argv);
    if (app.got_subcommand(entropy))
      return cmd_entropy(common, e_ring, e_rho, measure_kind, e_count, argv);
    if (app.got_subcommand(rerun)) return cmd_rerun(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dispatch(args);
}
