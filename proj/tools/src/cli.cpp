#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "herdscope/config.hpp"
#include "herdscope/error.hpp"
#include "herdscope/ingest.hpp"
#include "herdscope/ledger.hpp"
#include "herdscope/metrics.hpp"
#include "herdscope/network.hpp"
#include "herdscope/regression.hpp"
#include "herdscope/simulator.hpp"
#include "herdscope/stats.hpp"
#include "json.hpp"
#include "output.hpp"

#ifndef HERDSCOPE_VERSION
#define HERDSCOPE_VERSION "0.0.0"
#endif

namespace herdscope::cli {
namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

constexpr std::string_view kConfigEnv = "HERDSCOPE_CONFIG";

// Keys read by the command line itself rather than a library config.
constexpr std::string_view kToolKeys[] = {"threads",  "strictness", "models",         "percentiles", "coh_grid",
                                          "covariance", "tol",      "max_iter",       "network_format",
                                          "min_edges",  "p_grid"};

std::string format_num(double x) { return fmt::format("{}", x); }

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if constexpr (std::is_same_v<T, int>) {
      out.push_back(parse_int_value(key, item));
    } else {
      out.push_back(parse_real_value(key, item));
    }
  }
  if (out.empty()) throw ConfigError(std::string(key) + ": expected a comma-separated list");
  return out;
}

// Flags become config keys so that the config file and the command line
// share one validation path; flags win.
class Settings {
 public:
  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto* opt = app->add_option(flag, storage_[key], help);
    bound_.emplace_back(opt, key);
  }

  KeyValueConfig resolve(const std::string& config_path) const {
    KeyValueConfig kv;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnv.data()); env != nullptr) path = env;
    }
    if (!path.empty()) kv = KeyValueConfig::load(path);
    check_keys(kv);
    for (const auto& [opt, key] : bound_) {
      if (opt->count() > 0) kv.set(key, storage_.at(key));
    }
    return kv;
  }

 private:
  static void check_keys(const KeyValueConfig& kv) {
    std::set<std::string, std::less<>> known(std::begin(kToolKeys), std::end(kToolKeys));
    known.insert(std::begin(kMetricsConfigKeys), std::end(kMetricsConfigKeys));
    for (auto k : sim_config_keys()) known.emplace(k);
    for (const auto& [k, _] : kv.values()) {
      if (!known.contains(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

  std::map<std::string, std::string> storage_;
  std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

unsigned threads_of(const KeyValueConfig& kv) {
  const int t = kv.get("threads") ? parse_int_value("threads", *kv.get("threads")) : 1;
  if (t < 1) throw ConfigError("threads must be at least 1");
  return static_cast<unsigned>(t);
}

Strictness strictness_of(const KeyValueConfig& kv) {
  const auto v = kv.get("strictness").value_or("strict");
  if (v == "strict") return Strictness::strict;
  if (v == "skip_invalid") return Strictness::skip_invalid;
  throw ConfigError("strictness: unknown value '" + v + "'; expected strict or skip_invalid");
}

FitOptions fit_options_of(const KeyValueConfig& kv) {
  FitOptions o;
  if (auto v = kv.get("tol")) o.tol = parse_real_value("tol", *v);
  if (auto v = kv.get("max_iter")) o.max_iter = parse_int_value("max_iter", *v);
  if (auto v = kv.get("covariance")) {
    if (*v == "hc1") {
      o.flavor = CovarianceFlavor::hc1;
    } else if (*v == "hc0") {
      o.flavor = CovarianceFlavor::hc0;
    } else {
      throw ConfigError("covariance: unknown value '" + *v + "'; expected hc0 or hc1");
    }
  }
  if (!(o.tol > 0.0)) throw ConfigError("tol must be positive");
  if (o.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  return o;
}

std::vector<double> default_coh_grid() {
  std::vector<double> g;
  for (int i = -10; i <= 10; ++i) g.push_back(i / 20.0);
  return g;
}

struct Manifest {
  std::string command;
  KeyValueConfig config;
  std::vector<std::filesystem::path> inputs;
  std::map<std::string, std::size_t> dropped;
  Clock::time_point start = Clock::now();

  void write_into(OutputSet& outputs) {
    json j;
    j["tool"] = "herdscope";
    j["version"] = version();
    j["command"] = command;
    json cfg = json::object();
    for (const auto& [k, v] : config.values()) cfg[k] = v;
    j["config"] = std::move(cfg);
    json in = json::array();
    for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    j["inputs"] = std::move(in);
    json out = json::array();
    for (const auto& n : outputs.names()) out.push_back({{"path", n}, {"sha256", outputs.digest(n)}});
    j["outputs"] = std::move(out);
    json drop = json::object();
    for (const auto& [k, v] : dropped) drop[k] = v;
    j["dropped"] = std::move(drop);
    j["duration_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
    const std::string text = j.dump(2) + "\n";
    outputs.write("manifest.json", [&](std::ostream& o) { o << text; });
  }
};

struct LoadedData {
  ListingTable listings;
  ContributionTable contributions;
  std::vector<Rejection> listing_rejections;
  std::vector<Rejection> contribution_rejections;
};

LoadedData load_inputs(const std::string& listings_path, const std::string& contributions_path, Strictness s,
                       Manifest& manifest) {
  if (listings_path.empty()) throw ConfigError("--listings is required");
  if (contributions_path.empty()) throw ConfigError("--contributions is required");
  LoadedData d;
  auto l = parse_listings(std::filesystem::path(listings_path), s);
  d.listings = std::move(l.table);
  d.listing_rejections = std::move(l.rejections);
  auto c = parse_contributions(std::filesystem::path(contributions_path), d.listings, s);
  d.contributions = std::move(c.table);
  d.contribution_rejections = std::move(c.rejections);
  manifest.inputs = {listings_path, contributions_path};
  manifest.dropped["listings_rejected"] = d.listing_rejections.size();
  manifest.dropped["contributions_rejected"] = d.contribution_rejections.size();
  return d;
}

void write_rejections(OutputSet& outputs, const LoadedData& d) {
  if (d.listing_rejections.empty() && d.contribution_rejections.empty()) return;
  if (!d.listing_rejections.empty()) {
    outputs.write("listings_rejections.csv", [&](std::ostream& o) { write_rejections_csv(o, d.listing_rejections); });
  }
  if (!d.contribution_rejections.empty()) {
    outputs.write("contributions_rejections.csv",
                  [&](std::ostream& o) { write_rejections_csv(o, d.contribution_rejections); });
  }
}

struct MetricsRun {
  std::vector<MetricsRecord> records;
  std::vector<CorrelationRow> correlations;
};

MetricsRun run_metrics(const LoadedData& d, const LenderLedger& ledger, const MetricsConfig& mc, unsigned threads,
                       Manifest& manifest) {
  MetricsRun r;
  r.records = compute_metrics(d.listings, d.contributions, ledger, mc, threads);
  r.correlations = herding_correlation_report(r.records, d.listings);
  manifest.dropped["listings_without_contributions"] = d.listings.size() - r.records.size();
  manifest.dropped["coh_undefined"] = static_cast<std::size_t>(
      std::count_if(r.records.begin(), r.records.end(), [](const MetricsRecord& m) { return !m.coh; }));
  return r;
}

struct FitRun {
  SuiteResult suite;
  std::vector<CurvePoint> curve;
  bool has_curve = false;
};

FitRun run_fit(const std::vector<MetricsRecord>& records, const ListingTable& listings, const KeyValueConfig& kv,
               Manifest& manifest) {
  const auto models = parse_list<int>("models", kv.get("models").value_or("1,2,3,4"));
  const auto percentiles = parse_list<double>("percentiles", kv.get("percentiles").value_or("10,90"));
  const auto grid = kv.get("coh_grid") ? parse_list<double>("coh_grid", *kv.get("coh_grid")) : default_coh_grid();
  for (double p : percentiles) {
    if (!(p > 0.0 && p < 100.0)) throw ConfigError("percentile " + format_num(p) + " is outside (0,100)");
  }
  const auto options = fit_options_of(kv);

  std::size_t unmatched = 0;
  for (const auto& r : records) unmatched += listings.contains(r.listing_id) ? 0 : 1;
  manifest.dropped["metrics_without_listing"] = unmatched;

  FitRun run;
  const auto data = join_for_regression(records, listings);
  run.suite = run_repayment_suite(data, models, options);
  if (!run.suite.designs.empty()) manifest.dropped["regression_rows"] = run.suite.designs.front().dropped.size();
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i] != 4) continue;
    run.curve = predict_repayment_curve(run.suite.fits[i], run.suite.designs[i], data, grid, percentiles);
    run.has_curve = true;
  }
  return run;
}

void write_fit_outputs(OutputSet& outputs, const FitRun& run) {
  outputs.write("fit_report.json", [&](std::ostream& o) { write_fit_report_json(o, run.suite.fits); });
  outputs.write("table.txt", [&](std::ostream& o) { write_fit_table(o, run.suite.fits, run.suite.designs); });
  if (run.has_curve) outputs.write("curve.csv", [&](std::ostream& o) { write_curve_csv(o, run.curve); });
}

std::string stats_header() {
  return fmt::format("{:<14}{:>7}{:>7}{:>9}{:>10}{:>7}{:>8}{:>9}", "listing_id", "nodes", "edges", "density",
                     "imitating", "comps", "max_in", "leader");
}

std::string stats_row(const HerdingNetwork& net, const NetworkStats& s) {
  return fmt::format("{:<14}{:>7}{:>7}{:>9.4f}{:>10.4f}{:>7}{:>8}{:>9}", net.listing_id.str(), s.node_count,
                     s.edge_count, edge_density(net), s.imitating_share, s.weak_components, s.max_in_degree,
                     s.leader_prior_success ? fmt::format("{:.3f}", *s.leader_prior_success) : "-");
}

void write_stats_csv(std::ostream& o, const std::vector<std::pair<HerdingNetwork, NetworkStats>>& rows) {
  o << "listing_id,nodes,edges,edge_density,imitating_share,weak_components,max_in_degree,max_in_degree_lender,"
       "leader_prior_success\n";
  for (const auto& [net, s] : rows) {
    o << net.listing_id.str() << ',' << s.node_count << ',' << s.edge_count << ',' << format_num(edge_density(net))
      << ',' << format_num(s.imitating_share) << ',' << s.weak_components << ',' << s.max_in_degree << ','
      << (s.max_in_degree_lender ? s.max_in_degree_lender->str() : "") << ','
      << (s.leader_prior_success ? format_num(*s.leader_prior_success) : "") << '\n';
  }
}

SimConfig sim_config_of(const KeyValueConfig& kv) {
  SimConfig c = apply_sim_config(kv);
  c.threads = threads_of(kv);
  c.validate();
  return c;
}

void write_summary(std::ostream& o, const LoadedData& d, const MetricsRun& m, const FitRun& f) {
  std::vector<double> cohs;
  for (const auto& r : m.records) {
    if (r.coh) cohs.push_back(*r.coh);
  }
  o << "herdscope report\n\n";
  o << fmt::format("listings        {}\ncontributions   {}\nwith metrics    {}\nwith CoH        {}\n",
                   d.listings.size(), d.contributions.size(), m.records.size(), cohs.size());
  if (!cohs.empty()) {
    o << fmt::format("CoH mean {:.4f}, quartiles {:.4f} / {:.4f} / {:.4f}\n", mean(cohs), percentile(cohs, 25),
                     percentile(cohs, 50), percentile(cohs, 75));
  }
  o << "\nCorrelation with CoH\n";
  for (const auto& c : m.correlations) {
    o << fmt::format("  {:<22}{:>9}{:>11}  {}\n", c.covariate, c.r ? fmt::format("{:.4f}", *c.r) : "-",
                     c.p ? fmt::format("{:.3g}", *c.p) : "-", c.warning);
  }
  o << "\nRepayment models\n";
  for (const auto& fit : f.suite.fits) {
    o << fmt::format("  {}: n={}, pseudo R2={:.4f}, BIC={:.1f}\n", fit.name, fit.n_observations, fit.pseudo_r2(),
                     fit.bic());
    for (const auto* label : {"avg_prior_success", "coh", "avg_prior_success x coh"}) {
      if (auto i = fit.index_of(label)) {
        const auto j = static_cast<Eigen::Index>(*i);
        o << fmt::format("    {:<26}{:>10.4f}  p={:.3g}\n", label, fit.beta(j), fit.p_values()(j));
      }
    }
  }
}

struct Common {
  std::string config;
  std::string out_dir = ".";
};

void add_common(CLI::App* app, Common& c, Settings& s) {
  app->add_option("--config", c.config, "key = value config file (default: $" + std::string(kConfigEnv) + ")");
  app->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  s.bind(app, "--threads", "threads", "worker threads");
}

void add_metrics_flags(CLI::App* app, Settings& s) {
  s.bind(app, "--memory-range", "memory_range", "memory range m");
  s.bind(app, "--coh-variant", "coh_variant", "lag_mean, endpoint or m_point");
  s.bind(app, "--degenerate-policy", "degenerate_policy", "undefined or saturate");
  s.bind(app, "--prior-success-policy", "prior_success_policy", "lookahead or resolved_only");
  s.bind(app, "--min-contributions", "min_contributions", "minimum contributions for momentum and diversity");
  s.bind(app, "--strictness", "strictness", "strict or skip_invalid");
}

void add_fit_flags(CLI::App* app, Settings& s) {
  s.bind(app, "--models", "models", "comma-separated model numbers 1-4");
  s.bind(app, "--percentiles", "percentiles", "avg prior success percentiles for the curve");
  s.bind(app, "--coh-grid", "coh_grid", "comma-separated CoH values for the curve");
  s.bind(app, "--covariance", "covariance", "hc1 or hc0");
  s.bind(app, "--tol", "tol", "IRLS tolerance");
  s.bind(app, "--max-iter", "max_iter", "IRLS iteration limit");
}

void add_sim_flags(CLI::App* app, Settings& s) {
  s.bind(app, "--seed", "seed", "random seed");
  s.bind(app, "--n-listings", "n_listings", "number of listings");
  s.bind(app, "--lender-pool-size", "lender_pool_size", "number of lenders");
  s.bind(app, "--expert-fraction", "expert_fraction", "share of expert lenders");
  s.bind(app, "--expert-signal-sd", "expert_signal_sd", "noise on the quality signal seen by experts");
  s.bind(app, "--p-imitate", "p_imitate", "imitation probability");
  s.bind(app, "--memory-range", "memory_range", "imitation window m");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Herding analytics for peer-to-peer lending", "herdscope"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Settings settings;
  Common common;
  std::string listings_path, contributions_path, metrics_path, listing_id;
  bool all = false;

  auto* metrics = app.add_subcommand("metrics", "per-listing herding metrics and CoH correlations");
  add_common(metrics, common, settings);
  metrics->add_option("--listings", listings_path, "listings.csv");
  metrics->add_option("--contributions", contributions_path, "contributions.csv");
  add_metrics_flags(metrics, settings);

  auto* network = app.add_subcommand("network", "per-listing herding networks");
  add_common(network, common, settings);
  network->add_option("--listings", listings_path, "listings.csv");
  network->add_option("--contributions", contributions_path, "contributions.csv");
  auto* id_opt = network->add_option("--listing-id", listing_id, "one listing");
  auto* all_opt = network->add_flag("--all", all, "every listing");
  id_opt->excludes(all_opt);
  settings.bind(network, "--format", "network_format", "dot, graphml or json");
  settings.bind(network, "--min-edges", "min_edges", "skip graphs with fewer edges");
  add_metrics_flags(network, settings);

  auto* fit = app.add_subcommand("fit", "repayment models, table and curve");
  add_common(fit, common, settings);
  fit->add_option("--metrics", metrics_path, "metrics.csv");
  fit->add_option("--listings", listings_path, "listings.csv");
  add_fit_flags(fit, settings);

  auto* simulate_cmd = app.add_subcommand("simulate", "synthetic marketplace");
  add_common(simulate_cmd, common, settings);
  add_sim_flags(simulate_cmd, settings);

  auto* sweep = app.add_subcommand("sweep", "CoH and edge density across imitation probabilities");
  add_common(sweep, common, settings);
  add_sim_flags(sweep, settings);
  settings.bind(sweep, "--p-grid", "p_grid", "comma-separated imitation probabilities");

  auto* report = app.add_subcommand("report", "metrics, networks and models in one bundle");
  add_common(report, common, settings);
  report->add_option("--listings", listings_path, "listings.csv");
  report->add_option("--contributions", contributions_path, "contributions.csv");
  add_metrics_flags(report, settings);
  add_fit_flags(report, settings);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::usage;
  }

  const KeyValueConfig kv = settings.resolve(common.config);
  Manifest manifest;
  manifest.config = kv;

  if (metrics->parsed()) {
    manifest.command = "metrics";
    const auto mc = apply_metrics_config(kv);
    auto data = load_inputs(listings_path, contributions_path, strictness_of(kv), manifest);
    const auto ledger = LenderLedger::build(data.listings, data.contributions);
    const auto run = run_metrics(data, ledger, mc, threads_of(kv), manifest);
    OutputSet outputs(common.out_dir);
    outputs.write("metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, run.records); });
    outputs.write("correlations.csv", [&](std::ostream& o) { write_correlations_csv(o, run.correlations); });
    write_rejections(outputs, data);
    manifest.write_into(outputs);
    outputs.commit();
    return ExitCode::ok;
  }

  if (network->parsed()) {
    manifest.command = "network";
    const auto mc = apply_metrics_config(kv);
    const auto format = parse_network_format(kv.get("network_format").value_or("dot"));
    const int min_edges = kv.get("min_edges") ? parse_int_value("min_edges", *kv.get("min_edges")) : 0;
    if (min_edges < 0) throw ConfigError("min_edges must be non-negative");
    if (listing_id.empty() && !all) throw ConfigError("network needs --listing-id or --all");
    auto data = load_inputs(listings_path, contributions_path, strictness_of(kv), manifest);
    const auto ledger = LenderLedger::build(data.listings, data.contributions);

    std::vector<ListingId> ids;
    if (all) {
      ids = data.listings.sorted_ids();
    } else {
      ListingId id(listing_id);
      if (!data.listings.contains(id)) throw ValidationError("unknown listing id '" + listing_id + "'");
      ids.push_back(id);
    }
    std::vector<std::pair<HerdingNetwork, NetworkStats>> kept;
    for (const auto& id : ids) {
      const auto ordered = order_contributions(id, data.contributions);
      auto net = build_herding_network(id, ordered, ledger, mc.memory_range, mc.prior_success_policy);
      if (net.edges.size() < static_cast<std::size_t>(min_edges)) continue;
      auto s = network_stats(net);
      kept.emplace_back(std::move(net), s);
    }
    manifest.dropped["networks_below_min_edges"] = ids.size() - kept.size();
    OutputSet outputs(common.out_dir);
    for (const auto& [net, _] : kept) {
      const std::string text = export_network(net, format);
      outputs.write(net.listing_id.str() + "." + std::string(file_extension(format)),
                    [&](std::ostream& o) { o << text; });
    }
    outputs.write("network_stats.csv", [&](std::ostream& o) { write_stats_csv(o, kept); });
    write_rejections(outputs, data);
    manifest.write_into(outputs);
    outputs.commit();
    out << stats_header() << '\n';
    for (const auto& [net, s] : kept) out << stats_row(net, s) << '\n';
    return ExitCode::ok;
  }

  if (fit->parsed()) {
    manifest.command = "fit";
    if (metrics_path.empty()) throw ConfigError("--metrics is required");
    if (listings_path.empty()) throw ConfigError("--listings is required");
    const auto records = read_metrics_csv(std::filesystem::path(metrics_path));
    auto listings = parse_listings(std::filesystem::path(listings_path), strictness_of(kv));
    manifest.inputs = {metrics_path, listings_path};
    manifest.dropped["listings_rejected"] = listings.rejections.size();
    const auto run = run_fit(records, listings.table, kv, manifest);
    OutputSet outputs(common.out_dir);
    write_fit_outputs(outputs, run);
    manifest.write_into(outputs);
    outputs.commit();
    return ExitCode::ok;
  }

  if (simulate_cmd->parsed()) {
    manifest.command = "simulate";
    const auto config = sim_config_of(kv);
    const auto sim = simulate(config);
    OutputSet outputs(common.out_dir);
    outputs.write("listings.csv", [&](std::ostream& o) { write_listings_csv(o, sim.listings); });
    outputs.write("contributions.csv", [&](std::ostream& o) { write_contributions_csv(o, sim.contributions); });
    outputs.write("ground_truth.csv", [&](std::ostream& o) { write_ground_truth_csv(o, sim.truth); });
    manifest.write_into(outputs);
    outputs.commit();
    return ExitCode::ok;
  }

  if (sweep->parsed()) {
    manifest.command = "sweep";
    const auto config = sim_config_of(kv);
    const auto grid = parse_list<double>("p_grid", kv.get("p_grid").value_or("0,0.25,0.5,0.75,1"));
    const auto mc = apply_metrics_config(kv);
    const auto rows = sweep_imitation(config, grid, kv.get("degenerate_policy") ? mc.degenerate_policy
                                                                                : DegeneratePolicy::saturate);
    OutputSet outputs(common.out_dir);
    outputs.write("sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rows); });
    manifest.write_into(outputs);
    outputs.commit();
    return ExitCode::ok;
  }

  if (report->parsed()) {
    manifest.command = "report";
    const auto mc = apply_metrics_config(kv);
    auto data = load_inputs(listings_path, contributions_path, strictness_of(kv), manifest);
    const auto ledger = LenderLedger::build(data.listings, data.contributions);
    const auto m = run_metrics(data, ledger, mc, threads_of(kv), manifest);
    const auto f = run_fit(m.records, data.listings, kv, manifest);

    std::vector<std::pair<HerdingNetwork, NetworkStats>> nets;
    for (const auto& id : data.listings.sorted_ids()) {
      if (!data.contributions.has_listing(id) || data.contributions.count(id) == 0) continue;
      const auto ordered = order_contributions(id, data.contributions);
      auto net = build_herding_network(id, ordered, ledger, mc.memory_range, mc.prior_success_policy);
      auto s = network_stats(net);
      nets.emplace_back(std::move(net), s);
    }
    OutputSet outputs(common.out_dir);
    outputs.write("metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, m.records); });
    outputs.write("correlations.csv", [&](std::ostream& o) { write_correlations_csv(o, m.correlations); });
    outputs.write("network_stats.csv", [&](std::ostream& o) { write_stats_csv(o, nets); });
    write_fit_outputs(outputs, f);
    outputs.write("summary.txt", [&](std::ostream& o) { write_summary(o, data, m, f); });
    write_rejections(outputs, data);
    manifest.write_into(outputs);
    outputs.commit();
    write_summary(out, data, m, f);
    return ExitCode::ok;
  }
  return ExitCode::usage;
}

}  // namespace

std::string version() { return HERDSCOPE_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const SeparationError& e) {
    err << "herdscope: " << e.what() << " (column: " << e.column() << ")\n";
    return ExitCode::compute;
  } catch (const ConfigError& e) {
    err << "herdscope: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const ValidationError& e) {
    err << "herdscope: " << e.what() << '\n';
    return ExitCode::validation;
  } catch (const ComputeError& e) {
    err << "herdscope: " << e.what() << '\n';
    return ExitCode::compute;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "herdscope: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const std::exception& e) {
    err << "herdscope: " << e.what() << '\n';
    return ExitCode::compute;
  }
}

}  // namespace herdscope::cli
