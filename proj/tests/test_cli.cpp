#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using herdscope::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(HERDSCOPE_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

// One simulated marketplace shared by the tests below.
const fs::path& sim_dir() {
  static const fs::path dir = [] {
    auto d = fresh_dir("sim");
    const auto r = cli({"simulate", "--seed", "7", "--n-listings", "400", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> inputs() {
  return {"--listings", (sim_dir() / "listings.csv").string(), "--contributions",
          (sim_dir() / "contributions.csv").string()};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("simulate writes its files and a manifest") {
  const auto names = listing(sim_dir());
  CHECK(names == std::vector<std::string>{"contributions.csv", "ground_truth.csv", "listings.csv", "manifest.json"});
  const auto m = manifest(sim_dir());
  CHECK(m["tool"] == "herdscope");
  CHECK(m["command"] == "simulate");
  CHECK(m["config"]["seed"] == "7");
  CHECK(m["outputs"].size() == 3);
  CHECK(m["outputs"][0]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("simulate digests are stable across runs and thread counts") {
  const auto a = fresh_dir("sim_a");
  const auto b = fresh_dir("sim_b");
  REQUIRE(cli({"simulate", "--seed", "3", "--n-listings", "200", "--out-dir", a.string()}).code == 0);
  REQUIRE(cli({"simulate", "--seed", "3", "--n-listings", "200", "--threads", "3", "--out-dir", b.string()}).code == 0);
  CHECK(manifest(a)["outputs"] == manifest(b)["outputs"]);
}

TEST_CASE("metrics") {
  const auto out = fresh_dir("metrics");
  const auto r = cli(concat({"metrics", "--out-dir", out.string()}, inputs()));
  REQUIRE(r.code == 0);
  CHECK(listing(out) == std::vector<std::string>{"correlations.csv", "manifest.json", "metrics.csv"});
  const auto m = manifest(out);
  CHECK(m["inputs"].size() == 2);
  CHECK(m["dropped"].contains("coh_undefined"));

  SUBCASE("byte-identical across thread counts") {
    const auto again = fresh_dir("metrics_threads");
    REQUIRE(cli(concat({"metrics", "--threads", "4", "--out-dir", again.string()}, inputs())).code == 0);
    CHECK(slurp(out / "metrics.csv") == slurp(again / "metrics.csv"));
  }
  SUBCASE("missing contributions file") {
    const auto e = fresh_dir("metrics_missing");
    const auto bad = cli({"metrics", "--listings", (sim_dir() / "listings.csv").string(), "--contributions",
                          "/nonexistent/contributions.csv", "--out-dir", e.string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("/nonexistent/contributions.csv") != std::string::npos);
    CHECK(listing(e).empty());
  }
  SUBCASE("bogus variant lists the valid ones") {
    const auto bad = cli(concat({"metrics", "--coh-variant", "bogus", "--out-dir", out.string()}, inputs()));
    CHECK(bad.code == 1);
    CHECK(bad.err.find("lag_mean") != std::string::npos);
    CHECK(bad.err.find("endpoint") != std::string::npos);
  }
  SUBCASE("config file and environment") {
    const auto cfg = fresh_dir("cfg") / "herd.conf";
    std::ofstream(cfg) << "memory_range = 3\n";
    const auto o = fresh_dir("metrics_cfg");
    REQUIRE(cli(concat({"metrics", "--config", cfg.string(), "--out-dir", o.string()}, inputs())).code == 0);
    CHECK(manifest(o)["config"]["memory_range"] == "3");
    CHECK(slurp(o / "metrics.csv") != slurp(out / "metrics.csv"));

    const auto o2 = fresh_dir("metrics_env");
    setenv("HERDSCOPE_CONFIG", cfg.string().c_str(), 1);
    const auto env = cli(concat({"metrics", "--memory-range", "4", "--out-dir", o2.string()}, inputs()));
    unsetenv("HERDSCOPE_CONFIG");
    REQUIRE(env.code == 0);
    CHECK(manifest(o2)["config"]["memory_range"] == "4");

    std::ofstream(cfg) << "memroy_range = 3\n";
    const auto typo = cli(concat({"metrics", "--config", cfg.string(), "--out-dir", o.string()}, inputs()));
    CHECK(typo.code == 1);
    CHECK(typo.err.find("memroy_range") != std::string::npos);
  }
  SUBCASE("invalid data is a validation error") {
    const auto d = fresh_dir("bad_data");
    std::string text = slurp(sim_dir() / "contributions.csv");
    text += "P000001,L000001,2007-01-01T00:00:00Z,-5\n";
    std::ofstream(d / "contributions.csv") << text;
    const auto o = fresh_dir("bad_out");
    const auto bad = cli({"metrics", "--listings", (sim_dir() / "listings.csv").string(), "--contributions",
                          (d / "contributions.csv").string(), "--out-dir", o.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("amount_cents") != std::string::npos);
    CHECK(listing(o).empty());

    const auto skip = cli({"metrics", "--strictness", "skip_invalid", "--listings",
                           (sim_dir() / "listings.csv").string(), "--contributions",
                           (d / "contributions.csv").string(), "--out-dir", o.string()});
    CHECK(skip.code == 0);
    CHECK(fs::exists(o / "contributions_rejections.csv"));
    CHECK(manifest(o)["dropped"]["contributions_rejected"] == 1);
  }
}

TEST_CASE("network") {
  SUBCASE("one listing as dot") {
    const auto out = fresh_dir("net_one");
    const auto r = cli(concat({"network", "--listing-id", "P000010", "--format", "dot", "--out-dir", out.string()}, inputs()));
    REQUIRE(r.code == 0);
    CHECK(listing(out) == std::vector<std::string>{"P000010.dot", "manifest.json", "network_stats.csv"});
    CHECK(r.out.find("P000010") != std::string::npos);
  }
  SUBCASE("unknown listing") {
    const auto out = fresh_dir("net_unknown");
    CHECK(cli(concat({"network", "--listing-id", "nope", "--out-dir", out.string()}, inputs())).code == 2);
  }
  SUBCASE("unsupported format") {
    const auto out = fresh_dir("net_svg");
    const auto r = cli(concat({"network", "--all", "--format", "svg", "--out-dir", out.string()}, inputs()));
    CHECK(r.code == 1);
    CHECK(r.err.find("svg") != std::string::npos);
  }
  SUBCASE("min-edges filters a simulation without imitation") {
    const auto sim = fresh_dir("sim_p0");
    REQUIRE(cli({"simulate", "--seed", "7", "--n-listings", "200", "--p-imitate", "0", "--out-dir", sim.string()}).code == 0);
    const auto out = fresh_dir("net_p0");
    const auto r = cli({"network", "--all", "--min-edges", "5", "--format", "json", "--listings",
                        (sim / "listings.csv").string(), "--contributions", (sim / "contributions.csv").string(),
                        "--out-dir", out.string()});
    REQUIRE(r.code == 0);
    std::size_t graphs = 0;
    for (const auto& n : listing(out)) graphs += n.ends_with(".json") && n != "manifest.json";
    CHECK(graphs <= 2);
    CHECK(manifest(out)["dropped"]["networks_below_min_edges"].get<std::size_t>() >= 198);
  }
}

TEST_CASE("fit") {
  const auto m = fresh_dir("fit_metrics");
  REQUIRE(cli(concat({"metrics", "--out-dir", m.string()}, inputs())).code == 0);
  const std::vector<std::string> fit_inputs{"--metrics", (m / "metrics.csv").string(), "--listings",
                                            (sim_dir() / "listings.csv").string()};

  SUBCASE("all models") {
    const auto out = fresh_dir("fit_all");
    const auto r = cli(concat({"fit", "--out-dir", out.string()}, fit_inputs));
    REQUIRE(r.code == 0);
    CHECK(listing(out) == std::vector<std::string>{"curve.csv", "fit_report.json", "manifest.json", "table.txt"});
    const auto report = nlohmann::json::parse(slurp(out / "fit_report.json"));
    CHECK(report["models"].size() == 4);
    const auto again = fresh_dir("fit_again");
    REQUIRE(cli(concat({"fit", "--out-dir", again.string()}, fit_inputs)).code == 0);
    CHECK(slurp(out / "fit_report.json") == slurp(again / "fit_report.json"));
  }
  SUBCASE("models without the interaction skip the curve") {
    const auto out = fresh_dir("fit_12");
    REQUIRE(cli(concat({"fit", "--models", "1,2", "--out-dir", out.string()}, fit_inputs)).code == 0);
    CHECK_FALSE(fs::exists(out / "curve.csv"));
  }
  SUBCASE("model out of range") {
    const auto out = fresh_dir("fit_5");
    CHECK(cli(concat({"fit", "--models", "5", "--out-dir", out.string()}, fit_inputs)).code == 1);
    CHECK(listing(out).empty());
  }
  SUBCASE("percentile out of range") {
    const auto out = fresh_dir("fit_pct");
    CHECK(cli(concat({"fit", "--percentiles", "0,90", "--out-dir", out.string()}, fit_inputs)).code == 1);
  }
  SUBCASE("constant outcome leaves nothing behind") {
    const auto d = fresh_dir("const");
    std::string text = slurp(sim_dir() / "listings.csv");
    for (auto pos = text.find(",defaulted,"); pos != std::string::npos; pos = text.find(",defaulted,", pos)) {
      text.replace(pos, 11, ",repaid,");
    }
    std::ofstream(d / "listings.csv") << text;
    const auto out = fresh_dir("fit_const");
    const auto r = cli({"fit", "--metrics", (m / "metrics.csv").string(), "--listings", (d / "listings.csv").string(),
                        "--out-dir", out.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("column") != std::string::npos);
    CHECK(listing(out).empty());
  }
}

TEST_CASE("fit on rational herding data reports a positive interaction") {
  const auto sim = fresh_dir("sim_rational");
  REQUIRE(cli({"simulate", "--seed", "42", "--n-listings", "5000", "--out-dir", sim.string()}).code == 0);
  const auto m = fresh_dir("rational_metrics");
  REQUIRE(cli({"metrics", "--listings", (sim / "listings.csv").string(), "--contributions",
               (sim / "contributions.csv").string(), "--out-dir", m.string()})
              .code == 0);
  const auto out = fresh_dir("rational_fit");
  REQUIRE(cli({"fit", "--models", "4", "--metrics", (m / "metrics.csv").string(), "--listings",
               (sim / "listings.csv").string(), "--out-dir", out.string()})
              .code == 0);
  const auto report = nlohmann::json::parse(slurp(out / "fit_report.json"));
  bool found = false;
  for (const auto& t : report["models"][0]["terms"]) {
    if (t["label"] != "avg_prior_success x coh") continue;
    found = true;
    CHECK(t["beta"].get<double>() > 0);
    CHECK(t["p"].get<double>() < 0.05);
  }
  CHECK(found);
  CHECK(fs::exists(out / "curve.csv"));
}

TEST_CASE("sweep and report") {
  SUBCASE("five-point sweep") {
    const auto out = fresh_dir("sweep");
    REQUIRE(cli({"sweep", "--n-listings", "100", "--out-dir", out.string()}).code == 0);
    std::istringstream csv(slurp(out / "sweep.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 5);
  }
  SUBCASE("bad expert fraction") {
    const auto out = fresh_dir("sweep_bad");
    const auto r = cli({"simulate", "--expert-fraction", "1.5", "--out-dir", out.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("expert_fraction") != std::string::npos);
  }
  SUBCASE("report bundle") {
    const auto out = fresh_dir("report");
    const auto r = cli(concat({"report", "--out-dir", out.string()}, inputs()));
    REQUIRE(r.code == 0);
    for (const char* f : {"metrics.csv", "correlations.csv", "network_stats.csv", "fit_report.json", "table.txt",
                          "curve.csv", "summary.txt", "manifest.json"}) {
      CHECK_MESSAGE(fs::exists(out / f), f);
    }
    CHECK(r.out.find("Repayment models") != std::string::npos);
  }
  SUBCASE("usage errors") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    const auto v = cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(herdscope::cli::version()) != std::string::npos);
  }
}
