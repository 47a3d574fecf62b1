#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "herdscope/config.hpp"
#include "herdscope/dynamics.hpp"
#include "herdscope/error.hpp"
#include "herdscope/herding.hpp"
#include "herdscope/ledger.hpp"
#include "herdscope/metrics.hpp"
#include "herdscope/simulator.hpp"
#include "herdscope/stats.hpp"
#include "oracles.hpp"

using namespace herdscope;

namespace {

MetricsConfig with_m(int m, CohVariant v = CohVariant::lag_mean) {
  MetricsConfig c;
  c.memory_range = m;
  c.coh_variant = v;
  return c;
}

std::optional<double> coh(const std::vector<double>& a, const MetricsConfig& c) {
  return coefficient_of_herding(std::span<const double>(a), c).value;
}

Instant day(int d) { return Instant(Seconds(1167609600 + static_cast<std::int64_t>(d) * 86400)); }

}  // namespace

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3};
  CHECK(*pearson(x, std::vector<double>{2, 4, 6}) == 1.0);
  CHECK(*pearson(x, std::vector<double>{3, 2, 1}) == -1.0);
  CHECK_FALSE(pearson(x, std::vector<double>{5, 5, 5}));
  CHECK_FALSE(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("CoH extremes") {
  std::vector<double> linear;
  for (int i = 1; i <= 10; ++i) linear.push_back(i);
  CHECK(*coh(linear, with_m(2)) == 1.0);
  const std::vector<double> alternating{1, 2, 1, 2, 1, 2, 1, 2};
  CHECK(*coh(alternating, with_m(2)) == -1.0);
}

TEST_CASE("CoH undefined and degenerate cases") {
  CHECK_FALSE(coh({1, 2, 3, 4, 5, 6}, with_m(5)));  // N < m + 2
  CHECK(coh({1, 5, 2, 8, 3, 9, 4}, with_m(5)));
  const std::vector<double> flat(12, 5000.0);
  CHECK_FALSE(coh(flat, with_m(5)));
  auto sat = with_m(5);
  sat.degenerate_policy = DegeneratePolicy::saturate;
  const auto r = coefficient_of_herding(std::span<const double>(flat), sat);
  CHECK(r.value == 1.0);
  CHECK(r.saturated);
  for (auto v : {CohVariant::endpoint, CohVariant::m_point}) {
    sat.coh_variant = v;
    CHECK(coefficient_of_herding(std::span<const double>(flat), sat).value == 1.0);
  }
  // One constant window next to a varying one stays undefined.
  const std::vector<double> mixed{5, 5, 5, 5, 5, 5, 5, 9};
  auto sat2 = with_m(2);
  sat2.degenerate_policy = DegeneratePolicy::saturate;
  CHECK_FALSE(coh(mixed, sat2));
}

TEST_CASE("CoH matches the brute-force oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(3, 300), mdist(2, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = mdist(rng);
    std::vector<double> a(static_cast<std::size_t>(len(rng)));
    const bool cents = trial % 2 == 0;
    for (auto& v : a) v = cents ? std::floor(100 + 20000 * u(rng)) : u(rng);
    for (auto variant : {CohVariant::lag_mean, CohVariant::endpoint, CohVariant::m_point}) {
      const auto got = coh(a, with_m(m, variant));
      const auto want = variant == CohVariant::lag_mean  ? oracle::coh_lag_mean(a, m)
                        : variant == CohVariant::endpoint ? oracle::coh_endpoint(a, m)
                                                          : oracle::coh_m_point(a, m);
      REQUIRE(got.has_value() == want.has_value());
      if (got) CHECK(std::abs(*got - *want) <= 1e-12);
      if (got && variant != CohVariant::m_point) CHECK(std::abs(*got) <= 1.0);
    }
  }
}

TEST_CASE("CoH on 200 uniform draws, m=5") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(200);
  for (auto& v : a) v = u(rng);
  CHECK(std::abs(*coh(a, with_m(5)) - *oracle::coh_lag_mean(a, 5)) <= 1e-12);
}

TEST_CASE("CoH invariances") {
  std::mt19937_64 rng(99);
  std::lognormal_distribution<double> amount(8.5, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(40 + trial);
    for (auto& v : a) v = std::round(amount(rng));
    SUBCASE("affine") {
      std::vector<double> b;
      for (double v : a) b.push_back(3.7 * v - 120.0);
      for (auto variant : {CohVariant::lag_mean, CohVariant::endpoint, CohVariant::m_point}) {
        CHECK(std::abs(*coh(a, with_m(4, variant)) - *coh(b, with_m(4, variant))) <= 1e-12);
      }
    }
    SUBCASE("reversal at m=2") {
      std::vector<double> r(a.rbegin(), a.rend());
      CHECK(std::abs(*coh(a, with_m(2)) - *coh(r, with_m(2))) <= 1e-12);
    }
    SUBCASE("m=2 is the lag-1 memory coefficient") {
      CHECK(std::abs(*coh(a, with_m(2)) - *oracle::memory_coefficient(a)) <= 1e-12);
    }
    SUBCASE("integer overload") {
      std::vector<std::int64_t> cents;
      for (double v : a) cents.push_back(static_cast<std::int64_t>(v));
      CHECK(coefficient_of_herding(std::span<const std::int64_t>(cents), with_m(5)).value == coh(a, with_m(5)));
    }
  }
}

TEST_CASE("inter-contribution times from launch") {
  const Instant launch = day(0);
  auto at = [&](int minutes) { return Contribution{ListingId("P"), LenderId("L"), launch + Seconds(60 * minutes), 1, 0}; };
  std::vector<Contribution> c{at(1), at(12), at(18), at(72)};
  const auto gaps = inter_contribution_times(launch, c);
  REQUIRE(gaps.size() == 4);
  CHECK(gaps[0] == Seconds(60));
  CHECK(gaps[1] == Seconds(660));
  CHECK(gaps[2] == Seconds(360));
  CHECK(gaps[3] == Seconds(3240));
  CHECK(inter_contribution_times(launch, std::vector<Contribution>{at(5)}) == std::vector<Seconds>{Seconds(300)});
  CHECK(inter_contribution_times(launch, std::vector<Contribution>{at(10), at(20), at(30)}) ==
        std::vector<Seconds>(3, Seconds(600)));
}

TEST_CASE("momentum") {
  CHECK(*momentum(std::vector<double>{1, 11, 6, 54}) == doctest::Approx(1.352).epsilon(0.005 / 1.352));
  CHECK(*momentum(std::vector<double>{10, 10, 10}) == 0.0);
  CHECK_FALSE(momentum(std::vector<double>{4}));
  CHECK_FALSE(momentum(std::vector<double>{0, 0}));
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0 / 90.0);
  std::vector<double> d(50);
  for (auto& v : d) v = e(rng);
  CHECK(std::abs(*momentum(d) - *oracle::sample_cv(d)) <= 1e-12);
  std::vector<double> seconds;
  for (double v : d) seconds.push_back(v * 60.0);
  CHECK(std::abs(*momentum(d) - *momentum(seconds)) <= 1e-12);
  std::vector<Seconds> whole{Seconds(60), Seconds(660), Seconds(360), Seconds(3240)};
  CHECK(*momentum(whole) == doctest::Approx(*momentum(std::vector<double>{1, 11, 6, 54})));
}

TEST_CASE("opinion diversity") {
  CHECK(*opinion_diversity(std::vector<double>{1000, 1500, 5000, 15000}) == doctest::Approx(1.155).epsilon(0.005 / 1.155));
  CHECK(*opinion_diversity(std::vector<double>{5000, 5000, 5000}) == 0.0);
  CHECK_FALSE(opinion_diversity(std::vector<double>{5000}));
  std::mt19937_64 rng(6);
  std::lognormal_distribution<double> ln(8.0, 0.8);
  std::vector<double> a(50);
  for (auto& v : a) v = std::round(ln(rng));
  CHECK(std::abs(*opinion_diversity(a) - *oracle::sample_cv(a)) <= 1e-12);
  std::vector<double> dollars;
  for (double v : a) dollars.push_back(v / 100.0);
  CHECK(std::abs(*opinion_diversity(a) - *opinion_diversity(dollars)) <= 1e-12);
}

TEST_CASE("prior success on a scripted timeline") {
  // Created day, outcome, resolved day.
  struct Row {
    const char* id;
    int created;
    Outcome outcome;
    int resolved;
  };
  const Row rows[] = {{"P1", 1, Outcome::repaid, 10},    {"P2", 2, Outcome::defaulted, 5},
                      {"P3", 4, Outcome::repaid, 20},    {"P4", 6, Outcome::repaid, 7},
                      {"P5", 8, Outcome::defaulted, 30}, {"P6", 12, Outcome::repaid, 40}};
  LenderLedger ledger;
  const LenderId lender("L");
  for (const auto& r : rows) {
    ledger.add(lender, {ListingId(r.id), day(r.created), day(r.created) + Seconds(60), r.outcome, day(r.resolved)});
  }
  const auto look = PriorSuccessPolicy::lookahead;
  const auto resolved = PriorSuccessPolicy::resolved_only;

  CHECK(*ledger.prior_success(lender, day(3), look) == doctest::Approx(0.5));
  CHECK_FALSE(ledger.prior_success(lender, day(3), resolved));
  CHECK(*ledger.prior_success(lender, day(9), look) == doctest::Approx(0.6));
  CHECK(*ledger.prior_success(lender, day(9), resolved) == doctest::Approx(0.5));
  CHECK(*ledger.prior_success(lender, day(25), look) == doctest::Approx(4.0 / 6.0));
  CHECK(*ledger.prior_success(lender, day(25), resolved) == doctest::Approx(0.75));

  const ListingId current("P6");
  CHECK(*ledger.prior_success(lender, day(25), look, &current) == doctest::Approx(0.6));

  CHECK_FALSE(ledger.prior_success(lender, day(0), look));
  CHECK_FALSE(ledger.prior_success(LenderId("nobody"), day(25), look));
  CHECK(ledger.entries(lender).size() == 6);
}

TEST_CASE("prior success basics and monotonicity") {
  LenderLedger ledger;
  const LenderId l("L");
  ledger.add(l, {ListingId("A"), day(1), day(1), Outcome::repaid, std::nullopt});
  ledger.add(l, {ListingId("B"), day(2), day(2), Outcome::repaid, std::nullopt});
  CHECK(*ledger.prior_success(l, day(5), PriorSuccessPolicy::lookahead) == 1.0);
  CHECK_FALSE(ledger.prior_success(l, day(5), PriorSuccessPolicy::resolved_only));

  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.6);
  LenderLedger grow;
  double last = 0.0;
  for (int i = 0; i < 40; ++i) {
    const bool repaid = coin(rng);
    grow.add(l, {ListingId("X" + std::to_string(i)), day(i), day(i), repaid ? Outcome::repaid : Outcome::defaulted,
                 std::nullopt});
    const double now = *grow.prior_success(l, day(100), PriorSuccessPolicy::lookahead);
    if (i > 0) {
      if (repaid) CHECK(now >= last);
      if (!repaid) CHECK(now <= last);
    }
    last = now;
  }
}

TEST_CASE("ledger keeps one entry per lender and listing") {
  LenderLedger ledger;
  const LenderId l("L");
  ledger.add(l, {ListingId("A"), day(1), day(3), Outcome::repaid, std::nullopt});
  ledger.add(l, {ListingId("A"), day(1), day(2), Outcome::repaid, std::nullopt});
  REQUIRE(ledger.entries(l).size() == 1);
  CHECK(ledger.entries(l)[0].first_contribution == day(2));
}

TEST_CASE("listing metrics") {
  ListingTable listings;
  auto make = [](const char* id, int d, Outcome o) {
    Listing l;
    l.listing_id = ListingId(id);
    l.created_at = day(d);
    l.amount_requested_cents = 1000;
    l.year = 2007;
    l.outcome = o;
    return l;
  };
  listings.insert(make("A", 0, Outcome::repaid));
  listings.insert(make("B", 1, Outcome::defaulted));
  listings.insert(make("C", 5, Outcome::repaid));
  listings.insert(make("D", 6, Outcome::repaid));
  ContributionTable contributions(listings);
  std::size_t idx = 0;
  auto add = [&](const char* listing, const char* lender, int d, std::int64_t amount) {
    contributions.insert({ListingId(listing), LenderId(lender), day(d) + Seconds(3600), amount, idx++});
  };
  add("A", "L1", 0, 100);
  add("B", "L1", 1, 200);
  add("C", "L1", 5, 300);
  add("C", "L2", 5, 400);
  add("D", "L9", 6, 500);
  const auto ledger = LenderLedger::build(listings, contributions);

  const auto c_ordered = order_contributions(ListingId("C"), contributions);
  const auto rec = listing_metrics(listings.at(ListingId("C")), c_ordered, ledger, MetricsConfig{});
  CHECK(rec.avg_prior_success == 0.5);
  CHECK(rec.n_lenders_with_history == 1);
  CHECK(rec.n_contributions == 2);
  CHECK_FALSE(rec.coh);

  const auto d_ordered = order_contributions(ListingId("D"), contributions);
  const auto single = listing_metrics(listings.at(ListingId("D")), d_ordered, ledger, MetricsConfig{});
  CHECK(single.n_contributions == 1);
  CHECK_FALSE(single.coh);
  CHECK_FALSE(single.momentum);
  CHECK_FALSE(single.opinion_diversity);
  CHECK_FALSE(single.avg_prior_success);
}

TEST_CASE("metrics on a simulated marketplace match a straight-line recomputation") {
  SimConfig sc;
  sc.n_listings = 100;
  sc.lender_pool_size = 200;
  sc.seed = 3;
  const auto sim = simulate(sc);
  const auto ledger = LenderLedger::build(sim.listings, sim.contributions);
  const MetricsConfig mc;
  const auto records = compute_metrics(sim.listings, sim.contributions, ledger, mc, 1);
  REQUIRE(records.size() == 100);

  for (const auto& r : records) {
    const auto& listing = sim.listings.at(r.listing_id);
    std::vector<Contribution> mine;
    for (const auto& c : sim.contributions.rows()) {
      if (c.listing_id == r.listing_id) mine.push_back(c);
    }
    std::stable_sort(mine.begin(), mine.end(), [](const Contribution& a, const Contribution& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.input_index < b.input_index;
    });
    std::vector<double> amounts, gaps;
    std::int64_t prev = listing.created_at.time_since_epoch().count();
    for (const auto& c : mine) {
      amounts.push_back(static_cast<double>(c.amount_cents));
      gaps.push_back(static_cast<double>(c.timestamp.time_since_epoch().count() - prev));
      prev = c.timestamp.time_since_epoch().count();
    }
    const auto want_coh = oracle::coh_lag_mean(amounts, 5);
    REQUIRE(r.coh.has_value() == want_coh.has_value());
    if (want_coh) CHECK(std::abs(*r.coh - *want_coh) <= 1e-12);
    CHECK(std::abs(*r.momentum - *oracle::sample_cv(gaps)) <= 1e-12);
    CHECK(std::abs(*r.opinion_diversity - *oracle::sample_cv(amounts)) <= 1e-12);
    CHECK(r.n_contributions == mine.size());

    // Prior success: scan every other listing the lender backed.
    double sum = 0;
    std::size_t with_history = 0;
    std::set<std::string> seen;
    for (const auto& c : mine) {
      if (!seen.insert(c.lender_id.str()).second) continue;
      std::set<std::string> other_listings;
      for (const auto& o : sim.contributions.rows()) {
        if (o.lender_id == c.lender_id && o.listing_id != r.listing_id &&
            sim.listings.at(o.listing_id).created_at < c.timestamp) {
          other_listings.insert(o.listing_id.str());
        }
      }
      if (other_listings.empty()) continue;
      double repaid = 0;
      for (const auto& id : other_listings) repaid += sim.listings.at(ListingId(id)).repaid() ? 1 : 0;
      sum += repaid / static_cast<double>(other_listings.size());
      ++with_history;
    }
    CHECK(r.n_lenders_with_history == with_history);
    if (with_history > 0) CHECK(std::abs(*r.avg_prior_success - sum / static_cast<double>(with_history)) <= 1e-12);
  }
}

TEST_CASE("compute_metrics is independent of the thread count and round-trips through csv") {
  SimConfig sc;
  sc.n_listings = 300;
  sc.seed = 17;
  const auto sim = simulate(sc);
  const auto ledger = LenderLedger::build(sim.listings, sim.contributions);
  const auto one = compute_metrics(sim.listings, sim.contributions, ledger, MetricsConfig{}, 1);
  const auto four = compute_metrics(sim.listings, sim.contributions, ledger, MetricsConfig{}, 4);
  CHECK(one == four);
  CHECK(std::is_sorted(one.begin(), one.end(),
                       [](const MetricsRecord& a, const MetricsRecord& b) { return a.listing_id < b.listing_id; }));
  std::stringstream a, b;
  write_metrics_csv(a, one);
  write_metrics_csv(b, four);
  CHECK(a.str() == b.str());
  const auto back = read_metrics_csv(a);
  REQUIRE(back.size() == one.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(back[i].listing_id == one[i].listing_id);
    CHECK(back[i].coh == one[i].coh);
    CHECK(back[i].momentum == one[i].momentum);
    CHECK(back[i].opinion_diversity == one[i].opinion_diversity);
    CHECK(back[i].avg_prior_success == one[i].avg_prior_success);
    CHECK(back[i].n_contributions == one[i].n_contributions);
    CHECK(back[i].n_lenders_with_history == one[i].n_lenders_with_history);
  }
}

TEST_CASE("metrics csv header and undefined fields") {
  MetricsRecord r;
  r.listing_id = ListingId("P1");
  r.n_contributions = 1;
  std::stringstream s;
  write_metrics_csv(s, std::vector<MetricsRecord>{r});
  std::string header, row;
  std::getline(s, header);
  std::getline(s, row);
  CHECK(header == "listing_id,coh,momentum,opinion_diversity,n_contributions,avg_prior_success,n_lenders_with_history");
  CHECK(row == "P1,,,,1,,0");
}

TEST_CASE("correlation report") {
  SUBCASE("self-correlation") {
    std::vector<std::optional<double>> target{0.1, 0.5, -0.2, 0.3, std::nullopt, 0.9};
    std::vector<NamedColumn> cov{{"same", target}};
    const auto rows = correlation_report(target, cov);
    CHECK(*rows[0].r == doctest::Approx(1.0));
    CHECK(*rows[0].p == doctest::Approx(0.0));
    CHECK(rows[0].n == 5);
  }
  SUBCASE("zero variance") {
    std::vector<std::optional<double>> target{0.1, 0.5, -0.2, 0.3};
    std::vector<NamedColumn> cov{{"flat", {1.0, 1.0, 1.0, 1.0}}};
    const auto rows = correlation_report(target, cov);
    CHECK_FALSE(rows[0].r);
    CHECK(rows[0].warning == "zero variance");
  }
  SUBCASE("hand-computed t test, n=10") {
    // y is a permutation of x with squared rank differences summing to 16,
    // so r = 1 - 6*16/(10*99) = 149/165; t = r*sqrt(8/(1-r^2)) = 5.9457.
    std::vector<std::optional<double>> x, y;
    const double yy[] = {2, 1, 4, 3, 7, 5, 8, 6, 10, 9};
    for (int i = 0; i < 10; ++i) {
      x.push_back(i + 1.0);
      y.push_back(yy[i]);
    }
    const auto rows = correlation_report(x, std::vector<NamedColumn>{{"y", y}});
    CHECK(*rows[0].r == doctest::Approx(149.0 / 165.0).epsilon(1e-12));
    CHECK(*rows[0].p == doctest::Approx(0.0003436121977632826).epsilon(1e-8));
  }
  SUBCASE("p-values follow Student t") {
    CHECK(student_t_two_sided_p(2.306004135, 8) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(normal_two_sided_p(1.959963985) == doctest::Approx(0.05).epsilon(1e-6));
  }
}

TEST_CASE("a covariate independent of imitation is uncorrelated with CoH") {
  SimConfig sc;
  sc.n_listings = 5000;
  sc.seed = 21;
  const auto sim = simulate(sc);
  const auto ledger = LenderLedger::build(sim.listings, sim.contributions);
  const auto records = compute_metrics(sim.listings, sim.contributions, ledger, MetricsConfig{});
  const auto rows = herding_correlation_report(records, sim.listings);
  const auto it = std::find_if(rows.begin(), rows.end(), [](const CorrelationRow& r) { return r.covariate == "description_length"; });
  REQUIRE(it != rows.end());
  CHECK(std::abs(*it->r) < 0.05);
  CHECK(rows.size() == 10);
}

TEST_CASE("metrics config") {
  std::istringstream in("# comment\nmemory_range = 7\ncoh_variant = endpoint\n\nprior_success_policy=resolved_only\n");
  const auto kv = KeyValueConfig::parse(in);
  const auto mc = apply_metrics_config(kv);
  CHECK(mc.memory_range == 7);
  CHECK(mc.coh_variant == CohVariant::endpoint);
  CHECK(mc.prior_success_policy == PriorSuccessPolicy::resolved_only);

  KeyValueConfig bad;
  bad.set("coh_variant", "bogus");
  try {
    apply_metrics_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lag_mean") != std::string::npos);
    CHECK(msg.find("m_point") != std::string::npos);
  }
  KeyValueConfig small;
  small.set("memory_range", "1");
  CHECK_THROWS_AS(apply_metrics_config(small), ConfigError);
  CHECK(apply_metrics_config(to_key_values(mc)).coh_variant == mc.coh_variant);
}
