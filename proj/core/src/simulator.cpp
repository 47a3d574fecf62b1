#include "herdscope/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <unordered_set>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/weibull_distribution.hpp>
#include <fmt/format.h>

#include "herdscope/error.hpp"
#include "herdscope/ledger.hpp"
#include "herdscope/metrics.hpp"
#include "herdscope/network.hpp"
#include "herdscope/parallel.hpp"
#include "herdscope/stats.hpp"
#include "herdscope/time.hpp"
#include "numfmt.hpp"

namespace herdscope {
namespace {

using Engine = std::mt19937_64;

// 2006-01-01T00:00:00Z to 2009-01-01T00:00:00Z.
constexpr std::int64_t kStartEpoch = 1136073600;
constexpr std::int64_t kEndEpoch = 1230768000;
constexpr std::int64_t kDay = 86400;

Engine substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string listing_name(std::size_t k) { return fmt::format("P{:06d}", k + 1); }
std::string lender_name(std::size_t k) { return fmt::format("L{:06d}", k + 1); }

struct Field {
  std::string_view key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <class T>
Field real_field(std::string_view key, T SimConfig::*member) {
  return {key, [key, member](SimConfig& c, std::string_view v) { c.*member = parse_real_value(key, v); },
          [member](const SimConfig& c) { return detail::format_real(c.*member); }};
}

Field int_field(std::string_view key, int SimConfig::*member) {
  return {key, [key, member](SimConfig& c, std::string_view v) { c.*member = parse_int_value(key, v); },
          [member](const SimConfig& c) { return std::to_string(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"seed",
                 [](SimConfig& c, std::string_view v) {
                   auto parsed = detail::parse_int<std::uint64_t>(v);
                   if (!parsed) throw ConfigError("seed: expected a non-negative integer, got '" + std::string(v) + "'");
                   c.seed = *parsed;
                 },
                 [](const SimConfig& c) { return std::to_string(c.seed); }});
    f.push_back(int_field("n_listings", &SimConfig::n_listings));
    f.push_back(int_field("lender_pool_size", &SimConfig::lender_pool_size));
    f.push_back(real_field("expert_fraction", &SimConfig::expert_fraction));
    f.push_back(real_field("expert_signal_sd", &SimConfig::expert_signal_sd));
    f.push_back(real_field("p_imitate", &SimConfig::p_imitate));
    f.push_back(real_field("contributions_per_listing_mean", &SimConfig::contributions_per_listing_mean));
    f.push_back(real_field("base_amount_log_mean", &SimConfig::base_amount_log_mean));
    f.push_back(real_field("base_amount_log_sd", &SimConfig::base_amount_log_sd));
    f.push_back(real_field("inter_arrival_scale", &SimConfig::inter_arrival_scale));
    f.push_back(real_field("inter_arrival_shape", &SimConfig::inter_arrival_shape));
    f.push_back(real_field("quality_effect", &SimConfig::quality_effect));
    f.push_back(real_field("base_logit", &SimConfig::base_logit));
    f.push_back(int_field("memory_range", &SimConfig::memory_range));
    f.push_back(real_field("expert_selectivity", &SimConfig::expert_selectivity));
    f.push_back(real_field("expert_pull", &SimConfig::expert_pull));
    f.push_back(real_field("lure_strength", &SimConfig::lure_strength));
    f.push_back(real_field("lure_quality_loading", &SimConfig::lure_quality_loading));
    f.push_back(real_field("lure_noise_sd", &SimConfig::lure_noise_sd));
    f.push_back(real_field("imitation_offset", &SimConfig::imitation_offset));
    return f;
  }();
  return table;
}

struct ListingDraw {
  Listing listing;
  std::vector<Contribution> contributions;
  GroundTruth truth;
};

class Generator {
 public:
  explicit Generator(const SimConfig& c) : c_(c) {
    const auto pool = static_cast<std::size_t>(c.lender_pool_size);
    std::vector<std::size_t> order(pool);
    for (std::size_t i = 0; i < pool; ++i) order[i] = i;
    auto rng = substream(c.seed, ~std::uint64_t{0});
    for (std::size_t i = pool; i > 1; --i) {
      boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    const auto n_experts = static_cast<std::size_t>(std::llround(c.expert_fraction * static_cast<double>(pool)));
    experts_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_experts));
    others_.assign(order.begin() + static_cast<std::ptrdiff_t>(n_experts), order.end());
  }

  ListingDraw draw(std::size_t k) const {
    auto rng = substream(c_.seed, k);
    boost::random::normal_distribution<double> normal;
    boost::random::uniform_01<double> unif;

    ListingDraw out;
    const double q = normal(rng);
    const double signal = (q + c_.expert_signal_sd * normal(rng)) / std::sqrt(1.0 + c_.expert_signal_sd * c_.expert_signal_sd);
    const double lure = -c_.lure_quality_loading * q + c_.lure_noise_sd * normal(rng);
    const bool repaid = unif(rng) < inv_logit(c_.base_logit + c_.quality_effect * q);

    std::size_t n = 5;
    if (c_.contributions_per_listing_mean > 5.0) {
      boost::random::poisson_distribution<int, double> extra(c_.contributions_per_listing_mean - 5.0);
      n += static_cast<std::size_t>(extra(rng));
    }
    n = std::min(n, static_cast<std::size_t>(c_.lender_pool_size));
    const double expert_share = std::min(1.0, c_.expert_fraction * 2.0 * inv_logit(c_.expert_selectivity * signal));

    Listing& l = out.listing;
    l.listing_id = ListingId(listing_name(k));
    const std::int64_t slot = (kEndEpoch - kStartEpoch) / c_.n_listings;
    boost::random::uniform_int_distribution<std::int64_t> jitter(0, std::max<std::int64_t>(0, slot - 1));
    const std::int64_t created = kStartEpoch + static_cast<std::int64_t>(k) * slot + jitter(rng);
    l.created_at = Instant(Seconds(created));
    l.year = year_of(l.created_at);
    l.outcome = repaid ? Outcome::repaid : Outcome::defaulted;
    const double life_days = 14.0 + 365.0 * (0.5 + 2.5 * unif(rng));
    l.outcome_resolved_at = Instant(Seconds(created + static_cast<std::int64_t>(life_days * kDay)));

    boost::random::weibull_distribution<double> gap(c_.inter_arrival_shape, c_.inter_arrival_scale);
    boost::random::normal_distribution<double> log_amount(c_.base_amount_log_mean, c_.base_amount_log_sd);
    const auto window = static_cast<std::size_t>(c_.memory_range - 1);
    const auto p_keep = 1.0 - c_.p_imitate;

    std::unordered_set<std::size_t> used;
    std::vector<bool> is_expert;
    std::int64_t t = created;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool expert = unif(rng) < expert_share;
      const auto& primary = expert ? experts_ : others_;
      const auto& fallback = expert ? others_ : experts_;
      std::size_t available = 0;
      for (const auto* group : {&primary, &fallback}) {
        available = group->size();
        for (auto x : *group) available -= used.contains(x) ? 1 : 0;
        if (available > 0) {
          expert = (group == &experts_);
          std::size_t lender = 0;
          do {
            boost::random::uniform_int_distribution<std::size_t> pick(0, group->size() - 1);
            lender = (*group)[pick(rng)];
          } while (used.contains(lender));
          used.insert(lender);
          out.contributions.push_back({l.listing_id, LenderId(lender_name(lender)), {}, 0, 0});
          break;
        }
      }

      const std::size_t lo = i > window ? i - window : 0;
      const std::size_t visible = i - lo;
      std::int64_t amount = 0;
      bool copied = false;
      if (visible > 0) {
        std::size_t in_window_experts = 0;
        for (std::size_t j = lo; j < i; ++j) in_window_experts += is_expert[j] ? 1 : 0;
        const double nw = static_cast<double>(visible);
        const double ne = static_cast<double>(in_window_experts);
        const double weight = std::exp(c_.lure_strength * lure * (nw - ne) / nw +
                                       c_.expert_pull * ne * signal / nw + c_.imitation_offset);
        const double p_copy = 1.0 - std::pow(p_keep, weight);
        if (unif(rng) < p_copy) {
          boost::random::uniform_int_distribution<std::size_t> pick(lo, i - 1);
          amount = out.contributions[pick(rng)].amount_cents;
          copied = true;
        }
      }
      if (!copied) amount = std::max<std::int64_t>(1, std::llround(std::exp(log_amount(rng))));
      is_expert.push_back(expert);
      out.truth.expert_count += expert ? 1 : 0;
      out.truth.imitation_count += copied ? 1 : 0;

      t += std::max<std::int64_t>(1, std::llround(gap(rng)));
      auto& c = out.contributions.back();
      c.timestamp = Instant(Seconds(t));
      c.amount_cents = amount;
      total += amount;
    }

    // Borrower covariates, loosely tied to quality.
    static constexpr std::array kCategories{Category::auto_loan,        Category::personal,
                                            Category::business,         Category::student,
                                            Category::home_improvement, Category::debt_consolidation};
    boost::random::uniform_int_distribution<std::size_t> category(0, kCategories.size() - 1);
    l.category = kCategories[category(rng)];
    l.amount_requested_cents = total;
    l.homeowner = unif(rng) < inv_logit(0.3 * q - 0.2);
    l.credit_grade = static_cast<int>(
        std::clamp<long>(std::lround(5.0 + 0.5 * q + 1.2 * normal(rng)), kMinCreditGrade, kMaxCreditGrade));
    l.prosper_score = static_cast<int>(
        std::clamp<long>(std::lround(6.0 + 0.5 * q + 2.0 * normal(rng)), kMinProsperScore, kMaxProsperScore));
    l.debt_to_income = unif(rng) < 0.05 ? 0.0 : std::round(std::exp(std::log(0.25) - 0.1 * q + 0.6 * normal(rng)) * 1e4) / 1e4;
    l.description_words = std::round(std::exp(std::log(150.0) + 0.7 * normal(rng)));

    out.truth.listing_id = l.listing_id;
    out.truth.q = q;
    return out;
  }

 private:
  const SimConfig& c_;
  std::vector<std::size_t> experts_;
  std::vector<std::size_t> others_;
};

}  // namespace

void SimConfig::validate() const {
  auto require = [](bool ok, std::string_view field, std::string_view rule) {
    if (!ok) throw ConfigError(std::string(field) + " must be " + std::string(rule));
  };
  auto finite = [](double x) { return std::isfinite(x); };
  require(n_listings >= 1, "n_listings", "at least 1");
  require(lender_pool_size >= 5, "lender_pool_size", "at least 5");
  require(expert_fraction >= 0.0 && expert_fraction <= 1.0, "expert_fraction", "in [0,1]");
  require(finite(expert_signal_sd) && expert_signal_sd >= 0.0, "expert_signal_sd", "non-negative");
  require(p_imitate >= 0.0 && p_imitate <= 1.0, "p_imitate", "in [0,1]");
  require(finite(contributions_per_listing_mean) && contributions_per_listing_mean >= 5.0,
          "contributions_per_listing_mean", "at least 5");
  require(finite(base_amount_log_mean), "base_amount_log_mean", "finite");
  require(finite(base_amount_log_sd) && base_amount_log_sd >= 0.0, "base_amount_log_sd", "non-negative");
  require(finite(inter_arrival_scale) && inter_arrival_scale > 0.0, "inter_arrival_scale", "positive");
  require(finite(inter_arrival_shape) && inter_arrival_shape > 0.0, "inter_arrival_shape", "positive");
  require(finite(quality_effect), "quality_effect", "finite");
  require(finite(base_logit), "base_logit", "finite");
  require(memory_range >= 2, "memory_range", "at least 2");
  require(finite(expert_selectivity), "expert_selectivity", "finite");
  require(finite(expert_pull), "expert_pull", "finite");
  require(finite(lure_strength), "lure_strength", "finite");
  require(finite(lure_quality_loading), "lure_quality_loading", "finite");
  require(finite(lure_noise_sd) && lure_noise_sd >= 0.0, "lure_noise_sd", "non-negative");
  require(finite(imitation_offset), "imitation_offset", "finite");
  require(threads >= 1, "threads", "at least 1");
}

std::span<const std::string_view> sim_config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

SimConfig apply_sim_config(const KeyValueConfig& kv, SimConfig base) {
  for (const auto& f : fields()) {
    if (auto v = kv.get(f.key)) f.set(base, *v);
  }
  return base;
}

KeyValueConfig to_key_values(const SimConfig& config) {
  KeyValueConfig kv;
  for (const auto& f : fields()) kv.set(std::string(f.key), f.get(config));
  return kv;
}

SimOutput simulate(const SimConfig& config) {
  config.validate();
  const Generator gen(config);
  const auto n = static_cast<std::size_t>(config.n_listings);
  std::vector<ListingDraw> draws(n);
  parallel_for(n, config.threads, [&](std::size_t k) { draws[k] = gen.draw(k); });

  SimOutput out;
  for (auto& d : draws) out.listings.insert(d.listing);
  out.contributions = ContributionTable(out.listings);
  std::size_t index = 0;
  for (auto& d : draws) {
    for (auto& c : d.contributions) {
      c.input_index = index++;
      out.contributions.insert(std::move(c));
    }
    out.truth.push_back(std::move(d.truth));
  }
  return out;
}

void write_ground_truth_csv(std::ostream& out, std::span<const GroundTruth> truth) {
  out << "listing_id,q,expert_count,imitation_count\n";
  for (const auto& t : truth) {
    out << t.listing_id.str() << ',' << detail::format_real(t.q) << ',' << t.expert_count << ','
        << t.imitation_count << '\n';
  }
}

std::vector<SweepRow> sweep_imitation(const SimConfig& config, std::span<const double> p_grid,
                                      DegeneratePolicy policy) {
  if (p_grid.empty()) throw ConfigError("p_grid must not be empty");
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_grid value " + detail::format_real(p) + " is outside [0,1]");
  }
  MetricsConfig mc;
  mc.memory_range = config.memory_range;
  mc.degenerate_policy = policy;
  mc.validate();

  std::vector<SweepRow> rows;
  for (double p : p_grid) {
    SimConfig c = config;
    c.p_imitate = p;
    const auto sim = simulate(c);
    const auto ledger = LenderLedger::build(sim.listings, sim.contributions);
    const auto metrics = compute_metrics(sim.listings, sim.contributions, ledger, mc, c.threads);

    std::vector<double> cohs;
    for (const auto& r : metrics) {
      if (r.coh) cohs.push_back(*r.coh);
    }
    const auto ids = sim.listings.sorted_ids();
    std::vector<double> density(ids.size());
    parallel_for(ids.size(), c.threads, [&](std::size_t i) {
      const auto ordered = order_contributions(ids[i], sim.contributions);
      density[i] = edge_density(build_herding_network(ids[i], ordered, ledger, c.memory_range));
    });

    SweepRow row;
    row.p_imitate = p;
    row.listings_with_coh = cohs.size();
    row.mean_coh = cohs.empty() ? 0.0 : mean(cohs);
    row.coh_se = cohs.size() > 1 ? *sample_sd(cohs) / std::sqrt(static_cast<double>(cohs.size())) : 0.0;
    row.mean_edge_density = density.empty() ? 0.0 : mean(density);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "p_imitate,mean_coh,coh_se,mean_edge_density,listings_with_coh\n";
  for (const auto& r : rows) {
    out << detail::format_real(r.p_imitate) << ',' << detail::format_real(r.mean_coh) << ','
        << detail::format_real(r.coh_se) << ',' << detail::format_real(r.mean_edge_density) << ','
        << r.listings_with_coh << '\n';
  }
}

}  // namespace herdscope
