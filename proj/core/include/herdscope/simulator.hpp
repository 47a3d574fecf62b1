#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "herdscope/config.hpp"
#include "herdscope/metrics_config.hpp"
#include "herdscope/types.hpp"

namespace herdscope {

/// Synthetic marketplace. Each listing has a latent quality q ~ N(0,1)
/// that drives repayment. Experts see a noisy signal of q and favour good
/// listings; imitation copies an amount from the visible window, with a
/// propensity that grows when the window holds experts on a good listing
/// and when non-experts face a superficially attractive (lure) listing.
struct SimConfig {
  std::uint64_t seed = 42;
  int n_listings = 3000;
  int lender_pool_size = 1000;
  double expert_fraction = 0.3;
  double expert_signal_sd = 0.3;
  double p_imitate = 0.6;
  double contributions_per_listing_mean = 40.0;
  double base_amount_log_mean = 8.517193191416238;  // ln(5000 cents)
  double base_amount_log_sd = 1.0;
  /// Weibull inter-arrival times in seconds; shape < 1 gives a heavy tail.
  double inter_arrival_scale = 3600.0;
  double inter_arrival_shape = 0.6;
  double quality_effect = 2.0;
  double base_logit = 0.8;
  int memory_range = 5;

  /// How sharply experts concentrate on listings with a high signal.
  double expert_selectivity = 2.0;
  /// Imitation boost from experts in the window, scaled by their signal.
  double expert_pull = 3.0;
  /// Imitation boost from the lure among non-experts in the window.
  double lure_strength = 1.5;
  /// The lure loads negatively on quality: -loading * q + noise.
  double lure_quality_loading = 0.7;
  double lure_noise_sd = 0.7;
  /// Baseline log-multiplier on the imitation hazard.
  double imitation_offset = -1.0;

  /// Worker threads; the output does not depend on it.
  unsigned threads = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Keys understood by apply_sim_config, in declaration order.
std::span<const std::string_view> sim_config_keys();
SimConfig apply_sim_config(const KeyValueConfig& kv, SimConfig base = {});
KeyValueConfig to_key_values(const SimConfig& config);

struct GroundTruth {
  ListingId listing_id;
  double q = 0.0;
  std::size_t expert_count = 0;
  std::size_t imitation_count = 0;
};

struct SimOutput {
  ListingTable listings;
  ContributionTable contributions;
  std::vector<GroundTruth> truth;  ///< in listing order
};

SimOutput simulate(const SimConfig& config);

void write_ground_truth_csv(std::ostream& out, std::span<const GroundTruth> truth);

struct SweepRow {
  double p_imitate = 0.0;
  double mean_coh = 0.0;
  /// Standard error of mean_coh across listings.
  double coh_se = 0.0;
  double mean_edge_density = 0.0;
  std::size_t listings_with_coh = 0;
};

/// Simulates once per grid point with the same seed, differing only in
/// p_imitate, and summarises CoH (lag_mean at the config's memory range)
/// and herding-network edge density over listings. Constant windows, which
/// full copying produces, follow `policy`. Throws ConfigError for an empty
/// grid or a probability outside [0,1].
std::vector<SweepRow> sweep_imitation(const SimConfig& config, std::span<const double> p_grid,
                                      DegeneratePolicy policy = DegeneratePolicy::saturate);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace herdscope
