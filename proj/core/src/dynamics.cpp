#include "herdscope/dynamics.hpp"

#include <vector>

#include "herdscope/stats.hpp"

namespace herdscope {

std::vector<Seconds> inter_contribution_times(Instant launch, std::span<const Contribution> ordered) {
  std::vector<Seconds> out;
  out.reserve(ordered.size());
  Instant prev = launch;
  for (const auto& c : ordered) {
    out.push_back(c.timestamp - prev);
    prev = c.timestamp;
  }
  return out;
}

std::vector<Seconds> inter_contribution_times(const Listing& listing, std::span<const Contribution> ordered) {
  return inter_contribution_times(listing.created_at, ordered);
}

std::optional<double> momentum(std::span<const double> durations) { return coefficient_of_variation(durations); }

std::optional<double> momentum(std::span<const Seconds> durations) {
  std::vector<double> d;
  d.reserve(durations.size());
  for (auto s : durations) d.push_back(static_cast<double>(s.count()));
  return momentum(std::span<const double>(d));
}

std::optional<double> opinion_diversity(std::span<const double> amounts) { return coefficient_of_variation(amounts); }

}  // namespace herdscope
