#pragma once

#include <optional>
#include <span>
#include <vector>

#include "herdscope/types.hpp"

namespace herdscope {

// Lending-dynamics measures of one listing.

/// Gaps between launch, t_1, ..., t_N. The first gap runs from the
/// listing's launch, so the result has one entry per contribution.
std::vector<Seconds> inter_contribution_times(Instant launch, std::span<const Contribution> ordered);
std::vector<Seconds> inter_contribution_times(const Listing& listing, std::span<const Contribution> ordered);

/// Sample coefficient of variation of the inter-contribution times.
std::optional<double> momentum(std::span<const double> durations);
std::optional<double> momentum(std::span<const Seconds> durations);

/// Sample coefficient of variation of the contribution amounts.
std::optional<double> opinion_diversity(std::span<const double> amounts);

}  // namespace herdscope
