#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herdscope/ledger.hpp"
#include "herdscope/metrics_config.hpp"
#include "herdscope/types.hpp"

namespace herdscope {

struct MetricsRecord {
  ListingId listing_id;
  std::optional<double> coh;
  bool coh_out_of_range = false;
  std::optional<double> momentum;
  std::optional<double> opinion_diversity;
  std::size_t n_contributions = 0;
  std::optional<double> avg_prior_success;
  std::size_t n_lenders_with_history = 0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// All per-listing measures for one listing. `ordered` must already be in
/// canonical order. Each distinct lender contributes one prior-success
/// value, taken at their first contribution to this listing.
MetricsRecord listing_metrics(const Listing& listing, std::span<const Contribution> ordered,
                              const LenderLedger& ledger, const MetricsConfig& config);

/// Metrics for every listing with at least one contribution, sorted by
/// listing_id. Work is split across `threads` workers; the output does not
/// depend on the thread count.
std::vector<MetricsRecord> compute_metrics(const ListingTable& listings, const ContributionTable& contributions,
                                           const LenderLedger& ledger, const MetricsConfig& config,
                                           unsigned threads = 1);

/// metrics.csv: undefined values are written as empty fields.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

struct CorrelationRow {
  std::string covariate;
  std::optional<double> r;
  std::optional<double> p;
  std::size_t n = 0;
  std::string warning;
};

struct NamedColumn {
  std::string name;
  std::vector<std::optional<double>> values;
};

/// Pearson r of `target` against each covariate with pairwise listwise
/// deletion, and its two-sided p-value from t = r*sqrt((n-2)/(1-r^2)) on
/// n-2 degrees of freedom.
std::vector<CorrelationRow> correlation_report(std::span<const std::optional<double>> target,
                                               std::span<const NamedColumn> covariates);

/// The covariates correlated with CoH: loan information, borrower profile
/// and lending dynamics, in that order.
std::vector<NamedColumn> herding_covariates(std::span<const MetricsRecord> records, const ListingTable& listings);

/// correlation_report of CoH against herding_covariates().
std::vector<CorrelationRow> herding_correlation_report(std::span<const MetricsRecord> records,
                                                       const ListingTable& listings);

void write_correlations_csv(std::ostream& out, std::span<const CorrelationRow> rows);

}  // namespace herdscope
