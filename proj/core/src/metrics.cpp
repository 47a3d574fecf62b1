#include "herdscope/metrics.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "csv.hpp"
#include "herdscope/dynamics.hpp"
#include "herdscope/error.hpp"
#include "herdscope/herding.hpp"
#include "herdscope/parallel.hpp"
#include "herdscope/stats.hpp"
#include "numfmt.hpp"

namespace herdscope {

MetricsRecord listing_metrics(const Listing& listing, std::span<const Contribution> ordered,
                              const LenderLedger& ledger, const MetricsConfig& config) {
  MetricsRecord rec;
  rec.listing_id = listing.listing_id;
  rec.n_contributions = ordered.size();

  if (ordered.size() >= static_cast<std::size_t>(config.min_contributions)) {
    std::vector<double> amounts;
    amounts.reserve(ordered.size());
    for (const auto& c : ordered) amounts.push_back(static_cast<double>(c.amount_cents));
    const auto coh = coefficient_of_herding(std::span<const double>(amounts), config);
    rec.coh = coh.value;
    rec.coh_out_of_range = coh.out_of_range;
    rec.momentum = momentum(inter_contribution_times(listing, ordered));
    rec.opinion_diversity = opinion_diversity(amounts);
  }

  std::unordered_set<LenderId> seen;
  double sum = 0.0;
  for (const auto& c : ordered) {
    if (!seen.insert(c.lender_id).second) continue;
    if (auto ps = ledger.prior_success(c.lender_id, c.timestamp, config.prior_success_policy, &listing.listing_id)) {
      sum += *ps;
      ++rec.n_lenders_with_history;
    }
  }
  if (rec.n_lenders_with_history > 0) rec.avg_prior_success = sum / static_cast<double>(rec.n_lenders_with_history);
  return rec;
}

std::vector<MetricsRecord> compute_metrics(const ListingTable& listings, const ContributionTable& contributions,
                                           const LenderLedger& ledger, const MetricsConfig& config,
                                           unsigned threads) {
  config.validate();
  std::vector<ListingId> ids;
  for (const auto& id : listings.sorted_ids()) {
    if (contributions.count(id) > 0) ids.push_back(id);
  }
  std::vector<MetricsRecord> out(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const auto ordered = order_contributions(ids[i], contributions);
    out[i] = listing_metrics(listings.at(ids[i]), ordered, ledger, config);
  });
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  csv::write_row(out, {"listing_id", "coh", "momentum", "opinion_diversity", "n_contributions", "avg_prior_success",
                       "n_lenders_with_history"});
  for (const auto& r : records) {
    csv::write_row(out, {r.listing_id.str(), detail::format_optional(r.coh), detail::format_optional(r.momentum),
                         detail::format_optional(r.opinion_diversity), std::to_string(r.n_contributions),
                         detail::format_optional(r.avg_prior_success), std::to_string(r.n_lenders_with_history)});
  }
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  csv::Reader reader(in);
  if (!reader.read_header()) throw ValidationError("metrics file has no header row");
  const std::array<std::string_view, 7> names{"listing_id", "coh", "momentum", "opinion_diversity",
                                              "n_contributions", "avg_prior_success", "n_lenders_with_history"};
  std::array<std::size_t, 7> col{};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto c = reader.column(names[i]);
    if (!c) throw ValidationError("missing required column " + std::string(names[i]));
    col[i] = *c;
  }
  auto optional_real = [&](std::size_t c, std::string_view name) -> std::optional<double> {
    const auto text = detail::trim(reader.get(c));
    if (text.empty()) return std::nullopt;
    auto v = detail::parse_real(text);
    if (!v) {
      throw ValidationError("row " + std::to_string(reader.line()) + ", column " + std::string(name) +
                            ": not a number");
    }
    return v;
  };
  auto count = [&](std::size_t c, std::string_view name) {
    auto v = detail::parse_int<std::size_t>(reader.get(c));
    if (!v) {
      throw ValidationError("row " + std::to_string(reader.line()) + ", column " + std::string(name) +
                            ": not a non-negative integer");
    }
    return *v;
  };

  std::vector<MetricsRecord> out;
  while (reader.next()) {
    MetricsRecord r;
    r.listing_id = ListingId(std::string(detail::trim(reader.get(col[0]))));
    r.coh = optional_real(col[1], names[1]);
    r.momentum = optional_real(col[2], names[2]);
    r.opinion_diversity = optional_real(col[3], names[3]);
    r.n_contributions = count(col[4], names[4]);
    r.avg_prior_success = optional_real(col[5], names[5]);
    r.n_lenders_with_history = count(col[6], names[6]);
    r.coh_out_of_range = r.coh && (*r.coh < -1.0 || *r.coh > 1.0);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_metrics_csv(in);
}

std::vector<CorrelationRow> correlation_report(std::span<const std::optional<double>> target,
                                               std::span<const NamedColumn> covariates) {
  std::vector<CorrelationRow> rows;
  for (const auto& cov : covariates) {
    if (cov.values.size() != target.size()) throw std::invalid_argument("covariate " + cov.name + ": length mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (target[i] && cov.values[i]) {
        x.push_back(*target[i]);
        y.push_back(*cov.values[i]);
      }
    }
    CorrelationRow row{cov.name, std::nullopt, std::nullopt, x.size(), ""};
    if (x.size() < 3) {
      row.warning = "fewer than 3 complete pairs";
    } else if (sample_sd(y).value_or(0.0) == 0.0 || sample_sd(x).value_or(0.0) == 0.0) {
      row.warning = "zero variance";
    } else {
      row.r = pearson(x, y);
      const double r = *row.r;
      const double df = static_cast<double>(x.size()) - 2.0;
      const double denom = 1.0 - r * r;
      const double t = denom <= 0.0 ? std::copysign(INFINITY, r) : r * std::sqrt(df / denom);
      row.p = student_t_two_sided_p(t, df);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<NamedColumn> herding_covariates(std::span<const MetricsRecord> records, const ListingTable& listings) {
  std::vector<NamedColumn> cols{{"amount_requested", {}},  {"description_length", {}}, {"homeowner", {}},
                                {"debt_to_income", {}},    {"credit_grade", {}},       {"prosper_score", {}},
                                {"log_n_contributions", {}}, {"momentum", {}},          {"opinion_diversity", {}},
                                {"avg_prior_success", {}}};
  for (auto& c : cols) c.values.reserve(records.size());
  for (const auto& r : records) {
    const Listing& l = listings.at(r.listing_id);
    cols[0].values.push_back(static_cast<double>(l.amount_requested_cents) / 100.0);
    cols[1].values.push_back(l.description_length_hundreds());
    cols[2].values.push_back(l.homeowner ? 1.0 : 0.0);
    cols[3].values.push_back(l.debt_to_income);
    cols[4].values.push_back(static_cast<double>(l.credit_grade));
    cols[5].values.push_back(static_cast<double>(l.prosper_score));
    cols[6].values.push_back(std::log(static_cast<double>(r.n_contributions)));
    cols[7].values.push_back(r.momentum);
    cols[8].values.push_back(r.opinion_diversity);
    cols[9].values.push_back(r.avg_prior_success);
  }
  return cols;
}

std::vector<CorrelationRow> herding_correlation_report(std::span<const MetricsRecord> records,
                                                       const ListingTable& listings) {
  std::vector<std::optional<double>> coh;
  coh.reserve(records.size());
  for (const auto& r : records) coh.push_back(r.coh);
  const auto cols = herding_covariates(records, listings);
  return correlation_report(coh, cols);
}

void write_correlations_csv(std::ostream& out, std::span<const CorrelationRow> rows) {
  csv::write_row(out, {"covariate", "r", "p", "n", "warning"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.covariate, detail::format_optional(r.r), detail::format_optional(r.p),
                         std::to_string(r.n), r.warning});
  }
}

}  // namespace herdscope
