#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "herdscope/ledger.hpp"
#include "herdscope/metrics_config.hpp"
#include "herdscope/types.hpp"

namespace herdscope {

struct NetworkNode {
  LenderId id;
  std::optional<double> prior_success;
  /// 1-based rank of the lender's first contribution on the listing.
  std::size_t first_contribution_rank = 0;
};

/// Directed imitation graph over the lenders of one listing. An edge
/// (imitator, imitated) means the imitator repeated the imitated lender's
/// exact amount at most m-1 ranks later. Unweighted: repeats collapse.
struct HerdingNetwork {
  ListingId listing_id;
  int memory_range = 5;
  std::vector<NetworkNode> nodes;  ///< sorted by lender id
  std::set<std::pair<LenderId, LenderId>> edges;
  std::size_t n_contributions = 0;
  /// Contributions that matched at least one earlier amount in the window.
  std::size_t imitating_contributions = 0;

  const NetworkNode* node(const LenderId& id) const;
};

HerdingNetwork build_herding_network(const ListingId& listing_id, std::span<const Contribution> ordered,
                                     const LenderLedger& ledger, int memory_range,
                                     PriorSuccessPolicy policy = PriorSuccessPolicy::lookahead);

struct NetworkStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  /// imitating_contributions / n_contributions (0 for an empty listing).
  double imitating_share = 0.0;
  std::size_t weak_components = 0;
  std::size_t max_in_degree = 0;
  std::optional<LenderId> max_in_degree_lender;
  /// In-degree-weighted mean prior success of imitated lenders: who leads
  /// the herd. Undefined without edges into lenders with a track record.
  std::optional<double> leader_prior_success;
};

NetworkStats network_stats(const HerdingNetwork& net);

/// edges / ((N-1)(m-1)), the share of possible backward links realised.
double edge_density(const HerdingNetwork& net);

enum class NetworkFormat { dot, graphml, json };

/// Throws ConfigError naming the supported formats.
NetworkFormat parse_network_format(std::string_view text);
std::string_view file_extension(NetworkFormat format);

/// Colour bucket of a prior-success value: "q1".."q5" by fifths of [0,1],
/// "na" when undefined.
std::string color_bucket(std::optional<double> prior_success);

/// Deterministic export: nodes and edges in lexicographic order.
std::string export_network(const HerdingNetwork& net, NetworkFormat format);

}  // namespace herdscope
