#include "herdscope/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <fmt/format.h>
#include "json.hpp"

#include "herdscope/error.hpp"
#include "numfmt.hpp"

namespace herdscope {
namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string_view bucket_color(std::string_view bucket) {
  if (bucket == "q1") return "#d7191c";
  if (bucket == "q2") return "#fdae61";
  if (bucket == "q3") return "#ffffbf";
  if (bucket == "q4") return "#a6d96a";
  if (bucket == "q5") return "#1a9641";
  return "#bdbdbd";
}

std::string export_dot(const HerdingNetwork& net) {
  std::string out = fmt::format("digraph {} {{\n", dot_quote(net.listing_id.str()));
  out += fmt::format("  graph [memory_range={}];\n  node [style=filled];\n", net.memory_range);
  for (const auto& n : net.nodes) {
    const auto bucket = color_bucket(n.prior_success);
    out += fmt::format("  {} [rank_first={}, prior_success=\"{}\", bucket=\"{}\", fillcolor=\"{}\"];\n",
                       dot_quote(n.id.str()), n.first_contribution_rank, detail::format_optional(n.prior_success),
                       bucket, bucket_color(bucket));
  }
  for (const auto& [from, to] : net.edges) {
    out += fmt::format("  {} -> {};\n", dot_quote(from.str()), dot_quote(to.str()));
  }
  out += "}\n";
  return out;
}

std::string export_graphml(const HerdingNetwork& net) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"prior_success\" for=\"node\" attr.name=\"prior_success\" attr.type=\"double\"/>\n"
      "  <key id=\"rank\" for=\"node\" attr.name=\"rank\" attr.type=\"int\"/>\n"
      "  <key id=\"bucket\" for=\"node\" attr.name=\"bucket\" attr.type=\"string\"/>\n";
  out += fmt::format("  <graph id=\"{}\" edgedefault=\"directed\">\n", xml_escape(net.listing_id.str()));
  for (const auto& n : net.nodes) {
    out += fmt::format("    <node id=\"{}\">\n", xml_escape(n.id.str()));
    if (n.prior_success) {
      out += fmt::format("      <data key=\"prior_success\">{}</data>\n", detail::format_real(*n.prior_success));
    }
    out += fmt::format("      <data key=\"rank\">{}</data>\n", n.first_contribution_rank);
    out += fmt::format("      <data key=\"bucket\">{}</data>\n", color_bucket(n.prior_success));
    out += "    </node>\n";
  }
  for (const auto& [from, to] : net.edges) {
    out += fmt::format("    <edge source=\"{}\" target=\"{}\"/>\n", xml_escape(from.str()), xml_escape(to.str()));
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

std::string export_json(const HerdingNetwork& net) {
  nlohmann::ordered_json j;
  j["listing_id"] = net.listing_id.str();
  j["m"] = net.memory_range;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    nlohmann::ordered_json node;
    node["id"] = n.id.str();
    node["prior_success"] = n.prior_success ? nlohmann::ordered_json(*n.prior_success) : nlohmann::ordered_json();
    node["rank"] = n.first_contribution_rank;
    node["bucket"] = color_bucket(n.prior_success);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [from, to] : net.edges) edges.push_back({{"from", from.str()}, {"to", to.str()}});
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

}  // namespace

const NetworkNode* HerdingNetwork::node(const LenderId& id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id, [](const NetworkNode& n, const LenderId& v) { return n.id < v; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

HerdingNetwork build_herding_network(const ListingId& listing_id, std::span<const Contribution> ordered,
                                     const LenderLedger& ledger, int memory_range, PriorSuccessPolicy policy) {
  if (memory_range < 2) throw ConfigError("memory_range must be >= 2");
  HerdingNetwork net;
  net.listing_id = listing_id;
  net.memory_range = memory_range;
  net.n_contributions = ordered.size();

  std::map<LenderId, NetworkNode> nodes;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& c = ordered[i];
    if (!nodes.contains(c.lender_id)) {
      nodes.emplace(c.lender_id, NetworkNode{c.lender_id, ledger.prior_success(c.lender_id, c.timestamp, policy, &listing_id), i + 1});
    }
    bool imitates = false;
    const std::size_t window = std::min<std::size_t>(i, static_cast<std::size_t>(memory_range - 1));
    for (std::size_t lag = 1; lag <= window; ++lag) {
      const auto& earlier = ordered[i - lag];
      if (earlier.amount_cents == c.amount_cents && earlier.lender_id != c.lender_id) {
        net.edges.emplace(c.lender_id, earlier.lender_id);
        imitates = true;
      }
    }
    if (imitates) ++net.imitating_contributions;
  }
  net.nodes.reserve(nodes.size());
  for (auto& [_, n] : nodes) net.nodes.push_back(std::move(n));
  return net;
}

NetworkStats network_stats(const HerdingNetwork& net) {
  NetworkStats s;
  s.node_count = net.nodes.size();
  s.edge_count = net.edges.size();
  s.imitating_share = net.n_contributions == 0 ? 0.0
                                                : static_cast<double>(net.imitating_contributions) /
                                                      static_cast<double>(net.n_contributions);

  std::map<LenderId, std::size_t> index;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) index.emplace(net.nodes[i].id, i);

  // Union-find over the undirected view.
  std::vector<std::size_t> parent(net.nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> in_degree(net.nodes.size(), 0);
  for (const auto& [from, to] : net.edges) {
    const std::size_t a = index.at(from);
    const std::size_t b = index.at(to);
    ++in_degree[b];
    parent[find(a)] = find(b);
  }
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (find(i) == i) ++s.weak_components;
  }

  double weighted = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (in_degree[i] > s.max_in_degree) {
      s.max_in_degree = in_degree[i];
      s.max_in_degree_lender = net.nodes[i].id;
    }
    if (in_degree[i] > 0 && net.nodes[i].prior_success) {
      weighted += static_cast<double>(in_degree[i]) * *net.nodes[i].prior_success;
      weight += static_cast<double>(in_degree[i]);
    }
  }
  if (weight > 0.0) s.leader_prior_success = weighted / weight;
  return s;
}

double edge_density(const HerdingNetwork& net) {
  if (net.n_contributions < 2) return 0.0;
  const double possible = static_cast<double>(net.n_contributions - 1) * static_cast<double>(net.memory_range - 1);
  return static_cast<double>(net.edges.size()) / possible;
}

NetworkFormat parse_network_format(std::string_view text) {
  if (text == "dot") return NetworkFormat::dot;
  if (text == "graphml") return NetworkFormat::graphml;
  if (text == "json") return NetworkFormat::json;
  throw ConfigError("unsupported network format '" + std::string(text) + "'; expected dot, graphml or json");
}

std::string_view file_extension(NetworkFormat format) {
  switch (format) {
    case NetworkFormat::dot: return "dot";
    case NetworkFormat::graphml: return "graphml";
    case NetworkFormat::json: return "json";
  }
  return "dot";
}

std::string color_bucket(std::optional<double> prior_success) {
  if (!prior_success) return "na";
  const int q = std::clamp(static_cast<int>(*prior_success * 5.0), 0, 4);
  return "q" + std::to_string(q + 1);
}

std::string export_network(const HerdingNetwork& net, NetworkFormat format) {
  switch (format) {
    case NetworkFormat::dot: return export_dot(net);
    case NetworkFormat::graphml: return export_graphml(net);
    case NetworkFormat::json: return export_json(net);
  }
  throw ConfigError("unsupported network format");
}

}  // namespace herdscope
