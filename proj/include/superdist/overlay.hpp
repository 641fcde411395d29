#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "superdist/common.hpp"
#include "superdist/rng.hpp"

namespace superdist {

enum class NodeKind : std::uint8_t { originator, trader };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr auto operator<=>(const Vec2&, const Vec2&) = default;
};

struct CdoNode {
  NodeId id{};
  std::uint32_t entry_index = 0;  // 0 = originator; entry order, contiguous
  NodeKind kind = NodeKind::trader;
  std::optional<Vec2> position;
  double acquired_quality = 1.0;
};

struct CdoEdge {
  NodeId seller{};
  NodeId buyer{};
  Money price_paid = 0;
  double quality = 1.0;
  std::uint32_t entry_index = 0;  // the buying event; equals buyer.entry_index
};

// Content distribution overlay: a rooted supply tree grown by attachment.
// Single-writer; treat a populated graph as an immutable snapshot when shared.
class CdoGraph {
public:
  CdoGraph() = default;

  static CdoGraph with_originator(std::optional<Vec2> position = std::nullopt) {
    CdoGraph g;
    CdoNode root;
    root.id = NodeId{0};
    root.entry_index = 0;
    root.kind = NodeKind::originator;
    root.position = position;
    root.acquired_quality = 1.0;
    g.nodes_.push_back(root);
    g.parents_.push_back(std::nullopt);
    g.index_of_.emplace(root.id.value, 0);
    return g;
  }

  bool empty() const { return nodes_.empty(); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<CdoNode>& nodes() const { return nodes_; }
  const std::vector<CdoEdge>& edges() const { return edges_; }

  bool contains(NodeId id) const { return index_of_.find(id.value) != index_of_.end(); }

  const CdoNode& node(NodeId id) const { return nodes_[index_checked(id)]; }

  std::optional<NodeId> parent(NodeId id) const {
    const std::size_t i = index_checked(id);
    return parents_[i].has_value() ? std::optional<NodeId>(nodes_[*parents_[i]].id)
                                   : std::nullopt;
  }

  // Appends a trader buying from `seller`; returns the new node's id.
  NodeId attach(NodeId seller, Money price, double quality,
                std::optional<Vec2> position = std::nullopt) {
    const auto it = index_of_.find(seller.value);
    if (it == index_of_.end())
      fail(Errc::node_not_found, "attach: unknown seller " + std::to_string(seller.value));
    if (price < 0) fail(Errc::invalid_price, "attach: negative price");
    if (!(quality > 0.0 && quality <= 1.0))
      fail(Errc::invalid_quality, "attach: quality must be in (0,1]");

    CdoNode buyer;
    buyer.id = NodeId{next_id_++};
    buyer.entry_index = static_cast<std::uint32_t>(nodes_.size());
    buyer.kind = NodeKind::trader;
    buyer.position = position;
    buyer.acquired_quality = quality;

    CdoEdge edge;
    edge.seller = seller;
    edge.buyer = buyer.id;
    edge.price_paid = price;
    edge.quality = quality;
    edge.entry_index = buyer.entry_index;

    nodes_.push_back(buyer);
    parents_.push_back(it->second);
    index_of_.emplace(buyer.id.value, nodes_.size() - 1);
    edges_.push_back(edge);
    return buyer.id;
  }

  // Up to `k` ancestors walking supply edges toward the root, nearest first.
  std::vector<NodeId> ancestors(NodeId node, std::size_t k) const {
    std::size_t i = index_checked(node);
    std::vector<NodeId> out;
    while (out.size() < k && parents_[i].has_value()) {
      i = *parents_[i];
      out.push_back(nodes_[i].id);
    }
    return out;
  }

  // Ancestors that are traders, i.e. the chain above `node` with the
  // originator (always last on the path) excluded. These are the level-reward
  // candidates.
  std::vector<NodeId> trader_ancestors(NodeId node, std::size_t k) const {
    std::vector<NodeId> out = ancestors(node, k + 1);
    while (!out.empty() && nodes_[index_checked(out.back())].kind == NodeKind::originator)
      out.pop_back();
    if (out.size() > k) out.resize(k);
    return out;
  }

  NodeId uniform_random_seller(Rng& rng) const {
    if (nodes_.empty()) fail(Errc::empty_graph, "uniform_random_seller: empty graph");
    return nodes_[rng.uniform_below(nodes_.size())].id;
  }

  void write_edges_csv(std::ostream& os) const {
    os << "seller,buyer,price_cents,quality,entry_index\n";
    for (const CdoEdge& e : edges_) {
      os << e.seller.value << ',' << e.buyer.value << ',' << e.price_paid << ','
         << format_fixed(e.quality, 6) << ',' << e.entry_index << '\n';
    }
  }

private:
  std::size_t index_checked(NodeId id) const {
    const auto it = index_of_.find(id.value);
    if (it == index_of_.end())
      fail(Errc::node_not_found, "unknown node " + std::to_string(id.value));
    return it->second;
  }

  std::vector<CdoNode> nodes_;                       // ordered by entry_index
  std::vector<CdoEdge> edges_;                       // ordered by entry_index
  std::vector<std::optional<std::size_t>> parents_;  // node index -> parent index
  std::unordered_map<std::uint64_t, std::size_t> index_of_;
  std::uint64_t next_id_ = 1;
};

struct RonEntry {
  Party payer{};
  Party payee{};
  Money amount = 0;  // strictly positive
  PayoutReason reason{};
  std::uint32_t transaction_index = 0;

  friend constexpr auto operator<=>(const RonEntry&, const RonEntry&) = default;
};

// Remuneration overlay ledger: the ordered money-flow record generated from
// the supply tree. Append-only.
class RonLedger {
public:
  void append(RonEntry entry) {
    if (entry.amount <= 0)
      fail(Errc::invalid_ledger_entry, "ledger amounts must be strictly positive");
    entries_.push_back(std::move(entry));
  }

  const std::vector<RonEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool operator==(const RonLedger& other) const { return entries_ == other.entries_; }

  Money paid_for_transaction(std::uint32_t transaction_index) const {
    Money total = 0;
    for (const RonEntry& e : entries_)
      if (e.transaction_index == transaction_index) total += e.amount;
    return total;
  }

  Money total_received(const Party& payee) const {
    Money total = 0;
    for (const RonEntry& e : entries_)
      if (e.payee == payee) total += e.amount;
    return total;
  }

  Money total_paid(const Party& payer) const {
    Money total = 0;
    for (const RonEntry& e : entries_)
      if (e.payer == payer) total += e.amount;
    return total;
  }

  void write_csv(std::ostream& os) const {
    os << "payer,payee,amount_cents,reason,transaction_index\n";
    for (const RonEntry& e : entries_) {
      os << e.payer.to_string() << ',' << e.payee.to_string() << ',' << e.amount << ','
         << e.reason.to_string() << ',' << e.transaction_index << '\n';
    }
  }

private:
  std::vector<RonEntry> entries_;
};

}  // namespace superdist
