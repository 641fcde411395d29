#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace superdist {

// Money is always integer minor units (cents). Analytic quantities that mix
// money with probabilities are plain doubles measured in the same cents.
using Money = std::int64_t;
using Bytes = std::vector<std::uint8_t>;

// One price unit = 100 cents. Buyer valuations in the choice model are
// expressed in price units, so money-valued terms are divided by this.
inline constexpr double kCentsPerPriceUnit = 100.0;

struct NodeId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class Errc {
  node_not_found,
  empty_graph,
  empty_content,
  invalid_price,
  invalid_quality,
  invalid_saturation,
  invalid_indices,
  invalid_scheme,
  invalid_schedule,
  invalid_rule,
  invalid_context,
  invalid_ledger_entry,
  unsupported_config,
  association_error,
  redistribution_denied,
  resale_limit_exhausted,
  not_owner,
  already_redeemed,
  invalid_receipt,
  not_in_catalog,
  unknown_tan,
  parse_error,
  config_error,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string message) {
  throw Error(code, std::move(message));
}

// Payment endpoint in the remuneration ledger: an overlay node or one of the
// external accounts that sit outside the distribution overlay.
struct Party {
  enum class Kind : std::uint8_t { node, platform, collector, originator_account };

  Kind kind = Kind::node;
  NodeId node{};

  static Party of(NodeId id) { return Party{Kind::node, id}; }
  static Party platform() { return Party{Kind::platform, {}}; }
  static Party collector() { return Party{Kind::collector, {}}; }
  static Party originator_account() { return Party{Kind::originator_account, {}}; }

  bool is_node() const { return kind == Kind::node; }

  std::string to_string() const {
    switch (kind) {
      case Kind::node: return std::to_string(node.value);
      case Kind::platform: return "platform";
      case Kind::collector: return "collector";
      case Kind::originator_account: return "originator_account";
    }
    return "?";
  }

  friend constexpr auto operator<=>(const Party&, const Party&) = default;
};

struct PayoutReason {
  enum class Kind : std::uint8_t {
    resale_price,
    level_reward,
    platform_fee,
    collector_fee,
    originator_share,
    peer_rebate,
  };

  Kind kind = Kind::resale_price;
  std::uint32_t level = 0;  // meaningful for level_reward only

  static PayoutReason resale_price() { return {Kind::resale_price, 0}; }
  static PayoutReason level_reward(std::uint32_t k) { return {Kind::level_reward, k}; }
  static PayoutReason platform_fee() { return {Kind::platform_fee, 0}; }
  static PayoutReason collector_fee() { return {Kind::collector_fee, 0}; }
  static PayoutReason originator_share() { return {Kind::originator_share, 0}; }
  static PayoutReason peer_rebate() { return {Kind::peer_rebate, 0}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::resale_price: return "resale_price";
      case Kind::level_reward: return "level_reward_" + std::to_string(level);
      case Kind::platform_fee: return "platform_fee";
      case Kind::collector_fee: return "collector_fee";
      case Kind::originator_share: return "originator_share";
      case Kind::peer_rebate: return "peer_rebate";
    }
    return "?";
  }

  friend constexpr auto operator<=>(const PayoutReason&, const PayoutReason&) = default;
};

// Locale-independent fixed-point formatting; all CSV and canonical text forms
// go through here so outputs are byte-stable.
inline std::string format_fixed(double value, int precision) {
  if (value == 0.0) value = 0.0;  // normalise -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

inline constexpr char kHexDigits[] = "0123456789abcdef";

inline std::string to_hex(const std::uint8_t* data, std::size_t size) {
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(kHexDigits[data[i] >> 4]);
    out.push_back(kHexDigits[data[i] & 0xF]);
  }
  return out;
}

inline std::string to_hex(const Bytes& data) { return to_hex(data.data(), data.size()); }

inline std::optional<Bytes> parse_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  Bytes out;
  out.reserve(text.size() / 2);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = nibble(text[i]);
    int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace superdist
