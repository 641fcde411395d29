#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "superdist/common.hpp"
#include "superdist/overlay.hpp"

namespace superdist {

// Multi-level remuneration parameters. level_shares[k-1] is the share of the
// purchase price awarded to the buyer's level-k ancestor; the originator
// receives whatever is left after levels, platform and collector.
struct RemunerationScheme {
  std::vector<double> level_shares;
  double platform_share = 0.0;
  double collector_share = 0.0;
  double peer_rebate = 0.0;

  std::size_t levels() const { return level_shares.size(); }

  void validate() const {
    double total = 0.0;
    for (double s : level_shares) {
      if (!(s >= 0.0)) fail(Errc::invalid_scheme, "level share must be >= 0");
      total += s;
    }
    if (!(platform_share >= 0.0) || !(collector_share >= 0.0) || !(peer_rebate >= 0.0))
      fail(Errc::invalid_scheme, "shares must be >= 0");
    total += platform_share + collector_share;
    if (total > 1.0 + 1e-9) fail(Errc::invalid_scheme, "shares exceed the purchase price");
    if (peer_rebate > platform_share + 1e-12)
      fail(Errc::invalid_scheme, "peer rebate must not exceed the platform share");
  }

  // The Potato v2.0 constants: reseller levels 10/3/1%, platform+payment 14%,
  // collector 14%, 2% rebate on peer purchases. Residual 58% to the originator.
  static RemunerationScheme potato() {
    RemunerationScheme s;
    s.level_shares = {0.10, 0.03, 0.01};
    s.platform_share = 0.14;
    s.collector_share = 0.14;
    s.peer_rebate = 0.02;
    return s;
  }

  static RemunerationScheme zero_share() {
    RemunerationScheme s;
    s.platform_share = 0.0;
    s.collector_share = 0.0;
    s.peer_rebate = 0.0;
    return s;
  }

  bool operator==(const RemunerationScheme&) const = default;
};

inline Money round_half_up(double x) { return static_cast<Money>(std::floor(x + 0.5)); }

inline Money share_amount(double share, Money price) {
  return round_half_up(share * static_cast<double>(price));
}

// Price as a function of market saturation s = n/N. This is the operator's
// forward-pricing control knob.
class PriceSchedule {
public:
  enum class Kind : std::uint8_t { constant, piecewise_linear, table };

  static PriceSchedule constant(Money price) {
    if (price < 0) fail(Errc::invalid_schedule, "price must be >= 0");
    PriceSchedule s;
    s.kind_ = Kind::constant;
    s.constant_price_ = price;
    return s;
  }

  // Breakpoints must start at s=0, end at s=1, with strictly increasing s.
  static PriceSchedule piecewise_linear(std::vector<std::pair<double, Money>> breakpoints) {
    if (breakpoints.size() < 2)
      fail(Errc::invalid_schedule, "piecewise schedule needs at least two breakpoints");
    if (breakpoints.front().first != 0.0 || breakpoints.back().first != 1.0)
      fail(Errc::invalid_schedule, "breakpoints must cover [0,1]");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (breakpoints[i].second < 0) fail(Errc::invalid_schedule, "price must be >= 0");
      if (i > 0 && !(breakpoints[i].first > breakpoints[i - 1].first))
        fail(Errc::invalid_schedule, "breakpoint saturations must be strictly increasing");
    }
    PriceSchedule s;
    s.kind_ = Kind::piecewise_linear;
    s.breakpoints_ = std::move(breakpoints);
    return s;
  }

  // prices[i] applies to saturations with floor(s * (prices.size()-1)) == i.
  static PriceSchedule table(std::vector<Money> prices) {
    if (prices.empty()) fail(Errc::invalid_schedule, "price table must not be empty");
    for (Money p : prices)
      if (p < 0) fail(Errc::invalid_schedule, "price must be >= 0");
    PriceSchedule s;
    s.kind_ = Kind::table;
    s.table_ = std::move(prices);
    return s;
  }

  Kind kind() const { return kind_; }

  Money price_at(double saturation) const {
    if (!(saturation >= 0.0 && saturation <= 1.0))
      fail(Errc::invalid_saturation, "saturation must be in [0,1]");
    switch (kind_) {
      case Kind::constant:
        return constant_price_;
      case Kind::piecewise_linear: {
        std::size_t i = 1;
        while (i + 1 < breakpoints_.size() && saturation > breakpoints_[i].first) ++i;
        const auto& [s0, p0] = breakpoints_[i - 1];
        const auto& [s1, p1] = breakpoints_[i];
        const double t = (saturation - s0) / (s1 - s0);
        return round_half_up(static_cast<double>(p0) +
                             t * static_cast<double>(p1 - p0));
      }
      case Kind::table: {
        const std::size_t n = table_.size() - 1;
        std::size_t idx = static_cast<std::size_t>(
            std::floor(saturation * static_cast<double>(n)));
        if (idx > n) idx = n;
        return table_[idx];
      }
    }
    fail(Errc::invalid_schedule, "corrupt schedule");
  }

  bool operator==(const PriceSchedule&) const = default;

private:
  Kind kind_ = Kind::constant;
  Money constant_price_ = 0;
  std::vector<std::pair<double, Money>> breakpoints_;
  std::vector<Money> table_;
};

// Split of one purchase. Sums to buyer_outlay exactly; the originator residual
// absorbs all rounding slack.
struct Allocation {
  Money buyer_outlay = 0;
  std::vector<Money> level_payouts;  // index k-1
  Money platform = 0;
  Money collector = 0;
  Money originator = 0;

  Money total_payout() const {
    Money total = platform + collector + originator;
    for (Money m : level_payouts) total += m;
    return total;
  }
};

// Splits `price` under `scheme`. Levels beyond available_ancestors fold into
// the originator residual. On peer purchases the rebate reduces both the
// buyer's outlay and the platform payout; resellers bear none of it.
inline Allocation allocate(Money price, const RemunerationScheme& scheme,
                           std::size_t available_ancestors, bool bought_from_peer) {
  if (price < 0) fail(Errc::invalid_price, "allocate: negative price");
  scheme.validate();

  const Money rebate = bought_from_peer ? share_amount(scheme.peer_rebate, price) : 0;

  Allocation a;
  a.buyer_outlay = price - rebate;
  const std::size_t paid_levels = std::min(scheme.levels(), available_ancestors);
  a.level_payouts.reserve(paid_levels);
  Money level_total = 0;
  for (std::size_t k = 0; k < paid_levels; ++k) {
    const Money payout = share_amount(scheme.level_shares[k], price);
    a.level_payouts.push_back(payout);
    level_total += payout;
  }
  a.platform = share_amount(scheme.platform_share, price) - rebate;
  a.collector = share_amount(scheme.collector_share, price);
  a.originator = a.buyer_outlay - a.platform - a.collector - level_total;
  return a;
}

// Ledger entries for one purchase, in fixed order: level rewards nearest
// first, then platform, collector, originator. Zero payouts are omitted.
inline void append_allocation_entries(RonLedger& ledger, Party buyer,
                                      std::span<const NodeId> trader_ancestors,
                                      Party originator, const Allocation& allocation,
                                      std::uint32_t transaction_index) {
  if (allocation.level_payouts.size() > trader_ancestors.size())
    fail(Errc::invalid_ledger_entry, "more level payouts than ancestors");
  if (allocation.originator < 0)
    fail(Errc::invalid_ledger_entry, "negative originator residual");
  for (std::size_t k = 0; k < allocation.level_payouts.size(); ++k) {
    if (allocation.level_payouts[k] == 0) continue;
    ledger.append({buyer, Party::of(trader_ancestors[k]), allocation.level_payouts[k],
                   PayoutReason::level_reward(static_cast<std::uint32_t>(k + 1)),
                   transaction_index});
  }
  if (allocation.platform != 0)
    ledger.append({buyer, Party::platform(), allocation.platform,
                   PayoutReason::platform_fee(), transaction_index});
  if (allocation.collector != 0)
    ledger.append({buyer, Party::collector(), allocation.collector,
                   PayoutReason::collector_fee(), transaction_index});
  if (allocation.originator != 0)
    ledger.append({buyer, originator, allocation.originator,
                   PayoutReason::originator_share(), transaction_index});
}

namespace detail {

// a_k(n, m) = P(node n is the level-k ancestor of node m) under uniform
// attachment: node m picks its seller uniformly among nodes 0..m-1, so
//   a_1(n, m) = 1/m,
//   a_k(n, m) = (1/m) * sum_{j=n+1}^{m-1} a_{k-1}(n, j).
// Returns rows[k-1][m] for m in [0, max_index]; entries with m <= n are 0.
inline std::vector<std::vector<double>> ancestor_prob_rows(std::uint32_t n,
                                                           std::uint32_t max_index,
                                                           std::size_t max_level) {
  std::vector<std::vector<double>> rows(max_level,
                                        std::vector<double>(max_index + 1, 0.0));
  if (max_level == 0) return rows;
  for (std::uint32_t m = n + 1; m <= max_index; ++m)
    rows[0][m] = 1.0 / static_cast<double>(m);
  for (std::size_t k = 1; k < max_level; ++k) {
    double running = 0.0;  // sum of a_{k-1}(n, j) for j in (n, m)
    for (std::uint32_t m = n + 1; m <= max_index; ++m) {
      rows[k][m] = running / static_cast<double>(m);
      running += rows[k - 1][m];
    }
  }
  return rows;
}

}  // namespace detail

// P(node n is the level-k ancestor of node m). Entry indices count from the
// originator at 0; n must name a trader that entered before m.
inline double ancestor_prob(std::uint32_t n, std::uint32_t m, std::uint32_t k) {
  if (n < 1 || m <= n || k < 1)
    fail(Errc::invalid_indices, "ancestor_prob requires 1 <= n < m and k >= 1");
  const auto rows = detail::ancestor_prob_rows(n, m, k);
  return rows[k - 1][m];
}

// Expected total level-reward income of the node entering at index n, over the
// remaining entries up to market size N. Real arithmetic, no rounding.
inline double expected_revenue(std::uint32_t n, std::uint32_t N,
                               const RemunerationScheme& scheme,
                               const PriceSchedule& schedule) {
  if (n > N) fail(Errc::invalid_indices, "expected_revenue requires n <= N");
  scheme.validate();
  const std::size_t levels = scheme.levels();
  if (levels == 0 || n == N) return 0.0;
  const auto rows = detail::ancestor_prob_rows(n, N, levels);
  double revenue = 0.0;
  for (std::uint32_t m = n + 1; m <= N; ++m) {
    const double price = static_cast<double>(
        schedule.price_at(static_cast<double>(m) / static_cast<double>(N)));
    double per_sale = 0.0;
    for (std::size_t k = 0; k < levels; ++k)
      per_sale += rows[k][m] * scheme.level_shares[k];
    revenue += per_sale * price;
  }
  return revenue;
}

// Price paid at entry n minus expected later resale revenue. Negative values
// mean early entrants profit in expectation.
inline double effective_price(std::uint32_t n, std::uint32_t N,
                              const RemunerationScheme& scheme,
                              const PriceSchedule& schedule) {
  const double revenue = expected_revenue(n, N, scheme, schedule);
  const double price = static_cast<double>(
      schedule.price_at(static_cast<double>(n) / static_cast<double>(N)));
  return price - revenue;
}

struct CurveRow {
  double saturation = 0.0;
  Money price_cents = 0;
  double expected_revenue = 0.0;
  double effective_price = 0.0;
};

inline std::vector<CurveRow> curve(std::uint32_t N, const RemunerationScheme& scheme,
                                   const PriceSchedule& schedule) {
  if (N < 1) fail(Errc::invalid_indices, "curve requires N >= 1");
  std::vector<CurveRow> rows;
  rows.reserve(N);
  for (std::uint32_t n = 1; n <= N; ++n) {
    CurveRow row;
    row.saturation = static_cast<double>(n) / static_cast<double>(N);
    row.price_cents = schedule.price_at(row.saturation);
    row.expected_revenue = expected_revenue(n, N, scheme, schedule);
    row.effective_price = static_cast<double>(row.price_cents) - row.expected_revenue;
    rows.push_back(row);
  }
  return rows;
}

inline void write_curve_csv(std::span<const CurveRow> rows, std::ostream& os) {
  os << "saturation,price_cents,expected_revenue,effective_price\n";
  for (const CurveRow& r : rows) {
    os << format_fixed(r.saturation, 6) << ',' << r.price_cents << ','
       << format_fixed(r.expected_revenue, 6) << ',' << format_fixed(r.effective_price, 6)
       << '\n';
  }
}

}  // namespace superdist
