#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "superdist/common.hpp"
#include "superdist/market.hpp"
#include "superdist/overlay.hpp"
#include "superdist/rng.hpp"

namespace superdist {

// Competition from an unremunerated copy: quality discount, expected
// sanction/effort cost, and the buyer valuation distribution. Valuations and
// utilities are in price units (cents / kCentsPerPriceUnit).
struct FreeRiderConfig {
  double free_quality = 1.0;
  double risk_cost_cents = 0.0;
  double valuation_low = 0.0;
  double valuation_high = 1.0;

  void validate() const {
    if (!(free_quality >= 0.0 && free_quality <= 1.0))
      fail(Errc::unsupported_config, "free_quality must be in [0,1]");
    if (!(risk_cost_cents >= 0.0))
      fail(Errc::unsupported_config, "risk_cost_cents must be >= 0");
    if (!(valuation_low <= valuation_high))
      fail(Errc::unsupported_config, "valuation_low must be <= valuation_high");
  }
};

struct SimConfig {
  std::uint32_t agents = 0;  // number of entering agents N
  RemunerationScheme scheme = RemunerationScheme::potato();
  PriceSchedule schedule = PriceSchedule::constant(100);
  std::uint64_t seed = 0;
  std::optional<FreeRiderConfig> free_rider;
  std::uint32_t runs = 1;

  void validate() const {
    scheme.validate();
    if (runs < 1) fail(Errc::unsupported_config, "runs must be >= 1");
    if (free_rider) free_rider->validate();
  }
};

enum class Choice : std::uint8_t { legit, free_copy };

inline Choice choose_with_effective_price(double valuation, double effective_price_cents,
                                          const FreeRiderConfig& fr) {
  const double utility_legit = valuation - effective_price_cents / kCentsPerPriceUnit;
  const double utility_free =
      valuation * fr.free_quality - fr.risk_cost_cents / kCentsPerPriceUnit;
  return utility_legit >= utility_free ? Choice::legit : Choice::free_copy;
}

// Linear-utility legit-vs-free choice for the entrant at index n. Ties go to
// the legitimate good.
inline Choice choose(double valuation, std::uint32_t n, std::uint32_t N,
                     const RemunerationScheme& scheme, const PriceSchedule& schedule,
                     const FreeRiderConfig& fr) {
  fr.validate();
  return choose_with_effective_price(valuation, effective_price(n, N, scheme, schedule), fr);
}

struct AdoptionBucket {
  double bucket_start = 0.0;
  double legit_fraction = 1.0;
};

struct SimResult {
  CdoGraph cdo;
  RonLedger ledger;
  std::map<NodeId, Money> net_cash;  // received minus paid, per overlay node
  Money platform_received = 0;
  Money collector_received = 0;
  std::vector<AdoptionBucket> legit_adoption;
  std::vector<Money> per_index_revenue;  // level-reward income by entry index
  std::uint32_t free_riders = 0;
};

// Seller selection policy; the default draws uniformly over all current
// legitimate owners, originator included.
using SellerPicker = std::function<NodeId(Rng&, const CdoGraph&)>;

inline NodeId uniform_seller_picker(Rng& rng, const CdoGraph& graph) {
  return graph.uniform_random_seller(rng);
}

namespace detail {

inline constexpr std::size_t kAdoptionBuckets = 10;

// One deterministic market run. Draw order per entrant: valuation (free-rider
// runs only), then the seller draw for legitimate buyers.
inline SimResult run_single(const SimConfig& config, const SellerPicker& picker,
                            std::uint64_t run_index) {
  config.validate();
  const std::uint32_t N = config.agents;
  const std::size_t levels = config.scheme.levels();

  Rng rng(mix_seed(config.seed, run_index));

  SimResult result;
  result.cdo = CdoGraph::with_originator();
  result.net_cash[NodeId{0}] = 0;

  std::vector<double> effective_prices;
  if (config.free_rider) {
    effective_prices.assign(N + 1, 0.0);
    for (std::uint32_t n = 1; n <= N; ++n)
      effective_prices[n] = effective_price(n, N, config.scheme, config.schedule);
  }

  std::array<std::uint32_t, kAdoptionBuckets> entrants_per_bucket{};
  std::array<std::uint32_t, kAdoptionBuckets> legit_per_bucket{};
  std::vector<Money> revenue_by_index(static_cast<std::size_t>(N) + 1, 0);

  for (std::uint32_t n = 1; n <= N; ++n) {
    const double saturation = static_cast<double>(n) / static_cast<double>(N);
    const std::size_t bucket =
        std::min<std::size_t>(kAdoptionBuckets - 1,
                              static_cast<std::size_t>(saturation * kAdoptionBuckets));
    ++entrants_per_bucket[bucket];

    if (config.free_rider) {
      const double valuation =
          rng.uniform(config.free_rider->valuation_low, config.free_rider->valuation_high);
      if (choose_with_effective_price(valuation, effective_prices[n], *config.free_rider) ==
          Choice::free_copy) {
        ++result.free_riders;
        continue;
      }
    }
    ++legit_per_bucket[bucket];

    const NodeId seller = picker(rng, result.cdo);
    const bool from_peer = result.cdo.node(seller).kind != NodeKind::originator;
    const Money price = config.schedule.price_at(saturation);
    const NodeId buyer = result.cdo.attach(seller, price, 1.0);
    const std::uint32_t tx = result.cdo.node(buyer).entry_index;
    const std::vector<NodeId> ancestors = result.cdo.trader_ancestors(buyer, levels);

    const Allocation alloc = allocate(price, config.scheme, ancestors.size(), from_peer);
    append_allocation_entries(result.ledger, Party::of(buyer), ancestors,
                              Party::of(NodeId{0}), alloc, tx);

    result.net_cash[buyer] -= alloc.buyer_outlay;
    for (std::size_t k = 0; k < alloc.level_payouts.size(); ++k) {
      result.net_cash[ancestors[k]] += alloc.level_payouts[k];
      revenue_by_index[result.cdo.node(ancestors[k]).entry_index] += alloc.level_payouts[k];
    }
    result.platform_received += alloc.platform;
    result.collector_received += alloc.collector;
    result.net_cash[NodeId{0}] += alloc.originator;
  }

  for (std::size_t b = 0; b < kAdoptionBuckets; ++b) {
    if (entrants_per_bucket[b] == 0) continue;
    result.legit_adoption.push_back(
        {static_cast<double>(b) / kAdoptionBuckets,
         static_cast<double>(legit_per_bucket[b]) / entrants_per_bucket[b]});
  }
  revenue_by_index.resize(result.cdo.node_count(), 0);
  result.per_index_revenue = std::move(revenue_by_index);
  return result;
}

}  // namespace detail

inline SimResult run(const SimConfig& config) {
  return detail::run_single(config, uniform_seller_picker, 0);
}

inline SimResult run(const SimConfig& config, const SellerPicker& picker) {
  return detail::run_single(config, picker, 0);
}

// Run `run_index` of a Monte Carlo batch; run() is index 0.
inline SimResult run_indexed(const SimConfig& config, std::uint64_t run_index) {
  return detail::run_single(config, uniform_seller_picker, run_index);
}

struct RevenueStat {
  std::uint32_t entry_index = 0;
  double mean_cents = 0.0;
  double std_error = 0.0;
};

// Sample mean and standard error of level-reward income per entry index over
// `runs` independent runs (seed_r = mix_seed(seed, r)).
inline std::vector<RevenueStat> monte_carlo_revenue_table(const SimConfig& config) {
  config.validate();
  if (config.free_rider)
    fail(Errc::unsupported_config, "monte_carlo_revenue requires free_rider disabled");
  if (config.runs < 2) fail(Errc::unsupported_config, "monte_carlo_revenue requires runs >= 2");

  const std::uint32_t N = config.agents;
  std::vector<double> sum(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> sum_sq(static_cast<std::size_t>(N) + 1, 0.0);
  for (std::uint32_t r = 0; r < config.runs; ++r) {
    const SimResult res = detail::run_single(config, uniform_seller_picker, r);
    for (std::uint32_t n = 0; n <= N; ++n) {
      const double x = static_cast<double>(res.per_index_revenue[n]);
      sum[n] += x;
      sum_sq[n] += x * x;
    }
  }

  std::vector<RevenueStat> stats;
  stats.reserve(N);
  const double runs = static_cast<double>(config.runs);
  for (std::uint32_t n = 1; n <= N; ++n) {
    RevenueStat s;
    s.entry_index = n;
    s.mean_cents = sum[n] / runs;
    const double variance =
        std::max(0.0, (sum_sq[n] - runs * s.mean_cents * s.mean_cents) / (runs - 1.0));
    s.std_error = std::sqrt(variance / runs);
    stats.push_back(s);
  }
  return stats;
}

inline std::pair<double, double> monte_carlo_revenue(const SimConfig& config,
                                                     std::uint32_t n) {
  if (n > config.agents) fail(Errc::invalid_indices, "entry index beyond market size");
  const auto stats = monte_carlo_revenue_table(config);
  if (n == 0) return {0.0, 0.0};
  return {stats[n - 1].mean_cents, stats[n - 1].std_error};
}

inline void write_adoption_csv(std::span<const AdoptionBucket> buckets, std::ostream& os) {
  os << "bucket_start_saturation,legit_fraction\n";
  for (const AdoptionBucket& b : buckets)
    os << format_fixed(b.bucket_start, 6) << ',' << format_fixed(b.legit_fraction, 6) << '\n';
}

inline void write_revenue_by_index_csv(std::span<const RevenueStat> stats, std::ostream& os) {
  os << "entry_index,mean_cents,std_error\n";
  for (const RevenueStat& s : stats)
    os << s.entry_index << ',' << format_fixed(s.mean_cents, 6) << ','
       << format_fixed(s.std_error, 6) << '\n';
}

}  // namespace superdist
