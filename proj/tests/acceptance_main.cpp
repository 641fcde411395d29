// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. argv[1] = path to the CLI binary (for the reproducibility
// criterion), argv[2] = scratch directory.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "superdist/superdist.hpp"

namespace fs = std::filesystem;
using namespace superdist;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool pass,
            const std::string& detail = {}) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << label;
  if (!detail.empty()) std::cout << " (" << detail << ')';
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

bool relative_close(double actual, double exact, double rel_tol) {
  if (exact == 0.0) return std::abs(actual) <= 1e-15;
  return std::abs(actual - exact) <= rel_tol * std::abs(exact);
}

// --- criterion 1: allocation table ------------------------------------------

void criterion_1() {
  const RemunerationScheme scheme = RemunerationScheme::potato();
  const Allocation central = allocate(100, scheme, 3, false);
  const Allocation peer = allocate(100, scheme, 3, true);
  bool ok = central.buyer_outlay == 100 && central.level_payouts.size() == 3 &&
            central.level_payouts[0] == 10 && central.level_payouts[1] == 3 &&
            central.level_payouts[2] == 1 && central.platform == 14 &&
            central.collector == 14 && central.originator == 58 &&
            central.total_payout() == central.buyer_outlay;
  ok = ok && peer.buyer_outlay == 98 && peer.platform == 12 && peer.collector == 14 &&
       peer.level_payouts == std::vector<Money>{10, 3, 1} && peer.originator == 58 &&
       peer.total_payout() == peer.buyer_outlay;
  report(1, "Potato allocation of a 100c sale (central and peer)", ok);
}

// --- criterion 2: four-generation chain -------------------------------------

void criterion_2() {
  AccountingService service;
  service.register_content("track", RemunerationScheme::potato(),
                           PriceSchedule::constant(100), 4);
  std::optional<std::string> tan;
  for (std::uint32_t buyer = 1; buyer <= 4; ++buyer)
    tan = service.as_purchase("track", NodeId{buyer}, tan);

  SimConfig config;
  config.agents = 4;
  config.scheme = RemunerationScheme::potato();
  config.schedule = PriceSchedule::constant(100);
  config.seed = 7;
  const SimResult sim_result =
      run(config, [](Rng&, const CdoGraph& g) { return g.nodes().back().id; });

  const bool ok = sim_result.ledger == service.ledger() &&
                  service.ledger().total_received(Party::of(NodeId{1})) == 14 &&
                  sim_result.per_index_revenue[1] == 14;
  report(2, "four-generation chain: sim and TAN ledgers identical, buyer 1 earns 14c",
         ok);
}

// --- criterion 3: oracle equivalence ----------------------------------------

void criterion_3() {
  bool ok = true;
  std::string detail;
  const RemunerationScheme potato = RemunerationScheme::potato();
  const PriceSchedule sloped = PriceSchedule::piecewise_linear({{0.0, 100}, {1.0, 20}});

  for (std::uint32_t N = 2; N <= 7 && ok; ++N) {
    for (std::uint32_t k = 1; k <= 3 && ok; ++k) {
      for (std::uint32_t n = 1; n < N && ok; ++n) {
        for (std::uint32_t m = n + 1; m <= N && ok; ++m) {
          const double dp = ancestor_prob(n, m, k);
          const double exact = oracle::ancestor_prob(n, m, k);
          if (!relative_close(dp, exact, 1e-12)) {
            ok = false;
            detail = "a_k mismatch at n=" + std::to_string(n) + " m=" + std::to_string(m) +
                     " k=" + std::to_string(k);
          }
        }
      }
    }
    for (std::uint32_t n = 1; n <= N && ok; ++n) {
      const double dp = expected_revenue(n, N, potato, sloped);
      const double exact = oracle::expected_revenue(n, N, potato, sloped);
      if (!relative_close(dp, exact, 1e-12)) {
        ok = false;
        detail = "R mismatch at n=" + std::to_string(n) + " N=" + std::to_string(N);
      }
    }
  }
  report(3, "dynamic program matches exhaustive tree enumeration for N <= 7", ok, detail);
}

// --- criterion 4: Monte Carlo vs analytic -----------------------------------

void criterion_4() {
  SimConfig config;
  config.agents = 200;
  config.scheme = RemunerationScheme::potato();
  config.schedule = PriceSchedule::constant(100);
  config.seed = 20080101;
  config.runs = 20000;

  const auto stats = monte_carlo_revenue_table(config);
  bool ok = true;
  std::string detail;
  for (std::uint32_t n : {1u, 50u, 100u, 199u}) {
    const RevenueStat& s = stats[n - 1];
    const double analytic = expected_revenue(n, config.agents, config.scheme, config.schedule);
    const double diff = std::abs(s.mean_cents - analytic);
    if (diff > 4.0 * s.std_error) {
      ok = false;
      detail += "n=" + std::to_string(n) + " |" + std::to_string(s.mean_cents) + "-" +
                std::to_string(analytic) + "| > 4*" + std::to_string(s.std_error) + "; ";
    }
  }
  report(4, "20000-run Monte Carlo means within 4 standard errors of analytic R(n)", ok,
         detail);
}

// --- criterion 5: monotonicity ----------------------------------------------

void criterion_5() {
  bool ok = true;
  std::string detail;
  const PriceSchedule unit = PriceSchedule::constant(100);
  for (std::uint32_t N : {10u, 100u, 500u}) {
    const auto rows = curve(N, RemunerationScheme::potato(), unit);
    for (std::size_t i = 1; i < rows.size() && ok; ++i) {
      if (!(rows[i].expected_revenue < rows[i - 1].expected_revenue) ||
          !(rows[i].effective_price > rows[i - 1].effective_price)) {
        ok = false;
        detail = "monotonicity broken at N=" + std::to_string(N) + " row " +
                 std::to_string(i + 1);
      }
    }
    const auto flat = curve(N, RemunerationScheme::zero_share(), unit);
    for (const CurveRow& row : flat) {
      if (row.effective_price != static_cast<double>(row.price_cents)) {
        ok = false;
        detail = "zero-share effective price deviates at N=" + std::to_string(N);
      }
    }
  }
  report(5, "R(n) strictly decreasing, e(n) strictly increasing, e = price at zero shares",
         ok, detail);
}

// --- criterion 6: tamper detection ------------------------------------------

void criterion_6() {
  const CryptoSuite suite = test_double_suite();
  Rng rng(0xBADC0FFEE);

  // Pool of valid containers with chain lengths 1..6.
  std::vector<Bytes> pool;
  TrustRoots roots;
  for (int i = 0; i < 24; ++i) {
    const std::size_t hops = rng.uniform_below(6);  // chain length = hops + 1
    std::vector<CompliantDevice> devices;
    for (std::size_t d = 0; d <= hops; ++d)
      devices.push_back(CompliantDevice::create(rng, suite));
    roots.push_back(devices[0].public_key());

    Bytes content(1 + rng.uniform_below(200));
    for (auto& b : content) b = static_cast<std::uint8_t>(rng.uniform_below(256));
    const DigitalGood good =
        make_good(content, Rule::allow_all(), RemunerationScheme::potato(),
                  Rule::allow_all(), "pool-" + std::to_string(i));

    SignedContainer c = devices[0].package_good(good, 8, suite);
    RuleContext ctx;
    for (std::size_t hop = 1; hop <= hops; ++hop) {
      c = resell(c, devices[hop - 1], devices[hop].public_key(), ctx, suite);
      devices[hop].acquire(c, roots, suite);
    }
    if (!verify(c, roots, suite).valid()) {
      report(6, "tamper detection", false, "pool container failed to verify");
      return;
    }
    pool.push_back(serialize(c));
  }

  std::size_t undetected = 0;
  const int mutations = 10000;
  for (int i = 0; i < mutations; ++i) {
    const Bytes& original = pool[rng.uniform_below(pool.size())];
    Bytes mutated = original;
    const std::size_t at = rng.uniform_below(mutated.size());
    std::uint8_t replacement;
    do {
      replacement = static_cast<std::uint8_t>(rng.uniform_below(256));
    } while (replacement == mutated[at]);
    mutated[at] = replacement;

    try {
      const SignedContainer c = deserialize_container(mutated);
      if (verify(c, roots, suite).valid()) ++undetected;
    } catch (const Error&) {
      // Unparseable mutants count as detected.
    }
  }

  // Resale depth budget: the (k+1)-th hop must be rejected.
  bool limit_ok = true;
  {
    const std::uint32_t k = 3;
    std::vector<CompliantDevice> devices;
    for (std::uint32_t d = 0; d <= k + 1; ++d)
      devices.push_back(CompliantDevice::create(rng, suite));
    TrustRoots chain_roots = {devices[0].public_key()};
    const DigitalGood good = make_good(Bytes{'x'}, Rule::allow_all(),
                                       RemunerationScheme::potato(), Rule::allow_all());
    SignedContainer c = devices[0].package_good(good, k, suite);
    RuleContext ctx;
    for (std::uint32_t hop = 1; hop <= k; ++hop) {
      c = resell(c, devices[hop - 1], devices[hop].public_key(), ctx, suite);
      devices[hop].acquire(c, chain_roots, suite);
    }
    try {
      resell(c, devices[k], devices[k + 1].public_key(), ctx, suite);
      limit_ok = false;
    } catch (const Error& e) {
      limit_ok = e.code() == Errc::resale_limit_exhausted;
    }
  }

  // Receipts redeem once.
  bool receipt_ok = true;
  {
    Rng local(42);
    CompliantDevice originator = CompliantDevice::create(local, suite);
    CompliantDevice buyer = CompliantDevice::create(local, suite);
    TrustRoots r = {originator.public_key()};
    const DigitalGood good = make_good(Bytes{'y'}, Rule::allow_all(),
                                       RemunerationScheme::potato(), Rule::allow_all());
    SignedContainer c = originator.package_good(good, 2, suite);
    RuleContext ctx;
    c = resell(c, originator, buyer.public_key(), ctx, suite);
    buyer.acquire(c, r, suite);
    RewardingService service(RemunerationScheme::potato(), r, suite);
    service.register_content(c.association.digest, originator.public_key());
    const Receipt receipt = issue_receipt(buyer, c, 100, "acc-tx", suite);
    service.redeem(receipt, c);
    try {
      service.redeem(receipt, c);
      receipt_ok = false;
    } catch (const Error& e) {
      receipt_ok = e.code() == Errc::already_redeemed;
    }
  }

  report(6, "10000 single-byte mutations all detected; depth and receipt limits hold",
         undetected == 0 && limit_ok && receipt_ok,
         undetected == 0 ? "" : std::to_string(undetected) + " mutations went undetected");
}

// --- criterion 7: CLI reproducibility ---------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_7(const std::string& cli, const fs::path& scratch) {
  if (cli.empty()) {
    report(7, "CLI reproducibility", false, "no CLI path supplied");
    return;
  }
  fs::create_directories(scratch);
  const fs::path cfg = scratch / "repro.conf";
  {
    std::ofstream out(cfg);
    out << "version = 1\n[simulation]\nagents = 120\nseed = 31415926\nruns = 1\n";
  }
  const fs::path out_a = scratch / "run_a";
  const fs::path out_b = scratch / "run_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  const std::string base = "\"" + cli + "\" simulate --config \"" + cfg.string() + "\"";
  const int rc_a = std::system((base + " --out \"" + out_a.string() + "\" >/dev/null").c_str());
  const int rc_b = std::system((base + " --out \"" + out_b.string() + "\" >/dev/null").c_str());

  bool ok = rc_a == 0 && rc_b == 0;
  std::string detail;
  for (const char* name : {"edges.csv", "ledger.csv", "adoption.csv",
                           "revenue_by_index.csv"}) {
    const std::string a = slurp(out_a / name);
    const std::string b = slurp(out_b / name);
    if (a.empty() || a != b) {
      ok = false;
      detail += std::string(name) + " differs; ";
    }
  }
  report(7, "two CLI runs with identical config produce byte-identical CSVs", ok, detail);
}

// --- criterion 8: qualitative curve shape ------------------------------------

void criterion_8() {
  bool ok = true;
  std::string detail;
  const RemunerationScheme potato = RemunerationScheme::potato();
  const std::vector<PriceSchedule> schedules = {
      PriceSchedule::constant(100),
      PriceSchedule::piecewise_linear({{0.0, 100}, {1.0, 20}}),
  };
  for (std::size_t which = 0; which < schedules.size() && ok; ++which) {
    const std::uint32_t N = 100;
    const auto rows = curve(N, potato, schedules[which]);
    std::ostringstream csv;
    write_curve_csv(rows, csv);
    const std::string text = csv.str();
    if (text.find("saturation,price_cents,expected_revenue,effective_price\n") != 0 ||
        rows.size() != N) {
      ok = false;
      detail = "csv shape wrong";
      break;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const bool last = i + 1 == rows.size();
      if (rows[i].expected_revenue < 0 || (last && rows[i].expected_revenue != 0.0) ||
          (!last && !(rows[i].expected_revenue > 0)) ||
          (!last && !(rows[i].effective_price < static_cast<double>(rows[i].price_cents)))) {
        ok = false;
        detail = "curve shape wrong for schedule " + std::to_string(which) + " at row " +
                 std::to_string(i + 1);
        break;
      }
    }
  }
  report(8, "emitted curves: positive decreasing revenue, effective price below price", ok,
         detail);
}

// --- criterion 9: rewards beat the free rider --------------------------------

void criterion_9() {
  FreeRiderConfig fr;
  fr.free_quality = 0.8;
  fr.risk_cost_cents = 30.0;
  fr.valuation_low = 0.0;
  fr.valuation_high = 2.0;

  const auto adoption_stats = [&](const RemunerationScheme& scheme) {
    SimConfig config;
    config.agents = 200;
    config.scheme = scheme;
    config.schedule = PriceSchedule::constant(100);
    config.seed = 0x5EED;
    config.free_rider = fr;
    const int runs = 1000;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < runs; ++r) {
      const SimResult res = run_indexed(config, r);
      const double adoption =
          1.0 - static_cast<double>(res.free_riders) / config.agents;
      sum += adoption;
      sum_sq += adoption * adoption;
    }
    const double mean = sum / runs;
    const double variance = std::max(0.0, (sum_sq - runs * mean * mean) / (runs - 1.0));
    return std::pair<double, double>{mean, variance / runs};  // mean, se^2
  };

  const auto [mean_potato, var_potato] = adoption_stats(RemunerationScheme::potato());
  const auto [mean_zero, var_zero] = adoption_stats(RemunerationScheme::zero_share());
  const double pooled_se = std::sqrt(var_potato + var_zero);
  const double diff = mean_potato - mean_zero;
  const bool ok = diff > 3.0 * pooled_se;
  report(9, "legit adoption higher under the reward scheme than under zero shares", ok,
         "potato=" + format_fixed(mean_potato, 4) + " zero=" + format_fixed(mean_zero, 4) +
             " diff=" + format_fixed(diff, 4) + " pooled_se=" + format_fixed(pooled_se, 6));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "sd_acceptance";

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7(cli, scratch);
  criterion_8();
  criterion_9();

  if (g_failures == 0) {
    std::cout << "all acceptance criteria passed" << std::endl;
  } else {
    std::cout << g_failures << " acceptance criteria failed" << std::endl;
  }
  return g_failures;
}
