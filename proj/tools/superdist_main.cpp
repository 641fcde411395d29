// Experiment runner for the superdistribution toolkit.
//
// Subcommands: analyze, simulate, potato-demo, paradiso-demo, verify.
// Exit codes: 0 success, 1 verification/check failure, 2 usage/config error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "superdist/crypto_ed25519.hpp"
#include "superdist/superdist.hpp"

namespace fs = std::filesystem;
using namespace superdist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::config_error, "cannot write " + path.string());
  out << text;
}

void write_file(const fs::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::config_error, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::config_error, "cannot read " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::config_error, "cannot create output directory " + out);
  return dir;
}

struct SimulateOptions {
  std::string config_path;
  std::string out = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint32_t> runs_override;
  bool check_analytic = false;
};

int cmd_analyze(const std::string& config_path, const std::string& out) {
  const SimConfig config = load_sim_config_file(config_path);
  if (config.agents < 1) fail(Errc::config_error, "analyze requires agents >= 1");
  const auto rows = curve(config.agents, config.scheme, config.schedule);
  const fs::path dir = prepare_out_dir(out);
  std::ostringstream csv;
  write_curve_csv(rows, csv);
  write_file(dir / "curve.csv", csv.str());
  std::cout << "wrote " << (dir / "curve.csv").string() << " (" << rows.size()
            << " rows)\n";
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& opts) {
  SimConfig config = load_sim_config_file(opts.config_path);
  if (opts.seed_override) config.seed = *opts.seed_override;
  if (opts.runs_override) config.runs = *opts.runs_override;
  if (opts.runs_override && *opts.runs_override < 1)
    fail(Errc::config_error, "--runs must be >= 1");

  const fs::path dir = prepare_out_dir(opts.out);
  const SimResult result = run(config);

  {
    std::ostringstream csv;
    result.cdo.write_edges_csv(csv);
    write_file(dir / "edges.csv", csv.str());
  }
  {
    std::ostringstream csv;
    result.ledger.write_csv(csv);
    write_file(dir / "ledger.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_adoption_csv(result.legit_adoption, csv);
    write_file(dir / "adoption.csv", csv.str());
  }

  std::vector<RevenueStat> stats;
  const bool monte_carlo = config.runs >= 2 && !config.free_rider;
  if (monte_carlo) {
    stats = monte_carlo_revenue_table(config);
  } else {
    for (std::size_t n = 1; n < result.per_index_revenue.size(); ++n)
      stats.push_back({static_cast<std::uint32_t>(n),
                       static_cast<double>(result.per_index_revenue[n]), 0.0});
  }
  {
    std::ostringstream csv;
    write_revenue_by_index_csv(stats, csv);
    write_file(dir / "revenue_by_index.csv", csv.str());
  }
  std::cout << "wrote edges.csv, ledger.csv, adoption.csv, revenue_by_index.csv to "
            << dir.string() << '\n';

  if (opts.check_analytic) {
    if (!monte_carlo)
      fail(Errc::config_error,
           "--check-analytic needs runs >= 2 and no free_rider section");
    std::size_t failures = 0;
    for (const RevenueStat& s : stats) {
      const double analytic =
          expected_revenue(s.entry_index, config.agents, config.scheme, config.schedule);
      const double slack = 4.0 * s.std_error + 1e-9;
      if (std::abs(s.mean_cents - analytic) > slack) {
        ++failures;
        std::cout << "check-analytic: n=" << s.entry_index << " mean=" << s.mean_cents
                  << " analytic=" << analytic << " se=" << s.std_error << " FAIL\n";
      }
    }
    std::cout << "check-analytic: " << (stats.size() - failures) << "/" << stats.size()
              << " indices within 4 standard errors\n";
    return failures == 0 ? kExitOk : kExitCheckFailed;
  }
  return kExitOk;
}

// Replays the four-generation chain through both the accounting service and
// the simulator with a forced seller draw, and checks they agree.
int cmd_potato_demo(bool corrupt_registry) {
  const Money price = 100;
  AccountingService service;
  service.register_content("potato-track", RemunerationScheme::potato(),
                           PriceSchedule::constant(price), 4);

  std::vector<std::string> tans;
  for (std::uint32_t buyer = 1; buyer <= 4; ++buyer) {
    std::optional<std::string> seller_tan;
    if (buyer > 1) {
      // A corrupted registry walk would hand later buyers a stale TAN.
      const std::size_t cite = corrupt_registry && buyer > 2 ? 0 : tans.size() - 1;
      seller_tan = tans[cite];
    }
    tans.push_back(service.as_purchase("potato-track", NodeId{buyer}, seller_tan));
  }

  std::cout << "TAN ledger:\n";
  service.ledger().write_csv(std::cout);

  SimConfig config;
  config.agents = 4;
  config.scheme = RemunerationScheme::potato();
  config.schedule = PriceSchedule::constant(price);
  config.seed = 1;
  const SimResult sim_result =
      run(config, [](Rng&, const CdoGraph& g) { return g.nodes().back().id; });

  const Money first_buyer_rewards = service.ledger().total_received(Party::of(NodeId{1}));
  std::cout << "first buyer level rewards: " << first_buyer_rewards << " cents\n";

  bool ok = first_buyer_rewards == 14;
  ok = ok && service.ledger().paid_for_transaction(1) == 100;
  for (std::uint32_t tx = 2; tx <= 4; ++tx)
    ok = ok && service.ledger().paid_for_transaction(tx) == 98;
  ok = ok && sim_result.ledger == service.ledger();
  std::cout << (ok ? "ledgers match the expected allocation table\n"
                   : "ledger mismatch against the expected allocation table\n");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_paradiso_demo(const std::string& out, std::uint64_t seed) {
  const CryptoSuite suite = ed25519_suite();
  Rng rng(seed);
  CompliantDevice originator = CompliantDevice::create(rng, suite);
  CompliantDevice alice = CompliantDevice::create(rng, suite);
  CompliantDevice bob = CompliantDevice::create(rng, suite);
  const TrustRoots roots = {originator.public_key()};

  const std::string lyrics = "demo track: superdistribute me responsibly";
  const DigitalGood good =
      make_good(Bytes(lyrics.begin(), lyrics.end()), Rule::allow_all(),
                RemunerationScheme::potato(), Rule::min_distance_moved(100.0),
                "paradiso-demo-track");

  bool ok = true;
  const SignedContainer issued = originator.package_good(good, 3, suite);

  RuleContext moved;
  moved.now = 1;
  moved.distance_moved_since_acquisition = 150.0;
  const SignedContainer to_alice =
      resell(issued, originator, alice.public_key(), moved, suite);
  alice.acquire(to_alice, roots, suite);
  const SignedContainer to_bob = resell(to_alice, alice, bob.public_key(), moved, suite);
  bob.acquire(to_bob, roots, suite);

  const VerifyReport clean = verify(to_bob, roots, suite);
  std::cout << "chain of " << to_bob.chain.size() << " entries verifies: "
            << clean.to_string() << '\n';
  ok = ok && clean.valid();

  SignedContainer masqueraded = to_bob;
  masqueraded.content[0] ^= 0x01;
  const VerifyReport tampered = verify(masqueraded, roots, suite);
  std::cout << "content-masquerading attempt: " << tampered.to_string() << '\n';
  ok = ok && tampered == VerifyReport::content_mismatch();

  RewardingService rewards(RemunerationScheme::potato(), roots, suite);
  rewards.register_content(to_bob.association.digest, originator.public_key());
  const Receipt receipt = issue_receipt(bob, to_bob, 100, "paradiso-demo-tx-1", suite);
  const auto entries = rewards.redeem(receipt, to_bob);
  std::cout << "receipt redeemed into " << entries.size() << " ledger entries:\n";
  rewards.ledger().write_csv(std::cout);
  try {
    rewards.redeem(receipt, to_bob);
    ok = false;
    std::cout << "duplicate redemption was not rejected\n";
  } catch (const Error& e) {
    std::cout << "duplicate redemption rejected: " << e.what() << '\n';
    ok = ok && e.code() == Errc::already_redeemed;
  }

  const fs::path dir = prepare_out_dir(out);
  write_file(dir / "paradiso_container.sdc", serialize(to_bob));
  std::cout << "wrote " << (dir / "paradiso_container.sdc").string() << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const std::string& file, const std::vector<std::string>& trust_hex,
               const std::string& suite_name) {
  const CryptoSuite suite =
      suite_name == "test-double" ? test_double_suite() : ed25519_suite();

  SignedContainer container;
  try {
    container = deserialize_container(read_file(file));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  TrustRoots roots;
  for (const std::string& hex : trust_hex) {
    const auto key = parse_hex(hex);
    if (!key) {
      std::cerr << "error: --trust expects hex-encoded public keys\n";
      return kExitUsage;
    }
    roots.push_back(*key);
  }
  if (roots.empty()) {
    // Structural mode: trust the chain's own origin.
    roots.push_back(container.chain.empty() ? Bytes{} : container.chain.front().seller_public_key);
  }

  const VerifyReport report = verify(container, roots, suite);
  std::cout << report.to_string() << '\n';
  return report.valid() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"superdistribution markets: analytics, simulation and container tools"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out = ".";
  SimulateOptions sim_opts;
  bool corrupt_registry = false;
  std::uint64_t demo_seed = 2008;
  std::string verify_file;
  std::vector<std::string> trust_hex;
  std::string suite_name = "ed25519";
  std::uint64_t seed_value = 0;
  std::uint32_t runs_value = 0;

  CLI::App* analyze = app.add_subcommand("analyze", "write the price/revenue curve CSV");
  analyze->add_option("--config", config_path, "experiment config file")->required();
  analyze->add_option("--out", out, "output directory");

  CLI::App* simulate = app.add_subcommand("simulate", "run the market simulator");
  simulate->add_option("--config", sim_opts.config_path, "experiment config file")
      ->required();
  simulate->add_option("--out", sim_opts.out, "output directory");
  CLI::Option* seed_opt = simulate->add_option("--seed", seed_value, "override the seed");
  CLI::Option* runs_opt =
      simulate->add_option("--runs", runs_value, "override the run count");
  simulate->add_flag("--check-analytic", sim_opts.check_analytic,
                     "gate on Monte Carlo means matching the analytic expectation");

  CLI::App* potato =
      app.add_subcommand("potato-demo", "replay the four-generation TAN chain");
  potato->add_flag("--corrupt-registry", corrupt_registry,
                   "inject a stale TAN into the replay (expected to fail)");

  CLI::App* paradiso =
      app.add_subcommand("paradiso-demo", "chained signed-container walkthrough");
  paradiso->add_option("--out", out, "output directory");
  paradiso->add_option("--seed", demo_seed, "key generation seed");

  CLI::App* verify_cmd = app.add_subcommand("verify", "verify a container file");
  verify_cmd->add_option("container", verify_file, "path to a .sdc container")->required();
  verify_cmd->add_option("--trust", trust_hex, "trusted originator keys (hex)");
  verify_cmd->add_option("--suite", suite_name, "signature suite")
      ->check(CLI::IsMember({"ed25519", "test-double"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(config_path, out);
    if (simulate->parsed()) {
      if (seed_opt->count() > 0) sim_opts.seed_override = seed_value;
      if (runs_opt->count() > 0) sim_opts.runs_override = runs_value;
      return cmd_simulate(sim_opts);
    }
    if (potato->parsed()) return cmd_potato_demo(corrupt_registry);
    if (paradiso->parsed()) return cmd_paradiso_demo(out, demo_seed);
    if (verify_cmd->parsed()) return cmd_verify(verify_file, trust_hex, suite_name);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
