#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "superdist/common.hpp"
#include "superdist/sim.hpp"

namespace superdist {

// Experiment configuration file: INI-style sections [market], [schedule],
// [simulation], [free_rider] behind a leading `version = 1`. Unknown sections,
// unknown keys, duplicates and missing required keys are all errors; see
// docs/formats.md for the schema.

namespace configfile {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
inline T parse_number(std::string_view value, int line_no) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    fail(Errc::config_error, "line " + std::to_string(line_no) + ": bad number '" +
                                 std::string(value) + "'");
  return out;
}

inline std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(value.substr(start)));
      return out;
    }
    out.push_back(trim(value.substr(start, comma - start)));
    start = comma + 1;
  }
}

struct Entry {
  std::string value;
  int line_no = 0;
  mutable bool used = false;
};

class Sections {
public:
  void add(const std::string& section, const std::string& key, std::string value,
           int line_no) {
    auto [it, inserted] = entries_.emplace(section + "." + key, Entry{std::move(value), line_no});
    if (!inserted)
      fail(Errc::config_error,
           "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  void note_section(const std::string& section) { sections_.insert(section); }
  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (e == nullptr)
      fail(Errc::config_error, "missing key '" + key + "' in section [" + section + "]");
    return *e;
  }

  void check_all_used() const {
    for (const auto& [path, entry] : entries_) {
      if (!entry.used)
        fail(Errc::config_error, "line " + std::to_string(entry.line_no) +
                                     ": unknown key '" + path + "'");
    }
  }

private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> sections_;
};

inline Sections tokenize(std::string_view text) {
  static const std::set<std::string> known_sections = {"market", "schedule", "simulation",
                                                       "free_rider"};
  Sections out;
  std::string section;  // "" = top level
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(Errc::config_error, "line " + std::to_string(line_no) + ": malformed section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_sections.count(section))
        fail(Errc::config_error,
             "line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      out.note_section(section);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(Errc::config_error, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty())
      fail(Errc::config_error, "line " + std::to_string(line_no) + ": empty key");
    out.add(section, key, value, line_no);
  }
  return out;
}

}  // namespace configfile

inline SimConfig load_sim_config(std::string_view text) {
  using namespace configfile;
  const Sections sections = tokenize(text);

  const Entry& version = sections.require("", "version");
  if (version.value != "1")
    fail(Errc::config_error, "unsupported config version '" + version.value + "'");

  SimConfig config;

  if (sections.has_section("market")) {
    RemunerationScheme scheme;
    const Entry& shares = sections.require("market", "level_shares");
    for (std::string_view item : split_list(shares.value))
      scheme.level_shares.push_back(parse_number<double>(item, shares.line_no));
    const Entry& platform = sections.require("market", "platform_share");
    scheme.platform_share = parse_number<double>(platform.value, platform.line_no);
    const Entry& collector = sections.require("market", "collector_share");
    scheme.collector_share = parse_number<double>(collector.value, collector.line_no);
    const Entry& rebate = sections.require("market", "peer_rebate");
    scheme.peer_rebate = parse_number<double>(rebate.value, rebate.line_no);
    try {
      scheme.validate();
    } catch (const Error& e) {
      fail(Errc::config_error, std::string("[market]: ") + e.what());
    }
    config.scheme = std::move(scheme);
  }

  if (sections.has_section("schedule")) {
    const Entry& kind = sections.require("schedule", "kind");
    try {
      if (kind.value == "constant") {
        const Entry& price = sections.require("schedule", "price_cents");
        config.schedule =
            PriceSchedule::constant(parse_number<Money>(price.value, price.line_no));
      } else if (kind.value == "piecewise_linear") {
        const Entry& points = sections.require("schedule", "points");
        std::vector<std::pair<double, Money>> breakpoints;
        for (std::string_view item : split_list(points.value)) {
          const std::size_t colon = item.find(':');
          if (colon == std::string_view::npos)
            fail(Errc::config_error, "points entries must look like saturation:price");
          breakpoints.emplace_back(
              parse_number<double>(trim(item.substr(0, colon)), points.line_no),
              parse_number<Money>(trim(item.substr(colon + 1)), points.line_no));
        }
        config.schedule = PriceSchedule::piecewise_linear(std::move(breakpoints));
      } else if (kind.value == "table") {
        const Entry& prices = sections.require("schedule", "prices_cents");
        std::vector<Money> table;
        for (std::string_view item : split_list(prices.value))
          table.push_back(parse_number<Money>(item, prices.line_no));
        config.schedule = PriceSchedule::table(std::move(table));
      } else {
        fail(Errc::config_error, "unknown schedule kind '" + kind.value + "'");
      }
    } catch (const Error& e) {
      if (e.code() == Errc::config_error) throw;
      fail(Errc::config_error, std::string("[schedule]: ") + e.what());
    }
  }

  const Entry& agents = sections.require("simulation", "agents");
  config.agents = parse_number<std::uint32_t>(agents.value, agents.line_no);
  const Entry& seed = sections.require("simulation", "seed");
  config.seed = parse_number<std::uint64_t>(seed.value, seed.line_no);
  if (const Entry* runs = sections.find("simulation", "runs"))
    config.runs = parse_number<std::uint32_t>(runs->value, runs->line_no);
  if (config.runs < 1) fail(Errc::config_error, "runs must be >= 1");

  if (sections.has_section("free_rider")) {
    FreeRiderConfig fr;
    const Entry& quality = sections.require("free_rider", "free_quality");
    fr.free_quality = parse_number<double>(quality.value, quality.line_no);
    const Entry& risk = sections.require("free_rider", "risk_cost_cents");
    fr.risk_cost_cents = parse_number<double>(risk.value, risk.line_no);
    const Entry& low = sections.require("free_rider", "valuation_low");
    fr.valuation_low = parse_number<double>(low.value, low.line_no);
    const Entry& high = sections.require("free_rider", "valuation_high");
    fr.valuation_high = parse_number<double>(high.value, high.line_no);
    try {
      fr.validate();
    } catch (const Error& e) {
      fail(Errc::config_error, std::string("[free_rider]: ") + e.what());
    }
    config.free_rider = fr;
  }

  sections.check_all_used();
  return config;
}

inline SimConfig load_sim_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::config_error, "cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_sim_config(buffer.str());
}

}  // namespace superdist
