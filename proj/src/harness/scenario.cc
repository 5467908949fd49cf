#include "honeydoc/harness/scenario.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "honeydoc/core/error.h"
#include "honeydoc/rules/parser.h"

#ifndef HONEYDOC_SCENARIO_DIR
#define HONEYDOC_SCENARIO_DIR "scenarios"
#endif

namespace honeydoc::harness {
namespace {

using orchestrator::OutboundPolicy;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Drops a trailing `#` comment that is not inside a quoted string.
std::string_view StripComment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted && c == '\\') {
      ++i;
    } else if (c == '"') {
      quoted = !quoted;
    } else if (c == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

// Splits on blanks, keeping quoted strings (quotes included) as one word.
std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ' || s[i] == '\t') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (s[i] == '"') {
      ++i;
      while (i < s.size() && s[i] != '"') i += s[i] == '\\' ? 2 : 1;
      ++i;
    } else {
      while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    }
    out.push_back(s.substr(start, std::min(i, s.size()) - start));
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::size_t line) : line_(line) {}

  [[noreturn]] void Fail(const std::string& msg) const {
    throw ParseError(msg, line_, 0);
  }

  template <class T>
  T Number(std::string_view text, T lo, T hi) const {
    T v{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || v < lo || v > hi) {
      Fail("bad number '" + std::string(text) + "'");
    }
    return v;
  }

  double Real(std::string_view text) const {
    try {
      std::size_t used = 0;
      double v = std::stod(std::string(text), &used);
      if (used != text.size()) Fail("bad number '" + std::string(text) + "'");
      return v;
    } catch (const std::logic_error&) {
      Fail("bad number '" + std::string(text) + "'");
    }
  }

  SimTime Millis(std::string_view text) const {
    try {
      return ParseMillis(text);
    } catch (const ParseError& e) {
      Fail(e.detail());
    }
  }

  std::uint16_t Port(std::string_view text) const {
    return Number<std::uint16_t>(text, 0, 65535);
  }

  IpAddr Ip(std::string_view text) const {
    try {
      return IpAddr::Parse(text);
    } catch (const ParseError& e) {
      Fail(e.detail());
    }
  }

  MacAddr Mac(std::string_view text) const {
    try {
      return MacAddr::Parse(text);
    } catch (const ParseError& e) {
      Fail(e.detail());
    }
  }

  std::pair<IpAddr, std::uint16_t> Endpoint(std::string_view text) const {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) Fail("expected ip:port, got '" + std::string(text) + "'");
    return {Ip(text.substr(0, colon)), Port(text.substr(colon + 1))};
  }

  // "node:port"
  std::pair<std::string, int> NodePort(std::string_view text) const {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      Fail("expected node:port, got '" + std::string(text) + "'");
    }
    return {std::string(text.substr(0, colon)),
            Number<int>(text.substr(colon + 1), 1, 65535)};
  }

  Bytes Quoted(std::string_view text) const {
    if (text.size() < 2 || text.front() != '"' || text.back() != '"') {
      Fail("expected a quoted string, got '" + std::string(text) + "'");
    }
    try {
      return UnescapeBytes(text.substr(1, text.size() - 2));
    } catch (const ParseError& e) {
      Fail(e.detail());
    }
  }

  std::uint32_t Isn(std::string_view text) const {
    return Number<std::uint32_t>(text, 0, 0xffffffffU);
  }

 private:
  std::size_t line_;
};

struct Shorthand {
  std::string node;
  int fcf_port = 0;
  std::size_t line = 0;
};

struct Builder {
  Scenario s;
  std::filesystem::path base_dir;
  std::optional<std::string> rules_ref;
  std::size_t rules_line = 0;
  bool have_seed = false;
  bool have_mechanism = false;
  std::vector<Shorthand> shorthand;
  std::set<std::pair<std::string, std::string>> seen_keys;

  decoy::DecoyConfig* decoy = nullptr;
  simnet::AttackerConfig* attacker = nullptr;
  decoy::ServiceScript* script = nullptr;
  std::string section;
  std::string section_arg;

  void Once(const LineParser& p, const std::string& key) {
    static const std::set<std::string> kRepeatable = {
        "switch", "link", "turn", "script", "redirect", "outbound"};
    if (kRepeatable.contains(key)) return;
    if (!seen_keys.emplace(section + " " + section_arg, key).second) {
      p.Fail("duplicate key '" + key + "' in [" + section + "]");
    }
  }

  void Header(const LineParser& p, std::string_view body) {
    std::vector<std::string_view> w = Words(body);
    if (w.empty() || w.size() > 2) p.Fail("bad section header");
    section = std::string(w[0]);
    section_arg = w.size() == 2 ? std::string(w[1]) : "";
    decoy = nullptr;
    attacker = nullptr;
    script = nullptr;
    static const std::set<std::string> kNamed = {"decoy", "attacker", "script"};
    static const std::set<std::string> kPlain = {"scenario", "topology", "policy",
                                                 "controller"};
    if (kNamed.contains(section)) {
      if (section_arg.empty()) p.Fail("[" + section + "] needs a name");
    } else if (kPlain.contains(section)) {
      if (!section_arg.empty()) p.Fail("[" + section + "] takes no name");
      if (!seen_keys.emplace(section, "").second) {
        p.Fail("section [" + section + "] repeated");
      }
    } else {
      p.Fail("unknown section [" + section + "]");
    }
    if (section == "decoy") {
      for (const auto& d : s.decoys) {
        if (d.name == section_arg) p.Fail("duplicate decoy '" + section_arg + "'");
      }
      decoy = &s.decoys.emplace_back();
      decoy->name = section_arg;
    } else if (section == "attacker") {
      for (const auto& a : s.attackers) {
        if (a.name == section_arg) p.Fail("duplicate attacker '" + section_arg + "'");
      }
      attacker = &s.attackers.emplace_back();
      attacker->name = section_arg;
    } else if (section == "script") {
      for (const auto& sc : s.scripts) {
        if (sc.name == section_arg) p.Fail("duplicate script '" + section_arg + "'");
      }
      script = &s.scripts.emplace_back();
      script->name = section_arg;
      script->log_tag = section_arg;
    } else if (section == "policy") {
      s.policy.emplace();
    }
  }

  void Pair(const LineParser& p, std::size_t line, const std::string& key,
            std::string_view value) {
    if (section.empty()) p.Fail("key '" + key + "' outside any section");
    Once(p, key);
    if (section == "scenario") {
      ScenarioKey(p, line, key, value);
    } else if (section == "topology") {
      TopologyKey(p, key, value);
    } else if (section == "decoy") {
      DecoyKey(p, line, key, value);
    } else if (section == "attacker") {
      AttackerKey(p, line, key, value);
    } else if (section == "script") {
      ScriptKey(p, key, value);
    } else if (section == "policy") {
      PolicyKey(p, key, value);
    } else {
      ControllerKey(p, key, value);
    }
  }

  void ScenarioKey(const LineParser& p, std::size_t line, const std::string& key,
                   std::string_view v) {
    if (key == "mechanism") {
      auto m = orchestrator::ParseMechanism(v);
      if (!m) p.Fail("unknown mechanism '" + std::string(v) + "'");
      s.mechanism = *m;
      have_mechanism = true;
    } else if (key == "seed") {
      s.seed = p.Number<std::uint64_t>(v, 0, UINT64_MAX);
      have_seed = true;
    } else if (key == "horizon_ms") {
      s.horizon = p.Millis(v);
    } else if (key == "rules") {
      rules_ref = std::string(v);
      rules_line = line;
    } else if (key == "name") {
      s.name = std::string(v);
    } else {
      p.Fail("unknown key '" + key + "' in [scenario]");
    }
  }

  void TopologyKey(const LineParser& p, const std::string& key, std::string_view v) {
    if (key == "link_latency_ms") {
      s.link_latency = p.Millis(v);
    } else if (key == "controller_latency_ms") {
      s.controller_latency = p.Millis(v);
    } else if (key == "controller_processing_ms") {
      s.controller_processing = p.Millis(v);
    } else if (key == "gateway_mac") {
      s.gateway_mac = p.Mac(v);
    } else if (key == "switch") {
      std::vector<std::string_view> w = Words(v);
      if (w.size() != 2) p.Fail("expected 'switch = NAME FCF|SPF'");
      ScenarioSwitch sw{std::string(w[0]), dataplane::SwitchRole::kFcf};
      if (w[1] == "SPF") {
        sw.role = dataplane::SwitchRole::kSpf;
      } else if (w[1] != "FCF") {
        p.Fail("switch role must be FCF or SPF");
      }
      for (const auto& other : s.switches) {
        if (other.name == sw.name) p.Fail("duplicate switch '" + sw.name + "'");
      }
      s.switches.push_back(std::move(sw));
    } else if (key == "link") {
      std::vector<std::string_view> w = Words(v);
      if (w.size() != 2 && w.size() != 3) p.Fail("expected 'link = a:p b:q [latency_ms]'");
      auto [a, ap] = p.NodePort(w[0]);
      auto [b, bp] = p.NodePort(w[1]);
      ScenarioLink l{a, ap, b, bp, std::nullopt};
      if (w.size() == 3) l.latency = p.Millis(w[2]);
      s.links.push_back(std::move(l));
    } else {
      p.Fail("unknown key '" + key + "' in [topology]");
    }
  }

  void DecoyKey(const LineParser& p, std::size_t line, const std::string& key,
                std::string_view v) {
    decoy::DecoyConfig& d = *decoy;
    if (key == "class") {
      auto c = decoy::ParseDecoyClass(v);
      if (!c) p.Fail("unknown decoy class '" + std::string(v) + "'");
      d.cls = *c;
    } else if (key == "ip") {
      d.ip = p.Ip(v);
    } else if (key == "mac") {
      d.mac = p.Mac(v);
    } else if (key == "open") {
      for (std::string_view w : Words(v)) {
        if (w == "any") {
          d.all_ports_open = true;
        } else {
          d.open_ports.insert(p.Port(w));
        }
      }
    } else if (key == "script") {
      std::vector<std::string_view> w = Words(v);
      if (w.size() != 2) p.Fail("expected 'script = PORT|any NAME'");
      if (w[0] == "any") {
        d.default_script = std::string(w[1]);
      } else if (!d.scripts.emplace(p.Port(w[0]), std::string(w[1])).second) {
        p.Fail("port " + std::string(w[0]) + " already has a script");
      }
    } else if (key == "response_delay_ms") {
      d.response_delay = p.Millis(v);
    } else if (key == "isn") {
      d.fixed_isn = p.Isn(v);
    } else if (key == "port") {
      shorthand.push_back({d.name, p.Number<int>(v, 1, 65535), line});
    } else if (key == "outbound") {
      std::vector<std::string_view> w = Words(v);
      if (w.size() != 3 && w.size() != 4) {
        p.Fail("expected 'outbound = AT_MS tcp|udp IP:PORT [\"payload\"]'");
      }
      decoy::OutboundIntent o;
      o.at = p.Millis(w[0]);
      auto proto = ParseProto(w[1]);
      if (!proto) p.Fail("unknown protocol '" + std::string(w[1]) + "'");
      o.proto = *proto;
      std::tie(o.dst_ip, o.dst_port) = p.Endpoint(w[2]);
      if (w.size() == 4) o.payload = p.Quoted(w[3]);
      d.outbound.push_back(std::move(o));
    } else {
      p.Fail("unknown key '" + key + "' in [decoy]");
    }
  }

  void AttackerKey(const LineParser& p, std::size_t line, const std::string& key,
                   std::string_view v) {
    simnet::AttackerConfig& a = *attacker;
    if (key == "ip") {
      a.ip = p.Ip(v);
    } else if (key == "mac") {
      a.mac = p.Mac(v);
    } else if (key == "target") {
      std::tie(a.target_ip, a.target_port) = p.Endpoint(v);
    } else if (key == "target_mac") {
      a.target_mac = p.Mac(v);
    } else if (key == "turn") {
      a.script.push_back(p.Quoted(v));
    } else if (key == "retransmit_initial_ms") {
      a.retransmit_initial = p.Millis(v);
    } else if (key == "retransmit_backoff") {
      a.retransmit_backoff = p.Real(v);
    } else if (key == "max_retries") {
      a.max_retries = p.Number<int>(v, 0, 64);
    } else if (key == "turn_timeout_ms") {
      a.turn_timeout = p.Millis(v);
    } else if (key == "rate") {
      a.rate_per_s = p.Real(v);
    } else if (key == "connections") {
      a.connections = p.Number<int>(v, 0, 1000000);
    } else if (key == "start_ms") {
      a.start = p.Millis(v);
    } else if (key == "base_port") {
      a.base_port = p.Number<std::uint16_t>(v, 1, 65535);
    } else if (key == "isn") {
      a.fixed_isn = p.Isn(v);
    } else if (key == "port") {
      shorthand.push_back({a.name, p.Number<int>(v, 1, 65535), line});
    } else {
      p.Fail("unknown key '" + key + "' in [attacker]");
    }
  }

  void ScriptKey(const LineParser& p, const std::string& key, std::string_view v) {
    if (key == "tag") {
      script->log_tag = std::string(v);
      return;
    }
    if (key != "turn") p.Fail("unknown key '" + key + "' in [script]");
    // turn = "expect"|ANY => "respond" [stage NAME]
    std::vector<std::string_view> w = Words(v);
    if ((w.size() != 3 && w.size() != 5) || w[1] != "=>") {
      p.Fail("expected 'turn = \"expect\"|ANY => \"respond\" [stage NAME]'");
    }
    decoy::ScriptTurn t;
    if (w[0] != "ANY") t.expect = p.Quoted(w[0]);
    t.respond = p.Quoted(w[2]);
    if (w.size() == 5) {
      if (w[3] != "stage") p.Fail("expected 'stage NAME'");
      t.stage = std::string(w[4]);
    }
    script->turns.push_back(std::move(t));
  }

  void PolicyKey(const LineParser& p, const std::string& key, std::string_view v) {
    OutboundPolicy& pol = *s.policy;
    if (key == "default") {
      if (v == "discard") {
        pol.default_action = OutboundPolicy::Default::kDiscard;
      } else if (v == "allow") {
        pol.default_action = OutboundPolicy::Default::kAllow;
      } else {
        p.Fail("policy default must be discard or allow");
      }
    } else if (key == "redirect") {
      std::vector<std::string_view> w = Words(v);
      if (w.size() != 2) p.Fail("expected 'redirect = IP:PORT DECOY'");
      if (!pol.redirect_map.emplace(p.Endpoint(w[0]), std::string(w[1])).second) {
        p.Fail("duplicate redirect for " + std::string(w[0]));
      }
    } else {
      p.Fail("unknown key '" + key + "' in [policy]");
    }
  }

  void ControllerKey(const LineParser& p, const std::string& key, std::string_view v) {
    if (key == "alert_delay_ms") {
      s.alert_delay = p.Millis(v);
    } else if (key == "handshake_timeout_ms") {
      s.handshake_timeout = p.Millis(v);
    } else if (key == "isn") {
      s.controller_isn = p.Isn(v);
    } else if (key == "direct_target") {
      s.direct_target = std::string(v);
    } else {
      p.Fail("unknown key '" + key + "' in [controller]");
    }
  }

  void Finish() {
    if (!have_mechanism) throw ConfigError("[scenario] mechanism is required");
    if (!have_seed) throw ConfigError("[scenario] seed is required");
    if (rules_ref) {
      std::filesystem::path path(*rules_ref);
      if (path.is_relative()) path = base_dir / path;
      std::ifstream in(path);
      if (!in) {
        throw ConfigError(fmt::format("line {}: rules file '{}' not found",
                                      rules_line, path.string()));
      }
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        s.rules = rules::ParseRuleset(buf.str());
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.detail(), e.line(), e.offset());
      }
      s.rules_path = path;
    } else if (s.mechanism != orchestrator::Mechanism::kDirect) {
      throw ConfigError("[scenario] rules is required for mechanism " +
                        std::string(orchestrator::MechanismName(s.mechanism)));
    }
    if (!shorthand.empty()) {
      const ScenarioSwitch* fcf = nullptr;
      for (const auto& sw : s.switches) {
        if (sw.role == dataplane::SwitchRole::kFcf) {
          if (fcf) throw ConfigError("more than one FCF switch");
          fcf = &sw;
        }
      }
      if (!fcf) throw ConfigError("'port =' needs an FCF switch in [topology]");
      std::map<int, std::string> used;
      for (const auto& l : s.links) {
        if (l.a_node == fcf->name) used.emplace(l.a_port, l.a_node + "-" + l.b_node);
        if (l.b_node == fcf->name) used.emplace(l.b_port, l.a_node + "-" + l.b_node);
      }
      for (const Shorthand& sh : shorthand) {
        auto [it, fresh] = used.emplace(sh.fcf_port, sh.node);
        if (!fresh) {
          throw ConfigError(fmt::format(
              "line {}: {} and {} both claim {} port {}", sh.line, it->second,
              sh.node, fcf->name, sh.fcf_port));
        }
        s.links.push_back({sh.node, 1, fcf->name, sh.fcf_port, std::nullopt});
      }
    }
  }
};

}  // namespace

Scenario ParseScenario(std::string_view text, const std::filesystem::path& base_dir,
                       std::string name) {
  Builder b;
  b.base_dir = base_dir;
  b.s.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = Trim(StripComment(raw));
    if (line.empty()) continue;
    LineParser p(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') p.Fail("unterminated section header");
      b.Header(p, line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) p.Fail("expected 'key = value'");
    std::string key(Trim(line.substr(0, eq)));
    std::string_view value = Trim(line.substr(eq + 1));
    if (key.empty()) p.Fail("empty key");
    if (value.empty()) p.Fail("empty value for '" + key + "'");
    b.Pair(p, line_no, key, value);
  }
  b.Finish();
  ValidateScenario(b.s);
  return std::move(b.s);
}

std::optional<std::uint64_t> SeedFromEnvironment() {
  const char* env = std::getenv("HONEYDOC_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::string_view text(env);
  std::uint64_t seed = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ConfigError("HONEYDOC_SEED is not a number: '" + std::string(text) + "'");
  }
  return seed;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s;
  try {
    s = ParseScenario(buf.str(), path.parent_path(), path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line(), e.offset());
  }
  if (auto seed = SeedFromEnvironment()) s.seed = *seed;
  return s;
}

void ValidateScenario(const Scenario& s) {
  std::set<std::string> names;
  auto claim = [&](const std::string& n) {
    if (n.empty()) throw ConfigError("empty node name");
    if (!names.insert(n).second) throw ConfigError("node name '" + n + "' used twice");
  };
  for (const auto& sw : s.switches) claim(sw.name);
  for (const auto& d : s.decoys) claim(d.name);
  for (const auto& a : s.attackers) claim(a.name);

  std::set<std::string> script_names;
  for (const auto& [n, sc] : decoy::BuiltinScripts()) script_names.insert(n);
  for (const auto& sc : s.scripts) {
    if (sc.turns.empty()) throw ConfigError("script '" + sc.name + "' has no turns");
    script_names.insert(sc.name);
  }

  // Which switch port each decoy hangs off, for the fingerprint check.
  std::map<std::pair<std::string, int>, std::string> ports;
  for (const ScenarioLink& l : s.links) {
    for (const auto& [node, port] : {std::pair{l.a_node, l.a_port},
                                     std::pair{l.b_node, l.b_port}}) {
      if (!names.contains(node)) throw ConfigError("link to unknown node '" + node + "'");
      auto [it, fresh] = ports.emplace(std::pair{node, port}, l.a_node + "-" + l.b_node);
      if (!fresh) {
        throw ConfigError(fmt::format("port {}:{} carries two links ({} and {})", node,
                                      port, it->second, l.a_node + "-" + l.b_node));
      }
    }
  }

  std::map<IpAddr, const decoy::DecoyConfig*> by_ip;
  for (const auto& d : s.decoys) {
    if (d.ip == IpAddr()) throw ConfigError("decoy '" + d.name + "' has no ip");
    for (const auto& [port, name] : d.scripts) {
      if (!script_names.contains(name)) {
        throw ConfigError("decoy '" + d.name + "' uses unknown script '" + name + "'");
      }
    }
    if (d.default_script && !script_names.contains(*d.default_script)) {
      throw ConfigError("decoy '" + d.name + "' uses unknown script '" +
                        *d.default_script + "'");
    }
    auto [it, fresh] = by_ip.emplace(d.ip, &d);
    if (!fresh && it->second->mac != d.mac) {
      throw ConfigError(fmt::format("decoys '{}' and '{}' share {} but not the MAC",
                                    it->second->name, d.name, d.ip.ToString()));
    }
  }
  for (const auto& a : s.attackers) {
    if (a.script.empty() && a.connections > 0 && a.plan.empty()) {
      throw ConfigError("attacker '" + a.name + "' has no turns");
    }
    if (!by_ip.contains(a.target_ip)) {
      throw ConfigError(fmt::format("attacker '{}' targets {}, which no decoy carries",
                                    a.name, a.target_ip.ToString()));
    }
  }
  if (s.direct_target) {
    bool found = false;
    for (const auto& d : s.decoys) found = found || d.name == *s.direct_target;
    if (!found) throw ConfigError("unknown direct target '" + *s.direct_target + "'");
  }
  if (s.policy) {
    for (const auto& [dst, name] : s.policy->redirect_map) {
      bool found = false;
      for (const auto& d : s.decoys) found = found || d.name == name;
      if (!found) throw ConfigError("outbound redirect to unknown decoy '" + name + "'");
    }
  }
}

std::filesystem::path ScenarioDir() { return HONEYDOC_SCENARIO_DIR; }

}  // namespace honeydoc::harness
