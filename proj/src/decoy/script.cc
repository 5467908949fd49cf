#include "honeydoc/decoy/script.h"

#include "honeydoc/core/error.h"

namespace honeydoc::decoy {
namespace {

ScriptTurn Turn(std::optional<std::string> expect, std::string respond,
                std::string stage) {
  ScriptTurn t;
  if (expect) t.expect = ToBytes(*expect);
  t.respond = ToBytes(respond);
  t.stage = std::move(stage);
  return t;
}

std::map<std::string, ServiceScript> MakeBuiltins() {
  std::map<std::string, ServiceScript> out;
  out["smtp-postfix"] = {
      "smtp-postfix",
      "smtp",
      {
          Turn("HELO", "250 mail.localdomain\r\n", "SMTP_HELO"),
          Turn("MAIL FROM", "250 2.1.0 Ok\r\n", "SMTP_MAIL"),
          Turn("RCPT TO", "250 2.1.5 Ok\r\n", "SMTP_RCPT"),
          Turn("DATA", "354 End data with <CR><LF>.<CR><LF>\r\n", "SMTP_DATA"),
          Turn(std::nullopt, "250 2.0.0 Ok: queued as 4B2C81F0A3\r\n",
               "SMTP_BODY"),
      }};
  out["ftp-amun"] = {
      "ftp-amun",
      "vuln_ftp",
      {
          Turn("USER", "331 Password required for anonymous.\r\n",
               "FTPD_STAGE1"),
          Turn("PASS", "230 User logged in.\r\n", "FTPD_STAGE1"),
          Turn("CWD", "250 CWD command successful.\r\n", "FTPD_STAGE2"),
          Turn("TYPE", "200 Type set to A.\r\n", "FTPD_STAGE2"),
      }};
  out["ssh-banner"] = {
      "ssh-banner",
      "ssh",
      {Turn(std::nullopt, "SSH-2.0-OpenSSH_6.6.1p1 Ubuntu-2ubuntu2.8\r\n",
            "SSH_BANNER")}};
  out["distcc-listener"] = {
      "distcc-listener", "distcc", {Turn(std::nullopt, "", "DISTCC")}};
  return out;
}

}  // namespace

std::optional<std::size_t> ServiceScript::Match(const Bytes& payload,
                                                std::size_t cursor) const {
  for (std::size_t i = cursor; i < turns.size(); ++i) {
    const ScriptTurn& t = turns[i];
    if (!t.expect || ContainsBytes(payload, *t.expect)) return i;
  }
  return std::nullopt;
}

const std::map<std::string, ServiceScript>& BuiltinScripts() {
  static const auto* builtins =
      new std::map<std::string, ServiceScript>(MakeBuiltins());
  return *builtins;
}

ScriptLibrary::ScriptLibrary() : scripts_(BuiltinScripts()) {}

void ScriptLibrary::Add(ServiceScript script) {
  if (script.turns.empty()) {
    throw ConfigError("script '" + script.name + "' has no turns");
  }
  std::string name = script.name;
  scripts_[name] = std::move(script);
}

const ServiceScript* ScriptLibrary::Find(const std::string& name) const {
  auto it = scripts_.find(name);
  return it == scripts_.end() ? nullptr : &it->second;
}

}  // namespace honeydoc::decoy
