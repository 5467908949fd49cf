#ifndef HONEYDOC_DECOY_SCRIPT_H_
#define HONEYDOC_DECOY_SCRIPT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "honeydoc/core/bytes.h"

namespace honeydoc::decoy {

struct ScriptTurn {
  std::optional<Bytes> expect;  // nullopt matches any payload
  Bytes respond;                // may be empty: log only
  std::string stage;            // empty: not a logged stage
  bool operator==(const ScriptTurn&) const = default;
};

struct ServiceScript {
  std::string name;
  std::string log_tag;
  std::vector<ScriptTurn> turns;

  // First turn at or after `cursor` whose expectation occurs in `payload`.
  std::optional<std::size_t> Match(const Bytes& payload,
                                   std::size_t cursor) const;

  bool operator==(const ServiceScript&) const = default;
};

// smtp-postfix, ftp-amun, ssh-banner, distcc-listener.
const std::map<std::string, ServiceScript>& BuiltinScripts();

// Builtins plus scenario-defined scripts; later definitions replace builtins
// of the same name.
class ScriptLibrary {
 public:
  ScriptLibrary();
  // Throws ConfigError for a script without turns.
  void Add(ServiceScript script);
  const ServiceScript* Find(const std::string& name) const;

 private:
  std::map<std::string, ServiceScript> scripts_;
};

}  // namespace honeydoc::decoy

#endif  // HONEYDOC_DECOY_SCRIPT_H_
