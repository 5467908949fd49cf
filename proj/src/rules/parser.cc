#include "honeydoc/rules/parser.h"

#include <cctype>
#include <charconv>
#include <set>

#include "honeydoc/core/error.h"

namespace honeydoc::rules {
namespace {

constexpr std::string_view kArrowUtf8 = "\xe2\x86\x92";

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  std::size_t pos() const { return pos_; }
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return AtEnd() ? '\0' : text_[pos_]; }

  [[noreturn]] void Fail(const std::string& message) const { FailAt(message, pos_); }
  [[noreturn]] void FailAt(const std::string& message, std::size_t at) const {
    throw ParseError(message, 0, at);
  }

  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  void Expect(char c) {
    SkipSpace();
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // A run of characters up to whitespace or one of `stop`.
  std::string_view Word(std::string_view stop = "") {
    SkipSpace();
    std::size_t start = pos_;
    while (!AtEnd() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           stop.find(text_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    if (pos_ == start) Fail("unexpected end of rule");
    return text_.substr(start, pos_ - start);
  }

  std::string_view text() const { return text_; }
  void Advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<IpAddr> ParseIpField(Cursor& cur) {
  std::size_t at = (cur.SkipSpace(), cur.pos());
  std::string_view word = cur.Word();
  if (word == "any") return std::nullopt;
  try {
    return IpAddr::Parse(word);
  } catch (const ParseError&) {
    cur.FailAt("bad address '" + std::string(word) + "'", at);
  }
}

std::optional<std::uint16_t> ParsePortField(Cursor& cur) {
  std::size_t at = (cur.SkipSpace(), cur.pos());
  std::string_view word = cur.Word("(");
  if (word == "any") return std::nullopt;
  unsigned value = 0;
  auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || end != word.data() + word.size() || value > 65535) {
    cur.FailAt("bad port '" + std::string(word) + "'", at);
  }
  return static_cast<std::uint16_t>(value);
}

std::int64_t ParseInteger(Cursor& cur, std::string_view word, std::size_t at) {
  std::int64_t value = 0;
  auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || end != word.data() + word.size()) {
    cur.FailAt("bad integer '" + std::string(word) + "'", at);
  }
  return value;
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Reads a double-quoted value; with `content` set, |hex| runs are decoded.
Bytes ParseQuoted(Cursor& cur, bool content) {
  cur.SkipSpace();
  if (cur.Peek() != '"') cur.Fail("expected '\"'");
  cur.Advance(1);
  Bytes out;
  bool in_hex = false;
  int pending_nibble = -1;
  while (true) {
    if (cur.AtEnd()) cur.Fail("unterminated string");
    char c = cur.Peek();
    if (in_hex) {
      if (c == '|') {
        if (pending_nibble >= 0) cur.Fail("odd number of hex digits");
        in_hex = false;
      } else if (c == ' ') {
        if (pending_nibble >= 0) cur.Fail("split hex byte");
      } else {
        int d = HexDigit(c);
        if (d < 0) cur.Fail("bad hex digit");
        if (pending_nibble < 0) {
          pending_nibble = d;
        } else {
          out.push_back(static_cast<std::uint8_t>(pending_nibble * 16 + d));
          pending_nibble = -1;
        }
      }
      cur.Advance(1);
      continue;
    }
    if (c == '"') {
      cur.Advance(1);
      return out;
    }
    if (c == '\\') {
      cur.Advance(1);
      char e = cur.Peek();
      if (e != '"' && e != '\\' && e != ';' && e != '|') {
        cur.Fail("bad escape");
      }
      out.push_back(static_cast<std::uint8_t>(e));
      cur.Advance(1);
      continue;
    }
    if (c == '|' && content) {
      in_hex = true;
      cur.Advance(1);
      continue;
    }
    out.push_back(static_cast<std::uint8_t>(c));
    cur.Advance(1);
  }
}

void ParseOptions(Cursor& cur, ClassificationRule& rule) {
  cur.Expect('(');
  std::set<std::string, std::less<>> seen;
  bool have_msg = false;
  while (true) {
    cur.SkipSpace();
    if (cur.Peek() == ')') {
      cur.Advance(1);
      break;
    }
    std::size_t key_at = cur.pos();
    std::string key(cur.Word(":;)"));
    if (!seen.insert(key).second) cur.FailAt("duplicate option '" + key + "'", key_at);
    cur.Expect(':');
    if (key == "msg") {
      std::size_t at = (cur.SkipSpace(), cur.pos());
      std::string value = ToString(ParseQuoted(cur, false));
      auto action = ParseRuleAction(value);
      if (!action) cur.FailAt("unknown action '" + value + "'", at);
      rule.action = *action;
      have_msg = true;
    } else if (key == "sid" || key == "priority") {
      std::size_t at = (cur.SkipSpace(), cur.pos());
      std::int64_t value = ParseInteger(cur, cur.Word(";)"), at);
      if (key == "sid") {
        if (value < 0 || value > 0xffffffffLL) cur.FailAt("sid out of range", at);
        rule.sid = static_cast<std::uint32_t>(value);
      } else {
        if (value < 0 || value > 65535) cur.FailAt("priority out of range", at);
        rule.priority = static_cast<int>(value);
      }
    } else if (key == "content") {
      rule.content = ParseQuoted(cur, true);
    } else {
      cur.FailAt("unsupported option '" + key + "'", key_at);
    }
    cur.SkipSpace();
    if (cur.Peek() == ';') {
      cur.Advance(1);
    } else if (cur.Peek() != ')') {
      cur.Fail("expected ';'");
    }
  }
  if (!have_msg) cur.Fail("missing msg option");
  cur.SkipSpace();
  if (!cur.AtEnd()) cur.Fail("trailing text after options");
}

}  // namespace

ClassificationRule ParseRule(std::string_view text) {
  Cursor cur(text);
  ClassificationRule rule;
  cur.SkipSpace();
  std::size_t at = cur.pos();
  if (cur.Word() != "alert") cur.FailAt("rule must start with 'alert'", at);
  at = (cur.SkipSpace(), cur.pos());
  std::string_view proto = cur.Word();
  if (proto != "any") {
    rule.proto = ParseProto(proto);
    if (!rule.proto) cur.FailAt("bad protocol '" + std::string(proto) + "'", at);
  }
  rule.src_ip = ParseIpField(cur);
  rule.src_port = ParsePortField(cur);
  cur.SkipSpace();
  if (!cur.Consume("->") && !cur.Consume(kArrowUtf8)) {
    cur.Fail("expected direction '->'");
  }
  rule.dst_ip = ParseIpField(cur);
  rule.dst_port = ParsePortField(cur);
  ParseOptions(cur, rule);
  return rule;
}

std::vector<ClassificationRule> ParseRuleset(std::string_view text) {
  std::vector<ClassificationRule> rules;
  std::set<std::uint32_t> sids;
  std::string logical;
  std::size_t logical_start = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (logical.empty()) logical_start = line_no;
    if (!line.empty() && line.back() == '\\') {
      logical.append(line.substr(0, line.size() - 1));
      logical += ' ';
      if (pos <= text.size()) continue;
    } else {
      logical.append(line);
    }
    std::string_view body = logical;
    std::size_t first = body.find_first_not_of(" \t");
    if (first == std::string_view::npos || body[first] == '#') {
      logical.clear();
      continue;
    }
    try {
      ClassificationRule rule = ParseRule(body);
      if (rule.sid && !sids.insert(*rule.sid).second) {
        throw ParseError("duplicate sid " + std::to_string(*rule.sid), 0,
                         body.find("sid"));
      }
      rules.push_back(std::move(rule));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), logical_start, e.offset());
    }
    logical.clear();
  }
  return rules;
}

}  // namespace honeydoc::rules
