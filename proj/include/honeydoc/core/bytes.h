#ifndef HONEYDOC_CORE_BYTES_H_
#define HONEYDOC_CORE_BYTES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace honeydoc {

using Bytes = std::vector<std::uint8_t>;

Bytes ToBytes(std::string_view text);
std::string ToString(std::span<const std::uint8_t> bytes);

// Lowercase hex, two digits per byte.
std::string HexEncode(std::span<const std::uint8_t> bytes);
Bytes HexDecode(std::string_view hex);

// Quoted-literal escaping used in logs and config files: printable ASCII
// passes through; \\ \' \" \r \n \t and \xNN otherwise. Lossless.
std::string EscapeBytes(std::span<const std::uint8_t> bytes);
Bytes UnescapeBytes(std::string_view text);

// True when `needle` occurs as a contiguous byte run in `haystack`. An empty
// needle always matches.
bool ContainsBytes(std::span<const std::uint8_t> haystack,
                   std::span<const std::uint8_t> needle);

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_BYTES_H_
