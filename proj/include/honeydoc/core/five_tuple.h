#ifndef HONEYDOC_CORE_FIVE_TUPLE_H_
#define HONEYDOC_CORE_FIVE_TUPLE_H_

#include <compare>
#include <cstdint>
#include <string>

#include "honeydoc/core/addr.h"
#include "honeydoc/core/segment.h"

namespace honeydoc {

// Directional connection identity: a->b and b->a are different tuples.
struct FiveTuple {
  IpAddr src_ip;
  std::uint16_t src_port = 0;
  IpAddr dst_ip;
  std::uint16_t dst_port = 0;
  Proto proto = Proto::kTcp;

  FiveTuple Reversed() const {
    return {dst_ip, dst_port, src_ip, src_port, proto};
  }
  // "10.1.0.2:36093>10.1.1.2:22/tcp"
  std::string ToString() const;
  static FiveTuple Parse(std::string_view text);

  auto operator<=>(const FiveTuple&) const = default;
};

FiveTuple FiveTupleOf(const Segment& seg);

}  // namespace honeydoc

#endif  // HONEYDOC_CORE_FIVE_TUPLE_H_
