#include "honeydoc/dataplane/flow.h"

#include "honeydoc/core/error.h"

namespace honeydoc::dataplane {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

bool MatchFields::Matches(const Segment& seg, int port) const {
  if (in_port && *in_port != port) return false;
  if (proto && *proto != seg.proto) return false;
  if (src_ip && *src_ip != seg.src_ip) return false;
  if (dst_ip && *dst_ip != seg.dst_ip) return false;
  if (src_port && *src_port != seg.src_port) return false;
  if (dst_port && *dst_port != seg.dst_port) return false;
  return true;
}

bool IsTerminal(const FlowAction& action) {
  return std::holds_alternative<Drop>(action) ||
         std::holds_alternative<Output>(action) ||
         std::holds_alternative<ToController>(action);
}

Outcome ApplyActions(Segment seg, std::span<const FlowAction> actions) {
  for (const FlowAction& action : actions) {
    std::optional<Outcome> done;
    std::visit(
        Overloaded{
            [&](const Drop&) { done = Dropped{}; },
            [&](const Output& o) { done = EmitOn{o.port, seg}; },
            [&](const ToController&) { done = SentToController{seg}; },
            [&](const SetTcpSeqDiff& a) {
              if (!seg.is_tcp()) {
                throw ContractViolation("SET_TCP_SEQ_DIFF on a non-TCP frame");
              }
              seg.seq = SeqAdd(seg.seq, a.delta);
            },
            [&](const SetTcpAckDiff& a) {
              if (!seg.is_tcp()) {
                throw ContractViolation("SET_TCP_ACK_DIFF on a non-TCP frame");
              }
              seg.ack = SeqAdd(seg.ack, a.delta);
            },
            [&](const RewriteDst& a) {
              seg.dst_ip = a.ip;
              seg.dst_mac = a.mac;
            },
            [&](const RewriteSrc& a) {
              seg.src_ip = a.ip;
              seg.src_mac = a.mac;
            },
        },
        action);
    if (done) return std::move(*done);
  }
  throw ContractViolation("action list has no terminal disposition");
}

}  // namespace honeydoc::dataplane
