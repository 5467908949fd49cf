#ifndef HONEYDOC_SIMNET_SIMULATION_H_
#define HONEYDOC_SIMNET_SIMULATION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "honeydoc/core/trace.h"
#include "honeydoc/dataplane/switch_node.h"
#include "honeydoc/decoy/decoy_host.h"
#include "honeydoc/simnet/attacker.h"
#include "honeydoc/simnet/topology.h"

namespace honeydoc::simnet {

// Events run in (time, insertion order); only events strictly before the
// horizon execute.
class EventQueue {
 public:
  void Schedule(SimTime at, std::function<void()> action);
  // Runs events until the queue empties or the horizon is reached. Returns
  // the number executed.
  std::size_t RunUntil(SimTime horizon);
  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }

 private:
  struct Item {
    SimTime at;
    std::uint64_t seq;
    std::function<void()> action;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_{0};
};

struct FlowMod {
  enum class Op { kAdd, kDeleteCookie };
  Op op = Op::kAdd;
  dataplane::FlowEntry entry;  // kAdd
  std::uint64_t cookie = 0;    // kDeleteCookie

  static FlowMod Add(dataplane::FlowEntry e) { return {Op::kAdd, std::move(e), 0}; }
  static FlowMod Delete(std::uint64_t cookie) { return {Op::kDeleteCookie, {}, cookie}; }
};

// What the controller may do. Outputs reach the switch one channel latency
// after the current time.
class ControllerContext {
 public:
  virtual ~ControllerContext() = default;
  virtual SimTime Now() const = 0;
  // Applied in order, atomically, on arrival at the switch.
  virtual void SendFlowMods(const std::string& sw, std::vector<FlowMod> mods) = 0;
  // Emits `seg` out of `port` of `sw`, bypassing its table.
  virtual void PacketOut(const std::string& sw, int port, Segment seg) = 0;
  virtual void StartTimer(SimTime delay, std::uint64_t tag) = 0;
  virtual void Record(EventKind kind, EventFields fields) = 0;
  virtual std::uint32_t NextIsn() = 0;
};

class ControllerApp {
 public:
  virtual ~ControllerApp() = default;
  // Runs at time 0 before any event; installs made here are not traced.
  virtual void Init(ControllerContext& ctx) = 0;
  virtual void OnPacketIn(ControllerContext& ctx, const std::string& sw,
                          int in_port, const Segment& seg) = 0;
  virtual void OnTimer(ControllerContext& ctx, std::uint64_t tag) = 0;
};

struct SimConfig {
  SimTime controller_latency = Millis(5);
  SimTime controller_processing = Millis(2);
  SimTime horizon = Millis(60000);
  std::uint64_t seed = 1;
};

inline constexpr std::string_view kControllerNode = "controller";

class Simulation : private ControllerContext {
 public:
  Simulation(Topology topology, SimConfig config);
  ~Simulation() override;
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Each call binds behaviour to a topology node of the matching kind.
  dataplane::SwitchNode& AddSwitch(const std::string& name,
                                   dataplane::SwitchRole role);
  decoy::DecoyHost& AddDecoy(decoy::DecoyConfig config,
                             const decoy::ScriptLibrary* scripts);
  AttackerHost& AddAttacker(AttackerConfig config);
  void SetController(ControllerApp* controller) { controller_ = controller; }

  IsnSource isn_source();
  void AddMeta(std::string key, std::string value);

  // Validates, runs to completion or horizon and returns the trace. Call once.
  const Trace& Run();

  const Topology& topology() const { return topology_; }
  const SimConfig& config() const { return config_; }
  const Trace& trace() const { return recorder_.trace(); }
  dataplane::SwitchNode& switch_node(const std::string& name);
  const decoy::DecoyHost& decoy(const std::string& name) const;
  const AttackerHost& attacker(const std::string& name) const;
  const std::map<std::string, std::unique_ptr<dataplane::SwitchNode>>& switches()
      const {
    return switches_;
  }
  const std::map<std::string, std::unique_ptr<decoy::DecoyHost>>& decoys() const {
    return decoys_;
  }
  const std::map<std::string, std::unique_ptr<AttackerHost>>& attackers() const {
    return attackers_;
  }
  SimTime now() const { return queue_.now(); }
  std::uint64_t packet_ins() const { return packet_ins_; }

 private:
  // ControllerContext.
  SimTime Now() const override { return queue_.now(); }
  void SendFlowMods(const std::string& sw, std::vector<FlowMod> mods) override;
  void PacketOut(const std::string& sw, int port, Segment seg) override;
  void StartTimer(SimTime delay, std::uint64_t tag) override;
  void Record(EventKind kind, EventFields fields) override;
  std::uint32_t NextIsn() override;

  void Emit(const std::string& node, int port, Segment seg);
  void Deliver(const std::string& node, int port, const Segment& seg);
  void ApplyHostActions(const std::string& node, HostActions actions);
  void ApplyFlowMods(const std::string& sw, const std::vector<FlowMod>& mods,
                     bool traced);
  void WriteHeader();

  Topology topology_;
  SimConfig config_;
  EventQueue queue_;
  TraceRecorder recorder_;
  std::mt19937_64 rng_;
  bool initializing_ = false;
  bool ran_ = false;
  std::uint64_t packet_ins_ = 0;
  ControllerApp* controller_ = nullptr;
  std::map<std::string, std::unique_ptr<dataplane::SwitchNode>> switches_;
  std::map<std::string, std::unique_ptr<decoy::DecoyHost>> decoys_;
  std::map<std::string, std::unique_ptr<AttackerHost>> attackers_;
};

}  // namespace honeydoc::simnet

#endif  // HONEYDOC_SIMNET_SIMULATION_H_
