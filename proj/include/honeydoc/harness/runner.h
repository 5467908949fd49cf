#ifndef HONEYDOC_HARNESS_RUNNER_H_
#define HONEYDOC_HARNESS_RUNNER_H_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "honeydoc/harness/scenario.h"
#include "honeydoc/orchestrator/controller.h"
#include "honeydoc/simnet/simulation.h"

namespace honeydoc::harness {

// Controller bindings derived from the wiring: a decoy reaches the FCF either
// directly or through an SPF whose other port faces the FCF.
orchestrator::ControllerConfig BuildControllerConfig(const Scenario& scenario);

// One scenario wired into a simulation plus its controller. Throws
// ConfigError when the topology cannot carry the scenario.
class ScenarioRun {
 public:
  explicit ScenarioRun(const Scenario& scenario);
  ScenarioRun(const ScenarioRun&) = delete;
  ScenarioRun& operator=(const ScenarioRun&) = delete;

  // Appended to the trace header before running.
  void AddMeta(std::string key, std::string value);
  const Trace& Execute();

  simnet::Simulation& sim() { return *sim_; }
  const simnet::Simulation& sim() const { return *sim_; }
  const orchestrator::Controller& controller() const { return *controller_; }
  const Scenario& scenario() const { return scenario_; }

 private:
  Scenario scenario_;
  decoy::ScriptLibrary scripts_;
  std::unique_ptr<simnet::Simulation> sim_;
  std::unique_ptr<orchestrator::Controller> controller_;
};

// Builds, runs and returns the trace.
Trace RunScenario(const Scenario& scenario);

}  // namespace honeydoc::harness

#endif  // HONEYDOC_HARNESS_RUNNER_H_
