#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "congflow/congruence.hpp"
#include "congflow/flows.hpp"
#include "congflow/time_signal.hpp"

namespace congflow {

struct SamplingSpec {
  std::array<std::array<double, 2>, 3> box{{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}};
  std::array<int, 3> grid{5, 5, 5};
  double fd_step = 1e-5;
  std::vector<double> times{0.0};
};

struct FlowSpec {
  TimeSignal H = TimeSignal::constant(1.0);
  SheetPoly K;
  double p0 = 0.0;
  PressureForm pressure_form = PressureForm::none;
};

// Parsed and validated spec document (schema_version 1).  Unknown keys and
// non-finite numbers are rejected at load time.
struct SpecDocument {
  int schema_version = 1;
  CongruenceSpec congruence = CongruenceSpec::rank0(Complex{0.0, 0.0});
  std::optional<FlowSpec> flow;
  std::optional<SamplingSpec> sampling;
};

// Throws SpecError on parse or validation failure.
SpecDocument load_spec_document(const std::string& path);
SpecDocument parse_spec_document(const std::string& json_text);

// Builds the flow described by the document; throws SpecError when the
// document carries no flow section or the form is incompatible with the
// congruence rank.
FlowField build_flow(const SpecDocument& doc);

// Velocity-only variant for tracing: a missing flow section or a "none"
// pressure form is acceptable, H defaults to 1.
FlowField build_velocity_flow(const SpecDocument& doc);

PressureForm pressure_form_from_string(const std::string& s);

}  // namespace congflow
