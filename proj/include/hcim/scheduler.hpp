// scheduler.hpp -- cycle accounting and energy model.
//
// One macro invocation runs the eval cells first (saliency evaluation
// mode), spends one decision cycle in the estimator, then the digital and
// analog sides proceed concurrently:
//
//   makespan = eval_span + ose_decision + max(digital_span, analog_span)
//
// The digital side runs one cell per half-rate cycle.  The analog side
// converts one group at a time; with pipelining the DAC setup of group
// g+1 hides under the ADC conversion of group g, so only the first setup
// is exposed.  Event counts are per invocation at macro lockstep (the 8
// HMUs advance together; unit energy costs absorb the multiplicity).
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hcim/core.hpp"

namespace hcim {

enum class EventClass : int {
  digital_mac_cycle = 0,
  dat_reduce,
  nq,
  ose_eval,
  dac_convert,
  charge_share,
  adc_convert,
  accumulate,
};

inline constexpr int kNumEventClasses = 8;

const char* to_string(EventClass e);
// Throws ConfigError on an unknown name.
EventClass event_class_from_string(const std::string& name);

struct TimingParams {
  double digital_cycle = 0.5;  // DCIM runs at twice the analog clock
  double analog_cycle = 1.0;
  int adc_conversion_cycles = 3;
  int dac_setup_cycles = 1;
  int ose_decision_cycles = 1;
  bool analog_pipelined = false;
};

void validate(const TimingParams& t);

struct Schedule {
  double eval_span = 0.0;
  double digital_span = 0.0;
  double analog_span = 0.0;
  double makespan = 0.0;
  std::array<int64_t, kNumEventClasses> events{};
};

Schedule build_schedule(const Partition& part, const TimingParams& t);

// Unit cost per event class; a negative entry means "not configured".
// ops_per_mac is the reporting convention constant: one 8b x 8b MAC counts
// as two operations for throughput-per-energy numbers.
struct EnergyModel {
  std::array<double, kNumEventClasses> unit_cost;
  double ops_per_mac = 2.0;
  EnergyModel() { unit_cost.fill(-1.0); }
};

struct EnergyReport {
  std::array<double, kNumEventClasses> per_class{};
  double total = 0.0;
  std::array<double, kNumEventClasses> share{};
};

// Throws ConfigError when any class cost is missing.
EnergyReport account_energy(const Schedule& s, const EnergyModel& m);

}  // namespace hcim
