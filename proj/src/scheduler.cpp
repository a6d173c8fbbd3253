#include "hcim/scheduler.hpp"

#include <algorithm>
#include <string>

namespace hcim {

namespace {

constexpr const char* kEventNames[kNumEventClasses] = {
    "digital_mac_cycle", "dat_reduce",   "nq",          "ose_eval",
    "dac_convert",       "charge_share", "adc_convert", "accumulate"};

}  // namespace

const char* to_string(EventClass e) {
  return kEventNames[static_cast<int>(e)];
}

EventClass event_class_from_string(const std::string& name) {
  for (int i = 0; i < kNumEventClasses; ++i)
    if (name == kEventNames[i]) return static_cast<EventClass>(i);
  throw ConfigError("unknown event class '" + name + "'");
}

void validate(const TimingParams& t) {
  if (!(t.digital_cycle > 0.0) || !(t.analog_cycle > 0.0))
    throw ConfigError("TimingParams: cycle times must be positive");
  if (t.adc_conversion_cycles < 1 || t.dac_setup_cycles < 0 ||
      t.ose_decision_cycles < 0)
    throw ConfigError("TimingParams: negative cycle counts");
}

Schedule build_schedule(const Partition& part, const TimingParams& t) {
  validate(t);
  Schedule s;
  int64_t eval = static_cast<int64_t>(part.eval_cells.size());
  int64_t digital = static_cast<int64_t>(part.digital_cells.size());
  int64_t groups = static_cast<int64_t>(part.analog_groups.size());

  s.eval_span = static_cast<double>(eval) * t.digital_cycle;
  s.digital_span = static_cast<double>(digital) * t.digital_cycle;
  if (groups == 0) {
    s.analog_span = 0.0;
  } else if (t.analog_pipelined) {
    s.analog_span = (t.dac_setup_cycles + groups * t.adc_conversion_cycles) *
                    t.analog_cycle;
  } else {
    s.analog_span = groups *
                    (t.dac_setup_cycles + t.adc_conversion_cycles) *
                    t.analog_cycle;
  }
  s.makespan = s.eval_span + t.ose_decision_cycles * t.analog_cycle +
               std::max(s.digital_span, s.analog_span);

  auto& e = s.events;
  e[static_cast<int>(EventClass::digital_mac_cycle)] = eval + digital;
  e[static_cast<int>(EventClass::dat_reduce)] = eval + digital;
  e[static_cast<int>(EventClass::nq)] = eval;
  e[static_cast<int>(EventClass::ose_eval)] = 1;
  e[static_cast<int>(EventClass::dac_convert)] = groups;
  e[static_cast<int>(EventClass::charge_share)] = groups;
  e[static_cast<int>(EventClass::adc_convert)] = groups;
  e[static_cast<int>(EventClass::accumulate)] = eval + digital + groups;
  return s;
}

EnergyReport account_energy(const Schedule& s, const EnergyModel& m) {
  for (int i = 0; i < kNumEventClasses; ++i)
    if (m.unit_cost[i] < 0.0)
      throw ConfigError(std::string("EnergyModel: missing cost for '") +
                        kEventNames[i] + "'");
  EnergyReport r;
  for (int i = 0; i < kNumEventClasses; ++i) {
    r.per_class[i] = static_cast<double>(s.events[i]) * m.unit_cost[i];
    r.total += r.per_class[i];
  }
  if (r.total > 0.0)
    for (int i = 0; i < kNumEventClasses; ++i)
      r.share[i] = r.per_class[i] / r.total;
  return r;
}

}  // namespace hcim
