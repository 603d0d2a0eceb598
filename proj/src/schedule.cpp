#include "adarem/schedule.hpp"

#include <cmath>
#include <numbers>

#include "adarem/errors.hpp"

namespace adarem {

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::cosine: return "cosine";
    case ScheduleKind::inv_sqrt: return "inv_sqrt";
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::slr: return "slr";
  }
  throw ConfigError("unknown schedule kind");
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "cosine") return ScheduleKind::cosine;
  if (name == "inv_sqrt") return ScheduleKind::inv_sqrt;
  if (name == "constant") return ScheduleKind::constant;
  if (name == "slr") return ScheduleKind::slr;
  throw ConfigError("unknown schedule kind '" + name + "'");
}

double schedule_lr(const ScheduleSpec& spec, std::size_t t, std::size_t total) {
  if (t >= total) {
    throw DomainError("schedule_lr: step " + std::to_string(t) + " outside [0, " +
                      std::to_string(total) + ")");
  }
  const double base = spec.base_lr;
  switch (spec.kind) {
    case ScheduleKind::cosine:
      return base * (1.0 + std::cos(std::numbers::pi * static_cast<double>(t) /
                                    static_cast<double>(total))) / 2.0;
    case ScheduleKind::inv_sqrt:
      return base / std::sqrt(static_cast<double>(t) + 1.0);
    case ScheduleKind::constant:
      return base;
    case ScheduleKind::slr: {
      if (spec.inner == ScheduleKind::slr) throw ConfigError("slr schedule cannot nest itself");
      ScheduleSpec inner = spec;
      inner.kind = spec.inner;
      return schedule_lr(inner, t, total);
    }
  }
  throw ConfigError("unknown schedule kind");
}

}  // namespace adarem
