#pragma once

#include <cstddef>
#include <string>

namespace adarem {

enum class ScheduleKind { cosine, inv_sqrt, constant, slr };

std::string to_string(ScheduleKind kind);
// Throws ConfigError for an unknown name.
ScheduleKind schedule_kind_from_string(const std::string& name);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::cosine;
  double base_lr = 0.4;
  std::size_t total_steps = 1000;
  std::size_t epochs = 1;
  // Euclidean-equivalent schedule fed to the sphere learning rate (slr only).
  ScheduleKind inner = ScheduleKind::constant;

  bool operator==(const ScheduleSpec&) const = default;
};

// Base rate at 0-indexed step t of `total`:
//   cosine    base * (1 + cos(pi t / total)) / 2
//   inv_sqrt  base / sqrt(t + 1)
//   constant  base
//   slr       the inner schedule; the sphere module converts it per step
// Throws DomainError unless t < total.
double schedule_lr(const ScheduleSpec& spec, std::size_t t, std::size_t total);

}  // namespace adarem
