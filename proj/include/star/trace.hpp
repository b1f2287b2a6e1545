// JSON-lines trace sink shared by the protocol modules and the simulator.
#pragma once

#include <ostream>

#include "json.hpp"

namespace star {

class Trace {
 public:
  Trace() = default;
  explicit Trace(std::ostream* out) : out_(out) {}

  bool enabled() const { return out_ != nullptr; }

  /// Writes one record per line. No-op when disabled; callers should check
  /// enabled() before building expensive records.
  void emit(const nlohmann::json& record);

  std::size_t records() const { return records_; }

 private:
  std::ostream* out_ = nullptr;
  std::size_t records_ = 0;
};

}  // namespace star
