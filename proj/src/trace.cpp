#include "star/trace.hpp"

namespace star {

void Trace::emit(const nlohmann::json& record) {
  if (out_ == nullptr) return;
  *out_ << record.dump() << '\n';
  ++records_;
}

}  // namespace star
