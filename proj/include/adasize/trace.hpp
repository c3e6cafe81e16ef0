#ifndef ADASIZE_TRACE_HPP
#define ADASIZE_TRACE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adasize/common.hpp"

namespace adasize {

struct TraceEvent {
  std::uint64_t grad_evals = 0;
  Index stage_n = 0;
  /// R_N at the current iterate, N being the full training size.
  double risk_value = 0.0;
  /// ||grad R_n|| of the active stage.
  double grad_norm = 0.0;
  std::optional<double> test_error;
  /// R_n of the active stage; not part of the CSV schema.
  double stage_risk_value = 0.0;
};

/// Append-only run log. grad_evals strictly increases, stage_n never drops.
class Trace {
 public:
  void append(TraceEvent event);

  const std::vector<TraceEvent> &events() const { return events_; }
  bool empty() const { return events_.empty(); }
  std::optional<std::uint64_t> last_grad_evals() const;

  /// Free-form key/value echo of the run configuration.
  std::map<std::string, std::string> meta;

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace adasize

#endif  // ADASIZE_TRACE_HPP
