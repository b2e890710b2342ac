#ifndef MILDKIT_REPORT_JSON_H_
#define MILDKIT_REPORT_JSON_H_

#include <string>

#include "json.hpp"
#include "mildkit/parametrize.h"
#include "mildkit/verify.h"

namespace mildkit {

inline constexpr const char* kVersion = "0.1.0";

// {"tool", "version", "command", "params", "result", "pass"[, "timestamp"]}
nlohmann::json envelope(const std::string& command, nlohmann::json params, nlohmann::json result,
                        bool pass, bool deterministic);

// Leading columns of a margin row; empty fields are left blank.
struct CsvContext {
  std::string alpha;
  std::string epsilon;
  std::string chart_id;
  std::string component;
};

inline constexpr const char* kMarginCsvHeader = "alpha,epsilon,chart_id,component,nu,sup,bound,margin\n";

// One row per multi-index; nu is written as i;j;k.
std::string margin_csv_rows(const BoundReport& report, const CsvContext& ctx);
std::string margin_csv_rows(const UniformReport& report, const std::string& alpha);

}  // namespace mildkit

#endif  // MILDKIT_REPORT_JSON_H_
