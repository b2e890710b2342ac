#include "mildkit/report_json.h"

#include <chrono>
#include <ctime>
#include <sstream>

namespace mildkit {

nlohmann::json envelope(const std::string& command, nlohmann::json params, nlohmann::json result,
                        bool pass, bool deterministic) {
  nlohmann::json out{{"tool", "mildkit"},
                     {"version", kVersion},
                     {"command", command},
                     {"params", std::move(params)},
                     {"result", std::move(result)},
                     {"pass", pass}};
  if (!deterministic) {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out["timestamp"] = buf;
  }
  return out;
}

std::string margin_csv_rows(const BoundReport& report, const CsvContext& ctx) {
  std::ostringstream os;
  for (const OrderRecord& r : report.orders) {
    std::string nu;
    for (std::size_t i = 0; i < r.nu.size(); ++i) nu += (i ? ";" : "") + std::to_string(r.nu[i]);
    os << ctx.alpha << ',' << ctx.epsilon << ',' << ctx.chart_id << ',' << ctx.component << ',' << nu << ','
       << r.sup.to_string(17) << ',' << r.bound.to_string(17) << ',' << r.margin.to_string(17) << '\n';
  }
  return os.str();
}

std::string margin_csv_rows(const UniformReport& report, const std::string& alpha) {
  std::string out;
  for (const UniformEntry& e : report.entries) {
    out += margin_csv_rows(e.report, {alpha, to_string(e.parameter), to_string(e.chart), e.component});
  }
  return out;
}

}  // namespace mildkit
