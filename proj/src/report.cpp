#include "weylcheck/report.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace weylcheck {

namespace {

// Upper bound printed for a deviation: 0, 1e-12 for anything below that, or
// the next power of ten above it.
double deviation_bound(double maxdev) {
  if (maxdev == 0.0) return 0.0;
  if (maxdev < 1e-12) return 1e-12;
  return std::pow(10.0, std::ceil(std::log10(maxdev)));
}

}  // namespace

std::string deviation_bucket(double maxdev) {
  const double b = deviation_bound(maxdev);
  if (b == 0.0) return "=0";
  std::ostringstream s;
  s << "<=1e" << static_cast<int>(std::lround(std::log10(b)));
  return s.str();
}

std::string to_text(const VerificationReport& r) {
  std::ostringstream s;
  s << "claim: " << r.claim << "\n";
  s << "mode: " << r.mode << "\n";
  s << "result: " << (r.pass ? "PASS" : "FAIL") << "\n";
  s << "residual: " << r.residual << "\n";
  if (!r.trace.empty()) {
    s << "trace:\n";
    for (const auto& t : r.trace) {
      s << "  [" << t.rule << "]\n";
      s << "    before: " << t.before << "\n";
      s << "    after:  " << t.after << "\n";
    }
  }
  s << "oracle: trials=" << r.oracle.trials << " maxdev" << deviation_bucket(r.oracle.maxdev)
    << " seed=" << r.oracle.seed << "\n";
  for (const auto& n : r.notes) s << "note: " << n << "\n";
  return s.str();
}

std::string to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["claim"] = r.claim;
  j["mode"] = r.mode;
  j["pass"] = r.pass;
  j["residual"] = r.residual;
  j["trace"] = nlohmann::ordered_json::array();
  for (const auto& t : r.trace) {
    nlohmann::ordered_json step;
    step["rule"] = t.rule;
    step["before"] = t.before;
    step["after"] = t.after;
    j["trace"].push_back(std::move(step));
  }
  nlohmann::ordered_json o;
  o["trials"] = r.oracle.trials;
  o["maxdev"] = deviation_bound(r.oracle.maxdev);
  o["seed"] = r.oracle.seed;
  j["oracle"] = std::move(o);
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

}  // namespace weylcheck
