#include <cmath>

#include "nlslab/diagnostics.hpp"
#include "nlslab/error.hpp"

namespace nlslab {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::L2Subcritical:
      return "L2Subcritical";
    case Regime::L2Critical:
      return "L2Critical";
    case Regime::Intercritical:
      return "Intercritical";
    case Regime::H1CriticalOrBeyond:
      return "H1CriticalOrBeyond";
  }
  return "unknown";
}

CriticalIndex critical_index(int n, double p) {
  if (n < 1) throw SpecError("dimension must be positive");
  if (!(p > 1.0)) throw SpecError("p must exceed 1");
  CriticalIndex ci;
  ci.s_c = critical_index_value(n, p);
  const double l2_critical = 1.0 + 4.0 / n;
  if (n >= 3 && p >= (n + 2.0) / (n - 2.0) - 1e-12) {
    ci.regime = Regime::H1CriticalOrBeyond;
  } else if (std::abs(p - l2_critical) <= 1e-12 * l2_critical) {
    ci.regime = Regime::L2Critical;
    ci.s_c = 0.0;
  } else if (p < l2_critical) {
    ci.regime = Regime::L2Subcritical;
  } else {
    ci.regime = Regime::Intercritical;
  }
  return ci;
}

}  // namespace nlslab
