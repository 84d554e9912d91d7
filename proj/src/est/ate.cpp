#include "ccgm/est/ate.hpp"

#include "ccgm/error.hpp"

namespace ccgm::est {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Naive: return "naive";
    case Method::Ipw: return "ipw";
    case Method::Aipw: return "aipw";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Naive, Method::Ipw, Method::Aipw})
    if (method_name(m) == name) return m;
  throw UsageError("unknown estimation method '" + std::string(name) + "' (expected naive, ipw or aipw)");
}

double naive_ate(const EffectData& data) {
  double s1 = 0, s0 = 0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.d[i] == 1.0) {
      s1 += data.y[i];
      ++n1;
    } else {
      s0 += data.y[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) throw UsageError("naive ATE: both treatment arms must be non-empty");
  return s1 / static_cast<double>(n1) - s0 / static_cast<double>(n0);
}

double ipw_ate(const EffectData& data, const PropensityModel& propensity) {
  if (data.size() == 0) throw UsageError("IPW: no rows");
  double s = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double p = propensity.predict(data.x.row_span(i));
    s += data.d[i] * data.y[i] / p - (1.0 - data.d[i]) * data.y[i] / (1.0 - p);
  }
  return s / static_cast<double>(data.size());
}

double aipw_ate(const EffectData& data, const PropensityModel& propensity, const OutcomeModel& outcome) {
  if (data.size() == 0) throw UsageError("AIPW: no rows");
  double s = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.x.row_span(i);
    const double p = propensity.predict(x);
    const double m1 = outcome.predict(1, x);
    const double m0 = outcome.predict(0, x);
    const double di = data.d[i], yi = data.y[i];
    s += m1 - m0 + di * (yi - m1) / p - (1.0 - di) * (yi - m0) / (1.0 - p);
  }
  return s / static_cast<double>(data.size());
}

double estimate(Method m, const EffectData& data) {
  switch (m) {
    case Method::Naive: return naive_ate(data);
    case Method::Ipw: return ipw_ate(data, fit_propensity(data));
    case Method::Aipw: return aipw_ate(data, fit_propensity(data), fit_outcome(data));
  }
  return 0.0;
}

}  // namespace ccgm::est
