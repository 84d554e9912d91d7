#pragma once

#include <string_view>

#include "ccgm/est/outcome.hpp"
#include "ccgm/est/propensity.hpp"

namespace ccgm::est {

enum class Method { Naive, Ipw, Aipw };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

// mean(Y | D=1) - mean(Y | D=0). UsageError on an empty arm.
double naive_ate(const EffectData& data);
double ipw_ate(const EffectData& data, const PropensityModel& propensity);
double aipw_ate(const EffectData& data, const PropensityModel& propensity, const OutcomeModel& outcome);

// Fits whatever models the method needs, then estimates.
double estimate(Method m, const EffectData& data);

}  // namespace ccgm::est
