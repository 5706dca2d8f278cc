#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kstw/integrate.hpp"
#include "kstw/phase.hpp"
#include "kstw/profiles.hpp"
#include "kstw/shooting.hpp"

namespace kstw::io {

// Shortest text that parses back to the same double; "inf", "-inf", "nan"
// for non-finite values.
std::string format_double(double x);
// Throws ParameterError on anything but a complete number.
double parse_double(std::string_view text);

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& samples);
std::vector<TrajectorySample> read_trajectory_csv(std::istream& is);
void write_profile_csv(std::ostream& os, const std::vector<ProfileSample>& samples);
std::vector<ProfileSample> read_profile_csv(std::istream& is);

// JSON has no infinities: +-inf become the strings "inf"/"-inf", NaN null.
nlohmann::json number(double x);
double number_from(const nlohmann::json& j);

nlohmann::json to_json(const FluxLimiter& lim);
nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const Equilibrium& e);
nlohmann::json to_json(const TerminationEvent& e);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const EndpointSlopes& e);
nlohmann::json to_json(const Continuation& c);
// Profile metadata only; the samples go to CSV.
nlohmann::json profile_metadata(const WaveProfile& prof);

}  // namespace kstw::io
