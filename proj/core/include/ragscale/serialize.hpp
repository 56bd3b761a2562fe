#pragma once

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ragscale/allocation.hpp"
#include "ragscale/fitter.hpp"
#include "ragscale/synth.hpp"
#include "ragscale/validation.hpp"

namespace ragscale {

using ordered_json = nlohmann::ordered_json;

/// Bumped whenever a report layout changes.
inline constexpr int kSchemaVersion = 1;

ordered_json to_json(const FitConfig& cfg);
ordered_json to_json(const LawParams& params);
ordered_json to_json(const FitResult& fit);
ordered_json to_json(const ValidationReport& report);
ordered_json to_json(const StabilityReport& report);
ordered_json to_json(const AllocationPlan& plan);
ordered_json to_json(const CrossoverEstimate& estimate);
ordered_json to_json(const TradeoffTable& table);
ordered_json to_json(const IsoSurfaces& iso);
ordered_json to_json(const SynthSpec& spec);

/// Reads the flat form written by to_json(LawParams).
LawParams law_params_from_json(const nlohmann::json& j);
SynthSpec synth_spec_from_json(const nlohmann::json& j);

/// Parameters keyed by benchmark. A flat params object maps to the "" key
/// (applies to every benchmark); a fit report maps each result's benchmark to
/// its final-stage parameters.
std::map<std::string, LawParams> load_params(std::string_view json_text);

/// Params for one benchmark out of load_params' map (falls back to "" or a
/// single entry). Throws MissingGroup.
const LawParams& params_for(const std::map<std::string, LawParams>& params, const std::string& benchmark);

/// Plot-ready CSVs.
std::string frontier_csv(const std::vector<FrontierSample>& frontier);
std::string tradeoff_csv(const TradeoffTable& table);
std::string iso_grid_csv(const IsoSurfaces& iso);
std::string compute_frontier_csv(const IsoSurfaces& iso);

/// Dump with two-space indentation and a trailing newline.
std::string dump(const ordered_json& j);

}  // namespace ragscale
