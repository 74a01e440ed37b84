#pragma once

#include <nlohmann/json.hpp>

#include "bsq/diagnostics.hpp"
#include "bsq/ensemble.hpp"
#include "bsq/noise.hpp"
#include "bsq/picard.hpp"
#include "bsq/stopping.hpp"

namespace bsq {

// NDJSON trace line: {"t","lp_p","dissipation","weighted","component_lp"}
nlohmann::json to_json(const EnergyRecord& r);
EnergyRecord energy_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StopInfo& s);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const IterationTrace& t);
nlohmann::json to_json(const MaximalityReport& r);
/// Per-path detail (energies omitted; those go to NDJSON traces).
nlohmann::json to_json(const PathResult& r);
nlohmann::json to_json(const EnsembleSummary& s, bool include_paths = true);
nlohmann::json to_json(const MarkovCheck& m);

/// One JSON object per line, each record serialized with to_json.
std::string to_ndjson(std::span<const EnergyRecord> records);

}  // namespace bsq
