#pragma once

#include "densecode/bounds.hpp"
#include "densecode/concentration.hpp"
#include "densecode/idcodes.hpp"
#include "densecode/memoryless.hpp"
#include "densecode/protocol.hpp"

#include <json.hpp>

#include <string>

namespace densecode {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// common header: schema/version/experiment name; every report embeds it
Json report_header(const std::string& experiment);

Json to_json(const Seed& seed);
Json to_json(const ResourceLedger& ledger);
Json to_json(const ProtocolPlan& plan);
Json to_json(const ProtocolTranscript& transcript);
Json to_json(const concentration::ConcentrationReport& report);
Json to_json(const ProtocolExperimentReport& report);
Json to_json(const bounds::CausalityReport& report);
Json to_json(const memoryless::MemorylessReport& report);
Json to_json(const idcodes::IdErrorEstimate& estimate);
Json to_json(const idcodes::IdSdcResult& result);

// stable text form written to files and stdout (2-space indent, trailing
// newline); reports must not contain timestamps or machine identifiers
std::string serialize_report(const Json& report);

}  // namespace densecode
