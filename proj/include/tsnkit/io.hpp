#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsnkit/analysis.hpp"
#include "tsnkit/config.hpp"
#include "tsnkit/network.hpp"
#include "tsnkit/priority.hpp"
#include "tsnkit/simulator.hpp"
#include "tsnkit/synthesis.hpp"

namespace tsnkit::io {

inline constexpr const char* kSchemaVersion = "1";

Network load_network(const std::string& path);
Network network_from_json(const nlohmann::json& j);

std::vector<Flow> load_flows(const std::string& path);
std::vector<Flow> flows_from_json(const nlohmann::json& j);
nlohmann::ordered_json flows_to_json(const std::vector<Flow>& flows);

PreemptionConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const PreemptionConfig& config);

nlohmann::ordered_json wctt_report_to_json(const WcttReport& report);
std::string wctt_report_to_csv(const WcttReport& report);

nlohmann::ordered_json sim_report_to_json(const SimReport& report);
nlohmann::ordered_json cross_validation_to_json(const CrossValidation& cv);
nlohmann::ordered_json synthesis_to_json(const SynthesisResult& result,
                                         const std::vector<Flow>& flows);
nlohmann::ordered_json priority_assignment_to_json(const PriorityAssignment& assignment,
                                                   const std::string& method);

void write_text(const std::string& path, const std::string& text);

}  // namespace tsnkit::io
