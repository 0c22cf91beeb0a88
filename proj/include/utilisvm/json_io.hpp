#pragma once

#include <json.hpp>

#include "utilisvm/experiments.hpp"

namespace utilisvm {

nlohmann::json load_json_file(const std::string& path);

nlohmann::json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);

nlohmann::json region_to_json(const KnowledgeRegion& region);
KnowledgeRegion region_from_json(const nlohmann::json& j);

nlohmann::json costs_to_json(const CostStructure& costs);
CostStructure costs_from_json(const nlohmann::json& j);

/// Region + costs configuration: {"region": {...}, "costs": {...}}.
struct KnowledgeConfig {
    KnowledgeRegion region;
    CostStructure costs;
};
KnowledgeConfig knowledge_config_from_json(const nlohmann::json& j);
nlohmann::json knowledge_config_to_json(const KnowledgeConfig& config);
KnowledgeConfig load_knowledge_config(const std::string& path);

/// Distribution configuration: {"marginal": {...}, "eta": {...}, "box": {...}}.
nlohmann::json distribution_to_json(const SyntheticDistribution& dist);
SyntheticDistribution distribution_from_json(const nlohmann::json& j);
SyntheticDistribution load_distribution(const std::string& path);

QuadratureSpec quadrature_from_json(const nlohmann::json& j);
SolverConfig solver_from_json(const nlohmann::json& j);

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan(const std::string& path);

std::vector<VariantSpec> variants_from_json(const nlohmann::json& j);
std::vector<VariantSpec> load_variants(const std::string& path);

}  // namespace utilisvm
