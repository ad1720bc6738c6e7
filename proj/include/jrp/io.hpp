#pragma once

#include <string>

#include "jrp/model.hpp"
#include "json.hpp"

namespace jrp {

// Instance files are JSON objects tagged {"format": "jrp-instance", "version": 1}.
// Items are 0-based, timesteps 1-based; an infeasible holding entry is the
// string "inf".
inline constexpr int kFormatVersion = 1;

nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

// Solution files: {"format": "jrp-solution", "orders": [{"t", "items"}],
// "disposition": [t | "rejected" | null]}.
nlohmann::json solution_to_json(const IntegralSolution& sol);
IntegralSolution solution_from_json(const nlohmann::json& j);

std::string dump_json(const nlohmann::json& j);
nlohmann::json parse_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& instance);

}  // namespace jrp
