#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "raf/constraints.hpp"
#include "raf/dictionary.hpp"
#include "raf/model.hpp"
#include "raf/pipeline.hpp"

namespace raf {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io {

inline constexpr int kFormatVersion = 1;

using nlohmann::json;

// temp-then-rename in the target directory
void write_text_atomic(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

json region_to_json(const PoleRegion& r);
PoleRegion region_from_json(const json& j);

json poleset_to_json(const PoleSet& ps);
PoleSet poleset_from_json(const json& j);
void save_poleset(const std::string& path, const PoleSet& ps);
PoleSet load_poleset(const std::string& path);

json constraints_to_json(const ConstraintSet& cs);
ConstraintSet constraints_from_json(const json& j);

json model_to_json(const RafModel& m);
RafModel model_from_json(const json& j);
void save_model(const std::string& path, const RafModel& m);
RafModel load_model(const std::string& path);

json pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const json& j);
json pipeline_result_to_json(const PipelineResult& res);

json budget_to_json(const BudgetReport& b);
json solve_info_to_json(const SolveInfo& info);

// CSV data files: header `t,u,y` (or `t,u` when no outputs), '.' decimals
void save_csv(const std::string& path, const TimeSeries& ts);
TimeSeries load_csv(const std::string& path);

// Run manifest written beside every artifact: tool version, rng id, seed and
// a hash of the canonical config dump.
json manifest(const std::string& command, std::uint64_t seed,
              const json& config);
void write_manifest(const std::string& artifact_path,
                    const std::string& command, std::uint64_t seed,
                    const json& config);

json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);

}  // namespace io
}  // namespace raf
