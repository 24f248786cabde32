#pragma once

#include <string>

#include <json.hpp>

#include "shellfield/rf.hpp"
#include "shellfield/shell.hpp"
#include "shellfield/testfn.hpp"

// Stable structured-text (JSON) forms. Field names are part of the
// interface and documented in the README; unknown keys are rejected.

namespace shellfield::io {

using nlohmann::json;

// Throws std::invalid_argument naming `context` when j contains a key
// outside required+optional or misses a required key.
void check_keys(const json& j, const std::string& context,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional);

json to_json(const TestFunction& f);
TestFunction testfn_from_json(const json& j);

json to_json(const ShellConfig& cfg);
ShellConfig shell_config_from_json(const json& j);

json to_json(const GramMatrix& gm);
json to_json(const SampleBatch& batch);
json to_json(const CompareReport& report);

// Moment-comparison table with the documented columns
// mode_id,order,predicted,empirical,stderr,z
std::string to_csv(const CompareReport& report);

std::string to_string(FreqMask m);
FreqMask freq_mask_from_string(const std::string& s);

std::string to_string(QuadratureRule r);
QuadratureRule rule_from_string(const std::string& s);

KernelKind kernel_from_string(const std::string& s);

}  // namespace shellfield::io
