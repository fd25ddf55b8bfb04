#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kmlab/dsmc.hpp"
#include "kmlab/hierarchy.hpp"

namespace kmlab {

struct HierarchySettings {
    int q_max = 8;
    double t_end = 50.0;
    std::size_t samples = 100;
    CqVariant variant = CqVariant::Rigorous;
};

struct RecipeSettings {
    double s = 4.0 / 3.0;
    double alpha0 = 0.5;
    int q_max = 200000;  ///< upper end of the q0 search
    std::optional<double> M0;  ///< measured on the initial ensemble when unset
};

struct ConstantsSettings {
    int q_max = 200;
};

struct OutputSettings {
    std::string csv;
    std::string snapshot;
    std::string manifest;
    std::string resume;  ///< snapshot to continue from
};

/// Scenario plus the settings of the other subcommands, as read from a
/// sectioned key = value file.
struct RunConfig {
    ScenarioConfig scenario;
    HierarchySettings hierarchy;
    RecipeSettings recipe;
    ConstantsSettings constants;
    OutputSettings output;
    std::vector<std::string> warnings;
};

/// Parses and validates a configuration. `overrides` are "section.key=value"
/// assignments applied after the file. Every problem found is reported in
/// one ConfigError, one "line N: ..." entry per problem.
RunConfig parse_config(std::string_view text, std::span<const std::string> overrides = {});
RunConfig load_config(const std::string& path, std::span<const std::string> overrides = {});

/// Applies KM_SEED (seed override) from the environment; returns true if set.
bool apply_environment(RunConfig& config);

/// Sorted "section.key=value" lines with whitespace normalized; independent
/// of key order, comments and spacing.
std::string canonical_config(std::string_view text, std::span<const std::string> overrides = {});
/// SHA-256 (hex) of canonical_config.
std::string config_hash(std::string_view text, std::span<const std::string> overrides = {});

/// Serializes every setting, so parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

}  // namespace kmlab
