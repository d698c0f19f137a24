#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dagforge/model.hpp"
#include "dagforge/sampler.hpp"

namespace dagforge {

inline constexpr std::string_view kEngineVersion = "0.1.0";

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

/// Writes `<csv_name>.csv`, or one `<csv_name>_<stratum>.csv` per stratum
/// (sorted by label) when the model has a stratify node. UTF-8, LF line ends.
/// Returns the written paths. Throws IoError or StratumNameError.
std::vector<std::filesystem::path> write_csv(const Dataset& ds, const CompiledModel& model,
                                             const SimInstructions& instructions,
                                             const std::filesystem::path& out_dir);

/// Text of the run manifest. Everything except the trailing timestamp line is
/// a deterministic function of the inputs.
std::string manifest_text(const Dataset& ds, const CompiledModel& model, const RunConfig& config,
                          const std::vector<std::filesystem::path>& paths,
                          std::string_view timestamp);

/// Writes `<csv_name>.manifest` next to the CSV output and returns its path.
std::filesystem::path write_manifest(const Dataset& ds, const CompiledModel& model,
                                     const RunConfig& config, const SimInstructions& instructions,
                                     const std::vector<std::filesystem::path>& paths,
                                     const std::filesystem::path& out_dir);

}  // namespace dagforge
