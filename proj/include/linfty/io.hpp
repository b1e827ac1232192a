#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "linfty/mapping.hpp"
#include "linfty/measures.hpp"
#include "linfty/monotonicity.hpp"

namespace linfty::io {

/// Reported numbers carry 12 significant digits.
std::string format_number(double value);
/// The double nearest to format_number(value), for JSON output.
double round_to_reported(double value);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Rows `x1,...,xd,weight`; an optional non-numeric header line is skipped.
/// Weights are renormalized on load (printed weights are rounded).
MeasurePtr read_measure_csv(const std::filesystem::path& path);
std::string measure_csv(const DiscreteMeasure& measure);

/// Rows `i,j,mass` with a header.
Coupling read_coupling_csv(const std::filesystem::path& path, MeasurePtr mu,
                           MeasurePtr nu);
std::string coupling_csv(const Coupling& plan);

/// Rows `source_index,target_index,dominant_mass,source_weight`.
std::string map_csv(const MapExtraction& map, const DiscreteMeasure& mu);

nlohmann::ordered_json certificate_json(const MonotonicityCertificate& cert,
                                        const Coupling& plan);

}  // namespace linfty::io
