#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invfilter/experiment.hpp"

namespace invfilter {

// CSV serialization: UTF-8, '.' decimal separator, scientific notation with
// 13 significant digits. Identical inputs produce byte-identical files.
std::string format_sci(double v);

std::string trajectory_csv(const std::vector<TrajectoryPoint>& points);

struct SlopeRow {
    std::string param_set;
    double predicted_exponent = 0.0;
    double fitted_slope = 0.0;
    double residual = 0.0;
};
std::string slopes_csv(const std::vector<SlopeRow>& rows);

std::uint64_t fnv1a64(const std::string& bytes);

void write_file(const std::string& path, const std::string& contents);

struct ManifestArtifact {
    std::string name;
    std::uint64_t checksum = 0;
};

// The manifest embeds the resolved configuration verbatim (so it can be fed
// back to `invfilter run`) plus commented provenance lines.
std::string manifest_text(const std::string& resolved_config,
                          const std::vector<ManifestArtifact>& artifacts,
                          double wall_seconds);

} // namespace invfilter
