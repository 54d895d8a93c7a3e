#include "invfilter/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace invfilter {

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& points) {
    std::ostringstream out;
    out << "n,error,bias_sq,variance,mse,stderr\n";
    for (const auto& p : points) {
        out << p.n << ',' << format_sci(p.error) << ',' << format_sci(p.bias_sq) << ','
            << format_sci(p.variance) << ',' << format_sci(p.mse) << ','
            << format_sci(p.stderr_) << '\n';
    }
    return out.str();
}

std::string slopes_csv(const std::vector<SlopeRow>& rows) {
    std::ostringstream out;
    out << "param_set,predicted_exponent,fitted_slope,residual\n";
    for (const auto& r : rows) {
        out << r.param_set << ',' << format_sci(r.predicted_exponent) << ','
            << format_sci(r.fitted_slope) << ',' << format_sci(r.residual) << '\n';
    }
    return out.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string manifest_text(const std::string& resolved_config,
                          const std::vector<ManifestArtifact>& artifacts,
                          double wall_seconds) {
    std::ostringstream out;
    out << "# invfilter manifest; feed this file back to `invfilter run` to reproduce\n";
    out << "# version = 0.1.0\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", wall_seconds);
    out << "# wall_time_seconds = " << buf << "\n";
    for (const auto& a : artifacts) {
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(a.checksum));
        out << "# artifact " << a.name << " fnv1a64=" << buf << "\n";
    }
    out << resolved_config;
    return out.str();
}

} // namespace invfilter
