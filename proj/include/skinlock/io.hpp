#pragma once

#include "skinlock/inverse_design.hpp"
#include "skinlock/lindblad.hpp"
#include "skinlock/orbitals.hpp"
#include "skinlock/spectral.hpp"
#include "skinlock/steady_state.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace skinlock {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

/// {"dim", "labels", "re", "im"}, row-major. Doubles are written in their
/// shortest round-trip decimal form.
json matrix_to_json(const CMatrix& m, const std::vector<std::string>& labels = {});
CMatrix matrix_from_json(const json& j, std::vector<std::string>* labels = nullptr);

json spectrum_to_json(const BiorthogonalSpectrum& spectrum);
json correlator_to_json(const SteadyCorrelator& c, const json& parameters);
json jumps_to_json(const JumpSet& jumps);
JumpSet jumps_from_json(const json& j);
json realization_to_json(const MicroscopicRealization& r);
json trajectory_to_json(const MasterTrajectory& trajectory);

std::string to_string(SpectrumSource source);

/// %.12g, the CSV float format.
std::string format_csv(double value);

struct ProfileRow {
  int j = 0;
  std::string label;
  double r_slow_sq = 0.0;
  double phi_max_sq = 0.0;
  double density_norm = 0.0;
};

/// `comments` become leading "# " lines ahead of the header.
void write_source_scan_csv(std::ostream& out, const std::vector<SourceScanRow>& rows,
                           const std::vector<std::string>& comments = {});
void write_crossover_csv(std::ostream& out, const std::vector<CrossoverRow>& rows,
                         const std::vector<std::string>& comments = {});
void write_profiles_csv(std::ostream& out, const std::vector<ProfileRow>& rows,
                        const std::vector<std::string>& comments = {});

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace skinlock
