#pragma once
#include <json.hpp>
#include <spdc/coincidence.hpp>
#include <spdc/phase_matching.hpp>
#include <string>
#include <vector>

namespace spdc::output {

using nlohmann::json;

/// SHA-1 of "blob <size>\0" + content, hex encoded.
std::string git_blob_sha1(const std::string &content);

/// Fixed-format number used in every CSV: %.9e.
std::string format_number(double x);

/// phi_rad, theta_signal_rad, theta_idler_rad, theta_signal_ext_rad, theta_idler_ext_rad,
/// theta_signal_fit_rad, theta_idler_fit_rad, residual_signal, residual_idler, converged.
/// Idler columns are taken at the idler's own azimuth phi + pi.
std::string ring_csv(const matching::RingSolution &signal, const matching::RingSolution &idler,
                     const matching::IndexModel &model, const matching::FitConstants &fit);

struct RingSummary {
  std::size_t samples{0};
  std::size_t converged{0};
  double max_fit_deviation_signal{0.0};
  double max_fit_deviation_idler{0.0};
  double max_residual{0.0};
};

RingSummary summarize_rings(const matching::RingSolution &signal, const matching::RingSolution &idler,
                            const matching::FitConstants &fit);

/// Long format theta_rad, phi_rad, value; theta-major.
std::string grid_csv(const engine::AmplitudeGrid &grid, bool normalized);

/// Binary 16-bit P5 heatmap, theta rows by phi columns, max-normalized, big-endian samples.
std::string grid_pgm(const engine::AmplitudeGrid &grid);

/// Writes bytes exactly; throws Io on failure.
void write_file(const std::string &path, const std::string &content);

struct WrittenFile {
  std::string path;
  std::string sha1;
};

/// Collects files for the run manifest. Commits content and hash in one step.
class FileSet {
public:
  void write(const std::string &path, const std::string &content);
  const std::vector<WrittenFile> &files() const { return files_; }

private:
  std::vector<WrittenFile> files_;
};

struct RunManifest {
  json scenario;
  std::string tool_version;
  std::vector<std::string> command_line;
  std::string started_utc;
  std::string finished_utc;
  std::vector<WrittenFile> files;

  json to_json() const;
};

/// Current UTC time as ISO 8601.
std::string utc_now();

/// Re-reads every listed file and compares hashes.
bool verify_manifest(const json &manifest);

} // namespace spdc::output
