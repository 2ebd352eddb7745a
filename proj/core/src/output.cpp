#include <spdc/error.hpp>
#include <spdc/output.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace spdc::output {

std::string git_blob_sha1(const std::string &content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    fail(ErrorCode::Io, "SHA-1 digest failed");
  static const char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", x);
  return buf;
}

namespace {

double exit_theta(const optics::Direction &d, double n) {
  try {
    return optics::snell_exit(d, n).theta();
  } catch (const Error &) {
    return std::nan("");
  }
}

double fit_or_nan(const matching::FitConstants &fit, double phi, matching::RingBranch b) {
  try {
    return matching::ring_fit_eval(fit, phi, b);
  } catch (const Error &) {
    return std::nan("");
  }
}

} // namespace

std::string ring_csv(const matching::RingSolution &signal, const matching::RingSolution &idler,
                     const matching::IndexModel &model, const matching::FitConstants &fit) {
  if (signal.samples.size() != idler.samples.size()) fail(ErrorCode::InvalidArgument, "ring sizes differ");
  std::string out = "phi_rad,theta_signal_rad,theta_idler_rad,theta_signal_ext_rad,theta_idler_ext_rad,"
                    "theta_signal_fit_rad,theta_idler_fit_rad,residual_signal,residual_idler,converged\n";
  for (std::size_t j = 0; j < signal.samples.size(); ++j) {
    const auto &s = signal.samples[j];
    const auto &i = idler.samples[j];
    double se = std::nan(""), ie = std::nan("");
    if (s.converged) {
      auto ds = optics::Direction::lab(s.theta, s.phi);
      auto di = optics::Direction::lab(i.theta, i.phi);
      se = exit_theta(ds, model.n_signal(ds));
      ie = exit_theta(di, model.n_idler(di));
    }
    out += format_number(s.phi) + "," + format_number(s.converged ? s.theta : std::nan("")) + "," +
           format_number(i.converged ? i.theta : std::nan("")) + "," + format_number(se) + "," +
           format_number(ie) + "," + format_number(fit_or_nan(fit, s.phi, matching::RingBranch::Signal)) + "," +
           format_number(fit_or_nan(fit, i.phi, matching::RingBranch::Idler)) + "," + format_number(s.residual) +
           "," + format_number(i.transverse_residual) + "," + (s.converged && i.converged ? "1" : "0") + "\n";
  }
  return out;
}

RingSummary summarize_rings(const matching::RingSolution &signal, const matching::RingSolution &idler,
                            const matching::FitConstants &fit) {
  RingSummary r;
  r.samples = signal.samples.size();
  for (std::size_t j = 0; j < r.samples; ++j) {
    const auto &s = signal.samples[j];
    const auto &i = idler.samples[j];
    if (!s.converged || !i.converged) continue;
    ++r.converged;
    r.max_residual = std::max(r.max_residual, s.residual);
    r.max_fit_deviation_signal = std::max(
        r.max_fit_deviation_signal, std::abs(s.theta - matching::ring_fit_eval(fit, s.phi, matching::RingBranch::Signal)));
    r.max_fit_deviation_idler = std::max(
        r.max_fit_deviation_idler, std::abs(i.theta - matching::ring_fit_eval(fit, i.phi, matching::RingBranch::Idler)));
  }
  return r;
}

std::string grid_csv(const engine::AmplitudeGrid &g, bool normalized) {
  double scale = 1.0;
  if (normalized) {
    double m = g.max_value();
    scale = m > 0.0 ? 1.0 / m : 0.0;
  }
  std::string out = "theta_rad,phi_rad,value\n";
  out.reserve(out.size() + g.values.size() * 48);
  for (std::size_t i = 0; i < g.theta.size(); ++i)
    for (std::size_t j = 0; j < g.phi.size(); ++j)
      out += format_number(g.theta[i]) + "," + format_number(g.phi[j]) + "," + format_number(g.at(i, j) * scale) +
             "\n";
  return out;
}

std::string grid_pgm(const engine::AmplitudeGrid &g) {
  const std::size_t rows = g.theta.size(), cols = g.phi.size();
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
  double m = g.max_value();
  for (std::size_t k = 0; k < rows * cols; ++k) {
    double v = m > 0.0 ? std::abs(g.values[k]) / m : 0.0;
    auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write '" + path + "'");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

void FileSet::write(const std::string &path, const std::string &content) {
  write_file(path, content);
  files_.push_back({path, git_blob_sha1(content)});
}

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const auto &f : files) files_json.push_back({{"path", f.path}, {"sha1", f.sha1}});
  return {{"tool", "spdc_sim"},
          {"tool_version", tool_version},
          {"command_line", command_line},
          {"started_utc", started_utc},
          {"finished_utc", finished_utc},
          {"scenario", scenario},
          {"files", files_json}};
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool verify_manifest(const json &manifest) {
  if (!manifest.contains("files")) return false;
  for (const auto &f : manifest.at("files")) {
    std::ifstream in(f.at("path").get<std::string>(), std::ios::binary);
    if (!in) return false;
    std::stringstream buf;
    buf << in.rdbuf();
    if (git_blob_sha1(buf.str()) != f.at("sha1").get<std::string>()) return false;
  }
  return true;
}

} // namespace spdc::output
