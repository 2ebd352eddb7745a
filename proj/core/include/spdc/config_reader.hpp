#pragma once
#include <json.hpp>
#include <optional>
#include <set>
#include <string>

namespace spdc::config {

using nlohmann::json;

/// Strict reader over one JSON object. Every key must be consumed before finish(),
/// otherwise it is reported as unknown. Dimensioned values need a unit suffix.
class ObjectReader {
public:
  ObjectReader(const json &obj, std::string path);

  const std::string &path() const { return path_; }
  bool has(const std::string &key) const;

  /// Looks up base_deg or base_rad; returns radians.
  std::optional<double> angle(const std::string &base);
  /// Looks up base_um, base_nm or base_angstrom; returns micrometers.
  std::optional<double> length_um(const std::string &base);

  std::optional<double> number(const std::string &key);
  std::optional<long long> integer(const std::string &key);
  std::optional<bool> boolean(const std::string &key);
  std::optional<std::string> string(const std::string &key);
  /// Marks the key consumed and returns the raw value.
  const json *raw(const std::string &key);
  std::optional<ObjectReader> object(const std::string &key);

  double require_angle(const std::string &base);
  double require_length_um(const std::string &base);
  double require_number(const std::string &key);

  /// Throws Config for any key that was never consumed.
  void finish() const;

  [[noreturn]] void error(const std::string &key, const std::string &msg) const;

private:
  const json *find(const std::string &key);
  std::optional<double> suffixed(const std::string &base, const char *const *suffixes,
                                 const double *scales, int count);

  const json &obj_;
  std::string path_;
  std::set<std::string> used_;
};

} // namespace spdc::config
