#include <spdc/config_reader.hpp>
#include <spdc/error.hpp>

#include <cmath>

namespace spdc::config {

ObjectReader::ObjectReader(const json &obj, std::string path) : obj_(obj), path_(std::move(path)) {
  if (!obj_.is_object()) fail(ErrorCode::Config, path_ + ": expected a JSON object");
}

bool ObjectReader::has(const std::string &key) const { return obj_.contains(key); }

void ObjectReader::error(const std::string &key, const std::string &msg) const {
  std::string where = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
  fail(ErrorCode::Config, where + ": " + msg);
}

const json *ObjectReader::find(const std::string &key) {
  auto it = obj_.find(key);
  if (it == obj_.end()) return nullptr;
  used_.insert(key);
  return &*it;
}

std::optional<double> ObjectReader::suffixed(const std::string &base, const char *const *suffixes,
                                             const double *scales, int count) {
  std::optional<double> out;
  std::string found;
  for (int i = 0; i < count; ++i) {
    std::string key = base + "_" + suffixes[i];
    const json *v = find(key);
    if (!v) continue;
    if (out) error(key, "conflicts with " + found);
    if (!v->is_number()) error(key, "expected a number");
    double x = v->get<double>();
    if (!std::isfinite(x)) error(key, "not finite");
    out = x * scales[i];
    found = key;
  }
  if (!out && obj_.contains(base)) error(base, "a unit suffix is required");
  return out;
}

std::optional<double> ObjectReader::angle(const std::string &base) {
  static const char *const suffixes[] = {"deg", "rad"};
  static const double scales[] = {3.14159265358979323846 / 180.0, 1.0};
  return suffixed(base, suffixes, scales, 2);
}

std::optional<double> ObjectReader::length_um(const std::string &base) {
  static const char *const suffixes[] = {"mm", "um", "nm", "angstrom"};
  static const double scales[] = {1e3, 1.0, 1e-3, 1e-4};
  return suffixed(base, suffixes, scales, 4);
}

std::optional<double> ObjectReader::number(const std::string &key) {
  const json *v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_number()) error(key, "expected a number");
  return v->get<double>();
}

std::optional<long long> ObjectReader::integer(const std::string &key) {
  const json *v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) error(key, "expected an integer");
  return v->get<long long>();
}

std::optional<bool> ObjectReader::boolean(const std::string &key) {
  const json *v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_boolean()) error(key, "expected true or false");
  return v->get<bool>();
}

std::optional<std::string> ObjectReader::string(const std::string &key) {
  const json *v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_string()) error(key, "expected a string");
  return v->get<std::string>();
}

const json *ObjectReader::raw(const std::string &key) { return find(key); }

std::optional<ObjectReader> ObjectReader::object(const std::string &key) {
  const json *v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_object()) error(key, "expected an object");
  return ObjectReader(*v, path_.empty() ? key : path_ + "." + key);
}

double ObjectReader::require_angle(const std::string &base) {
  auto v = angle(base);
  if (!v) error(base + "_deg|_rad", "required");
  return *v;
}

double ObjectReader::require_length_um(const std::string &base) {
  auto v = length_um(base);
  if (!v) error(base + "_mm|_um|_nm|_angstrom", "required");
  return *v;
}

double ObjectReader::require_number(const std::string &key) {
  auto v = number(key);
  if (!v) error(key, "required");
  return *v;
}

void ObjectReader::finish() const {
  for (auto it = obj_.begin(); it != obj_.end(); ++it)
    if (!used_.count(it.key())) error(it.key(), "unknown key");
}

} // namespace spdc::config
