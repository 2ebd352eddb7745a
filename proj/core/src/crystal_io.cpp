#include <spdc/config_reader.hpp>
#include <spdc/crystal_io.hpp>
#include <spdc/error.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#ifndef SPDC_DEFAULT_PRESET_DIR
#define SPDC_DEFAULT_PRESET_DIR ""
#endif

namespace spdc::optics {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<std::filesystem::path> find_preset_file(const std::string &dir, const std::string &name) {
  if (dir.empty()) return std::nullopt;
  for (const std::string &stem : {name, lower(name)}) {
    std::filesystem::path p = std::filesystem::path(dir) / (stem + ".json");
    std::error_code ec;
    if (std::filesystem::is_regular_file(p, ec)) return p;
  }
  return std::nullopt;
}

void read_sellmeier(config::ObjectReader r, SellmeierCoefficients &s) {
  double *fields[] = {&s.a, &s.b, &s.c, &s.d, &s.e, &s.f, &s.g, &s.h};
  const char *names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  for (int i = 0; i < 8; ++i)
    if (auto v = r.number(names[i])) *fields[i] = *v;
  if (const json *range = r.raw("range_um")) {
    if (!range->is_array() || range->size() != 2 || !(*range)[0].is_number() || !(*range)[1].is_number())
      r.error("range_um", "expected [lo, hi]");
    s.lambda_min_um = (*range)[0].get<double>();
    s.lambda_max_um = (*range)[1].get<double>();
  }
  r.finish();
}

void read_d_tensor(const config::ObjectReader &r, const json &v, chi2::DTensor &d) {
  if (!v.is_array() || v.size() != 3) r.error("d_tensor", "expected a 3x6 array");
  for (int q = 0; q < 3; ++q) {
    if (!v[q].is_array() || v[q].size() != 6) r.error("d_tensor", "expected a 3x6 array");
    for (int l = 0; l < 6; ++l) {
      if (!v[q][l].is_number()) r.error("d_tensor", "entries must be numbers");
      d(q, l) = v[q][l].get<double>();
    }
  }
}

} // namespace

CrystalConfig crystal_from_json(const json &doc, const std::string &path) {
  if (doc.is_string()) return load_preset(doc.get<std::string>());
  config::ObjectReader r(doc, path);
  CrystalConfig c;
  bool have_sellmeier = false;
  if (auto preset = r.string("preset")) {
    c = load_preset(*preset);
    have_sellmeier = true;
  }
  if (auto name = r.string("name")) c.name = *name;
  if (auto s = r.object("sellmeier")) {
    if (!have_sellmeier) c.sellmeier = SellmeierCoefficients{};
    read_sellmeier(*s, c.sellmeier);
    have_sellmeier = true;
  }
  if (!have_sellmeier) r.error("sellmeier", "required unless a preset is given");
  if (const json *d = r.raw("d_tensor")) read_d_tensor(r, *d, c.d_tensor);
  if (auto t = r.angle("theta_c")) c.theta_c = *t;
  if (auto p = r.angle("phi_c")) c.phi_c = *p;
  if (auto l = r.length_um("length")) c.length_um = *l;
  r.finish();
  c.validate();
  return c;
}

json crystal_to_json(const CrystalConfig &c) {
  const SellmeierCoefficients &s = c.sellmeier;
  json d = json::array();
  for (int q = 0; q < 3; ++q) {
    json row = json::array();
    for (int l = 0; l < 6; ++l) row.push_back(c.d_tensor(q, l));
    d.push_back(row);
  }
  return json{{"name", c.name},
              {"sellmeier",
               {{"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}, {"e", s.e}, {"f", s.f}, {"g", s.g},
                {"h", s.h}, {"range_um", {s.lambda_min_um, s.lambda_max_um}}}},
              {"d_tensor", d},
              {"theta_c_rad", c.theta_c},
              {"phi_c_rad", c.phi_c},
              {"length_um", c.length_um}};
}

CrystalConfig load_preset(const std::string &name) {
  std::optional<std::filesystem::path> file;
  if (const char *env = std::getenv("SPDC_SIM_PRESET_DIR")) file = find_preset_file(env, name);
  if (!file) file = find_preset_file(SPDC_DEFAULT_PRESET_DIR, name);
  if (file) {
    std::ifstream in(*file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception &e) {
      fail(ErrorCode::Config, file->string() + ": " + e.what());
    }
    if (doc.contains("preset")) fail(ErrorCode::Config, file->string() + ": presets cannot chain");
    return crystal_from_json(doc, file->string());
  }
  if (lower(name) == "bbo") return bbo_preset();
  fail(ErrorCode::Config, "unknown crystal preset '" + name + "'");
}

} // namespace spdc::optics
