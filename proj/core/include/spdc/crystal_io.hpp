#pragma once
#include <json.hpp>
#include <spdc/crystal_optics.hpp>
#include <string>

namespace spdc::optics {

/// Parses a crystal document:
/// {"name", "sellmeier": {"a".."h", "range_um": [lo, hi]}, "d_tensor": 3x6,
///  "theta_c_deg", "phi_c_deg", "length_um"}.
/// With "preset": NAME the named preset is loaded first and the remaining keys override it.
CrystalConfig crystal_from_json(const nlohmann::json &doc, const std::string &path = "crystal");

nlohmann::json crystal_to_json(const CrystalConfig &crystal);

/// Looks in $SPDC_SIM_PRESET_DIR (then the installed preset directory) for NAME.json or
/// lowercase(NAME).json, falling back to the built-in table ("BBO").
CrystalConfig load_preset(const std::string &name);

} // namespace spdc::optics
