#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlzcav/atomstruct.hpp"

namespace nlzcav {

namespace {

using nlohmann::json;

HalfInt parse_half_int(const json& value, const std::string& field) {
  if (value.is_number_integer()) return HalfInt(value.get<int>());
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return HalfInt(std::stoi(text));
      const int num = std::stoi(text.substr(0, slash));
      const int den = std::stoi(text.substr(slash + 1));
      if (den == 2) return HalfInt::half(num);
      if (den == 1) return HalfInt(num);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("field '" + field + "' is not an integer or half-integer");
}

double required_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ConfigError(where + ": missing numeric field '" + key + "'");
  }
  return obj.at(key).get<double>();
}

}  // namespace

void PhysicalConstants::validate() const {
  if (!(mu_B > 0 && h > 0 && g_S > 0 && g_L > 0)) {
    throw ConfigError("physical constants mu_B, h, g_S, g_L must be positive");
  }
}

const FineLevel& AtomData::level(const std::string& label) const {
  auto it = levels.find(label);
  if (it == levels.end()) throw LookupError("unknown fine-structure level '" + label + "'");
  return it->second;
}

const TransitionLine& AtomData::line(const std::string& name) const {
  auto it = lines.find(name);
  if (it == lines.end()) throw LookupError("unsupported transition line '" + name + "'");
  return it->second;
}

AtomData AtomData::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open atom data file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("atom data file '" + path + "': " + e.what());
  }

  AtomData data;
  data.source = doc.value("source", std::string{});
  if (!doc.contains("constants")) throw ConfigError(path + ": missing 'constants'");
  const auto& c = doc.at("constants");
  data.constants.mu_B = required_number(c, "mu_B_J_per_T", "constants");
  data.constants.h = required_number(c, "h_J_s", "constants");
  data.constants.g_S = required_number(c, "g_S", "constants");
  data.constants.g_L = required_number(c, "g_L", "constants");
  data.constants.g_I = required_number(c, "g_I", "constants");
  data.constants.validate();

  if (!doc.contains("nuclear_spin")) throw ConfigError(path + ": missing 'nuclear_spin'");
  const HalfInt I = parse_half_int(doc.at("nuclear_spin"), "nuclear_spin");

  for (const auto& [label, lv] : doc.at("levels").items()) {
    FineLevel level;
    level.label = label;
    level.I = I;
    level.L = parse_half_int(lv.at("L"), label + ".L");
    level.S = parse_half_int(lv.at("S"), label + ".S");
    level.J = parse_half_int(lv.at("J"), label + ".J");
    level.A_hfs = mhz_to_angular(required_number(lv, "A_hfs_MHz", label));
    level.B_hfs = mhz_to_angular(lv.value("B_hfs_MHz", 0.0));
    level.validate();
    data.levels.emplace(label, level);
  }

  for (const auto& [name, ln] : doc.at("lines").items()) {
    TransitionLine line;
    line.name = name;
    line.ground = data.level(ln.at("ground").get<std::string>());
    line.excited = data.level(ln.at("excited").get<std::string>());
    line.reduced_dipole = required_number(ln, "reduced_dipole_C_m", name);
    line.wavelength = required_number(ln, "wavelength_m", name);
    line.validate();
    data.lines.emplace(name, line);
  }
  return data;
}

std::string AtomData::default_path() {
  if (const char* env = std::getenv("NLZCAV_DATA"); env != nullptr && *env != '\0') return env;
  const std::filesystem::path installed = std::filesystem::path(NLZCAV_DATA_INSTALL_DIR) / "rb87.json";
  const std::filesystem::path build_tree = std::filesystem::path(NLZCAV_DATA_DIR) / "rb87.json";
  if (std::filesystem::exists(build_tree)) return build_tree.string();
  return installed.string();
}

AtomData AtomData::load_default() { return load(default_path()); }

}  // namespace nlzcav
