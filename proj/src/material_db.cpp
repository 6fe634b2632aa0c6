#include "dipsurf/material_db.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace dipsurf {

namespace {

using Kind = MaterialDbError::Kind;

[[noreturn]] void malformed(const std::string& origin, const std::string& name, const std::string& what) {
  throw MaterialDbError(Kind::MalformedEntry,
                        origin + ": material '" + name + "': " + what);
}

double number(const YAML::Node& doc, const char* key, const std::string& origin,
              const std::string& name) {
  const auto node = doc[key];
  if (!node) malformed(origin, name, std::string("missing key '") + key + "'");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    malformed(origin, name, std::string("key '") + key + "' is not a number");
  }
}

std::vector<std::vector<double>> rows(const YAML::Node& doc, std::size_t width,
                                      const std::string& origin, const std::string& name) {
  const auto node = doc["oscillators"];
  if (!node || !node.IsSequence()) malformed(origin, name, "missing 'oscillators' list");
  std::vector<std::vector<double>> out;
  for (const auto& row : node) {
    if (!row.IsSequence() || row.size() != width)
      malformed(origin, name, "each oscillator must be a list of " + std::to_string(width) + " numbers");
    std::vector<double> r;
    for (const auto& v : row) {
      try {
        r.push_back(v.as<double>());
      } catch (const YAML::Exception&) {
        malformed(origin, name, "oscillator entry is not a number");
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

void check_keys(const YAML::Node& doc, const std::set<std::string>& allowed, const std::string& origin,
                const std::string& name) {
  for (const auto& kv : doc) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) malformed(origin, name, "unknown key '" + key + "'");
  }
}

Material parse_document(const YAML::Node& doc, const std::string& origin) {
  if (!doc.IsMap()) throw MaterialDbError(Kind::MalformedEntry, origin + ": document is not a mapping");
  if (!doc["name"]) throw MaterialDbError(Kind::MalformedEntry, origin + ": document without 'name'");
  Material m;
  m.name = doc["name"].as<std::string>();
  if (!doc["model"]) malformed(origin, m.name, "missing key 'model'");
  if (!doc["source"]) malformed(origin, m.name, "missing key 'source'");
  m.source = doc["source"].as<std::string>();
  const auto tag = doc["model"].as<std::string>();

  if (tag == "drude") {
    check_keys(doc, {"name", "model", "source", "plasma_energy_eV", "damping_eV"}, origin, m.name);
    m.model = DrudeParams<double>{number(doc, "plasma_energy_eV", origin, m.name),
                                  number(doc, "damping_eV", origin, m.name)};
  } else if (tag == "drude_lorentz") {
    check_keys(doc, {"name", "model", "source", "plasma_energy_eV", "oscillators"}, origin, m.name);
    DrudeLorentzParams<double> p;
    p.plasma_energy = number(doc, "plasma_energy_eV", origin, m.name);
    for (const auto& r : rows(doc, 3, origin, m.name)) p.oscillators.push_back({r[0], r[1], r[2]});
    m.model = p;
  } else if (tag == "modified_lorentz") {
    check_keys(doc, {"name", "model", "source", "eps_infinity", "oscillators"}, origin, m.name);
    ModifiedLorentzParams<double> p;
    p.eps_infinity = number(doc, "eps_infinity", origin, m.name);
    for (const auto& r : rows(doc, 4, origin, m.name)) p.oscillators.push_back({r[0], r[1], r[2], r[3]});
    m.model = p;
  } else if (tag == "constant") {
    check_keys(doc, {"name", "model", "source", "eps_re", "eps_im"}, origin, m.name);
    m.model = ConstantPermittivity{{number(doc, "eps_re", origin, m.name), number(doc, "eps_im", origin, m.name)}};
  } else if (tag == "perfect_conductor") {
    check_keys(doc, {"name", "model", "source"}, origin, m.name);
    m.model = PerfectConductor{};
  } else {
    throw MaterialDbError(Kind::UnknownModel,
                          origin + ": material '" + m.name + "': unknown model tag '" + tag + "'");
  }

  try {
    validate(m.model);
  } catch (const std::invalid_argument& e) {
    malformed(origin, m.name, e.what());
  }
  return m;
}

}  // namespace

MaterialDb MaterialDb::parse(const std::string& yaml_text, const std::string& origin) {
  std::vector<YAML::Node> docs;
  try {
    docs = YAML::LoadAll(yaml_text);
  } catch (const YAML::Exception& e) {
    throw MaterialDbError(Kind::MalformedEntry, origin + ": YAML error: " + e.what());
  }
  MaterialDb db;
  db.entries_["vacuum"] = {"vacuum", ConstantPermittivity{}, "eps = 1", true};
  db.entries_["perfect_conductor"] = {"perfect_conductor", PerfectConductor{},
                                      "ideal metal, r^p = +1, r^s = -1", true};
  for (const auto& doc : docs) {
    if (doc.IsNull()) continue;
    auto m = parse_document(doc, origin);
    auto it = db.entries_.find(m.name);
    if (it != db.entries_.end() && !it->second.builtin)
      throw MaterialDbError(Kind::MalformedEntry, origin + ": duplicate material '" + m.name + "'");
    db.entries_[m.name] = std::move(m);
  }
  return db;
}

MaterialDb MaterialDb::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MaterialDbError(Kind::MissingFile, "cannot open material database '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string MaterialDb::bundled_path() {
  if (const char* env = std::getenv("DIPSURF_MATERIALS")) return env;
  return std::string(DIPSURF_DATA_DIR) + "/materials.yaml";
}

const MaterialDb& MaterialDb::bundled() {
  static const MaterialDb db = load(bundled_path());
  return db;
}

const Material& MaterialDb::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw MaterialDbError(Kind::NotFound, "material not found: '" + name + "'");
  return it->second;
}

std::vector<std::string> MaterialDb::names() const {
  std::vector<std::string> out;
  for (const auto& [name, m] : entries_) out.push_back(name);
  return out;
}

}  // namespace dipsurf
