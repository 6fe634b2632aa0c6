#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipsurf/materials.hpp"

namespace dipsurf {

struct Material {
  std::string name;
  MaterialModel model;
  std::string source;
  bool builtin = false;
};

class MaterialDbError : public std::runtime_error {
 public:
  enum class Kind { MissingFile, MalformedEntry, UnknownModel, NotFound };
  MaterialDbError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Immutable name -> dielectric model map. "vacuum" and "perfect_conductor" are
/// always present.
class MaterialDb {
 public:
  static MaterialDb load(const std::string& path);
  static MaterialDb parse(const std::string& yaml_text, const std::string& origin = "<string>");
  /// The database shipped in data/materials.yaml.
  static const MaterialDb& bundled();
  static std::string bundled_path();

  const Material& at(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Material> entries_;
};

}  // namespace dipsurf
