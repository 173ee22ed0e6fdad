#pragma once

// File formats: structure JSON, Christoffel JSON, metric dumps and
// trajectory CSV/JSON.

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "lcgeom/curves.hpp"
#include "lcgeom/fefferman.hpp"
#include "lcgeom/lc_core.hpp"
#include "lcgeom/projective.hpp"

namespace lcgeom::io {

using Json = nlohmann::json;

// Unreadable file, malformed JSON or expression, or failed validation.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// { "n": int, "f": [[string]] }
lc::LCStructure structure_from_json(const Json& j);
lc::LCStructure load_structure(const std::string& path);
Json structure_to_json(const lc::LCStructure& s);

// { "m": int, "gamma": { "c,a,b": string } }, 1-based, a <= b
proj::ChristoffelField christoffel_from_json(const Json& j);
proj::ChristoffelField load_christoffel(const std::string& path);
Json christoffel_to_json(const proj::ChristoffelField& g);

// { "coords": [...], "g": [[string]] }
Json metric_to_json(const feff::MetricField& g);

std::string format_double(double v);

// header t, coordinates, v_<coordinate>
std::string trajectory_to_csv(const curves::Trajectory& tr);
Json trajectory_to_json(const curves::Trajectory& tr);

}  // namespace lcgeom::io
