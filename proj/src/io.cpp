#include "lcgeom/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lcgeom::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

namespace {

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IoError(what + ": " + e.what());
  }
}

expr::Expression parse_expr(const Json& j, const expr::VarsPtr& vars, const std::string& where) {
  if (!j.is_string()) throw IoError(where + ": expected an expression string");
  try {
    return expr::parse(j.get<std::string>(), vars);
  } catch (const expr::ParseError& e) {
    throw IoError(where + ": " + e.what());
  }
}

}  // namespace

lc::LCStructure structure_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("f")) throw IoError("structure: expected {\"n\", \"f\"}");
  if (!j["n"].is_number_integer() || j["n"].get<long>() < 1) throw IoError("structure: n must be a positive integer");
  const auto n = j["n"].get<std::size_t>();
  const Json& f = j["f"];
  if (!f.is_array() || f.size() != n) throw IoError("structure: f must be an n x n array");
  const expr::VarsPtr vars = lc::LCStructure::variables(n);
  std::vector<std::vector<expr::Expression>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!f[i].is_array() || f[i].size() != n) throw IoError("structure: f must be an n x n array");
    std::vector<expr::Expression> row;
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(parse_expr(f[i][k], vars, "structure: f[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    }
    rows.push_back(std::move(row));
  }
  try {
    return lc::LCStructure(n, std::move(rows));
  } catch (const lc::StructureError& e) {
    throw IoError(std::string("structure: ") + e.what());
  }
}

lc::LCStructure load_structure(const std::string& path) {
  return structure_from_json(parse_json(read_file(path), path));
}

Json structure_to_json(const lc::LCStructure& s) {
  Json f = Json::array();
  for (std::size_t i = 0; i < s.n(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < s.n(); ++k) row.push_back(s.f(i, k).to_string());
    f.push_back(row);
  }
  return Json{{"n", s.n()}, {"f", f}};
}

proj::ChristoffelField christoffel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("gamma")) {
    throw IoError("christoffel: expected {\"m\", \"gamma\"}");
  }
  if (!j["m"].is_number_integer() || j["m"].get<long>() < 2) throw IoError("christoffel: m must be >= 2");
  const auto m = j["m"].get<std::size_t>();
  proj::ChristoffelField g(m);
  if (!j["gamma"].is_object()) throw IoError("christoffel: gamma must be an object");
  for (const auto& [key, value] : j["gamma"].items()) {
    std::size_t c = 0, a = 0, b = 0;
    char tail = 0;
    if (std::sscanf(key.c_str(), "%zu,%zu,%zu%c", &c, &a, &b, &tail) != 3 || c < 1 || a < 1 || b < 1 || c > m ||
        a > m || b > m) {
      throw IoError("christoffel: bad key \"" + key + "\" (expected \"c,a,b\" with 1-based indices)");
    }
    if (a > b) throw IoError("christoffel: key \"" + key + "\" must have a <= b");
    g.set(c - 1, a - 1, b - 1, parse_expr(value, g.vars(), "christoffel: gamma[" + key + "]"));
  }
  return g;
}

proj::ChristoffelField load_christoffel(const std::string& path) {
  return christoffel_from_json(parse_json(read_file(path), path));
}

Json christoffel_to_json(const proj::ChristoffelField& g) {
  Json gamma = Json::object();
  for (std::size_t c = 0; c < g.m(); ++c) {
    for (std::size_t a = 0; a < g.m(); ++a) {
      for (std::size_t b = a; b < g.m(); ++b) {
        if (g.get(c, a, b).is_zero()) continue;
        gamma[std::to_string(c + 1) + "," + std::to_string(a + 1) + "," + std::to_string(b + 1)] =
            g.get(c, a, b).to_string();
      }
    }
  }
  return Json{{"m", g.m()}, {"gamma", gamma}};
}

Json metric_to_json(const feff::MetricField& g) {
  Json rows = Json::array();
  for (std::size_t a = 0; a < g.dim(); ++a) {
    Json row = Json::array();
    for (std::size_t b = 0; b < g.dim(); ++b) row.push_back(g.coefficient(a, b).to_string());
    rows.push_back(row);
  }
  return Json{{"coords", g.coords()->names()}, {"g", rows}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_to_csv(const curves::Trajectory& tr) {
  std::ostringstream os;
  os << "t";
  for (const auto& c : tr.coords) os << "," << c;
  for (const auto& c : tr.coords) os << ",v_" << c;
  os << "\n";
  for (const auto& s : tr.samples) {
    os << format_double(s.t);
    for (Eigen::Index i = 0; i < s.point.size(); ++i) os << "," << format_double(s.point(i));
    for (Eigen::Index i = 0; i < s.velocity.size(); ++i) os << "," << format_double(s.velocity(i));
    os << "\n";
  }
  return os.str();
}

Json trajectory_to_json(const curves::Trajectory& tr) {
  Json samples = Json::array();
  for (const auto& s : tr.samples) {
    samples.push_back({{"t", s.t},
                       {"point", std::vector<double>(s.point.data(), s.point.data() + s.point.size())},
                       {"velocity", std::vector<double>(s.velocity.data(), s.velocity.data() + s.velocity.size())}});
  }
  Json stats{{"steps", tr.stats.steps},
             {"rejected_steps", tr.stats.rejected},
             {"max_error_estimate", tr.stats.max_error_estimate}};
  if (tr.launched_null) stats["max_null_drift"] = tr.max_null_drift;
  return Json{{"kind", std::string(curves::to_string(tr.kind))},
              {"coords", tr.coords},
              {"samples", samples},
              {"stats", stats},
              {"notes", tr.notes}};
}

}  // namespace lcgeom::io
