// lcgeom: command-line front end.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 mathematical
// precondition failure, 3 verification failure.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <sstream>

#include "lcgeom/curves.hpp"
#include "lcgeom/example.hpp"
#include "lcgeom/fefferman.hpp"
#include "lcgeom/io.hpp"
#include "lcgeom/kropina.hpp"
#include "lcgeom/model.hpp"
#include "lcgeom/projective.hpp"

using namespace lcgeom;
using io::Json;
using Vec = Eigen::VectorXd;

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kMathError = 2;
constexpr int kVerifyFailed = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

Vec parse_reals(const std::string& s, const std::string& flag) {
  const auto parts = split(s);
  if (parts.empty()) throw UsageError(flag + ": expected a comma-separated list");
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    try {
      std::size_t used = 0;
      v(static_cast<Eigen::Index>(i)) = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + parts[i] + "' is not a number");
    }
  }
  return v;
}

Rational parse_rational(const std::string& s, const std::string& flag) {
  Rational q;
  if (s.find('/') != std::string::npos) {
    if (q.set_str(s, 10) == 0 && q.get_den() != 0) {
      q.canonicalize();
      return q;
    }
  } else if (parse_decimal(s, q)) {
    return q;
  }
  throw UsageError(flag + ": '" + s + "' is not a rational number");
}

qla::QVec parse_rationals(const std::string& s, const std::string& flag) {
  qla::QVec out;
  for (const auto& part : split(s)) out.push_back(parse_rational(part, flag));
  if (out.empty()) throw UsageError(flag + ": expected a comma-separated list");
  return out;
}

std::pair<double, double> parse_span(const std::string& s, const std::string& flag) {
  const Vec v = parse_reals(s, flag);
  if (v.size() != 2) throw UsageError(flag + ": expected two numbers a,b");
  return {v(0), v(1)};
}

void emit(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
  } else {
    io::write_file(path, content);
  }
}

Json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json qvec_json(const qla::QVec& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

struct IntegratorFlags {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  std::size_t max_steps = 200000;
  double null_drift_tol = 1e-8;

  void add(CLI::App* app) {
    app->add_option("--rel-tol", rel_tol, "relative tolerance")->capture_default_str();
    app->add_option("--abs-tol", abs_tol, "absolute tolerance")->capture_default_str();
    app->add_option("--initial-step", initial_step, "initial step size")->capture_default_str();
    app->add_option("--max-steps", max_steps, "step limit")->capture_default_str();
    app->add_option("--null-drift-tol", null_drift_tol, "allowed |g(c',c')| on null geodesics")
        ->capture_default_str();
  }
  curves::IntegratorConfig config() const {
    if (!(rel_tol > 0 && abs_tol > 0 && initial_step > 0 && null_drift_tol > 0)) {
      throw UsageError("tolerances and step sizes must be positive");
    }
    curves::IntegratorConfig c;
    c.ode.rel_tol = rel_tol;
    c.ode.abs_tol = abs_tol;
    c.ode.initial_step = initial_step;
    c.ode.max_steps = max_steps;
    c.null_drift_tol = null_drift_tol;
    return c;
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string path;
  void add(CLI::App* app) {
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("-o,--output", path, "output file (default stdout)");
  }
};

void write_trajectory(const curves::Trajectory& tr, const OutputFlags& out, const Json& extra = Json::object()) {
  if (out.format == "json") {
    Json j = io::trajectory_to_json(tr);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    emit(j.dump(2) + "\n", out.path);
  } else {
    emit(io::trajectory_to_csv(tr), out.path);
    if (!extra.empty()) std::cerr << extra.dump() << "\n";
  }
}

// Sampled integrability test on the unit box around q; chains and
// null-chains need an integrable structure.
void require_integrable(const lc::LCStructure& s, const Vec& q) {
  lc::Box box{q.array() - 1.0, q.array() + 1.0};
  const auto rep = lc::is_integrable(s, box);
  if (!rep.integrable) {
    throw feff::NotIntegrable("structure is not integrable near the start point (max defect " +
                              std::to_string(rep.max_defect) + ")");
  }
}

Vec require_dim(const Vec& v, std::size_t d, const std::string& flag) {
  if (static_cast<std::size_t>(v.size()) != d) {
    throw UsageError(flag + ": expected " + std::to_string(d) + " coordinates");
  }
  return v;
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out;
  if (count < 2) throw UsageError("--points must be at least 2");
  for (std::size_t k = 0; k < count; ++k) out.push_back(a + (b - a) * static_cast<double>(k) / (count - 1));
  return out;
}

// ---------------------------------------------------------------- check

struct CheckCmd {
  std::string file;
  std::string box_lo, box_hi;
  std::size_t samples = 256;
  double tol = 1e-10;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("check", "integrability and projectivity report for a structure file");
    c->add_option("file", file, "structure JSON")->required();
    c->add_option("--box-lo", box_lo, "sample box lower corner (default -1 in every coordinate)");
    c->add_option("--box-hi", box_hi, "sample box upper corner (default 1 in every coordinate)");
    c->add_option("--samples", samples, "sample count")->capture_default_str();
    c->add_option("--tol", tol, "defect tolerance")->capture_default_str();
  }

  int run() const {
    const lc::LCStructure s = io::load_structure(file);
    const std::size_t d = s.dim();
    lc::Box box{box_lo.empty() ? Vec(Vec::Constant(d, -1.0)) : require_dim(parse_reals(box_lo, "--box-lo"), d, "--box-lo"),
                box_hi.empty() ? Vec(Vec::Constant(d, 1.0)) : require_dim(parse_reals(box_hi, "--box-hi"), d, "--box-hi")};
    const auto rep = lc::is_integrable(s, box, tol, samples);
    Json j{{"n", s.n()},
           {"integrable", rep.integrable},
           {"symbolic_zero_defect", rep.symbolic_zero},
           {"defect_max", rep.max_defect},
           {"samples", rep.samples},
           {"skipped_samples", rep.skipped}};
    try {
      const proj::ChristoffelField g = proj::christoffels_from_fij(s);
      j["projective"] = true;
      j["gamma"] = io::christoffel_to_json(g);
    } catch (const proj::NotProjective& e) {
      j["projective"] = false;
      j["gamma"] = nullptr;
      j["not_projective_reason"] = e.what();
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
};

// ---------------------------------------------------------------- metric

struct MetricCmd {
  std::string file;
  std::string at;
  std::string kind = "auto";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("metric", "dump a Fefferman-type metric");
    c->add_option("file", file, "structure or Christoffel JSON")->required();
    c->add_option("--at", at, "also evaluate at this point");
    c->add_option("--kind", kind, "fefferman, projective or patterson-walker")
        ->check(CLI::IsMember({"auto", "fefferman", "projective", "patterson-walker"}))
        ->capture_default_str();
  }

  int run() const {
    const Json input = Json::parse(io::read_file(file), nullptr, false);
    if (input.is_discarded()) throw io::IoError(file + ": malformed JSON");
    const bool christoffel = input.is_object() && input.contains("gamma");
    std::optional<feff::MetricField> g;
    if (christoffel) {
      const auto gamma = io::christoffel_from_json(input);
      if (kind == "fefferman") {
        g = feff::build_fefferman(proj::fij_from_christoffels(gamma));
      } else if (kind == "patterson-walker") {
        g = feff::build_patterson_walker(gamma);
      } else {
        g = feff::build_fefferman_projective(gamma);
      }
    } else {
      if (kind == "projective" || kind == "patterson-walker") {
        const auto gamma = proj::christoffels_from_fij(io::structure_from_json(input));
        g = kind == "projective" ? feff::build_fefferman_projective(gamma) : feff::build_patterson_walker(gamma);
      } else {
        g = feff::build_fefferman(io::structure_from_json(input));
      }
    }
    Json j = io::metric_to_json(*g);
    if (!at.empty()) {
      const Vec q = require_dim(parse_reals(at, "--at"), g->dim(), "--at");
      const Eigen::MatrixXd m = g->at(q);
      Json rows = Json::array();
      for (Eigen::Index a = 0; a < m.rows(); ++a) rows.push_back(vec_json(m.row(a).transpose()));
      const auto sig = g->signature(q);
      j["at"] = vec_json(q);
      j["values"] = rows;
      j["signature"] = {{"positive", sig.positive}, {"negative", sig.negative}, {"zero", sig.zero}};
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
};

// ---------------------------------------------------------------- chains

struct CurveCmd {
  enum class Mode { kChain, kNullChain };
  Mode mode;
  std::string file, at, dir, to, tspan = "0,1", guess;
  double s0 = 0.0;
  double k = 0.0;
  std::size_t points = 0;
  IntegratorFlags integ;
  OutputFlags out;

  explicit CurveCmd(Mode m) : mode(m) {}

  void add(CLI::App& app) {
    CLI::App* c = mode == Mode::kChain
                      ? app.add_subcommand("chain", "chain through a point in a transverse direction")
                      : app.add_subcommand("null-chain", "null-chain through a point in a contact null direction");
    c->add_option("file", file, "structure JSON")->required();
    c->add_option("--at", at, "start point x1..xn,u,p1..pn")->required();
    c->add_option("--tspan", tspan, "parameter interval a,b")->capture_default_str();
    c->add_option("--s0", s0, "fiber coordinate of the lift")->capture_default_str();
    c->add_option("--points", points, "sample at this many equally spaced parameters");
    if (mode == Mode::kChain) {
      c->add_option("--dir", dir, "initial direction");
      c->add_option("--to", to, "end point (n = 1, two-point mode; parametrized by x)");
      c->add_option("--guess", guess, "two-point mode: initial y',p' at the start");
    } else {
      c->add_option("--dir", dir, "initial direction")->required();
      c->add_option("--k", k, "fiber speed of the lift")->capture_default_str();
    }
    integ.add(c);
    out.add(c);
  }

  int run() const {
    const lc::LCStructure s = io::load_structure(file);
    const Vec q = require_dim(parse_reals(at, "--at"), s.dim(), "--at");
    const auto cfg = integ.config();
    if (mode == Mode::kChain && !to.empty()) return two_point(s, q, cfg);
    if (dir.empty()) throw UsageError("--dir is required");
    const Vec v = require_dim(parse_reals(dir, "--dir"), s.dim(), "--dir");
    require_integrable(s, q);
    const auto [t0, t1] = parse_span(tspan, "--tspan");
    ode::Options opts;
    if (points) opts.output_points = linspace(t0, t1, points);
    const curves::FeffermanCurves fc(s);
    const curves::LiftedCurve lc = mode == Mode::kChain ? fc.chain(q, v, t0, t1, cfg, s0, opts)
                                                        : fc.null_chain(q, v, k, t0, t1, cfg, s0, opts);
    Json extra{{"direction_kind", std::string(model::to_string(lc::classify_point_vector(s, q, v)))},
               {"min_abs_K_pairing", lc.min_abs_K_pairing},
               {"max_abs_K_pairing", lc.max_abs_K_pairing},
               {"max_null_drift", lc.max_null_drift}};
    write_trajectory(lc.projection, out, extra);
    return kOk;
  }

  int two_point(const lc::LCStructure& s, const Vec& q, const curves::IntegratorConfig& cfg) const {
    if (s.n() != 1) throw UsageError("two-point mode needs n = 1");
    const Vec b = require_dim(parse_reals(to, "--to"), 3, "--to");
    if (!(b(0) != q(0))) throw UsageError("--to must have a different x coordinate");
    double gy = (b(1) - q(1)) / (b(0) - q(0));
    double gp = (b(2) - q(2)) / (b(0) - q(0));
    if (!guess.empty()) {
      const Vec g = require_dim(parse_reals(guess, "--guess"), 2, "--guess");
      gy = g(0);
      gp = g(1);
    }
    const kropina::KropinaDim3 el(s);
    const auto res = el.shoot(q(0), b(0), q(1), q(2), b(1), b(2), gy, gp, cfg);
    curves::Trajectory tr = res.trajectory;
    if (points) {
      tr = el.integrate(q(0), b(0), Eigen::Vector4d(q(1), res.y1_a, q(2), res.p1_a), cfg,
                        linspace(q(0), b(0), points));
    }
    tr.kind = curves::CurveKind::kChain;
    tr.notes.push_back("two-point chain solved as a Kropina geodesic, parametrized by x");
    Json extra{{"initial_slopes", {res.y1_a, res.p1_a}},
               {"boundary_mismatch", res.mismatch},
               {"newton_iterations", res.iterations}};
    write_trajectory(tr, out, extra);
    return kOk;
  }
};

struct KFlowCmd {
  std::string file, at, tspan = "0,1";
  double s0 = 0.0;
  IntegratorFlags integ;
  OutputFlags out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("kflow", "flow line of the fiber Killing field");
    c->add_option("file", file, "structure JSON")->required();
    c->add_option("--at", at, "base point")->required();
    c->add_option("--s0", s0, "initial fiber coordinate")->capture_default_str();
    c->add_option("--tspan", tspan, "parameter interval a,b")->capture_default_str();
    integ.add(c);
    out.add(c);
  }

  int run() const {
    const lc::LCStructure s = io::load_structure(file);
    const Vec q = require_dim(parse_reals(at, "--at"), s.dim(), "--at");
    require_integrable(s, q);
    const auto [t0, t1] = parse_span(tspan, "--tspan");
    const curves::FeffermanCurves fc(s);
    const auto lc = fc.k_flow(q, s0, t0, t1, integ.config());
    double drift = 0.0;
    for (const auto& smp : lc.projection.samples) drift = std::max(drift, (smp.point - q).cwiseAbs().maxCoeff());
    write_trajectory(lc.lift, out, Json{{"projection_drift", drift}});
    return kOk;
  }
};

struct KropinaCmd {
  std::string file, at, slopes, to, guess;
  double x_end = 1.0;
  std::size_t points = 0;
  IntegratorFlags integ;
  OutputFlags out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("kropina-geodesic", "Euler-Lagrange geodesic of the Kropina function (n = 1)");
    c->add_option("file", file, "structure JSON")->required();
    c->add_option("--at", at, "start point x,y,p")->required();
    c->add_option("--slopes", slopes, "initial y',p' (initial-value mode)");
    c->add_option("--x-end", x_end, "final x (initial-value mode)")->capture_default_str();
    c->add_option("--to", to, "end point x,y,p (two-point mode)");
    c->add_option("--guess", guess, "two-point mode: initial y',p' guess");
    c->add_option("--points", points, "sample at this many equally spaced x");
    integ.add(c);
    out.add(c);
  }

  int run() const {
    const lc::LCStructure s = io::load_structure(file);
    if (s.n() != 1) throw UsageError("kropina-geodesic needs n = 1");
    const Vec q = require_dim(parse_reals(at, "--at"), 3, "--at");
    const kropina::KropinaDim3 el(s);
    const auto cfg = integ.config();
    if (!to.empty()) {
      const Vec b = require_dim(parse_reals(to, "--to"), 3, "--to");
      Vec g(2);
      g << (b(1) - q(1)) / (b(0) - q(0)), (b(2) - q(2)) / (b(0) - q(0));
      if (!guess.empty()) g = require_dim(parse_reals(guess, "--guess"), 2, "--guess");
      const auto res = el.shoot(q(0), b(0), q(1), q(2), b(1), b(2), g(0), g(1), cfg);
      curves::Trajectory tr = res.trajectory;
      if (points) {
        tr = el.integrate(q(0), b(0), Eigen::Vector4d(q(1), res.y1_a, q(2), res.p1_a), cfg,
                          linspace(q(0), b(0), points));
      }
      write_trajectory(tr, out,
                       Json{{"initial_slopes", {res.y1_a, res.p1_a}},
                            {"boundary_mismatch", res.mismatch},
                            {"newton_iterations", res.iterations}});
      return kOk;
    }
    if (slopes.empty()) throw UsageError("give --slopes (initial-value mode) or --to (two-point mode)");
    const Vec sl = require_dim(parse_reals(slopes, "--slopes"), 2, "--slopes");
    std::optional<std::vector<double>> pts;
    if (points) pts = linspace(q(0), x_end, points);
    write_trajectory(el.integrate(q(0), x_end, Eigen::Vector4d(q(1), sl(0), q(2), sl(1)), cfg, pts), out);
    return kOk;
  }
};

struct ProjectCmd {
  std::string file, at, dir, tspan = "0,1";
  double k = 0.0;
  std::size_t points = 0;
  IntegratorFlags integ;
  OutputFlags out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("project-paths", "project a chain or null-chain to the leaf space");
    c->add_option("file", file, "structure JSON")->required();
    c->add_option("--at", at, "start point")->required();
    c->add_option("--dir", dir, "initial direction (transverse: chain; contact null: null-chain)")->required();
    c->add_option("--k", k, "fiber speed for null-chains")->capture_default_str();
    c->add_option("--tspan", tspan, "parameter interval a,b")->capture_default_str();
    c->add_option("--points", points, "sample at this many equally spaced parameters");
    integ.add(c);
    out.add(c);
  }

  int run() const {
    const lc::LCStructure s = io::load_structure(file);
    const Vec q = require_dim(parse_reals(at, "--at"), s.dim(), "--at");
    const Vec v = require_dim(parse_reals(dir, "--dir"), s.dim(), "--dir");
    require_integrable(s, q);
    const auto [t0, t1] = parse_span(tspan, "--tspan");
    ode::Options opts;
    if (points) opts.output_points = linspace(t0, t1, points);
    const curves::FeffermanCurves fc(s);
    const bool transverse = lc::classify_point_vector(s, q, v) == model::TangentKind::kTransverse;
    const auto lc = transverse ? fc.chain(q, v, t0, t1, integ.config(), 0.0, opts)
                               : fc.null_chain(q, v, k, t0, t1, integ.config(), 0.0, opts);
    const auto pp = curves::project_to_paths(s, lc.projection);
    const std::size_t m = s.n() + 1;
    const auto& names = s.vars()->names();
    if (out.format == "json") {
      Json j{{"curve", std::string(curves::to_string(lc.projection.kind))},
             {"coords", std::vector<std::string>(names.begin(), names.begin() + static_cast<long>(m))},
             {"t", pp.t},
             {"max_residual", pp.max_residual}};
      Json pts = Json::array();
      for (const auto& b : pp.base_points) pts.push_back(vec_json(b));
      j["base_points"] = pts;
      if (pp.ode_residual) j["ode_residual"] = *pp.ode_residual;
      if (pp.geodesic_residual) j["geodesic_residual"] = *pp.geodesic_residual;
      emit(j.dump(2) + "\n", out.path);
    } else {
      std::ostringstream os;
      os << "t";
      for (std::size_t a = 0; a < m; ++a) os << "," << names[a];
      if (pp.ode_residual) os << ",ode_residual";
      if (pp.geodesic_residual) os << ",geodesic_residual";
      os << "\n";
      for (std::size_t i = 0; i < pp.t.size(); ++i) {
        os << io::format_double(pp.t[i]);
        for (Eigen::Index a = 0; a < pp.base_points[i].size(); ++a) os << "," << io::format_double(pp.base_points[i](a));
        if (pp.ode_residual) os << "," << io::format_double((*pp.ode_residual)[i]);
        if (pp.geodesic_residual) os << "," << io::format_double((*pp.geodesic_residual)[i]);
        os << "\n";
      }
      emit(os.str(), out.path);
      std::cerr << Json{{"max_residual", pp.max_residual}}.dump() << "\n";
    }
    return kOk;
  }
};

// ---------------------------------------------------------------- model

struct TangentFlags {
  std::string X, Y, z;
  std::string base_plus, base_minus, image_plus, image_minus;

  void add(CLI::App* c) {
    c->add_option("--X", X, "origin block X (n entries)");
    c->add_option("--Y", Y, "origin block Y (n entries)");
    c->add_option("--z", z, "origin block z");
    c->add_option("--base-plus", base_plus, "base line v_+ (n+2 entries)");
    c->add_option("--base-minus", base_minus, "base line v_-");
    c->add_option("--image-plus", image_plus, "tangent image of v_+");
    c->add_option("--image-minus", image_minus, "tangent image of v_-");
  }

  model::ModelTangent tangent() const {
    if (!X.empty() || !Y.empty() || !z.empty()) {
      if (X.empty() || Y.empty() || z.empty()) throw UsageError("--X, --Y and --z go together");
      return model::ModelTangent::at_origin(parse_rationals(X, "--X"), parse_rationals(Y, "--Y"),
                                            parse_rational(z, "--z"));
    }
    if (base_plus.empty() || base_minus.empty() || image_plus.empty() || image_minus.empty()) {
      throw UsageError("give --X/--Y/--z or --base-plus/--base-minus/--image-plus/--image-minus");
    }
    const model::PCLine base =
        model::make_line(parse_rationals(base_plus, "--base-plus"), parse_rationals(base_minus, "--base-minus"));
    return model::ModelTangent::from_images(base, parse_rationals(image_plus, "--image-plus"),
                                            parse_rationals(image_minus, "--image-minus"));
  }
};

Json curve_json(const model::ModelCurve& c) {
  return Json{{"a_plus", qvec_json(c.a_plus)},
              {"b_plus", qvec_json(c.b_plus)},
              {"a_minus", qvec_json(c.a_minus)},
              {"b_minus", qvec_json(c.b_minus)}};
}

Json line_json(const model::PCLine& l) { return Json{{"plus", qvec_json(l.plus)}, {"minus", qvec_json(l.minus)}}; }

struct ModelCmd {
  CLI::App* classify = nullptr;
  CLI::App* chain = nullptr;
  CLI::App* null_chain = nullptr;
  CLI::App* connect = nullptr;
  TangentFlags tf_classify, tf_chain, tf_null;
  std::string t0 = "-1", t1 = "1", a = "0", b = "0";
  std::size_t count = 11;
  std::string l1p, l1m, l2p, l2m;
  OutputFlags out;

  void add(CLI::App& app) {
    auto* m = app.add_subcommand("model", "exact computations in the homogeneous model");
    m->require_subcommand(1);
    classify = m->add_subcommand("classify", "classify a tangent vector");
    tf_classify.add(classify);
    chain = m->add_subcommand("chain", "model chain in a transverse direction");
    tf_chain.add(chain);
    null_chain = m->add_subcommand("null-chain", "model null-chain in a null direction");
    tf_null.add(null_chain);
    null_chain->add_option("--a", a, "first free parameter")->capture_default_str();
    null_chain->add_option("--b", b, "second free parameter")->capture_default_str();
    for (auto* c : {chain, null_chain}) {
      c->add_option("--t0", t0, "first parameter")->capture_default_str();
      c->add_option("--t1", t1, "last parameter")->capture_default_str();
      c->add_option("--count", count, "number of samples")->capture_default_str();
      out.add(c);
    }
    connect = m->add_subcommand("connect", "how two model points are connected");
    connect->add_option("--l1-plus", l1p, "first line v_+")->required();
    connect->add_option("--l1-minus", l1m, "first line v_-")->required();
    connect->add_option("--l2-plus", l2p, "second line v_+")->required();
    connect->add_option("--l2-minus", l2m, "second line v_-")->required();
  }

  bool parsed() const { return classify->parsed() || chain->parsed() || null_chain->parsed() || connect->parsed(); }

  int run() const {
    if (classify->parsed()) {
      const auto w = tf_classify.tangent();
      std::cout << Json{{"kind", std::string(model::to_string(model::classify_tangent(w)))}}.dump() << "\n";
      return kOk;
    }
    if (connect->parsed()) {
      const model::PCLine l1 = model::make_line(parse_rationals(l1p, "--l1-plus"), parse_rationals(l1m, "--l1-minus"));
      const model::PCLine l2 = model::make_line(parse_rationals(l2p, "--l2-plus"), parse_rationals(l2m, "--l2-minus"));
      const model::Connection c = model::connect(l1, l2);
      Json j{{"kind", std::string(model::connection_name(c))}};
      if (const auto* ch = std::get_if<model::ChainConnection>(&c)) {
        j["curve"] = curve_json(ch->curve);
        j["arc_positive"] = curve_json(ch->arc_positive);
        j["arc_negative"] = curve_json(ch->arc_negative);
      } else if (const auto* nc = std::get_if<model::NullChainConnection>(&c)) {
        j["member_mu_1"] = curve_json(nc->member(1));
      } else if (const auto* dg = std::get_if<model::DegenerateConnection>(&c)) {
        j["curve"] = curve_json(dg->curve);
        j["shared"] = dg->shared_plus ? "plus" : "minus";
      }
      std::cout << j.dump(2) << "\n";
      return kOk;
    }
    const bool is_chain = chain->parsed();
    const auto w = (is_chain ? tf_chain : tf_null).tangent();
    const model::ModelCurve c = is_chain ? model::model_chain(w)
                                         : model::model_null_chain(w, parse_rational(a, "--a"), parse_rational(b, "--b"));
    const auto samples = model::sample(c, parse_rational(t0, "--t0"), parse_rational(t1, "--t1"), count);
    if (out.format == "json") {
      Json pts = Json::array();
      for (const auto& smp : samples) pts.push_back({{"t", to_string(smp.t)}, {"line", line_json(smp.line)}});
      emit(Json{{"curve", curve_json(c)}, {"samples", pts}}.dump(2) + "\n", out.path);
    } else {
      emit(model::samples_to_csv(samples), out.path);
    }
    return kOk;
  }
};

// ---------------------------------------------------------------- verify-example

struct VerifyCmd {
  bool json = false;
  double coefficient = 0.5;
  std::string structure_file;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify-example", "reproduce the worked dimension-3 example");
    c->add_flag("--json", json, "machine-readable report");
    c->add_option("--coefficient", coefficient, "use f = c (p + e^{-2x} p^3)")->capture_default_str();
    c->add_option("--structure", structure_file, "use this structure file instead");
  }

  int run() const {
    const lc::LCStructure s =
        structure_file.empty() ? example::structure(coefficient) : io::load_structure(structure_file);
    const example::Report rep = example::verify(s);
    std::vector<int> failed;
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
      if (!c.passed) failed.push_back(c.id);
      checks.push_back({{"id", c.id},
                        {"name", c.name},
                        {"passed", c.passed},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"detail", c.detail}});
    }
    if (json) {
      std::cout << Json{{"checks", checks},
                        {"intersection", {example::intersection_x(), example::intersection_y()}},
                        {"all_passed", failed.empty()},
                        {"failed", failed}}
                       .dump(2)
                << "\n";
    } else {
      for (const auto& c : rep.checks) {
        std::cout << (c.passed ? "PASS" : "FAIL") << " check " << c.id << ": " << c.name << " (value "
                  << io::format_double(c.value) << ", threshold " << c.threshold << "; " << c.detail << ")\n";
      }
    }
    if (!failed.empty()) {
      std::cerr << "verification failed: check";
      for (int id : failed) std::cerr << " " << id;
      std::cerr << "\n";
      return kVerifyFailed;
    }
    return kOk;
  }
};

// ---------------------------------------------------------------- pw-compare

struct PwCompareCmd {
  std::string file;
  std::size_t points = 100;
  double tol = 1e-10;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("pw-compare", "compare the Patterson-Walker pullback with the projective metric");
    c->add_option("file", file, "Christoffel JSON, or a cubic structure JSON")->required();
    c->add_option("--points", points, "number of sample points")->capture_default_str();
    c->add_option("--tol", tol, "pass tolerance")->capture_default_str();
  }

  int run() const {
    const Json input = Json::parse(io::read_file(file), nullptr, false);
    if (input.is_discarded()) throw io::IoError(file + ": malformed JSON");
    const proj::ChristoffelField gamma = input.is_object() && input.contains("gamma")
                                             ? io::christoffel_from_json(input)
                                             : proj::christoffels_from_fij(io::structure_from_json(input));
    gamma.validate();
    const std::size_t n = gamma.n();
    const feff::MetricField pw = feff::build_patterson_walker(gamma);
    const feff::MetricField fp = feff::build_fefferman_projective(gamma);
    std::optional<feff::MetricField> fi;
    if (n == 1) fi = feff::build_fefferman(proj::fij_from_christoffels(gamma));
    const std::size_t d = 2 * n + 2;
    const lc::Box box{Vec::Constant(static_cast<Eigen::Index>(d), -1.0), Vec::Constant(static_cast<Eigen::Index>(d), 1.0)};
    double pos = 0.0, neg = 0.0, builders = 0.0;
    std::size_t used = 0;
    for (const Vec& q : lc::halton_points(box, points)) {
      try {
        const Eigen::MatrixXd gp = fp.at(q);
        for (auto br : {feff::Branch::kPositive, feff::Branch::kNegative}) {
          const double y_last = feff::pw_transform(q, br)(static_cast<Eigen::Index>(d - 1));
          const double dev = (feff::pw_pullback(pw, q, br) - (-y_last) * gp).cwiseAbs().maxCoeff();
          (br == feff::Branch::kPositive ? pos : neg) = std::max(br == feff::Branch::kPositive ? pos : neg, dev);
        }
        if (fi) builders = std::max(builders, (fi->at(q) - gp).cwiseAbs().maxCoeff());
        ++used;
      } catch (const expr::DomainError&) {
      }
    }
    const bool ok = pos <= tol && neg <= tol && (!fi || builders <= tol);
    Json j{{"n", n},
           {"points", used},
           {"pullback_vs_scaled_projective_positive_branch", pos},
           {"pullback_vs_scaled_projective_negative_branch", neg},
           {"scale", "pullback = -y_{n+1} * projective Fefferman metric"},
           {"tolerance", tol},
           {"passed", ok}};
    if (fi) j["projective_vs_integrable_builder"] = builders;
    std::cout << j.dump(2) << "\n";
    return ok ? kOk : kVerifyFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian contact geometry: Fefferman metrics, chains, Kropina geodesics and the flat model"};
  app.require_subcommand(1);
  CheckCmd check;
  MetricCmd metric;
  CurveCmd chain(CurveCmd::Mode::kChain);
  CurveCmd null_chain(CurveCmd::Mode::kNullChain);
  KFlowCmd kflow;
  KropinaCmd kropina;
  ProjectCmd project;
  ModelCmd model_cmd;
  VerifyCmd verify;
  PwCompareCmd pw;
  check.add(app);
  metric.add(app);
  chain.add(app);
  null_chain.add(app);
  kflow.add(app);
  kropina.add(app);
  project.add(app);
  model_cmd.add(app);
  verify.add(app);
  pw.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIoError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "check") return check.run();
    if (name == "metric") return metric.run();
    if (name == "chain") return chain.run();
    if (name == "null-chain") return null_chain.run();
    if (name == "kflow") return kflow.run();
    if (name == "kropina-geodesic") return kropina.run();
    if (name == "project-paths") return project.run();
    if (name == "model") return model_cmd.run();
    if (name == "verify-example") return verify.run();
    if (name == "pw-compare") return pw.run();
  } catch (const curves::ClassificationError& e) {
    std::cerr << "error: " << e.what() << " (classification found: " << model::to_string(e.found()) << ")\n";
    return kMathError;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const expr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    // structure, metric, projective, model, curve and domain failures
    std::cerr << "error: " << e.what() << "\n";
    return kMathError;
  }
  return kIoError;
}
