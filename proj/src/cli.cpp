#include "calibra/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "calibra/calibrate.hpp"
#include "calibra/expr.hpp"
#include "calibra/graphpde.hpp"
#include "calibra/holonomy.hpp"
#include "calibra/json_io.hpp"
#include "calibra/lawlor.hpp"
#include "calibra/planes.hpp"
#include "calibra/varmin.hpp"

namespace calibra::cli {

namespace {

struct Common {
  std::string out_path;  // empty: stdout
  std::string format = "json";
  std::uint64_t seed = 0;
  bool degrees = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out_path, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", c.seed, "RNG seed (overrides CALIBRA_SEED)");
  cmd->add_flag("--degrees", c.degrees, "Interpret input angles as degrees");
  cmd->add_option("--threads", c.threads, "Worker threads for parallel stages")
      ->check(CLI::PositiveNumber);
}

std::uint64_t env_seed() {
  const char* s = std::getenv("CALIBRA_SEED");
  if (!s) return 0;
  return static_cast<std::uint64_t>(std::strtoull(s, nullptr, 10));
}

// Writes either to the requested file or the session stream.
struct Sink {
  std::ostream& fallback;
  std::ofstream file;
  explicit Sink(const Common& c, std::ostream& out) : fallback(out) {
    if (!c.out_path.empty()) {
      file.open(c.out_path);
      if (!file) throw Error("IoError", "cannot open output file " + c.out_path);
    }
  }
  std::ostream& stream() { return file.is_open() ? file : fallback; }
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

void emit_json_or_kv(const json& j, const Common& c, std::ostream& os) {
  if (c.format == "json") {
    os << j.dump(2) << "\n";
    return;
  }
  // csv: flatten one level of keys; nested values stay as compact json.
  for (auto it = j.begin(); it != j.end(); ++it) {
    os << it.key() << ",";
    if (it->is_primitive())
      os << it->dump();
    else
      os << "\"" << it->dump() << "\"";
    os << "\n";
  }
}

double maybe_radians(double v, const Common& c) {
  return c.degrees ? v * M_PI / 180.0 : v;
}

// ---------------------------------------------------------------------------
// identities
// ---------------------------------------------------------------------------

struct IdentityResult {
  std::string name;
  double error;
  bool pass;
};

std::vector<IdentityResult> run_identities() {
  std::vector<IdentityResult> rs;
  auto record = [&rs](const std::string& name, double err, double tol = 1e-14) {
    rs.push_back({name, err, err <= tol});
  };

  Form phi = g2_phi(), sphi = g2_star_phi(), big = spin7_phi();

  // phi = dx1 ^ omega + Re Upsilon on R^7 = R x C^3
  std::vector<int> emb = r7_embedding();
  Form omega7 = relabel_indices(kahler_form(3), 7, emb);
  Form re7 = relabel_indices(upsilon_real(3), 7, emb);
  Form im7 = relabel_indices(upsilon_imag(3), 7, emb);
  Form dx1 = Form::make(7, 1, {{{1}, 1.0}});
  record("phi = dx1^omega + Re Upsilon", (wedge(dx1, omega7) + re7).max_abs_diff(phi));
  record("*phi = 1/2 omega^2 - dx1^Im Upsilon",
         (0.5 * wedge(omega7, omega7) - wedge(dx1, im7)).max_abs_diff(sphi));

  // Phi = 1/2 omega^2 + Re Upsilon on C^4
  Form omega8 = kahler_form(4);
  record("Phi = 1/2 omega^2 + Re Upsilon",
         (0.5 * wedge(omega8, omega8) + upsilon_real(4)).max_abs_diff(big));

  // Phi = dx1 ^ phi + *phi under R^8 = R x R^7
  std::vector<int> shift{2, 3, 4, 5, 6, 7, 8};
  Form phi_s = relabel_indices(phi, 8, shift);
  Form sphi_s = relabel_indices(sphi, 8, shift);
  Form dx1_8 = Form::make(8, 1, {{{1}, 1.0}});
  record("Phi = dx1^phi + *phi", (wedge(dx1_8, phi_s) + sphi_s).max_abs_diff(big));

  record("hodge_star(phi) = *phi", hodge_star(phi).max_abs_diff(sphi));

  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    Form omega = kahler_form(n);
    Form pow = Form::make(2 * n, 0, {{{}, 1.0}});
    double fact = 1.0;
    for (int k = 0; k <= n; ++k) {
      Form lhs = hodge_star((1.0 / fact) * pow);
      Form rhs_pow = Form::make(2 * n, 0, {{{}, 1.0}});
      double rfact = 1.0;
      for (int j = 0; j < n - k; ++j) {
        rhs_pow = wedge(rhs_pow, omega);
        rfact *= j + 1;
      }
      worst = std::max(worst, lhs.max_abs_diff((1.0 / rfact) * rhs_pow));
      pow = wedge(pow, omega);
      fact *= k + 1;
    }
  }
  record("*(omega^k/k!) = omega^(n-k)/(n-k)!", worst);

  // Lambda^2_7 projector: fixes its generators, idempotent, rank 7.
  {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    double gen_err = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      Vec u(8), v(8);
      for (auto& x : u) x = gauss(rng);
      for (auto& x : v) x = gauss(rng);
      std::vector<std::pair<MultiIndex, double>> terms;
      for (int i = 1; i <= 8; ++i)
        for (int j = i + 1; j <= 8; ++j)
          terms.push_back({{i, j},
                           u[static_cast<std::size_t>(i - 1)] * v[static_cast<std::size_t>(j - 1)] -
                               u[static_cast<std::size_t>(j - 1)] * v[static_cast<std::size_t>(i - 1)]});
      Form g = Form::make(8, 2, terms) + contract(v, contract(u, big));
      gen_err = std::max(gen_err, lambda27_project(g).max_abs_diff(g));
    }
    record("lambda27 fixes its generators", gen_err, 1e-10);
    double trace = 0.0;
    for (std::size_t r = 0; r < 28; ++r) {
      Form basis(8, 2);
      basis.coeff_at(r) = 1.0;
      trace += lambda27_project(basis).coeff_at(r);
    }
    record("lambda27 projector trace = 7", std::abs(trace - 7.0), 1e-9);
  }
  return rs;
}

// ---------------------------------------------------------------------------
// pde boundary presets
// ---------------------------------------------------------------------------

double boundary_value(const std::string& preset, double x, double y, double z,
                      int d) {
  if (preset == "zero") return 0.0;
  if (preset == "affine") return 0.3 * x + 0.2 * y + (d == 3 ? 0.1 * z : 0.0) + 0.1;
  if (preset == "harmonic-cubic") return x * x * x - 3.0 * x * y * y;
  if (preset == "harmonic-quartic")
    return x * x * x * x - 6.0 * x * x * y * y + y * y * y * y;
  if (preset == "scherk") {
    const double c = 2.0;
    return std::log(std::cos(c * (x - 0.5)) / std::cos(c * (y - 0.5))) / c;
  }
  if (preset.rfind("sine:", 0) == 0) {
    double amp = std::stod(preset.substr(5));
    return amp * std::sin(3.0 * x + 1.0) * std::cos(2.0 * y + 0.5 * z);
  }
  throw Error("UnknownPreset", "unknown boundary preset " + preset);
}

GridField boundary_grid(const std::string& preset, int n, int d) {
  if (n < 3) throw ShapeTooSmall("pde: grid must be >= 3");
  double h = 1.0 / (n - 1);
  std::vector<int> shape(static_cast<std::size_t>(d), n);
  GridField g = GridField::zeros(shape, h);
  if (d == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g.at2(i, j) = boundary_value(preset, i * h, j * h, 0.0, 2);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          g.at3(i, j, k) = boundary_value(preset, i * h, j * h, k * h, 3);
  }
  return g;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"calibrated-geometry engine"};
  app.require_subcommand(1);

  Common common;
  common.seed = env_seed();

  // --- classify ---
  auto* cmd_classify = app.add_subcommand("classify", "Classify a plane against the calibrations");
  Common c_classify = common;
  std::string classify_plane_path;
  add_common(cmd_classify, c_classify);
  cmd_classify->add_option("--plane", classify_plane_path, "Plane JSON file")->required();

  // --- comass ---
  auto* cmd_comass = app.add_subcommand("comass", "Estimate the comass of a form");
  Common c_comass = common;
  std::string comass_form_path;
  int comass_starts = 100;
  add_common(cmd_comass, c_comass);
  cmd_comass->add_option("--form", comass_form_path, "Form JSON file")->required();
  cmd_comass->add_option("--starts", comass_starts, "Multistart count")
      ->check(CLI::PositiveNumber);

  // --- angle-theorem ---
  auto* cmd_angle = app.add_subcommand("angle-theorem", "Decide the Angle Theorem for a plane pair");
  Common c_angle = common;
  std::string angle_p_path, angle_q_path;
  bool angle_witness = false;
  add_common(cmd_angle, c_angle);
  cmd_angle->add_option("--p", angle_p_path, "First plane JSON")->required();
  cmd_angle->add_option("--q", angle_q_path, "Second plane JSON")->required();
  cmd_angle->add_flag("--witness", angle_witness, "Attempt a Nance calibration witness");

  // --- lawlor ---
  auto* cmd_lawlor = app.add_subcommand("lawlor", "Solve and sample a Lawlor neck");
  Common c_lawlor = common;
  std::string lawlor_psi;
  int lawlor_samples = 100;
  double lawlor_tmax = 3.0;
  add_common(cmd_lawlor, c_lawlor);
  cmd_lawlor->add_option("--psi", lawlor_psi, "Comma-separated asymptotic angles, sum pi")
      ->required();
  cmd_lawlor->add_option("--samples", lawlor_samples, "Total sample count")
      ->check(CLI::PositiveNumber);
  cmd_lawlor->add_option("--tmax", lawlor_tmax, "Profile parameter range [-tmax, tmax]");

  // --- surface ---
  auto* cmd_surface = app.add_subcommand("surface", "Parametrized-surface geometry");
  Common c_surface = common;
  std::string surface_preset = "catenoid", surface_op = "mean-curvature", surface_at;
  int surface_grid = 128;
  add_common(cmd_surface, c_surface);
  cmd_surface->add_option("--preset", surface_preset,
                          "helicoid | catenoid | sphere | graph:<expr>");
  cmd_surface->add_option("--op", surface_op, "mean-curvature | area")
      ->check(CLI::IsMember({"mean-curvature", "area"}));
  cmd_surface->add_option("--at", surface_at, "Evaluation point u,v");
  cmd_surface->add_option("--grid", surface_grid, "Quadrature subintervals per axis");

  // --- pde ---
  auto* cmd_pde = app.add_subcommand("pde", "Solve a graph PDE on a square grid");
  Common c_pde = common;
  std::string pde_eq = "slag2", pde_boundary = "harmonic-cubic", pde_method = "newton";
  int pde_grid = 65;
  add_common(cmd_pde, c_pde);
  cmd_pde->add_option("--eq", pde_eq, "minimal | slag2 | slag3")
      ->check(CLI::IsMember({"minimal", "slag2", "slag3"}));
  cmd_pde->add_option("--grid", pde_grid, "Nodes per axis")->check(CLI::PositiveNumber);
  cmd_pde->add_option("--boundary", pde_boundary,
                      "zero | affine | harmonic-cubic | harmonic-quartic | scherk | sine:<amp>");
  cmd_pde->add_option("--method", pde_method, "newton | picard")
      ->check(CLI::IsMember({"newton", "picard"}));

  // --- identities ---
  auto* cmd_identities =
      app.add_subcommand("identities", "Verify the structure-form identities");
  Common c_identities = common;
  c_identities.format = "csv";
  add_common(cmd_identities, c_identities);

  std::vector<const char*> argv_c;
  argv_c.push_back("calibra");
  for (const auto& a : args) argv_c.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv_c.size()), argv_c.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_classify->parsed()) {
      Sink sink(c_classify, out);
      OrientedPlane p = plane_from_json(read_json_file(classify_plane_path));
      emit_json_or_kv(plane_class_to_json(classify(p)), c_classify, sink.stream());
      return 0;
    }

    if (cmd_comass->parsed()) {
      Sink sink(c_comass, out);
      Form f = form_from_json(read_json_file(comass_form_path));
      ComassReport rep = comass(f, comass_starts, c_comass.seed, c_comass.threads);
      emit_json_or_kv(comass_to_json(rep), c_comass, sink.stream());
      return 0;
    }

    if (cmd_angle->parsed()) {
      Sink sink(c_angle, out);
      OrientedPlane p = plane_from_json(read_json_file(angle_p_path));
      OrientedPlane q = plane_from_json(read_json_file(angle_q_path));
      AngleReport rep = angle_theorem(p, q, angle_witness);
      emit_json_or_kv(angle_report_to_json(rep), c_angle, sink.stream());
      return 0;
    }

    if (cmd_lawlor->parsed()) {
      Sink sink(c_lawlor, out);
      std::vector<double> psi = parse_list(lawlor_psi);
      for (double& v : psi) v = maybe_radians(v, c_lawlor);
      LawlorParams params = lawlor_solve(psi);
      int nt = std::max(1, static_cast<int>(std::lround(std::sqrt(lawlor_samples / 2.0))));
      int nd = (lawlor_samples + nt - 1) / nt;
      std::vector<double> ts;
      for (int i = 0; i < nt; ++i)
        ts.push_back(nt == 1 ? 0.0
                             : -lawlor_tmax + 2.0 * lawlor_tmax * i / (nt - 1));
      std::vector<NeckSample> samples = lawlor_sample(params, ts, nd);
      samples.resize(std::min<std::size_t>(samples.size(),
                                           static_cast<std::size_t>(lawlor_samples)));
      std::ostream& os = sink.stream();
      if (c_lawlor.format == "csv") {
        const int n = params.n();
        os << "s";
        for (int j = 1; j <= n; ++j) os << ",dir" << j;
        for (int j = 1; j <= 2 * n; ++j) os << ",x" << j;
        os << ",omega_max,re_upsilon,im_upsilon_gap\n";
        char buf[64];
        for (const NeckSample& s : samples) {
          SlagDefect d = slag_defect(s);
          auto put = [&](double v) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
          };
          std::snprintf(buf, sizeof(buf), "%.17g", s.t);
          os << buf;
          for (double v : s.dir) put(v);
          for (double v : s.point) put(v);
          put(d.omega_max);
          put(d.re_upsilon);
          put(d.im_upsilon_gap);
          os << "\n";
        }
      } else {
        json out_json;
        out_json["a"] = params.a;
        json arr = json::array();
        for (const NeckSample& s : samples) {
          SlagDefect d = slag_defect(s);
          arr.push_back({{"s", s.t},
                         {"dir", s.dir},
                         {"point", s.point},
                         {"omega_max", d.omega_max},
                         {"re_upsilon", d.re_upsilon},
                         {"im_upsilon_gap", d.im_upsilon_gap}});
        }
        out_json["samples"] = arr;
        os << out_json.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_surface->parsed()) {
      Sink sink(c_surface, out);
      SurfacePatch patch;
      if (surface_preset == "helicoid") patch = preset_helicoid();
      else if (surface_preset == "catenoid") patch = preset_catenoid();
      else if (surface_preset == "sphere") patch = preset_sphere();
      else if (surface_preset.rfind("graph:", 0) == 0)
        patch = preset_graph(surface_preset.substr(6));
      else
        throw Error("UnknownPreset", "unknown surface preset " + surface_preset);
      if (surface_op == "mean-curvature") {
        std::vector<double> at = parse_list(surface_at);
        if (at.size() != 2)
          throw Error("UsageValue", "--at expects u,v");
        Vec h = mean_curvature(patch, at[0], at[1]);
        emit_json_or_kv(json{{"H", h}, {"norm", norm(h)}}, c_surface, sink.stream());
      } else {
        double a = area(patch, surface_grid, surface_grid);
        emit_json_or_kv(json{{"area", a}}, c_surface, sink.stream());
      }
      return 0;
    }

    if (cmd_pde->parsed()) {
      Sink sink(c_pde, out);
      Equation eq = pde_eq == "minimal" ? Equation::minimal
                    : pde_eq == "slag2" ? Equation::slag2
                                        : Equation::slag3;
      int d = (eq == Equation::slag3) ? 3 : 2;
      GridField boundary = boundary_grid(pde_boundary, pde_grid, d);
      SolveReport rep = (pde_method == "newton") ? solve_newton(eq, boundary)
                                                 : solve_picard(eq, boundary);
      write_grid(rep.solution, sink.stream());
      err << json{{"iterations", rep.iterations},
                  {"residual_norm", rep.residual_norm},
                  {"method", pde_method}}
                 .dump()
          << "\n";
      return 0;
    }

    if (cmd_identities->parsed()) {
      Sink sink(c_identities, out);
      std::vector<IdentityResult> rs = run_identities();
      bool all = true;
      std::ostream& os = sink.stream();
      if (c_identities.format == "json") {
        json arr = json::array();
        for (const auto& r : rs) {
          arr.push_back({{"name", r.name}, {"max_error", r.error}, {"pass", r.pass}});
          all = all && r.pass;
        }
        os << json{{"identities", arr}, {"all_pass", all}}.dump(2) << "\n";
      } else {
        char buf[64];
        for (const auto& r : rs) {
          std::snprintf(buf, sizeof(buf), "%.3e", r.error);
          os << (r.pass ? "PASS" : "FAIL") << "," << r.name << "," << buf << "\n";
          all = all && r.pass;
        }
      }
      return all ? 0 : 1;
    }
  } catch (const SolveFailure& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no subcommand\n";
  return 2;
}

}  // namespace calibra::cli
