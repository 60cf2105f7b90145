// Command-line front end: verification runs, classification, focal reports
// and streamline traces over spec files, with deterministic CSV/JSON output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "congflow/errors.hpp"
#include "congflow/euler_verify.hpp"
#include "congflow/obstruction.hpp"
#include "congflow/parallel.hpp"
#include "congflow/spec_io.hpp"
#include "congflow/text_format.hpp"

namespace {

using namespace congflow;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitToleranceFail = 1;
constexpr int kExitSpecError = 2;
constexpr int kExitSingularity = 3;

std::vector<double> linspace(double lo, double hi, int n) {
  if (n == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string piece = text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw SpecError(what + ": cannot parse \"" + piece + "\"");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

void emit(const std::string& text, const std::optional<std::string>& out_path) {
  if (out_path.has_value()) {
    write_file_atomic(*out_path, text);
  } else {
    std::fwrite(text.data(), 1, text.size(), stdout);
  }
}

struct CommonOptions {
  std::string spec_path;
  std::optional<std::string> out_path;
  double tol = 1e-5;
  double fd_step = 1e-5;
  std::optional<std::string> grid;
  std::optional<std::string> times;
};

int run_verify(const CommonOptions& opt) {
  SpecDocument doc = load_spec_document(opt.spec_path);
  if (!doc.sampling.has_value()) throw SpecError("verify requires a sampling section");
  FlowField flow = build_flow(doc);
  SamplingSpec sampling = *doc.sampling;
  if (opt.grid.has_value()) {
    const auto g = parse_number_list(*opt.grid, "--grid");
    if (g.size() != 3) throw SpecError("--grid: expected nx,ny,nz");
    for (int a = 0; a < 3; ++a) {
      sampling.grid[a] = static_cast<int>(g[a]);
      if (sampling.grid[a] < 1) throw SpecError("--grid: counts must be positive");
    }
  }
  if (opt.times.has_value()) {
    sampling.times = parse_number_list(*opt.times, "--time");
    if (sampling.times.empty()) throw SpecError("--time: needs at least one value");
  }
  FDConfig cfg;
  cfg.step = opt.fd_step;
  cfg.validate();

  const auto xs = linspace(sampling.box[0][0], sampling.box[0][1], sampling.grid[0]);
  const auto ys = linspace(sampling.box[1][0], sampling.box[1][1], sampling.grid[1]);
  const auto zs = linspace(sampling.box[2][0], sampling.box[2][1], sampling.grid[2]);
  const auto& ts = sampling.times;

  struct Row {
    Point3 p;
    double t = 0.0;
    Vec3 res;
    double div = 0.0;
  };
  const std::size_t total = ts.size() * zs.size() * ys.size() * xs.size();
  std::vector<Row> rows(total);
  parallel_for(total, [&](std::size_t idx) {
    std::size_t rest = idx;
    const std::size_t ix = rest % xs.size();
    rest /= xs.size();
    const std::size_t iy = rest % ys.size();
    rest /= ys.size();
    const std::size_t iz = rest % zs.size();
    rest /= zs.size();
    const std::size_t it = rest;
    Row r;
    r.p = Point3{xs[ix], ys[iy], zs[iz]};
    r.t = ts[it];
    r.res = euler_residual(flow, r.p, r.t, cfg);
    r.div = euclidean_divergence(flow, r.p, r.t, cfg);
    rows[idx] = r;
  });

  double sup_momentum = 0.0, sup_divergence = 0.0;
  CsvWriter csv({"x1", "x2", "x3", "t", "res_x1", "res_x2", "res_x3", "res_norm", "divergence"});
  for (const Row& r : rows) {
    const double nrm = r.res.norm();
    sup_momentum = std::max(sup_momentum, nrm);
    sup_divergence = std::max(sup_divergence, std::abs(r.div));
    csv.add_row({format_double(r.p.x1), format_double(r.p.x2), format_double(r.p.x3),
                 format_double(r.t), format_double(r.res.x1), format_double(r.res.x2),
                 format_double(r.res.x3), format_double(nrm), format_double(r.div)});
  }

  const bool pass = sup_momentum < opt.tol && sup_divergence < opt.tol;
  ordered_json summary;
  summary["sup_momentum"] = sup_momentum;
  summary["sup_divergence"] = sup_divergence;
  summary["samples"] = total;
  summary["pass"] = pass;

  if (opt.out_path.has_value()) write_file_atomic(*opt.out_path, csv.str());
  std::cout << summary.dump() << "\n";
  return pass ? kExitPass : kExitToleranceFail;
}

ordered_json vec3_json(const Vec3& v) { return ordered_json::array({v.x1, v.x2, v.x3}); }

int run_classify(const CommonOptions& opt) {
  SpecDocument doc = load_spec_document(opt.spec_path);
  const ClassificationVerdict v = classify(doc.congruence);

  ordered_json out;
  out["verdict"] = to_string(v.kind);
  switch (v.kind) {
    case ClassificationVerdict::Kind::sphere:
      out["center"] = vec3_json(v.center);
      break;
    case ClassificationVerdict::Kind::cylinder:
      out["axis"] = {{"point", vec3_json(v.axis_point)},
                     {"direction", vec3_json(v.axis_direction)}};
      break;
    case ClassificationVerdict::Kind::plane:
      out["normal"] = vec3_json(v.normal);
      break;
    default:
      out["reason"] = v.reason;
      break;
  }
  ordered_json diags = ordered_json::array();
  for (const auto& [condition, sup] : v.diagnostics) {
    diags.push_back({{"condition", condition}, {"sup", sup}});
  }
  out["diagnostics"] = diags;
  if (!v.notes.empty()) out["notes"] = v.notes;

  emit(out.dump() + "\n", opt.out_path);
  const bool positive = v.kind == ClassificationVerdict::Kind::sphere ||
                        v.kind == ClassificationVerdict::Kind::cylinder ||
                        v.kind == ClassificationVerdict::Kind::plane;
  return positive ? kExitPass : kExitToleranceFail;
}

int run_focal(const CommonOptions& opt) {
  SpecDocument doc = load_spec_document(opt.spec_path);
  const CongruenceSpec& spec = doc.congruence;

  std::string body;
  if (spec.rank() == 2) {
    const SpinField spin(spec.F());
    CsvWriter csv({"xi_re", "xi_im", "r1", "r2"});
    for (const Complex xi : default_disk_samples()) {
      const auto roots = focal_points(spin.at(xi));
      if (roots.empty()) {
        csv.add_row({format_double(xi.real()), format_double(xi.imag()), "", ""});
      } else {
        csv.add_row({format_double(xi.real()), format_double(xi.imag()), format_double(roots[0]),
                     format_double(roots[1])});
      }
    }
    body = csv.str();
  } else if (spec.rank() == 1) {
    const BetaField bf(spec.xi_curve(), spec.eta_sheet());
    CsvWriter csv({"u", "v", "r1"});
    for (const auto& [u, v] : default_uv_samples()) {
      std::string field;
      try {
        field = format_double(-bf.at(u, v));
      } catch (const DegenerateParameterization&) {
        field.clear();
      }
      csv.add_row({format_double(u), format_double(v), field});
    }
    body = csv.str();
  } else {
    // parallel lines never focus
    CsvWriter csv({"u", "v", "r1"});
    for (const auto& [u, v] : default_uv_samples()) {
      csv.add_row({format_double(u), format_double(v), ""});
    }
    body = csv.str();
  }
  emit(body, opt.out_path);
  return kExitPass;
}

int run_trace(const CommonOptions& opt, const std::string& seed_text, double length, int steps) {
  SpecDocument doc = load_spec_document(opt.spec_path);
  FlowField flow = build_velocity_flow(doc);
  const auto seed = parse_number_list(seed_text, "--seed");
  if (seed.size() != 3) throw SpecError("--seed: expected x1,x2,x3");
  double t = 0.0;
  if (opt.times.has_value()) {
    const auto ts = parse_number_list(*opt.times, "--time");
    if (ts.size() != 1) throw SpecError("--time: trace uses a single frozen time");
    t = ts[0];
  } else if (doc.sampling.has_value() && !doc.sampling->times.empty()) {
    t = doc.sampling->times.front();
  }

  const Point3 start{seed[0], seed[1], seed[2]};
  if (flow.singularity_clearance(start) < 1e-9) {
    throw SingularityTooClose("trace seed lies on a flow singularity");
  }
  const auto line = trace_streamline(flow, start, t, length, steps);

  CsvWriter csv({"s", "x1", "x2", "x3"});
  const double h = line.size() > 1 ? length / (double(line.size()) - 1.0) : 0.0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    csv.add_row({format_double(h * double(i)), format_double(line[i].x1),
                 format_double(line[i].x2), format_double(line[i].x3)});
  }
  emit(csv.str(), opt.out_path);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-congruence flow toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string seed_text;
  double trace_length = 1.0;
  int trace_steps = 256;

  auto add_common = [&](CLI::App* cmd, bool with_tolerances) {
    cmd->add_option("--spec", opt.spec_path, "spec file (JSON)")->required();
    cmd->add_option("--out", opt.out_path, "output file (written atomically)");
    if (with_tolerances) {
      cmd->add_option("--tol", opt.tol, "pass tolerance for residual sup norms");
      cmd->add_option("--fd-step", opt.fd_step, "finite-difference step");
      cmd->add_option("--grid", opt.grid, "sample grid override nx,ny,nz");
    }
    cmd->add_option("--time", opt.times, "time samples t0,t1,...");
  };

  CLI::App* verify = app.add_subcommand("verify", "Euler residual sweep over a sample box");
  add_common(verify, true);
  CLI::App* classify_cmd = app.add_subcommand("classify", "sphere/cylinder/plane classification");
  add_common(classify_cmd, false);
  CLI::App* focal = app.add_subcommand("focal", "focal radii over the parameter grid");
  add_common(focal, false);
  CLI::App* trace = app.add_subcommand("trace", "streamline trace from a seed point");
  add_common(trace, false);
  trace->add_option("--seed", seed_text, "seed point x1,x2,x3")->required();
  trace->add_option("--length", trace_length, "arclength to trace")->required();
  trace->add_option("--steps", trace_steps, "integration steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitSpecError;
  }

  try {
    if (verify->parsed()) return run_verify(opt);
    if (classify_cmd->parsed()) return run_classify(opt);
    if (focal->parsed()) return run_focal(opt);
    if (trace->parsed()) return run_trace(opt, seed_text, trace_length, trace_steps);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecError;
  } catch (const SingularityTooClose& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingularity;
  } catch (const FocalSingularity& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingularity;
  } catch (const SourceSingularity& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingularity;
  } catch (const CaseMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingularity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
  return kExitSpecError;
}
