#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "platehom/cli.hpp"
#include "platehom/green_operator.hpp"
#include "platehom/homogenize.hpp"
#include "platehom/spectral_field.hpp"

namespace platehom::cli {

namespace {

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

template <typename Vec>
std::string join(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += num(v(i));
  }
  return out;
}

std::string matrix_lines(const MandelMatrix& c) {
  std::string out;
  for (Eigen::Index r = 0; r < c.rows(); ++r) out += join(c.row(r).transpose()) + '\n';
  return out;
}

// Outputs are assembled in memory and written only after every input has
// been validated and the computation is done.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, std::string content) {
    texts_.emplace_back(name, std::move(content));
  }
  void field(const std::string& name, TensorField f) {
    fields_.emplace_back(name, std::move(f));
  }

  void write() const {
    std::filesystem::create_directories(dir_);
    for (const auto& [name, content] : texts_) {
      std::ofstream out(dir_ / name);
      if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
      out << content;
    }
    for (const auto& [name, f] : fields_) save_field(f, dir_ / name);
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> texts_;
  std::vector<std::pair<std::string, TensorField>> fields_;
};

std::string history_csv(const ConvergenceHistory& history) {
  std::string out = "# plate-history v1\niter,residual,delta,energy\n";
  for (const IterationRecord& r : history) {
    out += std::to_string(r.iteration) + ',' + num(r.residual) + ',' + num(r.delta) +
           ',' + num(r.energy) + '\n';
  }
  return out;
}

std::string reference_lines(const ReferenceMedium& ref) {
  return "reference " + to_string(ref.strategy) + "\nlambda0 " + num(ref.lambda0) +
         "\nmu_min " + num(ref.mu_min) + "\nmu_max " + num(ref.mu_max) + '\n';
}

std::string apriori_lines(const AprioriBound& bound) {
  std::string out = "apriori_contrast " + num(bound.contrast) + '\n';
  if (bound.series_factor) {
    out += "apriori_series_factor " + num(*bound.series_factor) + '\n';
  } else {
    out += "apriori_series_factor none (contrast >= 1: series bound diverges)\n";
  }
  return out;
}

std::string grid_lines(const CoefficientField& field) {
  return "dimension " + std::to_string(field.dim()) + "\nresolution " +
         std::to_string(field.resolution()) + '\n';
}

std::optional<double> scalar_value(const StiffTensor4& c) {
  const double v = c.mandel()(0, 0);
  if (c == StiffTensor4::scalar(c.dim(), v)) return v;
  return std::nullopt;
}

ReferenceMedium reference_for(const RunConfig& cfg, const CoefficientField& field) {
  try {
    return select_reference(field, cfg.strategy, cfg.lambda0);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const CoefficientField field = make_microstructure(cfg);
  const ReferenceMedium ref = reference_for(cfg, field);
  if (cfg.macro_curvature.dim() != field.dim()) {
    throw ConfigError("E0 dimension differs from the microstructure dimension");
  }
  const AprioriBound bound = apriori_bound(field, ref);
  const CellSolution sol = solve_cell(field, ref, cfg.solver_config());

  std::string report = "# plate-report v1 solve\n" + grid_lines(field) +
                       reference_lines(ref) + apriori_lines(bound);
  report += "E0 " + join(cfg.macro_curvature.mandel()) + '\n';
  report += "converged " + std::string(sol.converged ? "yes" : "no") + '\n';
  report += "iterations " + std::to_string(sol.iterations) + '\n';
  report += "final_residual " + num(sol.final_residual) + '\n';
  report += "mean_E " + join(sol.curvature.mean()) + '\n';
  report += "mean_J " + join(sol.moment.mean()) + '\n';
  report += "energy " + num(l2_inner(sol.curvature, sol.moment)) + '\n';

  Artifacts artifacts(cfg.output_dir);
  artifacts.field("solution_E.field", sol.curvature);
  artifacts.field("moment_J.field", sol.moment);
  artifacts.text("history.csv", history_csv(sol.history));
  artifacts.text("report.txt", report);
  artifacts.write();

  out << report;
  return sol.converged ? kExitSuccess : kExitNotConverged;
}

int cmd_homogenize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CoefficientField field = make_microstructure(cfg);
  const ReferenceMedium ref = reference_for(cfg, field);
  BoundsReport bounds = voigt_reuss_bounds(field);

  std::string report = "# plate-report v1 homogenize\n" + grid_lines(field) +
                       reference_lines(ref) + apriori_lines(apriori_bound(field, ref));
  Artifacts artifacts(cfg.output_dir);

  EffectiveTensor eff;
  try {
    eff = effective_tensor(field, ref, cfg.solver_config());
  } catch (const NonConvergenceError& e) {
    report += "converged no\nfailed_load_case " + std::to_string(e.load_case()) + '\n';
    artifacts.text("history_case" + std::to_string(e.load_case()) + ".csv",
                   history_csv(e.history()));
    artifacts.text("report.txt", report);
    artifacts.write();
    out << report;
    err << "platehom: " << e.what() << '\n';
    return kExitNotConverged;
  }
  bracket(bounds, eff.c_hom);

  report += "converged yes\n";
  for (std::size_t k = 0; k < eff.load_cases.size(); ++k) {
    const LoadCaseInfo& info = eff.load_cases[k];
    report += "load_case " + std::to_string(k) + " iterations " +
              std::to_string(info.iterations) + " residual " +
              num(info.final_residual) + '\n';
    artifacts.text("history_case" + std::to_string(k) + ".csv", history_csv(info.history));
  }
  report += "asymmetry " + num(eff.asymmetry) + '\n';

  if (cfg.generator) {
    const GeneratorSpec& g = *cfg.generator;
    const auto a = scalar_value(g.phase_a);
    const auto b = scalar_value(g.phase_b);
    const MandelMatrix& c = eff.c_hom.mandel();
    if (g.kind == "laminate" && a && b) {
      const LaminateValues lam = analytic_laminate(*a, *b, g.fraction);
      const int across = g.axis;
      const int along = g.axis == 0 ? 1 : 0;
      const double c_across = c(across, across);
      const double c_along = c(along, along);
      report += "laminate_across computed " + num(c_across) + " analytic " +
                num(lam.across) + " relative_difference " +
                num(std::abs(c_across - lam.across) / lam.across) + '\n';
      report += "laminate_along computed " + num(c_along) + " analytic " +
                num(lam.along) + " relative_difference " +
                num(std::abs(c_along - lam.along) / lam.along) + '\n';
    }
    if (g.kind == "chessboard" && a && b) {
      const double reference = analytic_chessboard(*a, *b);
      report += "chessboard computed " + num(c(0, 0)) + " second_order_value " +
                num(reference) + " difference " + num(c(0, 0) - reference) + '\n';
    }
  }

  std::string chom = "# plate-chom v1 d " + std::to_string(field.dim()) + " m " +
                     std::to_string(mandel_size(field.dim())) + '\n' +
                     matrix_lines(eff.c_hom.mandel());

  const auto order_line = [](const std::string& name, const OrderCheck& check) {
    std::string line = name + (check.holds ? " holds" : " violated") + " slack";
    for (double s : check.slack) line += ' ' + num(s);
    return line + '\n';
  };
  std::string bounds_txt = "# plate-bounds v1\nvoigt\n" + matrix_lines(bounds.voigt.mandel()) +
                           "reuss\n" + matrix_lines(bounds.reuss.mandel());
  bounds_txt += order_line("reuss_le_voigt", bounds.reuss_below_voigt);
  bounds_txt += order_line("reuss_le_chom", *bounds.reuss_below_effective);
  bounds_txt += order_line("chom_le_voigt", *bounds.effective_below_voigt);
  bounds_txt += std::string("verdict ") + (bounds.brackets() ? "bracketed" : "violated") + '\n';

  artifacts.text("c_hom.txt", chom);
  artifacts.text("bounds.txt", bounds_txt);
  artifacts.text("report.txt", report);
  artifacts.write();

  out << report << chom;
  return kExitSuccess;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const CoefficientField field = make_microstructure(cfg);
  const ReferenceMedium chosen = reference_for(cfg, field);
  const ReferenceMedium arithmetic =
      select_reference(field, ReferenceStrategy::arithmetic, std::nullopt);

  std::string text = "# plate-spectrum v1\n" + grid_lines(field);
  const auto section = [&](const ReferenceMedium& ref, bool with_bound) {
    text += "reference " + to_string(ref.strategy) + " lambda0 " + num(ref.lambda0) + '\n';
    if (with_bound) {
      text += "bound " + num(spectral_bound(ref.mu_min, ref.mu_max)) + '\n';
    } else {
      text += "bound none (the analytic bound holds for the arithmetic reference only)\n";
    }
    text += "estimate " + to_string(ref.strategy) + ' ' +
            num(estimate_spectral_radius(field, ref, cfg.power_iterations, cfg.seed)) + '\n';
    const AprioriBound ab = apriori_bound(field, ref);
    text += "series_factor ";
    text += ab.series_factor ? num(*ab.series_factor)
                             : std::string("none (contrast >= 1)");
    text += '\n';
  };
  section(arithmetic, true);
  if (chosen.strategy != ReferenceStrategy::arithmetic) section(chosen, false);

  Artifacts artifacts(cfg.output_dir);
  artifacts.text("spectrum.txt", text);
  artifacts.write();
  out << text;
  return kExitSuccess;
}

int cmd_green(const RunConfig& cfg, std::ostream& out) {
  const double value = green_evaluate(cfg.point, cfg.cutoff);
  std::string text = "# plate-green v1\ny";
  for (double y : cfg.point) text += ' ' + num(y);
  text += "\ncutoff " + std::to_string(cfg.cutoff) + "\nvalue " + num(value) + '\n';

  Artifacts artifacts(cfg.output_dir);
  artifacts.text("green.txt", text);
  artifacts.write();
  out << text;
  return kExitSuccess;
}

int cmd_decompose(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.field_file) throw ConfigError("decompose needs field=<path>");
  if (!std::filesystem::is_regular_file(*cfg.field_file)) {
    throw ConfigError("field file '" + cfg.field_file->string() + "' not found");
  }
  const TensorField input = load_field(*cfg.field_file);
  if (input.m != mandel_size(input.dim)) {
    throw ConfigError("field must carry " + std::to_string(mandel_size(input.dim)) +
                      " Mandel components per voxel");
  }
  const FourierTransform fft(input.dim, input.n);
  const SpectralField hat = fft.forward(input);
  const WeylParts parts = weyl_decompose(hat);

  const double norm2 = l2_inner(hat, hat);
  const auto relative = [&](const SpectralField& a, const SpectralField& b) {
    return norm2 > 0.0 ? l2_inner(a, b) / norm2 : 0.0;
  };
  const SpectralField sum = parts.potential + parts.solenoidal + parts.mean;
  const SpectralField gap = sum - hat;

  std::string text = "# plate-weyl v1\nnorm_input " + num(std::sqrt(norm2)) + '\n';
  text += "norm_potential " + num(l2_norm(parts.potential)) + '\n';
  text += "norm_solenoidal " + num(l2_norm(parts.solenoidal)) + '\n';
  text += "norm_mean " + num(l2_norm(parts.mean)) + '\n';
  text += "inner potential solenoidal " + num(relative(parts.potential, parts.solenoidal)) + '\n';
  text += "inner potential mean " + num(relative(parts.potential, parts.mean)) + '\n';
  text += "inner solenoidal mean " + num(relative(parts.solenoidal, parts.mean)) + '\n';
  text += "reconstruction_error " +
          num(norm2 > 0.0 ? l2_norm(gap) / std::sqrt(norm2) : l2_norm(gap)) + '\n';

  Artifacts artifacts(cfg.output_dir);
  artifacts.field("weyl_potential.field", fft.inverse(parts.potential));
  artifacts.field("weyl_solenoidal.field", fft.inverse(parts.solenoidal));
  artifacts.field("weyl_mean.field", fft.inverse(parts.mean));
  artifacts.text("inner_products.txt", text);
  artifacts.write();
  out << text;
  return kExitSuccess;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const CoefficientField field = make_microstructure(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = cfg.output_dir / "microstructure.txt";
  save_microstructure(field, path);
  out << "wrote " << path.string() << '\n';
  return kExitSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral homogenization of periodic plates", "platehom"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "solve one cell problem for the configured E0"},
      {"homogenize", "compute the effective tensor and Voigt/Reuss bounds"},
      {"spectrum", "report the contraction bound and a power-iteration estimate"},
      {"green", "evaluate the truncated periodic biharmonic Green function"},
      {"decompose", "split a tensor field into potential, solenoidal and mean parts"},
      {"generate", "write a generated microstructure file"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", sets, "override a configuration key (key=value)");
    sub->add_option("--seed", seed, "random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    KeyValues values;
    if (!config_path.empty()) values = read_key_values(config_path);
    for (const std::string& s : sets) apply_override(values, s);
    if (!out_dir.empty()) values["out"] = out_dir;
    if (seed) values["seed"] = std::to_string(*seed);
    const RunConfig cfg = build_config(values);

    if (command == "solve") return cmd_solve(cfg, out);
    if (command == "homogenize") return cmd_homogenize(cfg, out, err);
    if (command == "spectrum") return cmd_spectrum(cfg, out);
    if (command == "green") return cmd_green(cfg, out);
    if (command == "decompose") return cmd_decompose(cfg, out);
    return cmd_generate(cfg, out);
  } catch (const std::exception& e) {
    err << "platehom: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace platehom::cli
