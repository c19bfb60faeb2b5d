#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "nlslab/cli.hpp"
#include "nlslab/diagnostics.hpp"
#include "nlslab/error.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/hypotheses.hpp"
#include "nlslab/presets.hpp"
#include "nlslab/radial.hpp"

namespace nlslab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string output_path(const Options& o, const std::string& fallback) {
  if (!o.out.empty()) return o.out;
  return (fs::path(o.out_dir) / fallback).string();
}

std::string manifest_path(const Options& o) { return (fs::path(o.out_dir) / "manifest.json").string(); }

void write_manifest(const Options& o, const SystemSpec& spec, const std::optional<GridSpec>& grid,
                    const std::vector<std::string>& outputs, const json& notes) {
  write_file_atomic(manifest_path(o), make_manifest(o, spec, grid, outputs, notes).dump(2) + "\n");
}

SystemSpec load(const Options& o) {
  if (o.spec_source.empty()) throw UsageError("--spec is required");
  return load_spec(o.spec_source, o.dim);
}

GridSpec grid_for(const Options& o, const SystemSpec& spec) {
  GridSpec g;
  g.dim = spec.dim;
  if (g.dim > 3) throw UsageError("Cartesian grids support dimensions 1 to 3; use --radial for n > 3");
  g.points = o.points > 0 ? o.points : (g.dim == 1 ? 1024 : g.dim == 2 ? 256 : 64);
  g.half_length = o.half_length > 0.0 ? o.half_length : (g.dim == 1 ? 20.0 : g.dim == 2 ? 12.0 : 10.0);
  g.validate();
  const double bytes = std::pow(static_cast<double>(g.points), g.dim) * spec.components * 16.0;
  if (bytes >= static_cast<double>(memory_cap_bytes())) {
    throw UsageError("grid needs " + std::to_string(static_cast<long long>(bytes / 1048576.0)) +
                     " MiB per state, above the memory cap (set NLSLAB_MEMORY_CAP_MB)");
  }
  return g;
}

SolverOptions solver_options(const Options& o) {
  SolverOptions s;
  s.tol = o.tol;
  s.max_iter = o.max_iter;
  s.damping = o.damping;
  return s;
}

EllipticParams elliptic_params(const Options& o, const SystemSpec& spec) {
  return make_elliptic_params(o.keep_beta ? spec : without_beta(spec), o.omega);
}

json functionals_json(const FunctionalValues& fv) {
  json j = {{"K", fv.K}, {"L", fv.L}, {"Qcal", fv.Qcal}, {"P", fv.P}, {"I", fv.I}, {"E", fv.E}};
  j["J"] = fv.J ? json(*fv.J) : json(nullptr);
  j["Q"] = fv.Q ? json(*fv.Q) : json(nullptr);
  return j;
}

json pohozaev_json(const PohozaevErrors& e) {
  return {{"applicable", e.applicable}, {"P_rel", e.P_rel}, {"K_rel", e.K_rel}, {"Qcal_rel", e.Q_rel},
          {"J_rel", e.J_rel}};
}

bool unit_problem(const Options& o, const SystemSpec& spec) {
  if (o.omega != 1.0) return false;
  if (!o.keep_beta) return true;
  return std::all_of(spec.beta.begin(), spec.beta.end(), [](double b) { return b == 0.0; });
}

std::string csv_row(std::initializer_list<std::optional<double>> values) {
  std::string line;
  bool first = true;
  for (const auto& v : values) {
    if (!first) line += ',';
    first = false;
    if (v) line += format_number(*v);
  }
  return line + "\n";
}

// Initial data for the time-dependent commands.
FieldState initial_data(const Options& o, const SystemSpec& spec, const GridSpec& grid) {
  if (o.init == "gaussian") {
    const double a = o.amplitude;
    const double w2 = o.width * o.width;
    const Field g = sample_field(grid, [&](const std::array<double, 3>& x) {
      return cplx(a * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / w2), 0.0);
    });
    FieldState u(grid, spec.components);
    for (auto& c : u.components) c = g;
    return u;
  }
  if (o.init == "ground-state") {
    const GroundStateResult gs = solve_ground_state(unit_elliptic_params(spec), grid, std::nullopt, solver_options(o));
    if (!gs.converged) throw NumericalError("ground state for the initial data did not converge: " + gs.message);
    FieldState u(grid, spec.components);
    for (int k = 0; k < spec.components; ++k) {
      const Field src = o.dilation == 1.0 ? gs.psi.components[k] : resample(gs.psi.components[k], grid, grid, o.dilation);
      for (std::size_t i = 0; i < src.size(); ++i) u.components[k][i] = o.amplitude * src[i];
    }
    return u;
  }
  if (o.init.rfind("file:", 0) == 0) {
    FieldState u = read_field(o.init.substr(5));
    if (!(u.grid == grid)) throw SpecError("field file grid differs from the requested grid");
    if (u.count() != spec.components) throw SpecError("field file component count differs from the system");
    return u;
  }
  throw UsageError("unknown --init '" + o.init + "' (gaussian, ground-state or file:PATH)");
}

EvolveConfig evolve_config(const Options& o) {
  if (!o.t_end) throw UsageError("--t-end is required");
  EvolveConfig cfg;
  cfg.dt = o.dt;
  cfg.t_end = *o.t_end;
  cfg.dt_min = o.dt_min;
  cfg.adaptive = o.adaptive;
  cfg.snapshot_stride = o.snapshot_stride;
  cfg.blowup_factor = o.blowup_factor;
  cfg.resolution_tol = o.resolution_tol;
  return cfg;
}

CommandResult run_validate(const Options& o) {
  const SystemSpec spec = load(o);
  const HypothesisReport report = validate_hypotheses(spec, o.seed);
  json j = to_json(report);
  j["system"] = {{"name", spec.name}, {"components", spec.components}, {"p", spec.p}, {"dimension", spec.dim}};
  const std::string path = output_path(o, "validation.json");
  write_file_atomic(path, j.dump(2) + "\n");
  write_manifest(o, spec, std::nullopt, {path}, json::object());

  std::ostringstream s;
  for (const auto& e : report.entries) s << e.id << ": " << to_string(e.status) << " (" << e.method << ")\n";
  s << "mass_resonant=" << (report.mass_resonant ? "true" : "false") << "\n";
  CommandResult r;
  r.summary = s.str();
  if (!report.passed()) {
    r.exit_code = kValidationFailure;
    r.error = "hypothesis check failed for '" + o.spec_source + "'";
  }
  return r;
}

CommandResult run_ground_state(const Options& o) {
  const SystemSpec spec = load(o);
  const EllipticParams params = elliptic_params(o, spec);
  json j;
  std::vector<std::string> outputs;
  std::optional<GridSpec> grid;
  bool converged = false;
  std::string message;
  std::ostringstream s;

  if (o.radial || spec.dim > 3) {
    RadialGrid rg{spec.dim, o.radial_points, o.radial_radius};
    const RadialGroundState gs = solve_radial_ground_state(params, rg, solver_options(o));
    converged = gs.converged;
    message = gs.message;
    j["solver"] = "radial";
    j["radial_grid"] = {{"points", rg.points}, {"radius", rg.radius}};
    j["functionals"] = functionals_json(gs.functionals);
    j["pohozaev"] = pohozaev_json(verify_pohozaev(gs.functionals, spec.dim, spec.p));
    j["residual"] = gs.residual;
    j["iterations"] = gs.iterations;
    j["damping"] = gs.damping;
    j["stabilizer"] = gs.stabilizer;
    if (unit_problem(o, spec) && gs.converged) {
      const ThresholdRelations rel = threshold_relations(summarize(gs));
      j["threshold_relations"] = {{"K", rel.K_relation}, {"energy", rel.energy_relation}};
    }
    j["C_opt"] = optimal_gn_constant(spec.dim, spec.p, gs.functionals.Qcal);
    s << "residual=" << gs.residual << " iterations=" << gs.iterations << "\n";
  } else {
    grid = grid_for(o, spec);
    const GroundStateResult gs = solve_ground_state(params, *grid, std::nullopt, solver_options(o));
    converged = gs.converged;
    message = gs.message;
    j["solver"] = "petviashvili";
    j["functionals"] = functionals_json(gs.functionals);
    j["pohozaev"] = pohozaev_json(verify_pohozaev(gs));
    j["residual"] = gs.residual;
    j["iterations"] = gs.iterations;
    j["damping"] = gs.damping;
    j["stabilizer"] = gs.stabilizer;
    j["C_opt"] = optimal_gn_constant(gs);
    double min_value = 0.0;
    for (const auto& c : gs.psi.components) {
      for (const auto& v : c) min_value = std::min(min_value, v.real());
    }
    j["min_value"] = min_value;
    j["boundary_mass_fraction"] = boundary_mass_fraction(gs.psi);
    if (unit_problem(o, spec) && gs.converged) {
      const ThresholdRelations rel = threshold_relations(summarize(gs));
      j["threshold_relations"] = {{"K", rel.K_relation}, {"energy", rel.energy_relation}};
    }
    const std::string field_path =
        o.fields_out.empty() ? (fs::path(o.out_dir) / "psi.nlsfld").string() : o.fields_out;
    if (gs.psi.all_finite()) {
      write_field(field_path, gs.psi);
      outputs.push_back(field_path);
    }
    s << "residual=" << gs.residual << " iterations=" << gs.iterations << "\n";
  }
  j["omega"] = params.omega;
  j["b"] = params.b;
  j["converged"] = converged;
  j["message"] = message;
  const std::string path = output_path(o, "ground_state.json");
  write_file_atomic(path, j.dump(2) + "\n");
  outputs.insert(outputs.begin(), path);
  write_manifest(o, spec, grid, outputs, json::object());

  s << "converged=" << (converged ? "true" : "false") << " I=" << j["functionals"]["I"].get<double>()
    << " J=" << j["functionals"]["J"].dump() << "\n";
  CommandResult r;
  r.summary = s.str();
  if (!converged) {
    r.exit_code = kNumericalFailure;
    r.error = "ground-state iteration did not converge: " + message;
  }
  return r;
}

CommandResult run_evolve(const Options& o) {
  const SystemSpec spec = load(o);
  const GridSpec grid = grid_for(o, spec);
  const EvolveConfig cfg = evolve_config(o);
  const FieldState u0 = initial_data(o, spec, grid);

  std::vector<std::string> outputs;
  int snapshot = 0;
  SnapshotCallback callback;
  if (!o.fields_out.empty()) {
    fs::create_directories(o.fields_out);
    callback = [&](const FieldState& u, const DiagnosticsRecord&) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%06d.nlsfld", snapshot++);
      write_field((fs::path(o.fields_out) / name).string(), u);
    };
  }
  const EvolveOutcome outcome = evolve(u0, spec, cfg, callback);

  std::string csv = "t,Q,E,K,L,P,V,Vdot,Vddot_formula,Vddot_fd,sup_norm\n";
  for (const auto& r : outcome.series) {
    csv += csv_row({r.t, r.Q, r.E, r.K, r.L, r.P, r.V, r.Vdot, r.Vddot_formula, r.Vddot_fd, r.sup_norm});
  }
  const std::string path = output_path(o, "series.csv");
  write_file_atomic(path, csv);
  outputs.insert(outputs.begin(), path);
  if (!o.fields_out.empty()) outputs.push_back(o.fields_out);

  json notes = {{"status", to_string(outcome.status)},
                {"event_time", outcome.event_time},
                {"reason", outcome.reason},
                {"steps", outcome.steps},
                {"warnings", outcome.warnings}};
  if (outcome.status == EvolveStatus::BlowUpDetected) {
    notes["caveat"] = "blow-up detection is numerical evidence, not proof";
  }
  write_manifest(o, spec, grid, outputs, notes);

  std::ostringstream s;
  s << "status=" << to_string(outcome.status) << " t=" << outcome.event_time << " steps=" << outcome.steps << "\n";
  if (!outcome.reason.empty()) s << "reason: " << outcome.reason << "\n";
  for (const auto& w : outcome.warnings) s << "warning: " << w << "\n";
  CommandResult r;
  r.summary = s.str();
  if (outcome.status == EvolveStatus::Invalid) {
    r.exit_code = kNumericalFailure;
    r.error = "evolution produced non-finite values: " + outcome.reason;
  }
  return r;
}

VarianceAssumption parse_assumption(const std::string& text) {
  if (text == "finite-variance") return VarianceAssumption::FiniteVariance;
  if (text == "radial") return VarianceAssumption::Radial;
  throw UsageError("--assume must be radial or finite-variance");
}

CommandResult run_classify(const Options& o) {
  const SystemSpec spec = load(o);
  const VarianceAssumption assumption = parse_assumption(o.assume);
  const bool resonant = check_mass_resonance(spec);
  const EllipticParams params = unit_elliptic_params(spec);
  std::optional<GridSpec> grid;
  Verdict verdict;
  json data;

  const bool file_data = o.init.rfind("file:", 0) == 0;
  if (o.radial || spec.dim > 3 || (spec.dim == 3 && !file_data)) {
    if (o.init != "ground-state" && o.init != "gaussian") {
      throw UsageError("radial classification takes --init ground-state or gaussian");
    }
    RadialGrid rg{spec.dim, o.radial_points, o.radial_radius};
    const RadialGroundState gs = solve_radial_ground_state(params, rg, solver_options(o));
    if (!gs.converged) throw NumericalError("ground state did not converge: " + gs.message);
    RadialField u0;
    if (o.init == "ground-state") {
      u0 = scaled_profile(gs.psi, o.amplitude, o.dilation);
    } else {
      u0.grid = rg;
      u0.components.assign(spec.components, std::vector<double>(rg.points));
      for (int i = 0; i < rg.points; ++i) {
        const double r = rg.r(i);
        for (auto& c : u0.components) c[i] = o.amplitude * std::exp(-r * r / (o.width * o.width));
      }
    }
    verdict = classify(initial_quantities(u0, spec), spec, summarize(gs), resonant, assumption);
  } else {
    grid = grid_for(o, spec);
    const GroundStateResult gs = solve_ground_state(params, *grid, std::nullopt, solver_options(o));
    if (!gs.converged) throw NumericalError("ground state did not converge: " + gs.message);
    FieldState u0(*grid, spec.components);
    if (o.init == "ground-state") {
      for (int k = 0; k < spec.components; ++k) {
        const Field src =
            o.dilation == 1.0 ? gs.psi.components[k] : resample(gs.psi.components[k], *grid, *grid, o.dilation);
        for (std::size_t i = 0; i < src.size(); ++i) u0.components[k][i] = o.amplitude * src[i];
      }
    } else {
      u0 = initial_data(o, spec, *grid);
    }
    verdict = classify(u0, spec, gs, assumption);
  }

  json j = to_json(verdict);
  j["data"] = {{"init", o.init}, {"amplitude", o.amplitude}, {"dilation", o.dilation}};
  const std::string path = output_path(o, "verdict.json");
  write_file_atomic(path, j.dump(2) + "\n");
  write_manifest(o, spec, grid, {path}, {{"caveat", "classification is numerical evidence, not proof"}});

  std::ostringstream s;
  s << "regime=" << to_string(verdict.regime) << " s_c=" << verdict.s_c << "\n";
  s << "classification=" << to_string(verdict.classification) << "\n";
  s << "reason: " << verdict.reason << "\n";
  CommandResult r;
  r.summary = s.str();
  return r;
}

CommandResult run_pseudo_conformal(const Options& o) {
  const SystemSpec spec = load(o);
  const GridSpec grid = grid_for(o, spec);
  EvolveConfig cfg = evolve_config(o);
  const double T = o.blowup_time;
  if (!(cfg.t_end < T)) throw UsageError("--t-end must be below the blow-up time --T");

  const GroundStateResult gs = solve_ground_state(pseudo_conformal_params(spec), grid, std::nullopt, solver_options(o));
  if (!gs.converged) throw NumericalError("ground state did not converge: " + gs.message);
  const SystemSpec flat = without_beta(spec);
  const FieldState v0 = pseudo_conformal_data(gs, T, flat);
  const double K_phase = pseudo_conformal_phase_energy(gs, flat);
  const double Q_psi = *dynamic_functionals(gs.psi, flat).Q;

  std::string csv = "t,Q,K,K_exact,K_minus_phase,rel_l2_error\n";
  std::vector<double> log_tau, log_k;
  double max_error = 0.0;
  auto on_snapshot = [&](const FieldState& v, const DiagnosticsRecord& rec) {
    if (!(v.t < T)) return;
    const FieldState exact = exact_pseudo_conformal(gs, T, v.t, flat);
    double diff = 0.0;
    double norm = 0.0;
    for (int k = 0; k < v.count(); ++k) {
      for (std::size_t i = 0; i < v.components[k].size(); ++i) {
        diff += std::norm(v.components[k][i] - exact.components[k][i]);
        norm += std::norm(exact.components[k][i]);
      }
    }
    const double err = std::sqrt(diff / norm);
    max_error = std::max(max_error, err);
    const double K_exact = dynamic_functionals(exact, flat).K;
    csv += csv_row({v.t, rec.Q, rec.K, K_exact, rec.K - K_phase, err});
    if (rec.K > K_phase) {
      log_tau.push_back(std::log(T - v.t));
      log_k.push_back(std::log(rec.K - K_phase));
    }
  };
  const EvolveOutcome outcome = evolve(v0, flat, cfg, on_snapshot);

  std::optional<double> slope;
  if (log_tau.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_tau.size(); ++i) {
      mx += log_tau[i];
      my += log_k[i];
    }
    mx /= log_tau.size();
    my /= log_tau.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_tau.size(); ++i) {
      sxy += (log_tau[i] - mx) * (log_k[i] - my);
      sxx += (log_tau[i] - mx) * (log_tau[i] - mx);
    }
    if (sxx > 0.0) slope = sxy / sxx;
  }

  const std::string path = output_path(o, "pseudo_conformal.csv");
  write_file_atomic(path, csv);
  json notes = {{"status", to_string(outcome.status)},
                {"reason", outcome.reason},
                {"T", T},
                {"Q_psi", Q_psi},
                {"Q_v0", *dynamic_functionals(v0, flat).Q},
                {"K_phase", K_phase},
                {"max_rel_l2_error", max_error},
                {"loglog_slope", slope ? json(*slope) : json(nullptr)},
                {"warnings", outcome.warnings}};
  write_manifest(o, spec, grid, {path}, notes);

  std::ostringstream s;
  s << "status=" << to_string(outcome.status) << " max_rel_l2_error=" << max_error;
  if (slope) s << " loglog_slope=" << *slope;
  s << "\n";
  CommandResult r;
  r.summary = s.str();
  if (outcome.status == EvolveStatus::Invalid) {
    r.exit_code = kNumericalFailure;
    r.error = "evolution produced non-finite values: " + outcome.reason;
  }
  return r;
}

CommandResult run_virial_check(const Options& o) {
  const SystemSpec spec = load(o);
  const GridSpec grid = grid_for(o, spec);
  const EvolveConfig cfg = evolve_config(o);
  const FieldState u0 = initial_data(o, spec, grid);
  const bool resonant = check_mass_resonance(spec);
  const EvolveOutcome outcome = evolve(u0, spec, cfg);

  std::string csv = "t,V,Vdot,Vddot_formula,Vddot_fd,residual\n";
  double max_residual = 0.0;
  for (const auto& r : outcome.series) {
    std::optional<double> residual;
    if (r.Vddot_fd) {
      residual = *r.Vddot_fd - r.Vddot_formula;
      max_residual = std::max(max_residual, std::abs(*residual));
    }
    csv += csv_row({r.t, r.V, r.Vdot, r.Vddot_formula, r.Vddot_fd, residual});
  }
  const std::string path = output_path(o, "virial.csv");
  write_file_atomic(path, csv);
  json notes = {{"status", to_string(outcome.status)},
                {"mass_resonant", resonant},
                {"formula_applicable", resonant},
                {"max_abs_residual", max_residual},
                {"warnings", outcome.warnings}};
  if (!resonant) notes["formula_note"] = "system is not mass-resonant; the residual is reported, not asserted";
  write_manifest(o, spec, grid, {path}, notes);

  std::ostringstream s;
  s << "mass_resonant=" << (resonant ? "true" : "false") << " max_abs_residual=" << max_residual
    << " status=" << to_string(outcome.status) << "\n";
  CommandResult r;
  r.summary = s.str();
  if (outcome.status == EvolveStatus::Invalid) {
    r.exit_code = kNumericalFailure;
    r.error = "evolution produced non-finite values: " + outcome.reason;
  }
  return r;
}

}  // namespace

CommandResult run_command(const Options& o) {
  CommandResult failure;
  try {
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
    if (o.command == "validate") return run_validate(o);
    if (o.command == "ground-state") return run_ground_state(o);
    if (o.command == "evolve") return run_evolve(o);
    if (o.command == "classify") return run_classify(o);
    if (o.command == "pseudo-conformal") return run_pseudo_conformal(o);
    if (o.command == "virial-check") return run_virial_check(o);
    failure.exit_code = kUsageError;
    failure.error = "unknown command '" + o.command + "'";
  } catch (const UsageError& e) {
    failure.exit_code = kUsageError;
    failure.error = e.what();
  } catch (const SpecError& e) {
    failure.exit_code = kValidationFailure;
    failure.error = e.what();
  } catch (const NumericalError& e) {
    failure.exit_code = kNumericalFailure;
    failure.error = e.what();
  } catch (const fs::filesystem_error& e) {
    failure.exit_code = kUsageError;
    failure.error = e.what();
  }
  return failure;
}

}  // namespace nlslab::cli
