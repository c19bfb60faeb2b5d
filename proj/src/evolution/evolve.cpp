#include <cmath>
#include <sstream>

#include "nlslab/error.hpp"
#include "nlslab/evolution.hpp"

namespace nlslab {

void EvolveConfig::validate() const {
  if (!(dt_min > 0.0)) throw SpecError("dt_min must be positive");
  if (!(dt > dt_min)) throw SpecError("dt must exceed dt_min");
  if (!std::isfinite(t_end) || t_end < 0.0) throw SpecError("t_end must be finite and nonnegative");
  if (!(blowup_factor > 1.0)) throw SpecError("blowup_factor must exceed 1");
  if (snapshot_stride < 1) throw SpecError("snapshot_stride must be at least 1");
  if (!(resolution_tol >= 0.0)) throw SpecError("resolution_tol must be nonnegative");
}

std::string to_string(EvolveStatus status) {
  switch (status) {
    case EvolveStatus::ReachedTEnd:
      return "ReachedTEnd";
    case EvolveStatus::BlowUpDetected:
      return "BlowUpDetected";
    case EvolveStatus::Invalid:
      return "Invalid";
  }
  return "unknown";
}

namespace {

std::string format(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

EvolveOutcome evolve(const FieldState& u0, const SystemSpec& spec, const EvolveConfig& cfg,
                     const SnapshotCallback& on_snapshot) {
  cfg.validate();
  u0.check_shape();
  if (u0.count() != spec.components) throw SpecError("component count differs from the system");
  if (u0.grid.dim != spec.dim) throw SpecError("grid dimension differs from the system dimension");
  if (!(cfg.t_end >= u0.t)) throw SpecError("t_end precedes the initial time");

  EvolveOutcome out;
  if (!u0.all_finite()) {
    out.final = u0;
    out.status = EvolveStatus::Invalid;
    out.event_time = u0.t;
    out.reason = "initial data contains non-finite values";
    return out;
  }

  const bool resonant = check_mass_resonance(spec);
  const SplitStepIntegrator integrator(spec, u0.grid);
  FieldState u = u0;

  auto record = [&](const FieldState& state) {
    out.series.push_back(make_record(state, spec, resonant));
    if (on_snapshot) on_snapshot(state, out.series.back());
  };
  auto blow_up = [&](const std::string& reason) {
    record(u);
    out.status = EvolveStatus::BlowUpDetected;
    out.event_time = u.t;
    out.reason = reason;
    out.warnings.push_back("the spatial grid is fixed, so a concentrating solution is followed only while resolved");
    out.final = u;
    fill_second_derivative(out.series);
    return out;
  };
  record(u);

  if (out.series.front().boundary_mass > 1e-10) {
    out.warnings.push_back("initial data is not decayed at the box boundary (boundary mass fraction " +
                           format(out.series.front().boundary_mass) + ")");
  }
  double tail_tol = cfg.resolution_tol;
  const double initial_tail = integrator.measure(u).tail;
  if (tail_tol > 0.0 && initial_tail > tail_tol) {
    tail_tol = 10.0 * initial_tail;
    out.warnings.push_back("initial data is under-resolved (spectral tail " + format(initial_tail) +
                           "); resolution check relaxed to " + format(tail_tol));
  }

  const double K0 = out.series.front().K;
  const double t_end = cfg.t_end;
  const double span = t_end - u0.t;
  double dt = cfg.dt;
  long fixed_steps = 0;
  if (!cfg.adaptive) {
    fixed_steps = std::max<long>(span > 0.0 ? 1 : 0, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
    if (fixed_steps > 0) dt = span / static_cast<double>(fixed_steps);
    if (std::abs(dt - cfg.dt) > 1e-12 * cfg.dt && fixed_steps > 0) {
      out.warnings.push_back("dt adjusted to " + format(dt) + " to land on t_end");
    }
  }

  enum class Event { None, BlowUp, Halve, Double };
  Event event = Event::None;
  std::string event_reason;
  double K_ref = K0;
  long since_adapt = 0;
  long since_record = 0;
  long done = 0;
  FieldState last_good = u;
  const double end_slack = 1e-12 * std::max(1.0, std::abs(t_end));

  while (true) {
    const bool at_end = cfg.adaptive ? (t_end - u.t <= end_slack) : (done >= fixed_steps);
    if (at_end) break;

    double step_dt = dt;
    long chunk = cfg.snapshot_stride - since_record;
    if (cfg.adaptive) {
      const double remaining = t_end - u.t;
      const long fit = static_cast<long>(std::floor(remaining / dt + 1e-9));
      if (fit == 0) {
        step_dt = remaining;
        chunk = 1;
      } else {
        chunk = std::min(chunk, fit);
      }
    } else {
      chunk = std::min(chunk, fixed_steps - done);
    }

    event = Event::None;
    const double t_before = u.t;
    auto monitor = [&](double, const SplitStepIntegrator::Observation& obs) {
      if (K0 > 0.0 && obs.K > cfg.blowup_factor * K0) {
        event = Event::BlowUp;
        event_reason = "K exceeded " + format(cfg.blowup_factor) + " x K(u0)";
        return false;
      }
      if (tail_tol > 0.0 && obs.tail > tail_tol) {
        event = Event::BlowUp;
        event_reason = "solution no longer resolved: spectral tail " + format(obs.tail) + " exceeds " +
                       format(tail_tol);
        return false;
      }
      if (cfg.adaptive) {
        ++since_adapt;
        if (obs.K > 2.0 * K_ref && K_ref > 0.0) {
          event = Event::Halve;
          K_ref = obs.K;
          return false;
        }
        if (since_adapt >= 100 && dt < cfg.dt) {
          event = Event::Double;
          K_ref = obs.K;
          return false;
        }
      }
      return true;
    };
    if (cfg.adaptive && K_ref == 0.0) K_ref = integrator.measure(u).K;

    const long taken = integrator.advance(u, step_dt, chunk, monitor);
    done += taken;
    out.steps += taken;
    since_record += taken;

    if (!u.all_finite()) {
      out.status = EvolveStatus::Invalid;
      out.event_time = u.t;
      out.reason = "non-finite values at t = " + format(u.t) + " (last finite state at t = " +
                   format(t_before + (taken - 1) * step_dt) + ")";
      out.final = last_good;
      fill_second_derivative(out.series);
      return out;
    }
    if (event == Event::BlowUp) return blow_up(event_reason);
    if (event == Event::Halve) {
      dt *= 0.5;
      since_adapt = 0;
      if (dt < cfg.dt_min) return blow_up("time step fell below dt_min = " + format(cfg.dt_min));
    } else if (event == Event::Double) {
      dt = std::min(2.0 * dt, cfg.dt);
      since_adapt = 0;
    }

    const bool finished = cfg.adaptive ? (t_end - u.t <= end_slack) : (done >= fixed_steps);
    if (since_record >= cfg.snapshot_stride || finished) {
      if (finished) u.t = t_end;
      record(u);
      last_good = u;
      since_record = 0;
    }
  }

  if (out.series.back().t < u.t) record(u);
  out.status = EvolveStatus::ReachedTEnd;
  out.event_time = u.t;
  out.final = u;
  fill_second_derivative(out.series);
  return out;
}

}  // namespace nlslab
