#include "hopfnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "hopfnet/error.hpp"

namespace hopfnet {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::DecayedToOrigin: return "DecayedToOrigin";
    case Outcome::LimitCycle: return "LimitCycle";
    case Outcome::Escaped: return "Escaped";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(SweepProtocol p) {
  switch (p) {
    case SweepProtocol::FreshSmallInit: return "FreshSmallInit";
    case SweepProtocol::ContinuationUp: return "ContinuationUp";
    case SweepProtocol::ContinuationDown: return "ContinuationDown";
  }
  return "FreshSmallInit";
}

std::string_view to_string(NumericClass c) {
  switch (c) {
    case NumericClass::Supercritical: return "Supercritical";
    case NumericClass::Subcritical: return "Subcritical";
    case NumericClass::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

double StateVector::max_abs() const {
  double m = 0.0;
  if (x.size()) m = std::max(m, x.cwiseAbs().maxCoeff());
  if (y.size()) m = std::max(m, y.cwiseAbs().maxCoeff());
  return m;
}

namespace {

void check_dims(const OscillatorNetwork& net, Eigen::Index nx, Eigen::Index ny) {
  if (net.m.entries.rows() != net.m.entries.cols() || nx != net.n() || ny != net.n())
    throw Error(ErrorCode::DimensionMismatch,
                "network has n=" + std::to_string(net.n()) + ", state has x:" +
                    std::to_string(nx) + " y:" + std::to_string(ny));
}

// s packs (x, y); ds receives the derivative. No allocation.
void rhs_packed(const OscillatorNetwork& net, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
  const Eigen::Index n = net.n();
  const auto x = s.head(n);
  const auto y = s.tail(n);
  auto dx = ds.head(n);
  dx.noalias() = net.m.entries * x;
  const auto xa = x.array();
  dx.array() += y.array() + net.a * xa.square() + net.b * xa.square() * xa;
  ds.tail(n) = -x;
}

}  // namespace

StateVector rhs(const OscillatorNetwork& net, const StateVector& s) {
  check_dims(net, s.x.size(), s.y.size());
  const Eigen::Index n = net.n();
  Eigen::VectorXd packed(2 * n), d(2 * n);
  packed << s.x, s.y;
  rhs_packed(net, packed, d);
  return {d.head(n), d.tail(n)};
}

IntegrationEnd integrate(const OscillatorNetwork& net, const StateVector& init,
                         const IntegrateOptions& options, const SampleObserver& observer) {
  check_dims(net, init.x.size(), init.y.size());
  if (!(options.t_end > 0.0)) throw Error(ErrorCode::InvalidValue, "t_end must be positive");
  if (!(options.dt_max > 0.0)) throw Error(ErrorCode::InvalidValue, "dt_max must be positive");
  if (!(options.escape_bound > 0.0))
    throw Error(ErrorCode::InvalidValue, "escape_bound must be positive");
  if (options.stride < 1) throw Error(ErrorCode::InvalidValue, "stride must be >= 1");

  const Eigen::Index n = net.n();
  const auto steps = static_cast<long long>(std::ceil(options.t_end / options.dt_max - 1e-9));
  const long long total = std::max<long long>(steps, 1);
  const double h = options.t_end / static_cast<double>(total);

  Eigen::VectorXd s(2 * n), k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);
  s << init.x, init.y;

  auto emit = [&](double t) {
    if (observer) observer(t, s.head(n), s.tail(n));
  };
  emit(0.0);

  IntegrationEnd end;
  for (long long step = 1; step <= total; ++step) {
    rhs_packed(net, s, k1);
    tmp = s + 0.5 * h * k1;
    rhs_packed(net, tmp, k2);
    tmp = s + 0.5 * h * k2;
    rhs_packed(net, tmp, k3);
    tmp = s + h * k3;
    rhs_packed(net, tmp, k4);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t = static_cast<double>(step) * h;
    const double size = s.cwiseAbs().maxCoeff();
    if (!std::isfinite(size))
      throw Error(ErrorCode::NonFiniteState, "state overflowed at t=" + std::to_string(t));
    if (size > options.escape_bound) {
      emit(t);
      end.status = RunStatus::Escaped;
      end.final_time = t;
      end.final_state = {s.head(n), s.tail(n)};
      return end;
    }
    if (step % options.stride == 0 || step == total) emit(t);
  }
  end.final_time = options.t_end;
  end.final_state = {s.head(n), s.tail(n)};
  return end;
}

Trajectory integrate(const OscillatorNetwork& net, const StateVector& init,
                     const IntegrateOptions& options) {
  Trajectory traj;
  auto record = [&](double t, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
    // The final step may coincide with a stride sample; keep one copy.
    if (!traj.times.empty() && traj.times.back() == t) return;
    traj.times.push_back(t);
    traj.samples.push_back({x, y});
  };
  const IntegrationEnd end = integrate(net, init, options, record);
  traj.status = end.status;
  traj.final_state = end.final_state;
  traj.final_time = end.final_time;
  if (end.status == RunStatus::Escaped) traj.escape_time = end.final_time;
  return traj;
}

void check_settings(const AmplitudeSettings& s) {
  auto require = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidValue, std::string(name) + " must be positive and finite");
  };
  require(s.dt_max, "dt_max");
  require(s.t_transient, "t_transient");
  require(s.t_measure, "t_measure");
  require(s.decay_tol, "decay_tol");
  require(s.cycle_tol, "cycle_tol");
  require(s.escape_bound, "escape_bound");
  require(s.departure_radius, "departure_radius");
  require(s.init_scale, "init_scale");
  require(s.init_scale_large, "init_scale_large");
  require(s.fit_tol_fraction, "fit_tol_fraction");
  require(s.min_r_squared, "min_r_squared");
  if (s.stride < 1) throw Error(ErrorCode::InvalidValue, "stride must be >= 1");
}

namespace {

struct Peak {
  double t;
  double value;
};

// Three-point parabolic refinement of a sampled extremum at the middle sample.
Peak refine(double t1, double h, double y0, double y1, double y2) {
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom == 0.0) return {t1, y1};
  const double delta = 0.5 * (y0 - y2) / denom;
  return {t1 + delta * h, y1 - 0.25 * (y0 - y2) * delta};
}

double relative_spread(const std::vector<Peak>& peaks) {
  double lo = peaks.front().value, hi = lo, sum = 0.0;
  for (const auto& p : peaks) {
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
    sum += p.value;
  }
  const double mean = sum / static_cast<double>(peaks.size());
  return (hi - lo) / std::abs(mean);
}

}  // namespace

AmplitudeRun measure_run(const OscillatorNetwork& net, const Eigen::VectorXd& v1,
                         const StateVector& init, const AmplitudeSettings& settings) {
  check_settings(settings);
  if (v1.size() != net.n())
    throw Error(ErrorCode::DimensionMismatch, "leading eigenvector length differs from n");

  IntegrateOptions opts;
  opts.dt_max = settings.dt_max;
  opts.t_end = settings.t_transient + settings.t_measure;
  opts.escape_bound = settings.escape_bound;
  opts.stride = settings.stride;

  // Rolling window of the last three samples for |p| peak detection.
  struct Sample {
    double t = 0.0;
    double p = 0.0;
    Eigen::VectorXd x;
  };
  Sample s0, s1;
  int seen = 0;
  bool inside_departure = true;
  Eigen::VectorXd departure_x;
  Eigen::VectorXd window_peak_x;
  std::vector<double> window_t;
  std::vector<double> window_p;

  auto observe = [&](double t, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
    const double p = v1.dot(x);
    const double size = std::max(x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff());
    if (seen >= 2 && std::abs(s1.p) > std::abs(s0.p) && std::abs(s1.p) >= std::abs(p)) {
      if (inside_departure) departure_x = s1.x;
      if (s1.t >= settings.t_transient) window_peak_x = s1.x;
    }
    if (size > settings.departure_radius) inside_departure = false;
    if (t >= settings.t_transient) {
      window_t.push_back(t);
      window_p.push_back(p);
    }
    s0 = std::move(s1);
    s1 = Sample{t, p, x};
    ++seen;
  };

  const IntegrationEnd end = integrate(net, init, opts, observe);

  AmplitudeRun run;
  run.final_state = end.final_state;
  AmplitudeMeasure& m = run.measure;

  if (end.status == RunStatus::Escaped) {
    m.outcome = Outcome::Escaped;
    m.escape_time = end.final_time;
    run.snapshot_x = departure_x.size() ? departure_x : end.final_state.x;
    return run;
  }

  double max_p = 0.0;
  for (double p : window_p) max_p = std::max(max_p, std::abs(p));
  if (max_p < settings.decay_tol) {
    m.outcome = Outcome::DecayedToOrigin;
    return run;
  }

  // Positive maxima and negative minima are judged separately: the quadratic
  // term shifts the cycle off-centre, so the two branches differ slightly.
  std::vector<Peak> upper, lower;
  for (std::size_t i = 1; i + 1 < window_p.size(); ++i) {
    const double y0 = window_p[i - 1], y1 = window_p[i], y2 = window_p[i + 1];
    const double h = window_t[i + 1] - window_t[i];
    if (y1 > 0.0 && y1 > y0 && y1 >= y2) upper.push_back(refine(window_t[i], h, y0, y1, y2));
    if (y1 < 0.0 && y1 < y0 && y1 <= y2) lower.push_back(refine(window_t[i], h, y0, y1, y2));
  }

  m.outcome = Outcome::Inconclusive;
  if (upper.size() < 3 || lower.size() < 3) return run;
  if (relative_spread(upper) >= settings.cycle_tol || relative_spread(lower) >= settings.cycle_tol)
    return run;

  double sum = 0.0;
  for (const auto& p : upper) sum += p.value;
  for (const auto& p : lower) sum -= p.value;
  m.outcome = Outcome::LimitCycle;
  m.amplitude = sum / static_cast<double>(upper.size() + lower.size());
  m.period_estimate =
      (upper.back().t - upper.front().t) / static_cast<double>(upper.size() - 1);
  run.snapshot_x = window_peak_x;
  return run;
}

AmplitudeMeasure steady_amplitude(const OscillatorNetwork& net, const Eigen::VectorXd& v1,
                                  const StateVector& init, const AmplitudeSettings& settings) {
  return measure_run(net, v1, init, settings).measure;
}

NetworkFamily::NetworkFamily(double a, double b, const CouplingMatrix& base)
    : a_(a), b_(b), base_(base.entries), spectrum_(eigendecompose(base)) {
  v1_ = spectrum_.leading_vector();
}

OscillatorNetwork NetworkFamily::at(double lambda) const {
  OscillatorNetwork net;
  net.a = a_;
  net.b = b_;
  Eigen::MatrixXd m = base_ + (lambda - spectrum_.leading()) * v1_ * v1_.transpose();
  const Eigen::MatrixXd t = m.transpose();
  net.m.entries = 0.5 * (m + t);
  net.m.leading_target = lambda;
  return net;
}

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorCode::InvalidValue, "least squares needs >= 2 paired points");
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidValue, "least squares needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::optional<LinearFit> fit_amplitude_squared(const SweepResult& sweep) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < sweep.lambda_grid.size(); ++i) {
    const auto& m = sweep.measures[i];
    if (sweep.lambda_grid[i] > 0.0 && m.outcome == Outcome::LimitCycle) {
      xs.push_back(sweep.lambda_grid[i]);
      ys.push_back(*m.amplitude * *m.amplitude);
    }
  }
  if (xs.size() < 4) return std::nullopt;
  return least_squares(xs, ys);
}

SweepResult amplitude_sweep(const NetworkFamily& family, std::span<const double> grid,
                            SweepProtocol protocol, const AmplitudeSettings& settings,
                            int threads) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "lambda grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw Error(ErrorCode::InvalidValue, "lambda grid must be sorted ascending");
  check_settings(settings);

  SweepResult result;
  result.lambda_grid.assign(grid.begin(), grid.end());
  result.protocol = protocol;
  result.init_scale = settings.init_scale;
  result.measures.resize(grid.size());

  const Eigen::Index n = family.n();
  const StateVector fresh{settings.init_scale * family.v1(), Eigen::VectorXd::Zero(n)};

  if (protocol == SweepProtocol::FreshSmallInit) {
    const std::size_t count = grid.size();
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    auto work = [&](std::size_t first) {
      for (std::size_t i = first; i < count; i += workers)
        result.measures[i] = steady_amplitude(family.at(grid[i]), family.v1(), fresh, settings);
    };
    if (workers <= 1) {
      work(0);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            work(w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
  } else {
    StateVector state = fresh;
    const bool up = protocol == SweepProtocol::ContinuationUp;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const std::size_t i = up ? j : grid.size() - 1 - j;
      AmplitudeRun run = measure_run(family.at(grid[i]), family.v1(), state, settings);
      result.measures[i] = run.measure;
      state = std::move(run.final_state);
    }
  }

  result.fit = fit_amplitude_squared(result);
  return result;
}

namespace {

const AmplitudeMeasure* find_at(const SweepResult& sweep, double lambda) {
  for (std::size_t i = 0; i < sweep.lambda_grid.size(); ++i)
    if (sweep.lambda_grid[i] == lambda) return &sweep.measures[i];
  return nullptr;
}

}  // namespace

NumericEvidence classify_numeric(const SweepResult& up, const SweepResult& down,
                                 const SweepResult& fresh, const SweepResult& probes,
                                 const AmplitudeSettings& settings) {
  NumericEvidence ev;
  bool any_positive = false, any_negative = false;
  bool super_pattern = true, all_escape = true;
  double max_amp_sq = 0.0;

  for (std::size_t i = 0; i < fresh.lambda_grid.size(); ++i) {
    const double lambda = fresh.lambda_grid[i];
    const AmplitudeMeasure& m = fresh.measures[i];
    if (lambda > 0.0) {
      any_positive = true;
      if (m.outcome != Outcome::LimitCycle) super_pattern = false;
      if (m.outcome != Outcome::Escaped) all_escape = false;
      if (m.amplitude) max_amp_sq = std::max(max_amp_sq, *m.amplitude * *m.amplitude);
    } else if (lambda < 0.0) {
      any_negative = true;
      if (m.outcome != Outcome::DecayedToOrigin) super_pattern = false;
      const AmplitudeMeasure* probe = find_at(probes, lambda);
      if (m.outcome == Outcome::DecayedToOrigin && probe && probe->outcome == Outcome::Escaped)
        ev.bistable_lambdas.push_back(lambda);
      const AmplitudeMeasure* u = find_at(up, lambda);
      const AmplitudeMeasure* d = find_at(down, lambda);
      if (u && d && u->outcome == Outcome::DecayedToOrigin &&
          d->outcome != Outcome::DecayedToOrigin)
        ev.hysteresis = true;
    }
  }

  if (!any_positive) {
    ev.reason = "no lambda > 0 grid points";
    return ev;
  }

  ev.decays_below_and_cycles_above = super_pattern;
  ev.escapes_above = all_escape;
  ev.fit = fresh.fit ? fresh.fit : fit_amplitude_squared(fresh);
  if (ev.fit)
    ev.fit_accepted = ev.fit->r_squared >= settings.min_r_squared &&
                      std::abs(ev.fit->intercept) <= settings.fit_tol_fraction * max_amp_sq;

  if (super_pattern && ev.fit_accepted) {
    ev.classification = NumericClass::Supercritical;
    ev.reason = "decay below threshold, limit cycles above with amplitude^2 linear in lambda";
  } else if (all_escape && !ev.bistable_lambdas.empty()) {
    ev.classification = NumericClass::Subcritical;
    ev.reason = "small inits escape above threshold; bistable below threshold";
  } else if (super_pattern) {
    ev.reason = ev.fit ? "amplitude^2 fit rejected" : "fewer than four limit-cycle points";
  } else if (all_escape) {
    ev.reason = any_negative ? "no bistability detected below threshold"
                             : "no lambda < 0 grid points to probe bistability";
  } else {
    ev.reason = "mixed outcomes above threshold";
  }
  return ev;
}

bool outside_exclusion_band(double a, double threshold, double fraction) {
  return std::abs(std::abs(a) - threshold) > fraction * threshold;
}

}  // namespace hopfnet
