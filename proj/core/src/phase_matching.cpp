#include <spdc/error.hpp>
#include <spdc/parallel.hpp>
#include <spdc/phase_matching.hpp>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace spdc::matching {

using optics::kPi;
using optics::kTwoPi;

namespace {

constexpr double kMismatchTolerance = 1e-9;

template <class F> std::optional<double> bracketed_root(F f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) return std::nullopt;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) return std::nullopt;
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                             iters);
  double x = 0.5 * (r.first + r.second);
  // pick whichever bracket end (or midpoint) has the smallest residual
  double best = x, fbest = std::abs(f(x));
  for (double c : {r.first, r.second}) {
    double fc = std::abs(f(c));
    if (fc < fbest) best = c, fbest = fc;
  }
  return best;
}

/// Scans [a, b] and returns the root in the first sub-interval with a sign change.
template <class F> std::optional<double> first_root(F f, double a, double b, int steps) {
  double x0 = a, f0 = f(a);
  for (int i = 1; i <= steps; ++i) {
    double x1 = a + (b - a) * i / steps;
    double f1 = f(x1);
    if (std::isfinite(f0) && std::isfinite(f1) && (f0 == 0.0 || (f0 > 0.0) != (f1 > 0.0)))
      return bracketed_root(f, x0, x1);
    x0 = x1;
    f0 = f1;
  }
  return std::nullopt;
}

} // namespace

void Wavelengths::check_energy() const {
  if (!(signal_um > 0.0 && idler_um > 0.0 && pump_um > 0.0))
    fail(ErrorCode::InvalidArgument, "wavelengths must be positive");
  double mismatch = (1.0 / signal_um + 1.0 / idler_um - 1.0 / pump_um) * pump_um;
  if (std::abs(mismatch) > 1e-9) {
    std::ostringstream os;
    os << "1/lambda_s + 1/lambda_i differs from 1/lambda_p by " << mismatch << " (relative)";
    fail(ErrorCode::EnergyMismatch, os.str());
  }
}

IndexModel::IndexModel(const CrystalConfig &crystal, const PumpBeam &pump, const Wavelengths &wl,
                       MediumModel medium, Branch signal, Branch idler)
    : crystal_(crystal), wl_(wl), medium_(medium), signal_branch_(signal), idler_branch_(idler) {
  wl_.check_energy();
  if (std::abs(pump.lambda_um - wl.pump_um) > 1e-12)
    fail(ErrorCode::InvalidArgument, "pump beam wavelength differs from the configured pump wavelength");
  k0_signal_ = kTwoPi / wl_.signal_um;
  k0_idler_ = kTwoPi / wl_.idler_um;
  k_pump_ = pump.k_p;
  n_pump_ = pump.k_p * wl_.pump_um / kTwoPi;
  Direction axis = Direction::lab(0.0, 0.0);
  MediumModel saved = medium_;
  medium_ = MediumModel::Anisotropic;
  n_signal_axis_ = index(signal_branch_, axis, wl_.signal_um);
  n_idler_axis_ = index(idler_branch_, axis, wl_.idler_um);
  medium_ = saved;
}

double IndexModel::index(Branch b, const Direction &lab, double lambda_um) const {
  const auto &s = crystal_.sellmeier;
  if (b == Branch::Ordinary) return optics::sellmeier_index(s, Branch::Ordinary, lambda_um);
  return optics::idler_index(s, lab, crystal_.theta_c, crystal_.phi_c, lambda_um);
}

double IndexModel::n_signal(const Direction &lab) const {
  lab.require(optics::Frame::Lab, "IndexModel::n_signal");
  if (medium_ == MediumModel::Isotropic) return n_signal_axis_;
  return index(signal_branch_, lab, wl_.signal_um);
}

double IndexModel::n_idler(const Direction &lab) const {
  lab.require(optics::Frame::Lab, "IndexModel::n_idler");
  if (medium_ == MediumModel::Isotropic) return n_idler_axis_;
  return index(idler_branch_, lab, wl_.idler_um);
}

double IndexModel::n_signal_at(const Direction &lab, double lambda_um) const {
  Direction d = medium_ == MediumModel::Isotropic ? Direction::lab(0.0, 0.0) : lab;
  return index(signal_branch_, d, lambda_um);
}

double IndexModel::n_idler_at(const Direction &lab, double lambda_um) const {
  Direction d = medium_ == MediumModel::Isotropic ? Direction::lab(0.0, 0.0) : lab;
  return index(idler_branch_, d, lambda_um);
}

double longitudinal_mismatch(const IndexModel &m, const Direction &s, const Direction &i) {
  return m.k_signal(s) * std::cos(s.theta()) + m.k_idler(i) * std::cos(i.theta()) - m.k_pump();
}

double longitudinal_mismatch(const CrystalConfig &crystal, const PumpBeam &pump, double lambda_s,
                             double lambda_i, const Direction &dir_s, const Direction &dir_i) {
  IndexModel m(crystal, pump, {lambda_s, lambda_i, pump.lambda_um});
  return longitudinal_mismatch(m, dir_s, dir_i);
}

double transverse_rho_sq(const IndexModel &m, const Direction &s, const Direction &i) {
  Vec3 k = m.k_signal_vec(s) + m.k_idler_vec(i);
  return k.x() * k.x() + k.y() * k.y();
}

double transverse_mismatch(const IndexModel &m, const PumpBeam &pump, const Direction &s,
                           const Direction &i, double xi_star) {
  return transverse_rho_sq(m, s, i) - pump.k_p / pump.z_rayleigh_um * xi_star;
}

std::size_t RingSolution::converged_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const RingSample &s) { return s.converged; }));
}

namespace {

struct PairSolution {
  double theta_s, theta_i;
  bool ok;
};

class PairSolver {
public:
  PairSolver(const IndexModel &m, const RingSolverOptions &o, double target)
      : m_(m), o_(o), target_(target) {}

  /// theta_s with Delta k_z = 0 for a given idler direction.
  std::optional<double> signal_theta(double phi_s, double theta_i, double phi_i) const {
    Direction di = Direction::lab(theta_i, phi_i);
    double ki = m_.k_idler(di) * std::cos(theta_i);
    auto f = [&](double ts) {
      Direction ds = Direction::lab(ts, phi_s);
      return m_.k_signal(ds) * std::cos(ts) + ki - m_.k_pump();
    };
    return bracketed_root(f, 0.0, o_.theta_max);
  }

  double condition(double phi_s, double theta_i, double phi_i) const {
    auto ts = signal_theta(phi_s, theta_i, phi_i);
    if (!ts) return std::numeric_limits<double>::quiet_NaN();
    Direction ds = Direction::lab(*ts, phi_s), di = Direction::lab(theta_i, phi_i);
    if (o_.mode == SolveMode::Coupled) return transverse_rho_sq(m_, ds, di) - target_;
    return m_.k_signal(ds) * std::sin(*ts) - m_.k_idler(di) * std::sin(theta_i);
  }

  PairSolution solve(double phi_s, double phi_i) const {
    auto g = [&](double ti) { return condition(phi_s, ti, phi_i); };
    auto ti = first_root(g, 1e-7, o_.theta_max, o_.scan_steps);
    if (!ti) return {0.0, 0.0, false};
    auto ts = signal_theta(phi_s, *ti, phi_i);
    if (!ts) return {0.0, 0.0, false};
    return {*ts, *ti, true};
  }

private:
  const IndexModel &m_;
  const RingSolverOptions &o_;
  double target_;
};

} // namespace

std::pair<RingSolution, RingSolution> solve_rings(const IndexModel &model, const PumpBeam &pump,
                                                  std::span<const double> phi_grid,
                                                  const RingSolverOptions &options) {
  if (phi_grid.empty()) fail(ErrorCode::InvalidArgument, "phi grid is empty");
  if (!(options.theta_max > 0.0 && options.theta_max < kPi / 2))
    fail(ErrorCode::InvalidArgument, "theta_max must lie in (0, pi/2)");
  double xi_star = options.xi_star >= 0.0 ? options.xi_star
                                          : (pump.l + pump.p > 0 ? find_xi_max(pump.l, pump.p) : 0.0);
  double target = options.mode == SolveMode::Coupled ? pump.k_p / pump.z_rayleigh_um * xi_star : 0.0;
  PairSolver solver(model, options, target);

  RingSolution sig, idl;
  sig.branch = RingBranch::Signal;
  idl.branch = RingBranch::Idler;
  sig.wavelengths = idl.wavelengths = model.wavelengths();
  sig.samples.resize(phi_grid.size());
  idl.samples.resize(phi_grid.size());

  parallel_for(phi_grid.size(), options.workers, [&](std::size_t n) {
    const double phi_s = optics::wrap_angle(phi_grid[n]);
    double phi_i = optics::wrap_angle(phi_s + kPi);
    PairSolution sol = solver.solve(phi_s, phi_i);
    if (sol.ok && options.pairing == Pairing::Scan) {
      for (int it = 0; it < 30 && sol.ok; ++it) {
        Direction ds = Direction::lab(sol.theta_s, phi_s);
        double ti = sol.theta_i;
        auto rho = [&](double p) { return transverse_rho_sq(model, ds, Direction::lab(ti, p)); };
        double centre = phi_s + kPi;
        auto best = boost::math::tools::brent_find_minima(rho, centre - 0.5, centre + 0.5, 52);
        double next = optics::wrap_angle(best.first);
        double step = std::abs(std::remainder(next - phi_i, kTwoPi));
        phi_i = next;
        sol = solver.solve(phi_s, phi_i);
        if (step < 1e-12) break;
      }
    }
    RingSample &s = sig.samples[n];
    RingSample &i = idl.samples[n];
    s.phi = phi_s;
    i.phi = phi_i;
    if (!sol.ok) return;
    Direction ds = Direction::lab(sol.theta_s, phi_s), di = Direction::lab(sol.theta_i, phi_i);
    double dkz = std::abs(longitudinal_mismatch(model, ds, di));
    double tr = options.mode == SolveMode::Coupled ? std::abs(transverse_rho_sq(model, ds, di) - target)
                                                    : std::abs(solver.condition(phi_s, sol.theta_i, phi_i));
    s.theta = sol.theta_s;
    i.theta = sol.theta_i;
    s.residual = i.residual = dkz;
    s.transverse_residual = i.transverse_residual = tr;
    bool ok = dkz <= kMismatchTolerance && sol.theta_s > 0.0 && sol.theta_i > 0.0;
    s.converged = i.converged = ok;
  });
  return {std::move(sig), std::move(idl)};
}

void FitConstants::validate() const {
  if (!(zeta > 0.0)) fail(ErrorCode::InvalidArgument, "zeta must be positive");
  if (!(1.0 + eta > 0.0)) fail(ErrorCode::InvalidArgument, "1 + eta must be positive");
}

double ring_fit_eval(const FitConstants &k, double phi, RingBranch branch) {
  k.validate();
  double a = branch == RingBranch::Signal ? phi - kPi : phi;
  double c = std::cos(a);
  if (c * c + k.eta < 0.0) fail(ErrorCode::DomainError, "negative square-root argument in ring fit");
  double s = std::sin(0.5 * a);
  double arg = k.zeta * (c + std::sqrt(c * c + k.eta)) + k.nu * std::exp(-k.nu * s * s) * std::cos(2.0 * a);
  if (arg < -1.0 || arg > 1.0) fail(ErrorCode::DomainError, "ring fit arcsin argument outside [-1, 1]");
  return std::asin(arg);
}

double find_xi_max(int l, int p) {
  if (l < 0 || p < 0 || l + p < 1)
    fail(ErrorCode::InvalidArgument, "find_xi_max needs l + p >= 1 (l = p = 0 peaks at the boundary)");
  const double hi = 4.0 * (l + 2 * p + 3);
  auto f = [&](double x) { return pump::transverse_shape(l, p, x); };

  const int n = 20000;
  const double h = hi / n;
  int best = -1;
  double best_val = -1.0;
  double prev = f(h), cur = f(2 * h);
  for (int i = 2; i < n; ++i) {
    double next = f((i + 1) * h);
    if (cur > prev && cur >= next && cur > best_val) {
      best = i;
      best_val = cur;
    }
    prev = cur;
    cur = next;
  }
  if (best < 0) {
    // monotone on the scan: the maximum sits at the right end
    return hi;
  }
  double a = (best - 1) * h, b = (best + 1) * h;
  // golden-section refinement of the bracket
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-9) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  // polish on the logarithmic derivative: -1 + l/x - 2 L_{p-1}^{l+1}(x) / L_p^l(x)
  auto dlog = [&](double x) {
    double lp = pump::laguerre(p, l, x);
    double dl = p > 0 ? -pump::laguerre(p - 1, l + 1, x) : 0.0;
    return -1.0 + l / x + 2.0 * dl / lp;
  };
  double lo = std::max(a - 1e-7, h * 0.5), up = b + 1e-7;
  if (auto r = bracketed_root(dlog, lo, up)) return *r;
  return 0.5 * (a + b);
}

RingShape RingShape::from_fit(const FitConstants &k) {
  return {[k](double phi) { return ring_fit_eval(k, phi, RingBranch::Signal); },
          [k](double phi) { return ring_fit_eval(k, phi, RingBranch::Idler); }};
}

namespace {

std::function<double(double)> periodic_interpolant(const RingSolution &ring) {
  std::vector<std::pair<double, double>> pts;
  for (const auto &s : ring.samples)
    if (s.converged) pts.emplace_back(optics::wrap_angle(s.phi), s.theta);
  if (pts.empty()) fail(ErrorCode::NoRoot, "ring solution has no converged samples");
  std::sort(pts.begin(), pts.end());
  return [pts](double phi) {
    if (pts.size() == 1) return pts[0].second;
    double x = optics::wrap_angle(phi);
    auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(x, -1e300));
    const auto &hi = it == pts.end() ? pts.front() : *it;
    const auto &lo = it == pts.begin() ? pts.back() : *(it - 1);
    double span = hi.first - lo.first;
    if (span <= 0.0) span += kTwoPi;
    double t = x - lo.first;
    if (t < 0.0) t += kTwoPi;
    return lo.second + (hi.second - lo.second) * (t / span);
  };
}

} // namespace

RingShape RingShape::from_solution(const RingSolution &signal, const RingSolution &idler) {
  return {periodic_interpolant(signal), periodic_interpolant(idler)};
}

ConjugateAzimuths solve_conjugate_azimuth(const IndexModel &model, const PumpBeam &pump, const RingShape &shape,
                                          double phi_s, double xi_star) {
  const double centre = phi_s + kPi;
  const double theta_s = shape.signal_theta(phi_s);
  const double theta_i = shape.idler_theta(centre);
  Direction ds = Direction::lab(theta_s, phi_s);
  auto g = [&](double p) { return transverse_mismatch(model, pump, ds, Direction::lab(theta_i, p), xi_star); };
  auto plus = bracketed_root(g, centre, centre + kPi / 2);
  auto minus = bracketed_root(g, centre - kPi / 2, centre);
  if (!plus || !minus) {
    std::ostringstream os;
    os << "no sign change of the transverse condition within phi_s + pi +- pi/2 at phi_s = " << phi_s;
    fail(ErrorCode::NoRoot, os.str());
  }
  return {*plus, *minus};
}

double azimuth_fit_eval(double phi, AzimuthBranch branch) {
  double g = 0.3631 * std::exp(-0.4653 * phi * phi);
  if (branch == AzimuthBranch::Plus) return 3.1836 + g + 0.9999 * phi;
  return 3.0996 - g + 0.9999 * phi;
}

} // namespace spdc::matching
