#include <spdc/coincidence.hpp>
#include <spdc/error.hpp>
#include <spdc/parallel.hpp>
#include <spdc/quadrature.hpp>

#include <algorithm>
#include <cmath>

namespace spdc::engine {

using optics::kPi;
using optics::kTwoPi;

std::vector<double> GridAxis::values() const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "grid axis needs at least one node");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::pair<optics::Branch, optics::Branch> case_branches(chi2::PolarizationCase c) {
  using optics::Branch;
  switch (c) {
  case chi2::PolarizationCase::OO: return {Branch::Ordinary, Branch::Ordinary};
  case chi2::PolarizationCase::EE: return {Branch::Extraordinary, Branch::Extraordinary};
  case chi2::PolarizationCase::EO: return {Branch::Extraordinary, Branch::Ordinary};
  case chi2::PolarizationCase::OE: return {Branch::Ordinary, Branch::Extraordinary};
  }
  return {Branch::Ordinary, Branch::Extraordinary};
}

void ScenarioConfig::validate() const {
  crystal.validate();
  pump.validate();
  wavelengths.check_energy();
  idler_detector.require(optics::Frame::Lab, "scenario idler detector");
  if (signal_theta.n < 2 || signal_phi.n < 2) fail(ErrorCode::InvalidArgument, "grid counts must be at least 2");
  if (signal_theta.lo < 0.0 || signal_theta.hi > kPi || signal_theta.lo > signal_theta.hi)
    fail(ErrorCode::InvalidArgument, "signal theta axis must lie inside [0, pi] with lo <= hi");
}

Engine::Engine(const ScenarioConfig &scenario)
    : s_(scenario), model_([&] {
        scenario.validate();
        auto [bs, bi] = case_branches(scenario.pol_case);
        return matching::IndexModel(scenario.crystal, scenario.pump, scenario.wavelengths, scenario.medium, bs,
                                    bi);
      }()) {}

pump::DeltaK Engine::delta_k_of(const Direction &s, const Direction &i) const {
  return pump::DeltaK::from_pair(model_.k_signal_vec(s), model_.k_idler_vec(i), model_.k_pump());
}

double Engine::polarizability_factor(const Direction &s, const Direction &i) const {
  const auto &c = s_.crystal;
  Direction s_cr = optics::lab_to_crystal(s, c.theta_c, c.phi_c).direction;
  Direction i_cr = optics::lab_to_crystal(i, c.theta_c, c.phi_c).direction;
  chi2::PolarizabilityVector p = chi2::polarizability_vector(c.d_tensor, s_.pol_case, s_cr, i_cr);
  return chi2::interaction_energy(1.0, s_.pump.polarization, chi2::to_lab(p, c.theta_c, c.phi_c));
}

cplx Engine::amplitude(const Direction &s, const Direction &i) const {
  cplx psi = pump::psi_tilde_analytic(s_.pump, s_.crystal.length_um, delta_k_of(s, i), s_.spectrum_form);
  if (s_.include_polarizability) psi *= polarizability_factor(s, i);
  return psi;
}

double Engine::group_index_signal(const Direction &d) const {
  if (s_.group_index == GroupIndex::Phase) return model_.n_signal(d);
  const double lam = s_.wavelengths.signal_um, h = 1e-4;
  double dn = (model_.n_signal_at(d, lam + h) - model_.n_signal_at(d, lam - h)) / (2.0 * h);
  return model_.n_signal(d) - lam * dn;
}

double Engine::group_index_idler(const Direction &d) const {
  if (s_.group_index == GroupIndex::Phase) return model_.n_idler(d);
  const double lam = s_.wavelengths.idler_um, h = 1e-4;
  double dn = (model_.n_idler_at(d, lam + h) - model_.n_idler_at(d, lam - h)) / (2.0 * h);
  return model_.n_idler(d) - lam * dn;
}

double Engine::jacobian(const Direction &s, const Direction &i) const {
  if (!s_.include_jacobian) return 1.0;
  double ks = model_.k_signal(s), ki = model_.k_idler(i);
  return ks * ks * std::sin(s.theta()) * group_index_signal(s) / kSpeedOfLight * ki * ki *
         std::sin(i.theta()) * group_index_idler(i) / kSpeedOfLight;
}

double Engine::probability(const Direction &s, const Direction &i) const {
  double j = jacobian(s, i);
  return std::norm(amplitude(s, i)) * j * j;
}

const char *to_string(Quantity q) {
  switch (q) {
  case Quantity::Amplitude: return "amplitude";
  case Quantity::Probability: return "probability";
  case Quantity::InteractionEnergy: return "V_I";
  }
  return "?";
}

double AmplitudeGrid::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

namespace {

template <class F> AmplitudeGrid evaluate_grid(const ScenarioConfig &scenario, Quantity q, int workers, F node) {
  AmplitudeGrid g;
  g.theta = scenario.signal_theta.values();
  g.phi = scenario.signal_phi.values();
  g.quantity = q;
  const std::size_t nt = g.theta.size(), np = g.phi.size();
  g.values.assign(nt * np, 0.0);
  if (q == Quantity::Amplitude) g.complex_values.assign(nt * np, cplx{});
  std::vector<unsigned char> bad(nt * np, 0);
  parallel_for(nt * np, workers, [&](std::size_t k) {
    std::size_t i = k / np, j = k % np;
    Direction ds = Direction::lab(g.theta[i], g.phi[j]);
    cplx v = node(ds);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      bad[k] = 1;
      return;
    }
    if (q == Quantity::Amplitude) {
      g.complex_values[k] = v;
      g.values[k] = std::abs(v);
    } else {
      g.values[k] = v.real();
    }
  });
  g.nonfinite_count = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
  return g;
}

} // namespace

AmplitudeGrid coincidence_grid(const ScenarioConfig &scenario, int workers) {
  Engine e(scenario);
  const Direction di = scenario.idler_detector;
  return evaluate_grid(scenario, Quantity::Probability, workers,
                       [&](const Direction &ds) { return cplx(e.probability(ds, di), 0.0); });
}

AmplitudeGrid amplitude_grid(const ScenarioConfig &scenario, int workers) {
  Engine e(scenario);
  const Direction di = scenario.idler_detector;
  return evaluate_grid(scenario, Quantity::Amplitude, workers,
                       [&](const Direction &ds) { return e.amplitude(ds, di); });
}

AmplitudeGrid interaction_grid(const ScenarioConfig &scenario, IdlerPlacement placement, int workers) {
  Engine e(scenario);
  const Direction det = scenario.idler_detector;
  return evaluate_grid(scenario, Quantity::InteractionEnergy, workers, [&](const Direction &ds) {
    Direction di = placement == IdlerPlacement::Detector ? det : Direction::lab(det.theta(), ds.phi() + kPi);
    return cplx(e.polarizability_factor(ds, di), 0.0);
  });
}

double integrate_2d(double a0, double a1, int na, double b0, double b1, int nb,
                    const std::function<double(double, double)> &f) {
  quad::Rule ra = quad::panel_rule(a0, a1, na);
  quad::Rule rb = quad::panel_rule(b0, b1, nb);
  double total = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rb.size(); ++j) row += rb.weights[j] * f(ra.nodes[i], rb.nodes[j]);
    total += ra.weights[i] * row;
  }
  return total;
}

AmplitudeGrid singles_grid(const ScenarioConfig &scenario, const SinglesWindow &w, int workers) {
  if (w.theta_nodes < 1 || w.phi_nodes < 1) fail(ErrorCode::InvalidArgument, "singles node counts must be positive");
  if (w.idler_theta.lo < 0.0 || w.idler_theta.hi > kPi || w.idler_theta.lo > w.idler_theta.hi)
    fail(ErrorCode::InvalidArgument, "idler theta window must lie inside [0, pi]");
  Engine e(scenario);
  return evaluate_grid(scenario, Quantity::Probability, workers, [&](const Direction &ds) {
    double v = integrate_2d(w.idler_theta.lo, w.idler_theta.hi, w.theta_nodes, w.idler_phi.lo, w.idler_phi.hi,
                            w.phi_nodes,
                            [&](double t, double p) { return e.probability(ds, Direction::lab(t, p)); });
    return cplx(v, 0.0);
  });
}

OAMSpectrum oam_spectrum_from_samples(std::span<const double> phi, std::span<const cplx> a) {
  const std::size_t n = phi.size();
  if (n != a.size()) fail(ErrorCode::InvalidArgument, "azimuth and sample counts differ");
  if (n < 64) fail(ErrorCode::InvalidArgument, "OAM spectrum needs at least 64 ring samples");
  for (std::size_t j = 1; j < n; ++j) {
    double expect = phi[0] + kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    if (std::abs(std::remainder(phi[j] - expect, kTwoPi)) > 1e-9)
      fail(ErrorCode::InvalidArgument, "OAM spectrum needs a uniform azimuth grid");
  }
  double power = 0.0;
  for (const cplx &v : a) power += std::norm(v);
  if (!(power > 0.0)) fail(ErrorCode::AllZero, "amplitude vanishes on the whole ring");

  const int mmax = static_cast<int>(n / 2) - 1;
  std::vector<double> w(2 * mmax + 1);
  double total = 0.0;
  for (int m = -mmax; m <= mmax; ++m) {
    cplx c{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) c += a[j] * std::polar(1.0, -m * phi[j]);
    c /= static_cast<double>(n);
    w[m + mmax] = std::norm(c);
    total += w[m + mmax];
  }
  OAMSpectrum s;
  double best = -1.0;
  for (int m = -mmax; m <= mmax; ++m) {
    double v = w[m + mmax] / total;
    s.weights[m] = v;
    if (v > best) best = v, s.dominant_m = m;
  }
  double rest = 0.0;
  for (int m = -mmax; m <= mmax; ++m)
    if (m != s.dominant_m) rest += w[m + mmax];
  s.symmetry_defect = rest / total;
  return s;
}

OAMSpectrum oam_spectrum(const ScenarioConfig &scenario, const matching::RingSolution &signal,
                         const matching::RingSolution &idler, const IdlerLock &lock, int workers) {
  const std::size_t n = signal.samples.size();
  bool antipodal = std::holds_alternative<AntipodalLock>(lock);
  if (antipodal && idler.samples.size() != n) fail(ErrorCode::InvalidArgument, "ring sample counts differ");
  for (std::size_t j = 0; j < n; ++j)
    if (!signal.samples[j].converged || (antipodal && !idler.samples[j].converged))
      fail(ErrorCode::NoRoot, "OAM spectrum needs every ring sample converged");
  Engine e(scenario);
  std::vector<double> phi(n);
  std::vector<cplx> a(n);
  parallel_for(n, workers, [&](std::size_t j) {
    const auto &s = signal.samples[j];
    Direction ds = Direction::lab(s.theta, s.phi);
    Direction di = antipodal ? Direction::lab(idler.samples[j].theta, idler.samples[j].phi)
                             : std::get<FixedLock>(lock).detector;
    phi[j] = s.phi;
    a[j] = e.amplitude(ds, di);
  });
  return oam_spectrum_from_samples(phi, a);
}

std::vector<double> uniform_azimuths(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "azimuth count must be positive");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[j] = kTwoPi * j / n;
  return v;
}

std::pair<matching::RingSolution, matching::RingSolution> fixed_circles(double theta_s, double theta_i, int n,
                                                                        const matching::Wavelengths &wl) {
  matching::RingSolution s, i;
  s.branch = matching::RingBranch::Signal;
  i.branch = matching::RingBranch::Idler;
  s.wavelengths = i.wavelengths = wl;
  for (double p : uniform_azimuths(n)) {
    s.samples.push_back({p, theta_s, 0.0, 0.0, true});
    i.samples.push_back({optics::wrap_angle(p + kPi), theta_i, 0.0, 0.0, true});
  }
  return {s, i};
}

} // namespace spdc::engine
