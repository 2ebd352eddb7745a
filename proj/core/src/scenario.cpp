#include <spdc/config_reader.hpp>
#include <spdc/crystal_io.hpp>
#include <spdc/error.hpp>
#include <spdc/output.hpp>
#include <spdc/scenario.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace spdc::scenario {

using config::ObjectReader;
using optics::kPi;

namespace {

template <class E, std::size_t N>
E parse_enum(ObjectReader &r, const std::string &key, const std::pair<const char *, E> (&table)[N], E fallback) {
  auto v = r.string(key);
  if (!v) return fallback;
  for (const auto &[name, value] : table)
    if (*v == name) return value;
  std::string allowed;
  for (const auto &[name, value] : table) allowed += (allowed.empty() ? "" : " | ") + std::string(name);
  r.error(key, "expected one of " + allowed);
}

template <class E, std::size_t N> const char *enum_name(E e, const std::pair<const char *, E> (&table)[N]) {
  for (const auto &[name, value] : table)
    if (value == e) return name;
  return "?";
}

constexpr std::pair<const char *, chi2::PolarizationCase> kCases[] = {
    {"oo", chi2::PolarizationCase::OO},
    {"ee", chi2::PolarizationCase::EE},
    {"eo", chi2::PolarizationCase::EO},
    {"oe", chi2::PolarizationCase::OE},
};
constexpr std::pair<const char *, matching::MediumModel> kMedia[] = {
    {"anisotropic", matching::MediumModel::Anisotropic},
    {"isotropic", matching::MediumModel::Isotropic},
};
constexpr std::pair<const char *, matching::Pairing> kPairings[] = {
    {"antipodal", matching::Pairing::Antipodal},
    {"scan", matching::Pairing::Scan},
};
constexpr std::pair<const char *, matching::SolveMode> kModes[] = {
    {"coupled", matching::SolveMode::Coupled},
    {"sequential", matching::SolveMode::Sequential},
};
constexpr std::pair<const char *, engine::GroupIndex> kGroupIndexes[] = {
    {"phase", engine::GroupIndex::Phase},
    {"finite_difference", engine::GroupIndex::FiniteDifference},
};
constexpr std::pair<const char *, pump::SpectrumForm> kForms[] = {
    {"exact", pump::SpectrumForm::Exact},
    {"printed", pump::SpectrumForm::Printed},
};
constexpr std::pair<const char *, SpectrumSource> kSources[] = {
    {"ring", SpectrumSource::Ring},
    {"circle", SpectrumSource::Circle},
    {"synthetic", SpectrumSource::Synthetic},
};
constexpr std::pair<const char *, engine::IdlerPlacement> kPlacements[] = {
    {"detector", engine::IdlerPlacement::Detector},
    {"antipodal", engine::IdlerPlacement::Antipodal},
};

int positive_int(ObjectReader &r, const std::string &key, int fallback, int min_value = 1) {
  auto v = r.integer(key);
  if (!v) return fallback;
  if (*v < min_value || *v > 1000000) r.error(key, "must be in [" + std::to_string(min_value) + ", 1000000]");
  return static_cast<int>(*v);
}

engine::GridAxis parse_axis(ObjectReader r, int min_nodes) {
  engine::GridAxis a;
  a.lo = r.require_angle("lo");
  a.hi = r.require_angle("hi");
  auto n = r.integer("n");
  if (!n) r.error("n", "required");
  if (*n < min_nodes || *n > 100000) r.error("n", "must be in [" + std::to_string(min_nodes) + ", 100000]");
  a.n = static_cast<int>(*n);
  if (a.hi < a.lo) r.error("hi", "must not be below lo");
  r.finish();
  return a;
}

void parse_pump(const json *doc, Scenario &s) {
  double lambda = 0.3511, zr = 2.0e4;
  int l = 0, p = 0;
  pump::cplx amp{1.0, 0.0};
  optics::Vec3 pol = optics::Vec3::UnitX();
  if (doc) {
    ObjectReader r(*doc, "pump");
    if (auto v = r.length_um("wavelength")) lambda = *v;
    if (auto v = r.length_um("rayleigh_range")) zr = *v;
    auto li = r.integer("l");
    if (li) {
      if (*li < 0 || *li > pump::kMaxModeIndex) r.error("l", "must be in [0, 20]");
      l = static_cast<int>(*li);
    }
    auto pi = r.integer("p");
    if (pi) {
      if (*pi < 0 || *pi > pump::kMaxModeIndex) r.error("p", "must be in [0, 20]");
      p = static_cast<int>(*pi);
    }
    if (const json *a = r.raw("amplitude")) {
      if (a->is_number())
        amp = {a->get<double>(), 0.0};
      else if (a->is_array() && a->size() == 2 && (*a)[0].is_number() && (*a)[1].is_number())
        amp = {(*a)[0].get<double>(), (*a)[1].get<double>()};
      else
        r.error("amplitude", "expected a number or [re, im]");
    }
    if (const json *v = r.raw("polarization")) {
      if (!v->is_array() || v->size() != 3) r.error("polarization", "expected [x, y, z]");
      for (int k = 0; k < 3; ++k) {
        if (!(*v)[k].is_number()) r.error("polarization", "expected numbers");
        pol[k] = (*v)[k].get<double>();
      }
      if (std::abs(pol.norm() - 1.0) > 1e-9) r.error("polarization", "must be a unit vector");
      if (std::abs(pol.z()) > 1e-9) r.error("polarization", "must be transverse to the pump axis");
    }
    r.finish();
  }
  s.engine.pump = pump::PumpBeam::in_crystal(s.engine.crystal, lambda, l, p, zr, amp, pol);
}

matching::Wavelengths parse_wavelengths(const json *doc, double pump_um) {
  matching::Wavelengths wl = matching::Wavelengths::degenerate(pump_um);
  if (!doc) return wl;
  ObjectReader r(*doc, "wavelengths");
  auto ls = r.length_um("signal");
  auto li = r.length_um("idler");
  r.finish();
  if (ls && li) {
    wl.signal_um = *ls;
    wl.idler_um = *li;
  } else if (ls) {
    wl.signal_um = *ls;
    wl.idler_um = 1.0 / (1.0 / pump_um - 1.0 / *ls);
  } else if (li) {
    wl.idler_um = *li;
    wl.signal_um = 1.0 / (1.0 / pump_um - 1.0 / *li);
  }
  if (!(wl.signal_um > 0.0) || !(wl.idler_um > 0.0))
    r.error("", "signal and idler wavelengths must exceed the pump wavelength");
  wl.check_energy();
  return wl;
}

void parse_rings(const json *doc, RingsSection &rs) {
  if (!doc) return;
  ObjectReader r(*doc, "rings");
  rs.n_phi = positive_int(r, "n_phi", rs.n_phi);
  rs.options.pairing = parse_enum(r, "pairing", kPairings, rs.options.pairing);
  rs.options.mode = parse_enum(r, "mode", kModes, rs.options.mode);
  if (auto v = r.number("xi_star")) {
    if (!(*v > 0.0)) r.error("xi_star", "must be positive");
    rs.options.xi_star = *v;
  }
  if (auto v = r.angle("theta_max")) {
    if (!(*v > 0.0) || *v >= kPi / 2) r.error("theta_max", "must lie in (0, pi/2)");
    rs.options.theta_max = *v;
  }
  rs.options.scan_steps = positive_int(r, "scan_steps", rs.options.scan_steps, 8);
  if (auto f = r.object("fit")) {
    if (auto v = f->number("zeta")) rs.fit.zeta = *v;
    if (auto v = f->number("eta")) rs.fit.eta = *v;
    if (auto v = f->number("nu")) rs.fit.nu = *v;
    if (auto v = f->number("mu")) rs.fit.mu = *v;
    f->finish();
  }
  r.finish();
}

engine::SinglesWindow parse_singles(ObjectReader r) {
  engine::SinglesWindow w;
  auto t = r.object("idler_theta");
  auto p = r.object("idler_phi");
  if (!t || !p) r.error("", "idler_theta and idler_phi are required");
  w.idler_theta = {t->require_angle("lo"), t->require_angle("hi"), 2};
  w.idler_phi = {p->require_angle("lo"), p->require_angle("hi"), 2};
  t->finish();
  p->finish();
  w.theta_nodes = positive_int(r, "theta_nodes", w.theta_nodes);
  w.phi_nodes = positive_int(r, "phi_nodes", w.phi_nodes);
  r.finish();
  return w;
}

void parse_coincidence(const json *doc, Scenario &s) {
  if (!doc) return;
  auto &c = s.coincidence;
  ObjectReader r(*doc, "coincidence");
  if (auto d = r.object("detector")) {
    if (auto v = d->angle("ring_phi")) {
      c.detector_mode = DetectorMode::RingPoint;
      c.detector_ring_phi = *v;
    } else {
      c.detector_mode = DetectorMode::Explicit;
      double th = d->require_angle("theta"), ph = d->require_angle("phi");
      if (th < 0.0 || th > kPi) d->error("theta", "must lie in [0, pi]");
      c.detector = optics::Direction::lab(th, ph);
    }
    if (c.detector_mode == DetectorMode::RingPoint && (d->has("theta_deg") || d->has("theta_rad")))
      d->error("", "give either ring_phi or theta/phi");
    d->finish();
  }
  if (auto g = r.object("grid")) {
    if (g->has("theta") || g->has("phi")) {
      c.grid_mode = GridMode::Explicit;
      auto t = g->object("theta");
      auto p = g->object("phi");
      if (!t || !p) g->error("", "explicit grids need both theta and phi axes");
      c.theta_axis = parse_axis(*t, 2);
      c.phi_axis = parse_axis(*p, 2);
      if (c.theta_axis.lo < 0.0 || c.theta_axis.hi > kPi) g->error("theta", "must lie in [0, pi]");
    } else {
      c.grid_mode = GridMode::AroundConjugate;
      if (auto v = g->angle("theta_half_width")) c.theta_half_width = *v;
      if (auto v = g->angle("phi_half_width")) c.phi_half_width = *v;
      if (!(c.theta_half_width > 0.0)) g->error("theta_half_width", "must be positive");
      if (!(c.phi_half_width > 0.0) || c.phi_half_width > kPi) g->error("phi_half_width", "must lie in (0, pi]");
      c.n_theta = positive_int(*g, "n_theta", c.n_theta, 2);
      c.n_phi = positive_int(*g, "n_phi", c.n_phi, 2);
    }
    g->finish();
  }
  if (auto v = r.boolean("include_polarizability")) s.engine.include_polarizability = *v;
  if (auto v = r.boolean("include_jacobian")) s.engine.include_jacobian = *v;
  s.engine.group_index = parse_enum(r, "group_index", kGroupIndexes, s.engine.group_index);
  s.engine.spectrum_form = parse_enum(r, "spectrum_form", kForms, s.engine.spectrum_form);
  if (auto w = r.object("singles")) c.singles = parse_singles(*w);
  r.finish();
}

void parse_spectrum(const json *doc, SpectrumSection &sp) {
  if (!doc) return;
  ObjectReader r(*doc, "spectrum");
  sp.source = parse_enum(r, "source", kSources, sp.source);
  sp.n_phi = positive_int(r, "n_phi", sp.n_phi);
  if (auto v = r.string("idler_lock")) {
    if (*v == "antipodal")
      sp.antipodal_lock = true;
    else if (*v == "detector")
      sp.antipodal_lock = false;
    else
      r.error("idler_lock", "expected antipodal | detector");
  }
  if (auto syn = r.object("synthetic")) {
    if (auto m = syn->integer("m")) sp.synthetic_m = static_cast<int>(*m);
    if (auto v = syn->number("modulation")) {
      if (*v < 0.0 || *v >= 1.0) syn->error("modulation", "must lie in [0, 1)");
      sp.synthetic_modulation = *v;
    }
    syn->finish();
  }
  r.finish();
}

json axis_json(const engine::GridAxis &a) { return {{"lo_rad", a.lo}, {"hi_rad", a.hi}, {"n", a.n}}; }

} // namespace

Scenario scenario_from_json(const json &doc) {
  Scenario s;
  ObjectReader r(doc, "");
  r.string("description");
  if (const json *c = r.raw("crystal"))
    s.engine.crystal = optics::crystal_from_json(*c, "crystal");
  else
    s.engine.crystal = optics::load_preset("BBO");

  const json *pump_doc = r.raw("pump");
  parse_pump(pump_doc, s);
  s.engine.wavelengths = parse_wavelengths(r.raw("wavelengths"), s.engine.pump.lambda_um);
  s.engine.pol_case = parse_enum(r, "case", kCases, s.engine.pol_case);
  s.engine.medium = parse_enum(r, "medium", kMedia, s.engine.medium);
  parse_rings(r.raw("rings"), s.rings);
  parse_coincidence(r.raw("coincidence"), s);
  parse_spectrum(r.raw("spectrum"), s.spectrum);
  if (auto p = r.object("polarizability")) {
    s.polarizability.placement = parse_enum(*p, "placement", kPlacements, s.polarizability.placement);
    p->finish();
  }
  if (auto q = r.object("quadrature")) {
    auto &spec = s.quadrature;
    spec.r_nodes = positive_int(*q, "r_nodes", spec.r_nodes, 2);
    spec.phi_nodes = positive_int(*q, "phi_nodes", spec.phi_nodes, 2);
    spec.z_nodes = positive_int(*q, "z_nodes", spec.z_nodes, 2);
    if (auto v = q->number("r_cutoff_waists")) spec.r_cutoff_waists = *v;
    if (auto v = q->number("tolerance")) spec.tolerance = *v;
    if (auto v = q->integer("max_doublings")) spec.max_doublings = static_cast<int>(*v);
    q->finish();
    try {
      spec.validate();
    } catch (const Error &e) {
      q->error("", e.what());
    }
  }
  r.finish();
  return s;
}

Scenario load_scenario_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error &e) {
    fail(ErrorCode::Config, path + ": " + e.what());
  }
  return scenario_from_json(doc);
}

json scenario_to_json(const Scenario &s) {
  const auto &e = s.engine;
  json j;
  j["crystal"] = optics::crystal_to_json(e.crystal);
  j["pump"] = {{"wavelength_um", e.pump.lambda_um},
               {"l", e.pump.l},
               {"p", e.pump.p},
               {"rayleigh_range_um", e.pump.z_rayleigh_um},
               {"amplitude", {e.pump.amplitude.real(), e.pump.amplitude.imag()}},
               {"polarization", {e.pump.polarization.x(), e.pump.polarization.y(), e.pump.polarization.z()}},
               {"k_p_per_um", e.pump.k_p}};
  j["wavelengths"] = {{"signal_um", e.wavelengths.signal_um}, {"idler_um", e.wavelengths.idler_um}};
  j["case"] = enum_name(e.pol_case, kCases);
  j["medium"] = enum_name(e.medium, kMedia);
  j["rings"] = {{"n_phi", s.rings.n_phi},
                {"pairing", enum_name(s.rings.options.pairing, kPairings)},
                {"mode", enum_name(s.rings.options.mode, kModes)},
                {"xi_star", s.rings.options.xi_star},
                {"theta_max_rad", s.rings.options.theta_max},
                {"scan_steps", s.rings.options.scan_steps},
                {"fit",
                 {{"zeta", s.rings.fit.zeta}, {"eta", s.rings.fit.eta}, {"nu", s.rings.fit.nu}, {"mu", s.rings.fit.mu}}}};
  const auto &c = s.coincidence;
  json det;
  if (c.detector_mode == DetectorMode::RingPoint)
    det = {{"ring_phi_rad", c.detector_ring_phi}};
  else
    det = {{"theta_rad", c.detector.theta()}, {"phi_rad", c.detector.phi()}};
  json grid;
  if (c.grid_mode == GridMode::Explicit)
    grid = {{"theta", axis_json(c.theta_axis)}, {"phi", axis_json(c.phi_axis)}};
  else
    grid = {{"theta_half_width_rad", c.theta_half_width},
            {"phi_half_width_rad", c.phi_half_width},
            {"n_theta", c.n_theta},
            {"n_phi", c.n_phi}};
  j["coincidence"] = {{"detector", det},
                      {"grid", grid},
                      {"include_polarizability", e.include_polarizability},
                      {"include_jacobian", e.include_jacobian},
                      {"group_index", enum_name(e.group_index, kGroupIndexes)},
                      {"spectrum_form", enum_name(e.spectrum_form, kForms)}};
  if (c.singles)
    j["coincidence"]["singles"] = {
        {"idler_theta", {{"lo_rad", c.singles->idler_theta.lo}, {"hi_rad", c.singles->idler_theta.hi}}},
        {"idler_phi", {{"lo_rad", c.singles->idler_phi.lo}, {"hi_rad", c.singles->idler_phi.hi}}},
        {"theta_nodes", c.singles->theta_nodes},
        {"phi_nodes", c.singles->phi_nodes}};
  j["spectrum"] = {{"source", enum_name(s.spectrum.source, kSources)},
                   {"n_phi", s.spectrum.n_phi},
                   {"idler_lock", s.spectrum.antipodal_lock ? "antipodal" : "detector"},
                   {"synthetic", {{"m", s.spectrum.synthetic_m}, {"modulation", s.spectrum.synthetic_modulation}}}};
  j["polarizability"] = {{"placement", enum_name(s.polarizability.placement, kPlacements)}};
  j["quadrature"] = {{"r_nodes", s.quadrature.r_nodes},
                     {"phi_nodes", s.quadrature.phi_nodes},
                     {"z_nodes", s.quadrature.z_nodes},
                     {"r_cutoff_waists", s.quadrature.r_cutoff_waists},
                     {"tolerance", s.quadrature.tolerance},
                     {"max_doublings", s.quadrature.max_doublings}};
  return j;
}

std::string scenario_hash(const Scenario &s) { return output::git_blob_sha1(scenario_to_json(s).dump()); }

namespace {

matching::IndexModel scenario_model(const engine::ScenarioConfig &e) {
  auto [bs, bi] = engine::case_branches(e.pol_case);
  return matching::IndexModel(e.crystal, e.pump, e.wavelengths, e.medium, bs, bi);
}

} // namespace

std::pair<matching::RingSolution, matching::RingSolution> solve_scenario_rings(const Scenario &s, int workers) {
  matching::IndexModel model = scenario_model(s.engine);
  auto opts = s.rings.options;
  opts.workers = workers;
  std::vector<double> phi = engine::uniform_azimuths(s.rings.n_phi);
  return matching::solve_rings(model, s.engine.pump, phi, opts);
}

ResolvedCoincidence resolve_coincidence(const Scenario &s) {
  const auto &c = s.coincidence;
  ResolvedCoincidence out;
  out.config = s.engine;

  double det_phi = c.detector_mode == DetectorMode::RingPoint ? c.detector_ring_phi : c.detector.phi();
  double phi_conj = optics::wrap_angle(det_phi + kPi);
  matching::IndexModel model = scenario_model(s.engine);
  auto opts = s.rings.options;
  opts.workers = 1;
  const double grid[] = {phi_conj};
  auto [sig, idl] = matching::solve_rings(model, s.engine.pump, grid, opts);
  if (!sig.samples[0].converged || !idl.samples[0].converged)
    fail(ErrorCode::NoRoot, "no ring point conjugate to the idler detector");
  out.conjugate_theta = sig.samples[0].theta;
  out.conjugate_phi = sig.samples[0].phi;
  out.config.idler_detector = c.detector_mode == DetectorMode::RingPoint
                                  ? optics::Direction::lab(idl.samples[0].theta, idl.samples[0].phi)
                                  : c.detector;

  if (c.grid_mode == GridMode::Explicit) {
    out.config.signal_theta = c.theta_axis;
    out.config.signal_phi = c.phi_axis;
  } else {
    double lo = std::max(0.0, out.conjugate_theta - c.theta_half_width);
    out.config.signal_theta = {lo, out.conjugate_theta + c.theta_half_width, c.n_theta};
    out.config.signal_phi = {out.conjugate_phi - c.phi_half_width, out.conjugate_phi + c.phi_half_width, c.n_phi};
  }
  out.config.validate();
  return out;
}

} // namespace spdc::scenario
