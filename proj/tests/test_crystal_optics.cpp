#include <doctest.h>

#include <spdc/crystal_io.hpp>
#include <spdc/crystal_optics.hpp>
#include <spdc/error.hpp>

#include <Eigen/LU>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

using namespace spdc;
using namespace spdc::optics;

namespace {

// Independent evaluation of the dispersion formula, straight from the constants.
double sellmeier_oracle(double a, double b, double c, double d, double lam) {
  return std::sqrt(a + b / (lam * lam - c) - d * lam * lam);
}

Mat3 rz(double p) {
  Mat3 m;
  m << std::cos(p), std::sin(p), 0, -std::sin(p), std::cos(p), 0, 0, 0, 1;
  return m;
}

Mat3 ry(double t) {
  Mat3 m;
  m << std::cos(t), 0, -std::sin(t), 0, 1, 0, std::sin(t), 0, std::cos(t);
  return m;
}

Vec3 spherical(double t, double p) { return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)}; }

} // namespace

TEST_SUITE("crystal_optics") {

TEST_CASE("caption indexes from the BBO constants") {
  auto s = bbo_sellmeier();
  CHECK(std::abs(sellmeier_index(s, Branch::Ordinary, 0.3511) - 1.707) <= 5e-4);
  CHECK(std::abs(sellmeier_index(s, Branch::Extraordinary, 0.3511) - 1.578) <= 5e-4);
  CHECK(std::abs(sellmeier_index(s, Branch::Ordinary, 0.7022) - 1.665) <= 5e-4);
  CHECK(std::abs(sellmeier_index(s, Branch::Extraordinary, 0.7022) - 1.548) <= 5e-4);
}

TEST_CASE("sellmeier matches the direct formula") {
  auto s = bbo_sellmeier();
  for (double lam : {0.25, 0.3511, 0.5, 0.7022, 1.0}) {
    CHECK(sellmeier_index(s, Branch::Ordinary, lam) == doctest::Approx(sellmeier_oracle(2.7405, 0.0184, 0.0179, 0.0155, lam)).epsilon(1e-14));
    CHECK(sellmeier_index(s, Branch::Extraordinary, lam) == doctest::Approx(sellmeier_oracle(2.3730, 0.0128, 0.0156, 0.0044, lam)).epsilon(1e-14));
  }
}

TEST_CASE("sellmeier rejects wavelengths outside the range and unphysical sets") {
  auto s = bbo_sellmeier();
  CHECK_THROWS_AS(sellmeier_index(s, Branch::Ordinary, 0.2), Error);
  CHECK_THROWS_AS(sellmeier_index(s, Branch::Ordinary, 1.2), Error);
  try {
    sellmeier_index(s, Branch::Ordinary, 2.0);
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
  SellmeierCoefficients bad = s;
  bad.a = -5.0;
  bad.lambda_min_um = 0.3;
  CHECK_THROWS_AS(bad.validate(), Error);
  SellmeierCoefficients pole = s;
  pole.c = 0.25; // lambda^2 = c at 0.5 um
  CHECK_THROWS_AS(pole.validate(), Error);
}

TEST_CASE("rotation is Rz(phi_c) Ry(theta_c)") {
  CHECK((rotation_zy(0, 0).matrix() - Mat3::Identity()).norm() < 1e-15);
  Vec3 z = rotation_zy(deg(49.7), 0).apply(Vec3::UnitZ());
  CHECK(z.x() == doctest::Approx(-std::sin(deg(49.7))).epsilon(1e-14));
  CHECK(z.x() == doctest::Approx(-0.7627).epsilon(1e-4));
  CHECK(std::abs(z.y()) < 1e-15);
  CHECK(z.z() == doctest::Approx(0.6468).epsilon(1e-4));
  Mat3 r90 = rotation_zy(kPi / 2, 0).matrix();
  CHECK(r90(0, 2) == doctest::Approx(-1.0));
  CHECK(r90(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("rotation orthogonality over random angles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(0, kPi / 2), p(0, kTwoPi);
  for (int k = 0; k < 10000; ++k) {
    double tc = t(rng), pc = p(rng);
    Mat3 m = rotation_zy(tc, pc).matrix();
    REQUIRE((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(std::abs(m.determinant() - 1.0) < 1e-12);
    REQUIRE((m - rz(pc) * ry(tc)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("direction carries its frame") {
  Direction d = Direction::lab(0.3, -0.5);
  CHECK(d.phi() == doctest::Approx(kTwoPi - 0.5));
  CHECK(std::abs(d.unit_vector().norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(d.require(Frame::Crystal, "test"), Error);
  CHECK_THROWS_AS(Direction::lab(-0.1, 0.0), Error);
  CHECK_THROWS_AS(lab_to_crystal(Direction::crystal(0.1, 0.0), 0.1, 0.0), Error);
}

TEST_CASE("lab to crystal conversion") {
  SUBCASE("identity rotation") {
    auto c = lab_to_crystal(Direction::lab(0.4, 1.3), 0, 0).direction;
    CHECK(c.theta() == doctest::Approx(0.4));
    CHECK(c.phi() == doctest::Approx(1.3));
    CHECK(c.frame() == Frame::Crystal);
  }
  SUBCASE("pump axis maps to the tilt") {
    auto c = lab_to_crystal(Direction::lab(0, 0), deg(49.7), 0).direction;
    CHECK(c.theta() == doctest::Approx(deg(49.7)).epsilon(1e-14));
  }
  SUBCASE("closed trigonometric form agrees with the rotated vector") {
    Direction d = Direction::lab(deg(4.66), kPi);
    auto c = lab_to_crystal(d, deg(49.7), 0).direction;
    auto printed = printed_crystal_angles(d, deg(49.7), 0);
    CHECK(std::abs(c.theta() - printed.theta_cr) < 1e-10);
    // the folded azimuth sits near the acos branch point here, so compare cosines
    CHECK(std::abs(std::cos(printed.phi_cr_folded) - std::abs(std::cos(c.phi()))) < 1e-12);
    Vec3 expect = rz(0) * ry(deg(49.7)) * spherical(deg(4.66), kPi);
    CHECK((c.unit_vector() - expect).norm() < 1e-10);
  }
  SUBCASE("degenerate axis is flagged") {
    Direction d = crystal_to_lab(Direction::crystal(0, 0), deg(30), deg(20)).direction;
    auto conv = lab_to_crystal(d, deg(30), deg(20));
    CHECK(conv.degenerate_axis);
    CHECK(conv.direction.phi() == 0.0);
    CHECK_THROWS_AS(lab_to_crystal_strict(d, deg(30), deg(20)), Error);
  }
}

TEST_CASE("random round trips and the sign of phi_cr") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0.01, kPi - 0.01), p(0, kTwoPi), tc(0, kPi / 2);
  for (int k = 0; k < 10000; ++k) {
    Direction d = Direction::lab(t(rng), p(rng));
    double a = tc(rng), b = p(rng);
    auto c = lab_to_crystal(d, a, b).direction;
    Vec3 expect = rz(b) * ry(a) * d.unit_vector();
    REQUIRE((c.unit_vector() - expect).norm() < 1e-10);
    auto back = crystal_to_lab(c, a, b).direction;
    REQUIRE((back.unit_vector() - d.unit_vector()).norm() < 1e-10);
  }
}

TEST_CASE("mixed extraordinary index") {
  PrincipalIndexes n{1.665, 1.548};
  CHECK(extraordinary_index_mixed(n, Vec3::UnitZ()) == doctest::Approx(1.665));
  CHECK(extraordinary_index_mixed(n, Vec3::UnitX()) == doctest::Approx(1.548));
  Vec3 s45 = Vec3(1, 0, 1).normalized();
  // direct evaluation with the rounded 0.7022 um indexes gives 1.60332, not the quoted 1.6046
  double oracle = 1.0 / std::sqrt(0.5 / (1.548 * 1.548) + 0.5 / (1.665 * 1.665));
  CHECK(oracle == doctest::Approx(1.60332).epsilon(1e-5));
  CHECK(extraordinary_index_mixed(n, s45) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(std::abs(extraordinary_index_mixed(n, s45) - 1.6046) > 1e-3);
  CHECK(extraordinary_index_mixed(bbo_sellmeier(), 0.7022, s45) == doctest::Approx(1.603460).epsilon(1e-6));
  // Oracle: the Fresnel quadratic solved numerically for eps by bisection.
  auto pr = principal_indexes(bbo_sellmeier(), 0.7022);
  double lo = pr.n_e * pr.n_e + 1e-9, hi = pr.n_o * pr.n_o - 1e-9;
  double flo = fresnel_cleared_residual(pr, s45, lo);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi), fm = fresnel_cleared_residual(pr, s45, mid);
    if ((fm > 0) == (flo > 0))
      lo = mid, flo = fm;
    else
      hi = mid;
  }
  CHECK(std::sqrt(0.5 * (lo + hi)) == doctest::Approx(extraordinary_index_mixed(pr, s45)).epsilon(1e-10));
}

TEST_CASE("mixed index bounds and both Fresnel roots") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  auto pr = principal_indexes(bbo_sellmeier(), 0.7022);
  for (int k = 0; k < 10000; ++k) {
    Vec3 s(g(rng), g(rng), g(rng));
    s.normalize();
    double n = extraordinary_index_mixed(pr, s);
    REQUIRE(n >= std::min(pr.n_o, pr.n_e) - 1e-15);
    REQUIRE(n <= std::max(pr.n_o, pr.n_e) + 1e-15);
    REQUIRE(std::abs(fresnel_cleared_residual(pr, s, pr.n_o * pr.n_o)) < 1e-9);
    REQUIRE(std::abs(fresnel_cleared_residual(pr, s, n * n)) < 1e-9);
  }
}

TEST_CASE("signal index is ordinary and isotropic") {
  auto s = bbo_sellmeier();
  double a = signal_index(s, Direction::lab(0.1, 0.2), deg(49.7), 0, 0.7022);
  double b = signal_index(s, Direction::lab(1.1, 4.0), deg(49.7), 0, 0.7022);
  CHECK(a == b);
  CHECK(std::abs(a - 1.665) <= 5e-4);
  CHECK(std::abs(signal_index(s, Direction::lab(0.1, 0.2), deg(49.7), 0, 0.3511) - 1.707) <= 5e-4);
}

TEST_CASE("idler index closed form") {
  auto s = bbo_sellmeier();
  auto pr = principal_indexes(s, 0.7022);
  double tc = deg(49.7);
  double expect = pr.n_e * pr.n_o /
                  std::sqrt(pr.n_e * pr.n_e * std::pow(std::cos(tc), 2) + pr.n_o * pr.n_o * std::pow(std::sin(tc), 2));
  CHECK(idler_index(s, Direction::lab(0, 0), tc, 0, 0.7022) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(expect == doctest::Approx(1.5941).epsilon(1e-4 / 1.6));
  CHECK(idler_index(s, Direction::lab(0, 0), 0, 0, 0.7022) == doctest::Approx(pr.n_o).epsilon(1e-14));
  CHECK(idler_index(s, Direction::lab(0.1, 0.7), tc, 0, 0.7022) ==
        doctest::Approx(idler_index(s, Direction::lab(0.1, -0.7), tc, 0, 0.7022)).epsilon(1e-14));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(0, kPi), p(0, kTwoPi);
  for (int k = 0; k < 10000; ++k) {
    Direction d = Direction::lab(t(rng), p(rng));
    double composed = extraordinary_index_mixed(pr, ry(tc) * d.unit_vector());
    REQUIRE(std::abs(idler_index_closed_form(pr, tc, d.theta(), d.phi()) - composed) < 1e-10);
    double pc = p(rng);
    REQUIRE(std::abs(idler_index(s, d, tc, pc, 0.7022) -
                     extraordinary_index_mixed(pr, rz(pc) * ry(tc) * d.unit_vector())) < 1e-10);
  }
}

TEST_CASE("pump index") {
  auto s = bbo_sellmeier();
  auto pr = principal_indexes(s, 0.3511);
  CHECK(pump_index(pr, 0) == doctest::Approx(pr.n_o));
  CHECK(pump_index(pr, kPi / 2) == doctest::Approx(pr.n_e));
  CHECK(std::abs(pump_index(s, deg(49.7), 0.3511) - 1.6286) <= 2e-4);
  // the rounded indexes land 2.9e-4 below 1.6286; the Sellmeier indexes above are within tolerance
  double c2 = std::pow(std::cos(deg(49.7)), 2), s2 = 1.0 - c2;
  double oracle = 1.707 * 1.578 / std::sqrt(1.578 * 1.578 * c2 + 1.707 * 1.707 * s2);
  CHECK(pump_index(PrincipalIndexes{1.707, 1.578}, deg(49.7)) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == doctest::Approx(1.62831).epsilon(1e-5));
}

TEST_CASE("snell exit") {
  CHECK(snell_exit(Direction::lab(0, 0), 1.665).theta() == 0.0);
  Direction out = snell_exit(Direction::lab(deg(4.66), 1.0), 1.665);
  CHECK(out.theta() == doctest::Approx(std::asin(1.665 * std::sin(deg(4.66)))).epsilon(1e-14));
  CHECK(out.theta() == doctest::Approx(deg(7.78)).epsilon(0.01));
  CHECK(out.phi() == doctest::Approx(1.0));
  double t = std::asin(1.2 / 1.665);
  try {
    snell_exit(Direction::lab(t, 0), 1.665);
    FAIL("expected total internal reflection");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::TotalInternalReflection);
  }
}

TEST_CASE("crystal json round trip and presets") {
  CrystalConfig c = bbo_preset();
  auto j = crystal_to_json(c);
  CrystalConfig back = crystal_from_json(j);
  CHECK(back.theta_c == doctest::Approx(c.theta_c));
  CHECK(back.sellmeier.a == c.sellmeier.a);
  CHECK(back.d_tensor(0, 4) == 1.0);

  nlohmann::json over = {{"preset", "BBO"}, {"theta_c_deg", 30.0}, {"length_um", 500}};
  CrystalConfig o = crystal_from_json(over);
  CHECK(o.theta_c == doctest::Approx(deg(30)));
  CHECK(o.length_um == 500);

  nlohmann::json bad = {{"preset", "BBO"}, {"theta_c", 30.0}};
  CHECK_THROWS_AS(crystal_from_json(bad), Error);
  nlohmann::json unknown = {{"preset", "BBO"}, {"colour", "red"}};
  CHECK_THROWS_AS(crystal_from_json(unknown), Error);
  CHECK_THROWS_AS(load_preset("unobtainium"), Error);

  auto dir = std::filesystem::temp_directory_path() / "spdc_preset_test";
  std::filesystem::create_directories(dir);
  nlohmann::json custom = crystal_to_json(c);
  custom["name"] = "BBO-thin";
  custom["length_um"] = 100.0;
  std::ofstream(dir / "thin.json") << custom.dump();
  setenv("SPDC_SIM_PRESET_DIR", dir.c_str(), 1);
  CrystalConfig thin = load_preset("thin");
  unsetenv("SPDC_SIM_PRESET_DIR");
  CHECK(thin.name == "BBO-thin");
  CHECK(thin.length_um == 100.0);
  std::filesystem::remove_all(dir);
}

}
