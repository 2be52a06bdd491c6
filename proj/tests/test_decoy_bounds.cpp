#include <doctest.h>

#include <cmath>
#include <functional>

#include "lsa/decoy_bounds.hpp"
#include "lsa/fock_oracle.hpp"
#include "lsa/optimize.hpp"

using namespace lsa;

namespace {

const IntensitySet kTriple = IntensitySet::make(0.6, 0.1, 0.01);

// Gains of a synthetic source whose n-photon yield and error are given;
// this is the linear system the decoy estimate inverts.
Observation synthetic_bb84(double mu, const std::function<double(int)>& yield, const std::function<double(int)>& err) {
  double g = 0, eg = 0;
  for (int n = 0; n <= 60; ++n) {
    const double w = poisson_weight(mu, n);
    g += w * yield(n);
    eg += w * yield(n) * err(n);
  }
  Observation o;
  o.z = {g, eg / g};
  o.x = o.z;
  return o;
}

Observation synthetic_mdi(double zeta, double omega, const std::function<double(int, int)>& yield) {
  double g = 0;
  for (int n = 0; n <= 40; ++n) {
    for (int m = 0; m <= 40; ++m) g += poisson_weight(zeta, n) * poisson_weight(omega, m) * yield(n, m);
  }
  Observation o;
  o.z = {g, 0.0};
  o.x = {g, 0.0};
  return o;
}

MdiObserved synthetic_mdi_set(const IntensitySet& in, const std::function<double(int, int)>& yield) {
  MdiObserved o;
  o.nu1_nu1 = synthetic_mdi(in.nu_1(), in.nu_1(), yield);
  o.nu2_nu2 = synthetic_mdi(in.nu_2(), in.nu_2(), yield);
  o.nu1_nu2 = synthetic_mdi(in.nu_1(), in.nu_2(), yield);
  o.nu2_nu1 = synthetic_mdi(in.nu_2(), in.nu_1(), yield);
  o.mus_mus = synthetic_mdi(in.mu_s(), in.mu_s(), yield);
  o.mus_nu2 = synthetic_mdi(in.mu_s(), in.nu_2(), yield);
  o.nu2_mus = synthetic_mdi(in.nu_2(), in.mu_s(), yield);
  return o;
}

// Y11 and e11 of the relay from the photon-level tables: probability of a
// Bell announcement given one photon each, for preparations in one basis.
struct Y11 {
  double y_z = 0, y_x = 0, e_x = 0;
};

Y11 oracle_y11(const LinkConfig& link) {
  const auto s = mdi_photon_stats(link, 1, 1);
  Y11 out;
  double err_x = 0;
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      if ((k < 2) != (j < 2)) continue;
      const double pp = 16 * s.p_c[0] * s.table[0][k][j];
      const double pm = 16 * s.p_c[1] * s.table[1][k][j];
      if (k < 2) {
        out.y_z += 0.25 * (pp + pm);
      } else {
        out.y_x += 0.25 * (pp + pm);
        err_x += 0.25 * (k == j ? pm : pp);
      }
    }
  }
  out.e_x = err_x / out.y_x;
  return out;
}

}  // namespace

TEST_CASE("bb84 estimate is exact when only vacuum and single photons click") {
  auto yield = [](int n) { return n == 0 ? 3e-5 : (n == 1 ? 0.04 : 0.0); };
  auto err = [](int n) { return n == 0 ? 0.5 : 0.02; };
  Bb84Observed o{synthetic_bb84(kTriple.mu_s(), yield, err), synthetic_bb84(kTriple.nu_1(), yield, err),
                 synthetic_bb84(kTriple.nu_2(), yield, err)};
  const auto b = estimate_bb84_bounds(o, kTriple);
  CHECK(b.y0_l == doctest::Approx(3e-5).epsilon(1e-9));
  CHECK(b.y1_l_z == doctest::Approx(0.04).epsilon(1e-9));
  CHECK(b.e1_u_x == doctest::Approx(0.02).epsilon(1e-8));

  // adding multi-photon clicks can only loosen the bound
  auto multi = [](int n) { return n == 0 ? 3e-5 : (n == 1 ? 0.04 : 0.3); };
  Bb84Observed om{synthetic_bb84(kTriple.mu_s(), multi, err), synthetic_bb84(kTriple.nu_1(), multi, err),
                  synthetic_bb84(kTriple.nu_2(), multi, err)};
  CHECK(estimate_bb84_bounds(om, kTriple).y1_l_z < 0.04);
}

TEST_CASE("mdi estimate is exact when only (1,1) pairs carry multi-photon-free yield") {
  const auto in = IntensitySet::make(0.5, 0.1, 0.005);
  auto yield = [](int n, int m) {
    if (n == 0 || m == 0) return 1e-5 * (1 + n + m);
    return (n == 1 && m == 1) ? 0.02 : 0.0;
  };
  const auto b = estimate_mdi_bounds(synthetic_mdi_set(in, yield), in);
  CHECK(b.y11_l_z == doctest::Approx(0.02).epsilon(1e-8));
  CHECK(b.y11_l_x == doctest::Approx(0.02).epsilon(1e-8));

  auto noisy = [](int n, int m) {
    if (n == 0 || m == 0) return 1e-5;
    return (n == 1 && m == 1) ? 0.02 : 0.05;
  };
  CHECK(estimate_mdi_bounds(synthetic_mdi_set(in, noisy), in).y11_l_z < 0.02);
}

TEST_CASE("honest bounds are valid against the photon-level oracle") {
  for (double km : {0.0, 10.0, 40.0, 80.0, 120.0}) {
    for (const auto& in : {IntensitySet::make(0.5, 0.1, 0.001), IntensitySet::make(0.8, 0.2, 0.02)}) {
      const LinkConfig link{km, {}};
      const auto truth = aggregate_yield(bb84_photon_stats(link, 1));
      const auto b = estimate_bb84_bounds(observe_bb84(link, in), in);
      CHECK(b.y1_l_z <= truth.y_z);
      CHECK(b.y1_l_x <= truth.y_x);
      CHECK(b.e1_u_x >= truth.e_x);
      CHECK(b.y0_l <= link.params.y0 * (1 + 1e-12));
    }
  }
  for (double km : {10.0, 40.0, 80.0}) {
    const LinkConfig link{km, {}};
    const auto in = IntensitySet::make(0.4, 0.05, 0.001);
    const auto truth = oracle_y11(link);
    const auto b = estimate_mdi_bounds(observe_mdi(link, in), in);
    CHECK(b.y11_l_z <= truth.y_z);
    CHECK(b.y11_l_x <= truth.y_x);
    CHECK(b.e11_u_x >= truth.e_x);
  }
}

TEST_CASE("noise-free channels give zero phase error") {
  ChannelParams clean;
  clean.y0 = 0.0;
  clean.e_d = 0.0;
  const LinkConfig link{30, clean};
  const auto b = estimate_bb84_bounds(observe_bb84(link, kTriple), kTriple);
  CHECK(b.e1_u_x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(b.e1_u_x < 1e-9);
}

TEST_CASE("lower-bound clamps") {
  const ChannelParams p;
  const BasisStats signal{1e-3, 0.02};
  CHECK(bb84_key_rate_lower(Bb84Bounds{0, 0, 0, 0.1}, signal, 0.5, p) == 0.0);
  CHECK(bb84_key_rate_lower(Bb84Bounds{0, 0.05, 0.05, 0.5}, signal, 0.5, p) == 0.0);
  CHECK(mdi_key_rate_lower(MdiBounds{0, 0, 0.1}, signal, 0.5, p) == 0.0);
  CHECK(mdi_key_rate_lower(MdiBounds{0.02, 0.02, 0.5}, signal, 0.5, p) == 0.0);
  const double r = bb84_key_rate_lower(Bb84Bounds{0, 0.05, 0.05, 0.02}, signal, 0.5, p);
  const double expect = poisson_weight(0.5, 1) * 0.05 * (1 - binary_entropy(0.02)) - 1.12 * 1e-3 * binary_entropy(0.02);
  CHECK(r == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("attack scenario") {
  const LinkConfig link{40, {}};
  const auto opt = optimize_intensities(Protocol::bb84, link);
  REQUIRE(opt.found());
  const auto& in = *opt.intensities;
  const auto honest = evaluate_attack_scenario(Protocol::bb84, link, in, 1.0);
  CHECK(honest.r_l_estimated == honest.r_l_correct);
  CHECK(honest.r_l_estimated > 0.0);
  CHECK_FALSE(honest.r_u.has_value());

  const auto attacked = evaluate_attack_scenario(Protocol::bb84, link, in, 2.0);
  CHECK(attacked.r_l_estimated > attacked.r_l_correct);
  // users' and attack-aware estimates see the same data but differ in bounds
  const auto o = observe_bb84(link, in.scaled(2.0));
  const auto naive = estimate_bb84_bounds(o, in);
  const auto aware = estimate_bb84_bounds(o, in.scaled(2.0));
  CHECK(naive.y1_l_z != aware.y1_l_z);

  const auto mdi = evaluate_attack_scenario(Protocol::mdi, link, in, 1.0);
  CHECK(mdi.r_l_estimated == mdi.r_l_correct);
  CHECK_THROWS_AS(evaluate_attack_scenario(Protocol::bb84, link, in, 0.5), Error);
}

TEST_CASE("mdi attacked bounds exceed the attack-aware ones") {
  const LinkConfig link{40, {}};
  const auto in = IntensitySet::make(0.44, 0.005, 0.0001);
  const auto o = observe_mdi(link, in.scaled(2.5));
  const auto naive = estimate_mdi_bounds(o, in);
  const auto aware = estimate_mdi_bounds(o, in.scaled(2.5));
  CHECK(naive.y11_l_z > aware.y11_l_z);
  CHECK(evaluate_attack_scenario(Protocol::mdi, link, in, 2.5).r_l_correct == 0.0);
}

TEST_CASE("worst-case countermeasure") {
  const LinkConfig link{40, {}};
  const auto in = IntensitySet::make(0.7, 0.005, 0.0001);
  const auto o = observe_bb84(link, in);
  const double honest = key_rate_lower(o, in, link.params);
  CHECK(worst_case_key_rate(o, in, 1.0, link.params) == honest);
  double last = honest;
  for (double kmax : {1.2, 1.5, 2.0, 3.0}) {
    const double w = worst_case_key_rate(o, in, kmax, link.params);
    CHECK(w <= last);
    last = w;
  }
  CHECK(worst_case_key_rate(o, in, 2.0, link.params) <= honest);
  CHECK(worst_case_key_rate(o, in, 6.0, link.params) == 0.0);
  CHECK_THROWS_AS(worst_case_key_rate(o, in, 0.9, link.params), Error);
}

TEST_CASE("protocol names") {
  CHECK(parse_protocol("bb84") == Protocol::bb84);
  CHECK(parse_protocol("MDI") == Protocol::mdi);
  CHECK(to_string(Protocol::mdi) == "mdi");
  CHECK_THROWS_AS(parse_protocol("e91"), Error);
}
