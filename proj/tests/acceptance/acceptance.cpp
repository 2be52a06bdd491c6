// End-to-end checks: one PASS/FAIL line per criterion, with timings.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "lsa/bsa_sdp.hpp"
#include "lsa/optimize.hpp"

using namespace lsa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

int failures = 0;

void run(int id, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s [%.1f s of %.0f s%s]\n", ok ? "PASS" : "FAIL", id, o.detail.c_str(), dt, budget_s,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

const IntensitySet kFallback = IntensitySet::make(0.5, 0.1, 0.01);

IntensitySet optimized(Protocol p, double km) {
  const auto o = optimize_intensities(p, {km, {}});
  return o.found() ? *o.intensities : kFallback;
}

}  // namespace

int main() {
  const LinkConfig at40{40, {}};

  run(1, 60, [] {
    double worst = 0.0;
    for (Protocol p : {Protocol::bb84, Protocol::mdi}) {
      for (double km : {0.0, 20.0, 40.0, 80.0, 120.0}) {
        const auto r = evaluate_attack_scenario(p, {km, {}}, optimized(p, km), 1.0);
        worst = std::max(worst, std::abs(r.r_l_estimated - r.r_l_correct));
      }
    }
    return Outcome{worst <= 1e-12, fmt("kappa=1 max |estimated - correct| = %.3g over 10 points", worst)};
  });

  const IntensitySet bb84_40 = optimized(Protocol::bb84, 40);

  run(2, 120, [&] {
    bool ok = true;
    std::string detail = "BB84 40 km:";
    for (double k : {1.1, 1.5, 2.0, 2.5}) {
      const auto r = evaluate_attack_scenario(Protocol::bb84, at40, bb84_40, k);
      ok = ok && r.r_l_estimated > r.r_l_correct;
      detail += fmt(" k=%.1f est=%.3e cor=%.3e;", k, r.r_l_estimated, r.r_l_correct);
    }
    return Outcome{ok, detail};
  });

  run(3, 900, [&] {
    const auto terms = bb84_upper_terms(at40, 10);
    double found = -1.0;
    for (int i = 0; i <= 40; ++i) {
      const double k = 1.0 + 0.05 * i;
      const auto r = evaluate_attack_scenario(Protocol::bb84, at40, bb84_40, k);
      if (bb84_upper_bound(terms, k * bb84_40.mu_s()) < r.r_l_estimated) {
        found = k;
        break;
      }
    }
    return Outcome{found >= 1.5 - 1e-9 && found <= 1.9 + 1e-9,
                   found < 0 ? std::string("no crossover for kappa <= 3")
                             : fmt("first kappa with r_u < estimated r_l at 40 km: %.2f", found)};
  });

  run(4, 600, [] {
    bool ok = true;
    std::string detail = "MDI kappa=2.5 correct r_l:";
    for (double km : {10.0, 25.0, 40.0, 60.0}) {
      const auto r = evaluate_attack_scenario(Protocol::mdi, {km, {}}, optimized(Protocol::mdi, km), 2.5);
      ok = ok && r.r_l_correct == 0.0;
      detail += fmt(" %g km=%.3g (est %.3g);", km, r.r_l_correct, r.r_l_estimated);
    }
    return Outcome{ok, detail};
  });

  run(5, 300, [] {
    double m_y1 = 1, m_e1 = 1, m_y11 = 1, m_e11 = 1;
    for (double km : {10.0, 40.0, 80.0}) {
      const LinkConfig link{km, {}};
      const auto in = optimized(Protocol::bb84, km);
      const auto b = estimate_bb84_bounds(observe_bb84(link, in), in);
      const auto t = aggregate_yield(bb84_photon_stats(link, 1));
      m_y1 = std::min({m_y1, t.y_z - b.y1_l_z, t.y_x - b.y1_l_x});
      m_e1 = std::min(m_e1, b.e1_u_x - t.e_x);

      const auto im = optimized(Protocol::mdi, km);
      const auto bm = estimate_mdi_bounds(observe_mdi(link, im), im);
      const auto s = mdi_photon_stats(link, 1, 1);
      double yz = 0, yx = 0, ex = 0;
      for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < 4; ++j) {
          if ((k < 2) != (j < 2)) continue;
          const double pp = 16 * s.p_c[0] * s.table[0][k][j];
          const double pm = 16 * s.p_c[1] * s.table[1][k][j];
          (k < 2 ? yz : yx) += 0.25 * (pp + pm);
          if (k >= 2) ex += 0.25 * (k == j ? pm : pp);
        }
      }
      m_y11 = std::min({m_y11, yz - bm.y11_l_z, yx - bm.y11_l_x});
      m_e11 = std::min(m_e11, bm.e11_u_x - ex / yx);
    }
    const bool ok = m_y1 >= 0 && m_e1 >= 0 && m_y11 >= 0 && m_e11 >= 0;
    return Outcome{ok, fmt("margins Y1 %.3g, e1 %.3g, Y11 %.3g", m_y1, m_e1, m_y11) + fmt(", e11 %.3g", m_e11)};
  });

  run(6, 600, [] {
    int solves = 0, bad = 0;
    double worst_res = 0, worst_pt = 0;
    auto audit = [&](const BsaResult& r) {
      if (r.trivial) return;
      ++solves;
      worst_res = std::max(worst_res, r.certificate.stats_residual);
      worst_pt = std::min(worst_pt, r.certificate.min_eig_sep_pt);
      const bool ok = r.certificate.valid() && r.certificate.stats_residual < 1e-7 &&
                      (!r.rho_ent || r.certificate.min_eig_ent_pt < -1e-9);
      if (!ok) ++bad;
    };
    for (int km = 0; km <= 150; km += 10) {
      for (const auto& r : bb84_upper_terms({static_cast<double>(km), {}}, 10).results) audit(r);
    }
    // separable fixtures: product states rho_A (x) tau
    const auto povm = bob_virtual_povm();
    bool sep_ok = true;
    for (int n = 1; n <= 4; ++n) {
      Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(3, 3);
      tau(0, 0) = 0.2 + 0.1 * n;
      tau(1, 1) = 0.5 - 0.1 * n;
      tau(2, 2) = 0.3;
      tau(0, 1) = {0.05, 0.02};
      tau(1, 0) = std::conj(tau(0, 1));
      PhotonStatsBB84 s;
      s.n = n;
      for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < 5; ++j) s.p[k][j] = 0.25 * (povm[j] * tau).trace().real();
      }
      const auto r = solve_bsa_bb84(n, s);
      audit(r);
      sep_ok = sep_ok && r.lambda_bsa >= 1 - 1e-6;
    }
    // noiseless single photons
    ChannelParams ideal;
    ideal.y0 = 0;
    ideal.e_d = 0;
    ideal.eta_d = 1;
    ideal.alpha = 0;
    const auto r1 = solve_bsa_bb84(1, bb84_photon_stats({0, ideal}, 1));
    const auto rm = solve_bsa_mdi(1, 1, Announcement::psi_minus, mdi_photon_stats({0, ideal}, 1, 1));
    audit(r1);
    audit(rm);
    const bool npt = r1.rho_ent && r1.certificate.min_eig_ent_pt < -1e-9 && rm.rho_ent &&
                     rm.certificate.min_eig_ent_pt < -1e-9;
    const bool ok = bad == 0 && sep_ok && npt;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%d solves, %d failed checks, worst residual %.2g, worst sep PT eig %.2g; separable fixtures %s; "
                  "noiseless NPT %s",
                  solves, bad, worst_res, worst_pt, sep_ok ? "ok" : "FAILED", npt ? "ok" : "missing");
    return Outcome{ok, buf};
  });

  run(7, 60, [] {
    double worst = 0;
    for (double km : {0.0, 40.0, 100.0}) {
      const LinkConfig link{km, {}};
      std::vector<PhotonYield> y;
      for (int n = 0; n <= 25; ++n) y.push_back(aggregate_yield(bb84_photon_stats(link, n)));
      for (double mu : {0.1, 0.5, 1.0}) {
        const auto a = bb84_observables(link, mu);
        double gz = 0, egz = 0, gx = 0, egx = 0;
        for (int n = 0; n <= 25; ++n) {
          const double w = poisson_weight(mu, n);
          gz += w * y[n].y_z;
          egz += w * y[n].y_z * y[n].e_z;
          gx += w * y[n].y_x;
          egx += w * y[n].y_x * y[n].e_x;
        }
        worst = std::max({worst, std::abs(a.z.gain - gz), std::abs(a.z.qber - egz / gz), std::abs(a.x.gain - gx),
                          std::abs(a.x.qber - egx / gx)});
      }
    }
    return Outcome{worst < 1e-6, fmt("max abs deviation %.3g over 9 points", worst)};
  });

  run(8, 10, [] {
    const double cal = 0.05;
    const auto dir = fixtures::scratch_dir("acceptance_lab");
    struct Sample {
      double base, attacked, expect;
    };
    bool ok = true;
    std::string detail = "kappa";
    int i = 0;
    for (const Sample& s : {Sample{0.232, 0.712, 3.07}, Sample{0.169, 0.773, 4.57}, Sample{0.196, 0.221, 1.13}}) {
      const auto index = fixtures::write_lab_set(dir / std::to_string(i++), {{0.0, s.base}, {9.0, s.attacked}}, cal);
      const auto recs = analyze_index(index, cal);
      const double k = recs.at(1).kappa;
      ok = ok && std::abs(k - s.expect) <= 0.01;
      detail += fmt(" %.4f (want %.2f)", k, s.expect);
    }
    return Outcome{ok, detail};
  });

  run(9, 900, [&] {
    const auto t8 = bb84_upper_terms(at40, 8);
    const auto t12 = bb84_upper_terms(at40, 12);
    double d_bb84 = 0;
    for (double k : {1.0, 2.0}) {
      d_bb84 = std::max(d_bb84, std::abs(bb84_upper_bound(t8, k * bb84_40.mu_s()) -
                                         bb84_upper_bound(t12, k * bb84_40.mu_s())));
    }
    const auto mdi_in = optimized(Protocol::mdi, 40);
    const auto m4 = mdi_upper_terms(at40, 4);
    const auto m5 = mdi_upper_terms(at40, 5);
    double d_mdi = 0;
    for (double k : {1.0, 2.5}) {
      d_mdi = std::max(d_mdi, std::abs(mdi_upper_bound(m4, k * mdi_in.mu_s()) -
                                       mdi_upper_bound(m5, k * mdi_in.mu_s())));
    }
    return Outcome{d_bb84 < 1e-6 && d_mdi < 1e-5,
                   fmt("|R_U(8) - R_U(12)| = %.3g (BB84), |R_U(4) - R_U(5)| = %.3g (MDI)", d_bb84, d_mdi)};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
