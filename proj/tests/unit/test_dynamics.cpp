#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bsq/diagnostics.hpp"
#include "bsq/dynamics.hpp"
#include "bsq/error.hpp"
#include "bsq/operators.hpp"
#include "fields.hpp"

using namespace bsq;
using namespace bsq::testing;

namespace {
double inner(const State& a, const State& b) {
  double s = 0.0;
  for (int j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < a.grid().size(); ++i)
      s += (a.comp[j][i] * std::conj(b.comp[j][i])).real();
  return s;
}

NoiseModel model_with(const Grid& g, Gen& gen, int modes, SigmaSpec sigma) {
  return NoiseModel(g, modes, random_transport(g, gen, modes, 2, 0.1), sigma);
}
}  // namespace

TEST(Cutoff, EndpointsAndBand) {
  const Cutoff c{2.0};
  EXPECT_EQ(eval_phi(c, 0.0), 1.0);
  EXPECT_EQ(eval_phi(c, 1.0), 1.0);
  EXPECT_EQ(eval_phi(c, 2.0), 0.0);
  EXPECT_EQ(eval_phi(c, 50.0), 0.0);
  const double a = eval_phi(c, 1.5), b = eval_phi(c, 1.75);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 1.0);
  EXPECT_GT(a, b);
  EXPECT_NEAR(a, 0.5, 1e-15);
  EXPECT_THROW(eval_phi(c, -1e-3), std::invalid_argument);
}

TEST(Cutoff, DecreasingAndLipschitz) {
  Gen gen(1);
  for (double d0 : {0.1, 1.0, 7.0}) {
    const Cutoff c{d0};
    const double lip = cutoff_lipschitz(c);
    EXPECT_DOUBLE_EQ(lip, 15.0 / (4.0 * d0));
    for (int trial = 0; trial < 1000; ++trial) {
      const double x = gen.uniform(0, 1.2 * d0), y = gen.uniform(0, 1.2 * d0);
      const double lo = std::min(x, y), hi = std::max(x, y);
      EXPECT_GE(eval_phi(c, lo), eval_phi(c, hi));
      EXPECT_LE(std::abs(eval_phi(c, x) - eval_phi(c, y)), lip * std::abs(x - y) * (1 + 1e-12));
      EXPECT_LE(std::abs(eval_phi(c, x) - eval_phi(c, y)), 15.0 / (2.0 * d0) * std::abs(x - y));
    }
    // slope at the middle of the band attains the sharp constant
    const double h = 1e-7 * d0;
    const double mid = 0.75 * d0;
    const double slope = (eval_phi(c, mid - h) - eval_phi(c, mid + h)) / (2 * h);
    EXPECT_NEAR(slope, lip, 1e-5 * lip);
  }
}

TEST(Drift, ZeroState) {
  const Grid g(8);
  const auto d = drift(State(g));
  EXPECT_EQ(d.laplacian.max_abs(), 0.0);
  EXPECT_EQ(d.convection.max_abs(), 0.0);
  EXPECT_EQ(d.buoyancy.max_abs(), 0.0);
}

TEST(Drift, DensityOnlyGivesBuoyancyAndNoConvection) {
  const Grid g(16);
  Gen gen(2);
  State u(g);
  u.rho() = random_field(g, gen, 3);
  const auto d = drift(u);
  EXPECT_EQ(d.convection.max_abs(), 0.0);
  VectorField r = make_vector(g);
  r[2] = u.rho();
  const auto expected = leray_project(r);
  EXPECT_LE(max_diff(d.buoyancy.velocity(), expected), 1e-15);
  EXPECT_EQ(d.buoyancy.rho().max_abs(), 0.0);
}

TEST(Drift, BuoyancyFourthComponentVanishes) {
  const Grid g(16);
  Gen gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    EXPECT_EQ(buoyancy(random_state(g, gen, 3)).rho().max_abs(), 0.0);
  }
}

TEST(Drift, LaplacianPart) {
  const Grid g(16);
  Gen gen(4);
  const State u = random_state(g, gen, 3);
  const auto d = drift(u);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(max_diff(d.laplacian.comp[j], laplacian(u.comp[j])), 0.0);
}

TEST(Drift, ConvectionEnergyOrthogonal) {
  const Grid g(16);
  Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const State u = random_state(g, gen, 3);
    const State b = convection(u);
    EXPECT_LE(std::abs(inner(b, u)), 1e-10 * std::max(1.0, b.max_abs() * u.max_abs()));
  }
}

TEST(Drift, OutputsSolenoidalAndMeanZero) {
  const Grid g(16);
  Gen gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = drift(random_state(g, gen, 4));
    for (const State* s : {&d.convection, &d.buoyancy, &d.laplacian}) {
      EXPECT_LE(divergence_residual(s->velocity()), 1e-12);
      for (const auto& c : s->comp) EXPECT_LE(std::abs(c.mean()), 1e-15);
    }
  }
}

TEST(Drift, ConvectionQuadratic) {
  const Grid g(16);
  Gen gen(7);
  const State u = random_state(g, gen, 3);
  const State b = convection(u);
  for (double lam : {2.0, 0.5, -0.25}) EXPECT_EQ(convection(lam * u), (lam * lam) * b);
  for (int trial = 0; trial < 10; ++trial) {
    const double lam = gen.uniform(-2, 2);
    EXPECT_LE(max_diff(convection(lam * u), (lam * lam) * b), 1e-14 * std::max(1.0, b.max_abs()));
  }
}

TEST(Drift, RejectsInvalidState) {
  const Grid g(16);
  Gen gen(8);
  State u(g);
  const auto v = random_vector(g, gen, 3);
  for (int a = 0; a < 3; ++a) u.comp[a] = v[a];
  EXPECT_THROW(drift(u), InvalidState);
  State m = random_state(g, gen, 3);
  m.rho()[0] = 0.1;
  EXPECT_THROW(drift(m), InvalidState);
}

TEST(Diffusion, ZeroNoise) {
  const Grid g(16);
  Gen gen(9);
  const NoiseModel noise(g, 3, {}, {});
  const auto d = diffusion(random_state(g, gen, 3), noise, {});
  ASSERT_EQ(d.size(), 3u);
  for (const auto& s : d) EXPECT_EQ(s.max_abs(), 0.0);
}

TEST(Diffusion, TransportOnlyBeyondCutoff) {
  const Grid g(16);
  Gen gen(10);
  const auto noise = model_with(g, gen, 3, {SigmaKind::diagonal_linear, 0.1, 0, 3});
  const State u = random_state(g, gen, 3);
  SystemSpec sys;
  sys.truncated = true;
  sys.cutoff.delta0 = 0.5 * lp_norm(u, sys.p);
  const auto d = diffusion(u, noise, sys);
  const auto t = transport_noise(u, noise);
  for (std::size_t n = 0; n < d.size(); ++n) EXPECT_EQ(d[n], t[n]);
}

TEST(Diffusion, DensitySlotIsPlainAdvection) {
  const Grid g(16);
  Gen gen(11);
  const auto noise = model_with(g, gen, 2, {});
  const State u = random_state(g, gen, 3);
  const auto t = transport_noise(u, noise);
  for (std::size_t n = 0; n < t.size(); ++n) {
    const auto direct = advect(noise.transport().modes[n], u.rho());
    EXPECT_LE(max_diff(t[n].rho(), direct), 1e-14 * std::max(1.0, direct.max_abs()));
    EXPECT_LE(divergence_residual(t[n].velocity()), 1e-12);
  }
}

TEST(Diffusion, TruncationTransparentBelowHalfDelta) {
  const Grid g(16);
  Gen gen(12);
  const auto noise = model_with(g, gen, 3, {SigmaKind::diagonal_linear, 0.1, 0, 3});
  const State u = random_state(g, gen, 3, 0.01);
  SystemSpec full, cut;
  cut.truncated = true;
  cut.cutoff.delta0 = 4 * lp_norm(u, 6);
  EXPECT_EQ(diffusion(u, noise, full), diffusion(u, noise, cut));
  const auto a = evaluate_system(u, noise, full), b = evaluate_system(u, noise, cut);
  EXPECT_EQ(a.drift, b.drift);
  EXPECT_EQ(b.gamma, 1.0);
}

TEST(Diffusion, ContractedIncrementMatchesModeList) {
  const Grid g(16);
  Gen gen(13);
  const auto noise = model_with(g, gen, 4, {SigmaKind::affine, 0.05, 0.02, 4});
  const State u = random_state(g, gen, 3);
  SystemSpec sys;
  sys.truncated = true;
  sys.cutoff.delta0 = 1.5 * lp_norm(u, 6);
  const std::vector<double> dw{0.03, -0.01, 0.02, -0.04};
  const auto terms = evaluate_system(u, noise, sys);
  const auto inc = evaluate_increment(u, noise, sys, dw);
  EXPECT_EQ(inc.gamma, terms.gamma);
  EXPECT_GT(inc.gamma, 0.0);
  EXPECT_LT(inc.gamma, 1.0);
  EXPECT_LE(max_diff(inc.drift, terms.drift), 1e-15);
  State sum(g);
  for (std::size_t n = 0; n < dw.size(); ++n) sum.axpy(dw[n], terms.diffusion[n]);
  EXPECT_LE(max_diff(inc.noise, sum), 1e-14 * std::max(1.0, sum.max_abs()));
}

TEST(Diffusion, EvaluateSystemMatchesPublicParts) {
  const Grid g(16);
  Gen gen(14);
  const auto noise = model_with(g, gen, 2, {SigmaKind::diagonal_linear, 0.1, 0, 2});
  const State u = random_state(g, gen, 3);
  const auto terms = evaluate_system(u, noise, {});
  const auto d = drift(u);
  EXPECT_LE(max_diff(terms.drift, d.convection + d.buoyancy), 1e-14);
  const auto diff = diffusion(u, noise, {});
  for (std::size_t n = 0; n < diff.size(); ++n)
    EXPECT_LE(max_diff(terms.diffusion[n], diff[n]), 1e-15);
}
