// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "dtorus/torus.hpp"
#include "support/oracles.hpp"

using namespace dtorus;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("criterion %d: %s %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_abs(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

const CatalogEntry& catalog2d() {
  static const CatalogEntry e = catalog("paper-2d");
  return e;
}

void glued_torus() {
  const auto start = std::chrono::steady_clock::now();
  const auto s = sample_torus(catalog2d(), uniform_grid(1, -3.0, 3.0, 61), Selection::automatic(), {}, 1);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double err = 0;
  for (const auto& p : s.points) err = std::max(err, p.failed ? INFINITY : max_abs(p.u - oracle::torus_2d(p.phi(0))));
  report(1, err <= 1e-6 && seconds <= 60.0 && s.points.size() == 61,
         "glued paper-2d torus, 61 points: max error " + sci(err) + " (<= 1e-6), " + sci(seconds) + " s (<= 60)");
}

void solvability_checks() {
  double worst = 0;
  bool ok = true;
  for (const auto& phi : uniform_grid(1, -3.0, 3.0, 11)) {
    const PointPipeline p(catalog2d(), phi, {});
    for (Variant v : {Variant::one, Variant::two}) {
      const auto& r = p.report(v);
      worst = std::max(worst, r.residual_norm - r.tail_bound);
      ok = ok && r.residual_norm <= 1e-7 + r.tail_bound && r.solvable;
    }
  }
  CatalogEntry constant = catalog2d();
  override_expression(constant, "f1", "1");
  const PointPipeline q(constant, VectorXd::Zero(1), {});
  const auto& r = q.report(Variant::one);
  const double pi_oracle = oracle::integrate([](double t) { return 1 / std::cosh(t); }, -60.0, 60.0);
  const double dev = std::abs(r.residual(0) - pi_oracle);
  report(2, ok && dev <= 1e-4 && !r.solvable,
         "catalog residuals at 11 points, worst (norm - tail) " + sci(worst) + " (<= 1e-7); f1 = 1 residual " +
             std::to_string(r.residual(0)) + " vs sech oracle, deviation " + sci(dev) + " (<= 1e-4), verdict " +
             (r.solvable ? "solvable" : "not solvable"));
}

void l2_truncation() {
  const auto rows = l2_ramp({3, 5, 10}, VectorXd::Zero(1));
  double closed = 0, spread = 0;
  for (const auto& row : rows)
    for (int i = 0; i < row.N; ++i) closed = std::max(closed, std::abs(row.u(i) - oracle::torus_l2(i + 1, 0.0)));
  for (std::size_t k = 1; k < rows.size(); ++k) spread = std::max(spread, rows[k].max_change);
  report(3, closed <= 1e-6 && spread <= 1e-9,
         "l2 truncation N = 3,5,10: closed-form error " + sci(closed) + " (<= 1e-6), N-dependence " + sci(spread) +
             " (<= 1e-9)");
}

void invariance() {
  const auto s = sample_torus(catalog2d(), uniform_grid(1, -3.0, 3.0, 61), Selection::automatic());
  const auto fwd = verify_invariance(catalog2d(), s, 2.0);
  const auto bwd = verify_invariance(catalog2d(), s, -2.0);
  auto perturbed = s;
  for (auto& p : perturbed.points) p.u.array() += 0.01;
  const auto ctrl = verify_invariance(catalog2d(), perturbed, 2.0);
  const bool ok = fwd.failures == 0 && bwd.failures == 0 && fwd.max_defect <= 1e-5 && bwd.max_defect <= 1e-5 &&
                  ctrl.max_defect >= 1e-3;
  report(4, ok,
         "invariance defect t* = +2: " + sci(fwd.max_defect) + ", t* = -2: " + sci(bwd.max_defect) +
             " (<= 1e-5); perturbed control " + sci(ctrl.max_defect) + " (>= 1e-3)");
}

void cocycle() {
  const double phi = 0.0;
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<TimeTriple> triples;
  for (int i = 0; i < 50; ++i) triples.push_back({u(rng), u(rng), u(rng)});
  const FundamentalMatrixOracle o(catalog2d().system, VectorXd::Constant(1, phi), {-10.0, 10.0});
  const auto d = cocycle_check(catalog2d().system, o, triples);
  double closed = 0;
  for (const auto& tr : triples) {
    const MatrixXd exact = oracle::matriciant_2d(phi, tr.t, tr.tau) * oracle::matriciant_2d(phi, tr.tau, tr.s);
    closed = std::max(closed, oracle::inf_norm(o.omega(tr.t, tr.tau) * o.omega(tr.tau, tr.s) - exact));
    const FundamentalMatrixOracle shifted(catalog2d().system, o.phase(tr.s), {-5.0, 5.0});
    closed = std::max(closed, oracle::inf_norm(shifted.omega(tr.t, tr.tau) -
                                               oracle::matriciant_2d(phi, tr.t + tr.s, tr.tau + tr.s)));
  }
  report(5, d.max() <= 1e-6 && closed <= 1e-6,
         "50 triples in [-5,5]^3: cocycle " + sci(d.cocycle) + ", shift " + sci(d.shift) + ", vs closed form " +
             sci(closed) + " (<= 1e-6)");
}

void moore_penrose() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> size(2, 6);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = size(rng);
    const int r = std::uniform_int_distribution<int>(0, n)(rng);
    const auto known = oracle::random_rank_matrix(n, r, rng);
    const auto cd = pinv<double>(known.a);
    const MatrixXd& A = known.a;
    const MatrixXd& G = cd.D_plus;
    worst = std::max({worst, oracle::inf_norm(A * G * A - A), oracle::inf_norm(G * A * G - G),
                      oracle::inf_norm((A * G).transpose() - A * G), oracle::inf_norm((G * A).transpose() - G * A)});
  }
  const FundamentalMatrixOracle o(catalog2d().system, VectorXd::Constant(1, 0.3), {-4.0, 4.0});
  MatrixXd d(2, 2);
  d << 1.0, 2.0, -0.5, -1.0;
  const auto base = pinv<double>(d);
  double transported = 0;
  for (int k = 0; k < 10; ++k) {
    const double t = -3.0 + 6.0 * k / 9;
    const auto m = transport_critical(base, o.forward(t), o.backward(t));
    const MatrixXd I = MatrixXd::Identity(2, 2);
    transported = std::max({transported, oracle::inf_norm(m.D * m.D_plus * m.D - m.D),
                            oracle::inf_norm(m.D_plus * m.D * m.D_plus - m.D_plus),
                            oracle::inf_norm(m.P_kernel - (I - m.D_plus * m.D)),
                            oracle::inf_norm(m.P_cokernel - (I - m.D * m.D_plus))});
  }
  report(6, worst <= 1e-10 && transported <= 1e-6,
         "200 random matrices, worst Penrose defect " + sci(worst) + " (<= 1e-10); transported identities at 10 t " +
             sci(transported) + " (<= 1e-6)");
}

void projector_identities() {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 5;
    const MatrixXd cp = oracle::random_idempotent(n, rng), cm = oracle::random_idempotent(n, rng);
    const MatrixXd I = MatrixXd::Identity(n, n);
    const auto cd = pinv<double>(build_D<double>(cp, cm));
    worst = std::max({worst, oracle::inf_norm(cd.P_cokernel * cp - cd.P_cokernel * (I - cm)),
                      oracle::inf_norm((cp - (I - cm)) * cd.D_plus - (I - cd.P_cokernel))});
  }
  report(7, worst <= 1e-10, "100 random idempotent pairs, worst identity defect " + sci(worst) + " (<= 1e-10)");
}

void ode_consistency() {
  const double h = 1e-4;
  double worst = 0;
  for (double phi : {-1.0, 0.0, 0.5}) {
    const PointPipeline p(catalog2d(), VectorXd::Constant(1, phi), {}, 1.5);
    for (Variant v : {Variant::one, Variant::two}) {
      for (int k = 0; k <= 20; ++k) {
        const double t = -1.0 + 0.1 * k;
        const VectorXd dx = (green(p.context(), t + h, v).x - green(p.context(), t - h, v).x) / (2 * h);
        const VectorXd phase = p.oracle().phase(t);
        const VectorXd rhs =
            catalog2d().system.matrix(phase) * green(p.context(), t, v).x + catalog2d().system.forcing(phase);
        worst = std::max(worst, max_abs(dx - rhs));
      }
    }
  }
  report(8, worst <= 1e-4, "central-difference derivative vs P x + f on 21 t in [-1,1]: " + sci(worst) + " (<= 1e-4)");
}

void truncation() {
  PointOptions shortT, longT;
  shortT.quad.horizon = 20.0;
  longT.quad.horizon = 40.0;
  bool ok = true;
  double worst_change = 0, smallest_bound = INFINITY;
  for (const auto& phi : uniform_grid(1, -3.0, 3.0, 13)) {
    const auto a = PointPipeline(catalog2d(), phi, shortT).evaluate(Selection::automatic());
    const auto b = PointPipeline(catalog2d(), phi, longT).evaluate(Selection::automatic());
    const double change = max_abs(a.x - b.x);
    worst_change = std::max(worst_change, change);
    smallest_bound = std::min(smallest_bound, a.tail_bound);
    ok = ok && change < a.tail_bound;
  }
  report(9, ok,
         "T 20 -> 40 on 13 points: largest change " + sci(worst_change) + ", smallest T = 20 tail bound " +
             sci(smallest_bound) + " (change < bound pointwise)");
}

}  // namespace

int main() {
  const std::pair<int, void (*)()> checks[] = {{1, glued_torus}, {2, solvability_checks}, {3, l2_truncation},
                                                {4, invariance},  {5, cocycle},            {6, moore_penrose},
                                                {7, projector_identities}, {8, ode_consistency}, {9, truncation}};
  for (const auto& [id, fn] : checks) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
