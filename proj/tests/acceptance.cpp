// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.
// Usage: acceptance [seed]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "monoprox/monoprox.hpp"

using namespace monoprox;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<IdentityCheck> checks;
};

bool report(const Criterion& c) {
  bool ok = !c.checks.empty();
  std::string detail;
  for (const IdentityCheck& k : c.checks) {
    ok = ok && k.passed();
    char buf[256];
    if (k.error.empty())
      std::snprintf(buf, sizeof buf, "%s %.3g <= %.3g (%d)", k.name.c_str(), k.max_residual, k.tolerance,
                    k.instances);
    else
      std::snprintf(buf, sizeof buf, "%s error: %s", k.name.c_str(), k.error.c_str());
    if (!detail.empty()) detail += "; ";
    detail += buf;
  }
  std::printf("%s  %2d  %-44s %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), detail.c_str());
  return ok;
}

IdentityCheck merge(const std::string& name, std::vector<IdentityCheck> parts) {
  IdentityCheck out;
  out.name = name;
  for (const IdentityCheck& p : parts) {
    out.instances += p.instances;
    out.max_residual = std::max(out.max_residual, p.max_residual / p.tolerance);
    if (!p.error.empty()) out.error = p.name + ": " + p.error;
  }
  out.tolerance = 1.0;  // residuals are relative to each map's own tolerance
  return out;
}

/// Lasso with identity design: the minimizer is the soft threshold of b.
std::vector<IdentityCheck> admm_lasso() {
  const double lambda = 0.1;
  Vector b(2);
  b << 1.0, -2.0;
  Vector expected(2);
  for (Index i = 0; i < 2; ++i) expected(i) = std::copysign(std::max(std::abs(b(i)) - lambda, 0.0), b(i));

  IdentityCheck distance{"distance_to_soft_threshold", 1, std::numeric_limits<double>::infinity(), 1e-6, {}};
  IdentityCheck budget{"iterations", 1, 0.0, 5000.0, {}};
  IdentityCheck attained{"unattained_x_updates", 1, 0.0, 0.0, {}};
  ToleranceConfig cfg;
  cfg.admm_max_iter = 5000;
  try {
    const RunReport r = admm_solve(l1(2, lambda), squared_distance(b), LinearMap(Matrix::Identity(2, 2)),
                                   Metric::identity(2), cfg);
    distance.max_residual = (r.x - expected).lpNorm<Eigen::Infinity>();
    budget.max_residual = r.iterations;
    int missed = 0;
    for (const AdmmRecord& rec : r.records) missed += rec.attained ? 0 : 1;
    attained.max_residual = missed;
  } catch (const std::exception& e) {
    distance.error = e.what();
  }
  return {distance, budget, attained};
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 42;
  const auto start = std::chrono::steady_clock::now();
  InstanceGenerator gen(seed);
  std::printf("acceptance run, seed %llu\n", static_cast<unsigned long long>(seed));

  std::vector<Criterion> criteria;
  criteria.push_back({1, "metric Moreau identity", check_metric_moreau(gen, 100)});
  criteria.push_back(
      {2, "composed resolvent routes and ground truth",
       {check_composed_routes(gen, 50), check_composed_ground_truth(gen, 50)}});
  criteria.push_back({3, "parallel composition duality", {check_parallel_duality(gen, 50)}});
  criteria.push_back({4, "parallel sum", check_parallel_sum()});
  criteria.push_back({5, "singleton image and kernel complement", check_singleton_projections(gen, 20, 10)});
  criteria.push_back({6, "generalized Moreau decomposition", {check_generalized_moreau(gen, 50)}});
  criteria.push_back({7, "oracle agreement", {check_oracle_agreement(gen, 60)}});
  criteria.push_back({8, "median witness and exponential non-attainment",
                      {check_median_example(1.0), check_exponential_example()}});
  criteria.push_back({9, "ADMM lasso", admm_lasso()});
  criteria.push_back(
      {10, "firm nonexpansiveness", {merge("worst map / tolerance", check_firm_nonexpansiveness(gen, 100))}});

  int failed = 0;
  for (const Criterion& c : criteria) failed += report(c) ? 0 : 1;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.2f s\n", static_cast<int>(criteria.size()) - failed,
              criteria.size(), secs);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
