#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "portalgon/envelope.hpp"

using namespace portalgon;

namespace {

// Quadratic test curve a t^2 + b t + c on a closed interval.
struct TestCurve {
  double a = 0.0, b = 0.0, c = 0.0;
  Interval dom{0.0, 1.0};

  Interval domain() const { return dom; }
  double value(double t) const { return (a * t + b) * t + c; }
  double min_param() const {
    if (a <= 0.0) {
      // Affine or concave: the lower endpoint wins.
      return value(dom.lo) <= value(dom.hi) ? dom.lo : dom.hi;
    }
    return std::clamp(-b / (2.0 * a), dom.lo, dom.hi);
  }
};

std::vector<double> curve_intersections(const TestCurve& f,
                                        const TestCurve& g) {
  double A = f.a - g.a, B = f.b - g.b, C = f.c - g.c;
  std::vector<double> out;
  if (std::abs(A) < 1e-14) {
    if (std::abs(B) > 1e-14) out.push_back(-C / B);
    return out;
  }
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return out;
  double sq = std::sqrt(disc);
  out.push_back((-B - sq) / (2.0 * A));
  out.push_back((-B + sq) / (2.0 * A));
  std::sort(out.begin(), out.end());
  return out;
}

ApexedDistanceFunction random_apexed(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> y(0.1, 3.0);
  std::uniform_real_distribution<double> off(0.0, 2.0);
  std::uniform_real_distribution<double> dom(0.0, 1.0);
  ApexedDistanceFunction f;
  f.edge = {{0.0, 0.0}, {4.0, 0.0}};
  f.apex = {pos(rng), y(rng)};
  f.offset = off(rng);
  double a = dom(rng), b = dom(rng);
  f.domain = {std::min(a, b), std::max(a, b)};
  if (f.domain.width() < 0.05) f.domain.hi = std::min(1.0, f.domain.lo + 0.05);
  return f;
}

double naive_min(const std::vector<ApexedCurve>& fns, double t) {
  double v = std::numeric_limits<double>::infinity();
  for (const ApexedCurve& c : fns)
    if (c.domain().contains(t)) v = std::min(v, c.value(t));
  return v;
}

}  // namespace

TEST_CASE("insert builds expected level pattern") {
  DynamicLowerEnvelope<TestCurve> env;
  env.insert({0.0, 0.0, 1.0, {0.0, 1.0}});  // constant 1
  CHECK(env.flatten().size() == 1);
  CHECK(env.levels_occupied_mask() == 1);

  DynamicLowerEnvelope<TestCurve> env2;
  env2.insert({0.0, 1.0, 0.0, {0.0, 1.0}});   // x
  env2.insert({0.0, -1.0, 1.0, {0.0, 1.0}});  // 1-x
  auto ivs = env2.flatten();
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[0].xhi == doctest::Approx(0.5));
  CHECK(env2.realizing(0.25) == 0);
  CHECK(env2.realizing(0.75) == 1);
  CHECK(env2.value_at(0.5) == doctest::Approx(0.5));

  DynamicLowerEnvelope<TestCurve> env8;
  for (int i = 0; i < 8; ++i)
    env8.insert({0.0, 0.0, 1.0 + i, {i * 0.1, i * 0.1 + 0.05}});
  CHECK(env8.levels_occupied_mask() == 8);  // one level-3 structure
}

TEST_CASE("next_local_minimum") {
  DynamicLowerEnvelope<TestCurve> empty;
  CHECK_FALSE(empty.next_local_minimum(0.0).has_value());

  DynamicLowerEnvelope<TestCurve> env;
  env.insert({1.0, 0.0, 1.0, {-1.0, 1.0}});   // t^2 + 1, min (0,1)
  env.insert({1.0, -6.0, 11.0, {2.0, 4.0}});  // (t-3)^2 + 2, min (3,2)
  auto m0 = env.next_local_minimum(0.0);
  REQUIRE(m0.has_value());
  CHECK(m0->value == doctest::Approx(1.0));
  auto m1 = env.next_local_minimum(1.5);
  REQUIRE(m1.has_value());
  CHECK(m1->t == doctest::Approx(3.0));
  CHECK(m1->value == doctest::Approx(2.0));
  CHECK_FALSE(env.next_local_minimum(10.0).has_value());

  // Monotone in delta.
  double prev = -1.0;
  for (double d : {0.0, 0.5, 1.0, 1.5, 1.9}) {
    auto m = env.next_local_minimum(d);
    if (!m) continue;
    CHECK(m->value >= prev);
    prev = m->value;
  }
}

TEST_CASE("next_vertex on a single function") {
  DynamicLowerEnvelope<TestCurve> env;
  int id = env.insert({1.0, 0.0, 0.0, {-1.0, 2.0}});  // t^2
  auto v = env.next_vertex(id, 0.0);
  REQUIRE(v.has_value());
  // Endpoint values are 1 and 4; the lower one wins.
  CHECK(v->t == doctest::Approx(-1.0));
  CHECK(v->value == doctest::Approx(1.0));
}

TEST_CASE("next_vertex at a crossing") {
  DynamicLowerEnvelope<TestCurve> env;
  int fx = env.insert({0.0, 1.0, 0.0, {0.0, 1.0}});   // x
  env.insert({0.0, -1.0, 1.0, {0.0, 1.0}});           // 1-x
  auto v = env.next_vertex(fx, 0.2);
  REQUIRE(v.has_value());
  CHECK(v->t == doctest::Approx(0.5));
  CHECK(v->value == doctest::Approx(0.5));

  CHECK_THROWS_AS(env.next_vertex(fx, 0.9), Error);  // 1-x realizes there
}

TEST_CASE("next_vertex deletes dominated intervals") {
  DynamicLowerEnvelope<TestCurve> env;
  // Two high constants end up merged in level 1; the low function then
  // lives alone in level 0 and dominates them during the walk.
  env.insert({0.0, 0.0, 0.5, {0.2, 0.45}});
  env.insert({0.0, 0.0, 0.6, {0.55, 0.8}});
  int low = env.insert({0.0, 0.0, 0.1, {0.0, 1.0}});
  auto v = env.next_vertex(low, 0.5);
  // Both domain endpoints carry the same value 0.1, not above f(q).
  CHECK_FALSE(v.has_value());
  CHECK(env.counters().intervals_deleted >= 2);
  // The envelope is still correct everywhere.
  CHECK(env.value_at(0.5) == doctest::Approx(0.1));
  CHECK(env.value_at(0.3) == doctest::Approx(0.1));
}

TEST_CASE("differential test against a naive envelope") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int workload = 0; workload < 40; ++workload) {
    DynamicLowerEnvelope<ApexedCurve> env;
    std::vector<ApexedCurve> fns;
    int ops = 30 + (int)(uni(rng) * 170);
    double delta = 0.0;
    for (int op = 0; op < ops; ++op) {
      double roll = uni(rng);
      if (roll < 0.5 || fns.empty()) {
        ApexedCurve c{random_apexed(rng)};
        fns.push_back(c);
        env.insert(c);
      } else if (roll < 0.75) {
        auto m = env.next_local_minimum(delta);
        if (m) {
          // Brute-force: smallest function minimum on the envelope above
          // delta.
          double want = std::numeric_limits<double>::infinity();
          for (const ApexedCurve& c : fns) {
            double t = c.min_param();
            double v = c.value(t);
            if (v > delta && std::abs(v - naive_min(fns, t)) <= 1e-9)
              want = std::min(want, v);
          }
          CHECK(m->value == doctest::Approx(want).epsilon(1e-9));
          delta = m->value;  // advance like the sweep would
        }
      } else {
        // next_vertex from a function realizing the envelope somewhere.
        double q = uni(rng);
        int who = env.realizing(q);
        if (who >= 0) {
          auto v = env.next_vertex(who, q);
          if (v) {
            CHECK(env.curve(who).value(v->t) ==
                  doctest::Approx(v->value).epsilon(1e-9));
            CHECK(v->value > env.curve(who).value(q));
          }
        }
      }
    }
    // Pointwise agreement with the naive envelope.
    for (int i = 0; i <= 1000; ++i) {
      double t = 4.0 * i / 1000.0 * 0.25;  // [0,1]
      double got = env.value_at(t);
      double want = naive_min(fns, t);
      if (std::isinf(want))
        CHECK(std::isinf(got));
      else
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
    // Counter sanity: each interval deleted at most once.
    CHECK(env.counters().intervals_deleted <= env.counters().intervals_created);
  }
}

TEST_CASE("amortized interval accounting") {
  std::mt19937 rng(7);
  DynamicLowerEnvelope<ApexedCurve> env;
  int m = 200;
  for (int i = 0; i < m; ++i) env.insert(ApexedCurve{random_apexed(rng)});
  long lambda_hat = (long)env.flatten().size();
  double logm = std::log2((double)m);
  CHECK(env.counters().intervals_created <=
        (long)(12.0 * (double)std::max(lambda_hat, 1L) * logm));
}
