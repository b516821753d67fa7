#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "symkor/interpolant.hpp"
#include "symkor/quadrature.hpp"

using namespace symkor;

TEST(Quadrature, ProdSineEnergyNorm) {
  const auto f = builtin_target("prod_sine", 2);
  const auto r = norm_diff(make_field(f), zero_field(2), default_quadrature(2, 2, 8));
  EXPECT_NEAR(r.energy, std::numbers::pi / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.l2, 0.5, 1e-12);
}

TEST(Quadrature, HatNorms) {
  const SurplusTable hat({IndexSetKind::EnergyBased, 1, 1}, false, {{LevelIndex{1}, OddIndex{1}, 1.0}});
  const auto r = norm_diff(make_field(hat), zero_field(1), default_quadrature(1, 1, 2));
  EXPECT_NEAR(r.energy, 2.0, 1e-14);
  EXPECT_NEAR(r.l2 * r.l2, 1.0 / 3.0, 1e-14);
}

TEST(Quadrature, SeminormValues) {
  const auto q = default_quadrature(2, 3, 6);
  const auto s = builtin_target("prod_sine", 2);
  EXPECT_NEAR(seminorm_2_2(s, q), std::pow(std::numbers::pi, 4) / 2, 1e-9);
  for (int d = 1; d <= 3; ++d) {
    const auto f = builtin_target("mixed_poly", d);
    EXPECT_NEAR(seminorm_2_2(f, default_quadrature(d, 1, 4)), *f.seminorm_2_2, 1e-10);
  }
  const auto g = builtin_target("prod_quadratic", 3);
  EXPECT_NEAR(seminorm_2_2(g, default_quadrature(3, 0, 2)), 8.0, 1e-12);
}

TEST(Quadrature, LowDiscrepancyAgreesWithTensor) {
  const auto f = builtin_target("prod_sine", 3);
  const auto t = build_interpolant(f, {IndexSetKind::EnergyBased, 3, 3}, true);
  auto tensor = default_quadrature(3, 4, 3);
  auto ld = tensor;
  ld.mode = QuadratureMode::LowDiscrepancy;
  ld.sample_count = 1 << 15;
  ld.seed = 5;
  const auto a = norm_diff(make_field(f), make_field(t), tensor);
  const auto b = norm_diff(make_field(f), make_field(t), ld);
  ASSERT_TRUE(b.estimator_stderr.has_value());
  EXPECT_FALSE(a.estimator_stderr.has_value());
  EXPECT_LE(std::abs(a.h1 - b.h1), 3 * b.estimator_stderr->h1 + 1e-12);
  EXPECT_LE(std::abs(a.energy - b.energy), 3 * b.estimator_stderr->energy + 1e-12);
}

TEST(Quadrature, DeterministicLowDiscrepancy) {
  const auto f = builtin_target("prod_sine", 5);
  QuadratureSpec q;
  q.mode = QuadratureMode::LowDiscrepancy;
  q.seed = 11;
  const double a = norm_diff(make_field(f), zero_field(5), q).h1;
  const double b = norm_diff(make_field(f), zero_field(5), q).h1;
  EXPECT_EQ(a, b);
}

TEST(Quadrature, MultiFieldMatchesSingle) {
  const auto f = builtin_target("mixed_poly", 2);
  const IndexSetSpec spec{IndexSetKind::EnergyBased, 4, 2};
  const std::vector<Field> fields{make_field(build_interpolant(f, spec, false)),
                                  make_field(build_interpolant(f, spec, true))};
  const auto q = default_quadrature(2, 4, 3);
  const auto many = norm_diff(make_field(f), fields, q);
  ASSERT_EQ(many.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(many[k].h1, norm_diff(make_field(f), fields[k], q).h1);
}

TEST(Quadrature, Validation) {
  const SurplusTable hat({IndexSetKind::EnergyBased, 3, 1}, false, {{LevelIndex{3}, OddIndex{1}, 1.0}});
  EXPECT_THROW(norm_diff(make_field(hat), zero_field(1), default_quadrature(1, 2)), std::invalid_argument);
  EXPECT_THROW(norm_diff(zero_field(1), zero_field(2), default_quadrature(1, 2)), std::invalid_argument);
  QuadratureSpec q;
  q.points_per_cell_per_axis = 0;
  EXPECT_THROW(q.validate(), std::invalid_argument);
  EXPECT_THROW(quadrature_mode_from_string("mc"), std::invalid_argument);
  EXPECT_EQ(default_quadrature(3, 10).mode, QuadratureMode::TensorGaussPerCell);
  EXPECT_EQ(default_quadrature(5, 6).mode, QuadratureMode::LowDiscrepancy);
}

TEST(Quadrature, SpecJsonRoundTrip) {
  QuadratureSpec q;
  q.mode = QuadratureMode::LowDiscrepancy;
  q.cell_level = 3;
  q.sample_count = 5000;
  q.seed = 42;
  const auto back = QuadratureSpec::from_json(q.to_json());
  EXPECT_EQ(back.mode, q.mode);
  EXPECT_EQ(back.cell_level, 3);
  EXPECT_EQ(back.sample_count, 5000u);
  EXPECT_EQ(back.seed, 42u);
}

TEST(Quadrature, ErrorReportCsv) {
  const auto r = norm_diff(zero_field(1), zero_field(1), default_quadrature(1, 0));
  EXPECT_EQ(ErrorReport::csv_header(), "l2,energy,h1,stderr_h1,quad_mode");
  EXPECT_EQ(r.csv_row(), "0,0,0,,tensor");
}
