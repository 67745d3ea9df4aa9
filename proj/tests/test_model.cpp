#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "dynabs/error.hpp"
#include "dynabs/model.hpp"

using namespace dynabs;

namespace {

const char* kBrusselator = R"(
system bru
dim 2
init x1 in [0.9, 0.95] x2 in [1.5, 1.6]
domain x1 in [0.8, 1.1] x2 in [1.35, 1.7]
field x1' = 1 + x1^2*x2 - 2.5*x1
field x2' = -x1^2*x2 + 1.5*x1
lipschitz_f 3.1
discrepancy gamma 1.4
)";

int error_line(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Model, ParsesBrusselator) {
  System s = parse_system(kBrusselator);
  EXPECT_EQ(s.name(), "bru");
  EXPECT_EQ(s.n(), 2u);
  EXPECT_EQ(s.m(), 2u);
  EXPECT_TRUE(s.output_is_identity());
  EXPECT_DOUBLE_EQ(s.theta().lo(0), 0.9);
  EXPECT_DOUBLE_EQ(s.theta().hi(1), 1.6);
  EXPECT_DOUBLE_EQ(s.lf(), 3.1);
  EXPECT_DOUBLE_EQ(s.lg(), 1.0);
  EXPECT_DOUBLE_EQ(s.sg(), 1.0);
  ASSERT_TRUE(s.witness().gamma.has_value());
  EXPECT_DOUBLE_EQ(*s.witness().gamma, 1.4);

  Point f = eval_field(s, Point{0.9, 1.5});
  EXPECT_NEAR(f[0], 1 + 0.81 * 1.5 - 2.25, 1e-15);
  EXPECT_NEAR(f[1], -0.81 * 1.5 + 1.35, 1e-15);
}

TEST(Model, PrintParseRoundTrip) {
  System s = parse_system(kBrusselator);
  System t = parse_system(print_system(s));
  EXPECT_EQ(print_system(s), print_system(t));
  EXPECT_EQ(t.theta(), s.theta());
  EXPECT_EQ(t.domain(), s.domain());
  for (std::size_t i = 0; i < s.n(); ++i) EXPECT_TRUE(s.f()[i] == t.f()[i]);
}

TEST(Model, OutputMapAndConstants) {
  System s = parse_system(R"(
dim 2
output_dim 1
init x1 in [0, 1] x2 in [0, 1]
field x1' = x2
field x2' = -x1
output y1 = 2*x1 + x2
lipschitz_f 1
lipschitz_g 3
sensitivity_g 0.5
)");
  EXPECT_EQ(s.m(), 1u);
  EXPECT_FALSE(s.output_is_identity());
  EXPECT_DOUBLE_EQ(eval_output(s, Point{1.0, 2.0})[0], 4.0);
  EXPECT_DOUBLE_EQ(s.lg(), 3.0);
  EXPECT_DOUBLE_EQ(s.sg(), 0.5);
}

TEST(Model, DefaultDomainInflatesAroundTheta) {
  System s = parse_system("dim 2\ninit x1 in [0, 1] x2 in [2, 2]\nfield x1' = 0\nfield x2' = 0\n");
  EXPECT_DOUBLE_EQ(s.domain().lo(0), -4.5);
  EXPECT_DOUBLE_EQ(s.domain().hi(0), 5.5);
  EXPECT_DOUBLE_EQ(s.domain().lo(1), 1.0);
  EXPECT_DOUBLE_EQ(s.domain().hi(1), 3.0);
  EXPECT_TRUE(s.field_is_constant());
  EXPECT_DOUBLE_EQ(s.lf(), 0.0);
}

TEST(Model, ErrorsReportTheLine) {
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = x2\nlipschitz_f 1\n"), 3);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = -x1\nfield x1' = x1\nlipschitz_f 1\n"), 4);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nbogus 3\n"), 3);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [2, 1]\nfield x1' = 0\n"), 2);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\ndomain x1 in [0.5, 2]\nfield x1' = 0\n"), 3);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = -x1\nlipschitz_f -1\n"), 4);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = 0\ndiscrepancy table 1:0.5\n"), 4);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = 0\ndiscrepancy wobble 1\n"), 4);
  // Missing pieces are reported at the end of the text.
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\n"), 3);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = -x1\n"), 4);
  EXPECT_EQ(error_line("dim 1\ninit x1 in [0, 1]\nfield x1' = 0\nlipschitz_g 1\nsensitivity_g 2\n"), 5);
}

TEST(Model, EvaluationFailureNamesComponent) {
  System s = parse_system("dim 2\ninit x1 in [1, 2] x2 in [1, 2]\nfield x1' = 1\nfield x2' = 1/(x1 - 1)\nlipschitz_f 1\n");
  try {
    eval_field(s, Point{1.0, 1.0});
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.component(), 1u);
  }
}

TEST(Model, RejectsGammaAndTableTogether) {
  EXPECT_THROW(parse_system("dim 1\ninit x1 in [0, 1]\nfield x1' = 0\ndiscrepancy gamma 0\ndiscrepancy table 0:1\n"),
               ParseError);
}

TEST(Model, LoadSystemPrefixesPath) {
  try {
    load_system("/nonexistent/file.sys");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/file.sys"), std::string::npos);
  }
}

TEST(Model, CorpusFilesParse) {
  for (const char* name : {"brusselator", "brusselator_shifted", "constA", "constB", "decay", "rotation", "growth",
                           "drift", "spiral"}) {
    SCOPED_TRACE(name);
    System s = load_system(std::string(DYNABS_SYSTEMS_DIR) + "/" + name + ".sys");
    EXPECT_TRUE(s.domain().contains(s.theta()));
  }
}

// Sampled Lipschitz ratios never exceed the declared constants of the corpus.
TEST(Model, SampledLipschitzBelowDeclared) {
  for (const char* name : {"brusselator", "decay", "rotation", "growth", "spiral"}) {
    SCOPED_TRACE(name);
    System s = load_system(std::string(DYNABS_SYSTEMS_DIR) + "/" + name + ".sys");
    double est = estimate_lipschitz(s, 300);
    EXPECT_GT(est, 0.0);
    EXPECT_LE(est, s.lf() * (1 + 1e-9));
  }
  System bru = load_system(std::string(DYNABS_SYSTEMS_DIR) + "/brusselator.sys");
  EXPECT_GT(estimate_lipschitz(bru, 300), 2.5);
}
