#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include "mmroute/error.hpp"
#include "mmroute/outcome_store.hpp"
#include "mmroute/rng.hpp"
#include "mmroute/text_io.hpp"
#include "test_util.hpp"

using namespace mmroute;

namespace {

std::vector<ModelMeta> two_models() {
  return {reference_pool()[0], reference_pool()[2]};  // gpt-5-0807, claude-3.7-sonnet
}

std::string header() { return std::string(kOutcomeHeader) + "\n"; }

std::string row(const std::string& iid, const std::string& mid, const std::string& u,
                const std::string& c, const std::string& ds = "d1", const std::string& sc = "ocr",
                const std::string& mt = "1", const std::string& mi = "1") {
  return iid + "," + ds + "," + sc + "," + mt + "," + mi + "," + mid + "," + u + "," + c + "\n";
}

OutcomeTable table_from(const Eigen::MatrixXd& u, const Eigen::MatrixXd& c,
                        const std::vector<std::string>& datasets = {}) {
  std::vector<ModelMeta> models;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    ModelMeta m;
    m.model_id = "m" + std::to_string(j);
    m.display_name = m.model_id;
    models.push_back(m);
  }
  std::vector<Instance> inst;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    Instance x;
    x.instance_id = "i" + std::to_string(1000 + i);
    x.dataset = datasets.empty() ? "d" : datasets[static_cast<std::size_t>(i) % datasets.size()];
    x.scenario = "ocr";
    inst.push_back(x);
  }
  return OutcomeTable(models, inst, u, c);
}

}  // namespace

TEST(OutcomeParse, MinimalTwoByTwo) {
  const std::string text = header() + row("a", "gpt-5-0807", "1", "0.5") +
                           row("a", "claude-3.7-sonnet", "0", "0.7") +
                           row("b", "gpt-5-0807", "0", "0.4") +
                           row("b", "claude-3.7-sonnet", "1", "0.9");
  const auto t = parse_outcomes(text, two_models());
  ASSERT_EQ(t.num_instances(), 2u);
  ASSERT_EQ(t.num_models(), 2u);
  EXPECT_EQ(t.utility(0, 0), 1.0);
  EXPECT_EQ(t.cost(1, 1), 0.9);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(t.observed(i, j));
}

TEST(OutcomeParse, RowsSortedByInstanceIdAndPoolOrder) {
  const std::string text = header() + row("zz", "claude-3.7-sonnet", "1", "1") +
                           row("aa", "gpt-5-0807", "0.25", "0.5");
  const auto t = parse_outcomes(text, two_models());
  EXPECT_EQ(t.instances()[0].instance_id, "aa");
  EXPECT_EQ(t.instances()[1].instance_id, "zz");
  EXPECT_EQ(t.utility(0, 0), 0.25);
  EXPECT_TRUE(is_missing(t.utility(0, 1)));
  EXPECT_TRUE(is_missing(t.utility(1, 0)));
}

TEST(OutcomeParse, EmptyFieldsAreMissing) {
  const auto t = parse_outcomes(header() + row("a", "gpt-5-0807", "", "0.5"), two_models());
  EXPECT_TRUE(is_missing(t.utility(0, 0)));
  EXPECT_EQ(t.cost(0, 0), 0.5);
  EXPECT_FALSE(t.observed(0, 0));
}

TEST(OutcomeParse, UtilityOutOfRangeCitesRowAndCell) {
  std::string text = header();
  for (int i = 0; i < 16; ++i) text += row("i" + std::to_string(i), "gpt-5-0807", "0.5", "0.1");
  text += row("bad", "gpt-5-0807", "1.3", "0.1");  // data row 17
  try {
    parse_outcomes(text, two_models());
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 17"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(bad, gpt-5-0807)"), std::string::npos) << msg;
  }
}

TEST(OutcomeParse, RejectsNegativeCostDuplicatesAndUnknownModels) {
  EXPECT_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", "0.5", "-0.1"), two_models()),
               ValidationError);
  EXPECT_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", "0.5", "0.1") +
                                  row("a", "gpt-5-0807", "0.4", "0.1"),
                              two_models()),
               ValidationError);
  EXPECT_THROW(parse_outcomes(header() + row("a", "nope", "0.5", "0.1"), two_models()),
               ValidationError);
  EXPECT_THROW(parse_outcomes("instance_id,oops\n", two_models()), ValidationError);
  EXPECT_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", "0.5", "0.1", "d", "ocr", "0", "0"),
                              two_models()),
               ValidationError);
  EXPECT_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", "x", "0.1"), two_models()),
               ValidationError);
}

TEST(OutcomeParse, MetadataMustAgreeAcrossRows) {
  const std::string text = header() + row("a", "gpt-5-0807", "1", "0.5", "d1") +
                           row("a", "claude-3.7-sonnet", "1", "0.5", "d2");
  EXPECT_THROW(parse_outcomes(text, two_models()), ValidationError);
}

// Validation rejects exactly the out-of-range cells.
TEST(OutcomeParse, BoundaryValuesAccepted) {
  for (const char* u : {"0", "1", "0.0", "1.0", "0.999999"})
    EXPECT_NO_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", u, "0"), two_models())) << u;
  for (const char* u : {"-0.0001", "1.0000001", "2", "nan", "inf"})
    EXPECT_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", u, "0"), two_models()),
                 ValidationError)
        << u;
  EXPECT_THROW(parse_outcomes(header() + row("a", "gpt-5-0807", "0.5", "inf"), two_models()),
               ValidationError);
}

TEST(OutcomeParse, RoundTripThroughWriter) {
  Rng rng(3);
  Eigen::MatrixXd u(7, 3), c(7, 3);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u(i) = rng.below(4) == 0 ? kMissing : rng.uniform();
    c(i) = rng.uniform(0.0, 3.0);
  }
  u(0, 0) = 0.5;  // keep every instance non-empty
  const auto t = table_from(u, c, {"x", "y"});
  const std::string text = format_outcomes(t);
  const auto back = parse_outcomes(text, t.models());
  EXPECT_EQ(format_outcomes(back), text);
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (is_missing(u(i, j))) {
        EXPECT_TRUE(is_missing(back.utility(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
      } else {
        EXPECT_EQ(back.utility(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), u(i, j));
      }
      EXPECT_EQ(back.cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), c(i, j));
    }
}

TEST(OutcomeTable, ConstructorChecksShapesAndRanges) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(2, 2, 0.5);
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(2, 2, 0.1);
  EXPECT_NO_THROW(table_from(u, c));
  u(1, 1) = 1.5;
  EXPECT_THROW(table_from(u, c), ValidationError);
  u(1, 1) = 0.5;
  c(0, 0) = -1.0;
  EXPECT_THROW(table_from(u, c), ValidationError);
}

TEST(ModelPool, ReferencePricesAndFileRoundTrip) {
  const auto& pool = reference_pool();
  ASSERT_EQ(pool.size(), 10u);
  EXPECT_EQ(pool[0].model_id, "gpt-5-0807");
  EXPECT_DOUBLE_EQ(pool[0].price_per_million_output_tokens, 10.00);
  EXPECT_DOUBLE_EQ(pool[2].price_per_million_output_tokens, 15.00);
  EXPECT_DOUBLE_EQ(pool[9].price_per_million_output_tokens, 0.03);

  const testutil::TempDir dir;
  write_model_pool(pool, dir.path() / "pool.csv");
  const auto back = load_model_pool(dir.path() / "pool.csv");
  ASSERT_EQ(back.size(), pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    EXPECT_EQ(back[i].model_id, pool[i].model_id);
    EXPECT_EQ(back[i].display_name, pool[i].display_name);
    EXPECT_EQ(back[i].tier, pool[i].tier);
    EXPECT_DOUBLE_EQ(back[i].price_per_million_output_tokens, pool[i].price_per_million_output_tokens);
  }
}

TEST(ModelPool, RejectsDuplicatesAndNegativePrices) {
  auto pool = two_models();
  pool.push_back(pool[0]);
  EXPECT_THROW(validate_pool(pool), ValidationError);
  pool = two_models();
  pool[1].price_per_million_output_tokens = -1.0;
  EXPECT_THROW(validate_pool(pool), ValidationError);
}

TEST(Costs, NormalizeByMaximum) {
  const std::vector<double> prices{10.00, 15.00, 0.03};
  const auto n = normalize_costs(prices);
  EXPECT_NEAR(n[0], 0.6667, 1e-4);
  EXPECT_DOUBLE_EQ(n[1], 1.0);
  EXPECT_NEAR(n[2], 0.002, 1e-12);
  EXPECT_EQ(normalize_costs(std::vector<double>{5.0}), std::vector<double>{1.0});
  EXPECT_EQ(normalize_costs(std::vector<double>{0.0, 4.0}), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(normalize_costs(std::vector<double>{0.0, 0.0}), ValidationError);
  EXPECT_THROW(normalize_costs(std::vector<double>{1.0, -1.0}), ValidationError);
}

TEST(Costs, NormalizeIsIdempotent) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> raw(1 + rng.below(10));
    for (auto& v : raw) v = rng.uniform(0.0, 20.0);
    const auto once = normalize_costs(raw);
    const auto twice = normalize_costs(once);
    EXPECT_EQ(*std::max_element(once.begin(), once.end()), 1.0);
    for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_DOUBLE_EQ(once[i], twice[i]);
  }
}

TEST(Costs, TokenCost) {
  EXPECT_DOUBLE_EQ(token_cost(1'000'000, 10.00), 10.00);
  EXPECT_DOUBLE_EQ(token_cost(0, 15.00), 0.0);
  EXPECT_NEAR(token_cost(500'000, 0.03), 0.015, 1e-15);
}

TEST(Costs, InstanceCostUsesOptionalPrices) {
  ModelMeta m = reference_pool()[0];
  TokenCounts t;
  t.input_tokens = 2'000'000;
  t.image_tokens = 1'000'000;
  t.output_tokens[m.model_id] = 1'000'000;
  EXPECT_DOUBLE_EQ(instance_cost(t, m), 10.0);  // output tokens only by default
  m.price_per_million_input_tokens = 1.0;
  m.price_per_million_image_tokens = 0.5;
  EXPECT_DOUBLE_EQ(instance_cost(t, m), 10.0 + 2.0 + 0.5);
}

TEST(Costs, TableNormalizationGivesUnitMaxModelMean) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(3, 2, 0.5);
  Eigen::MatrixXd c(3, 2);
  c << 2, 10, 4, 20, 6, 30;
  const auto t = normalize_table_costs(table_from(u, c));
  EXPECT_NEAR(t.costs().col(1).mean(), 1.0, 1e-15);
  EXPECT_NEAR(t.costs().col(0).mean(), 0.2, 1e-15);
}

TEST(Splits, SizesAndVal) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(100, 2, 0.5);
  const auto t = table_from(u, u);
  const auto s = make_splits(t, 0.2, 0.25, 42);
  EXPECT_EQ(s.train.size() + s.val.size(), 20u);
  EXPECT_EQ(s.val.size(), 5u);
  EXPECT_EQ(s.test.size(), 80u);
  const auto s0 = make_splits(t, 0.2, 0.0, 42);
  EXPECT_TRUE(s0.val.empty());
  EXPECT_EQ(s0.train.size(), 20u);
}

TEST(Splits, DisjointExhaustiveDeterministic) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(97, 2, 0.5);
  const auto t = table_from(u, u, {"a", "b", "c"});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = make_splits(t, 0.3, 0.25, seed);
    std::set<std::size_t> all;
    for (const auto* part : {&s.train, &s.val, &s.test})
      for (auto r : *part) EXPECT_TRUE(all.insert(r).second);
    EXPECT_EQ(all.size(), 97u);
    const auto again = make_splits(t, 0.3, 0.25, seed);
    EXPECT_EQ(s.train, again.train);
    EXPECT_EQ(s.val, again.val);
    EXPECT_EQ(s.test, again.test);
  }
  EXPECT_NE(make_splits(t, 0.3, 0.25, 1).train, make_splits(t, 0.3, 0.25, 2).train);
}

TEST(Splits, StratifiedByDataset) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(200, 2, 0.5);
  const auto t = table_from(u, u, {"a", "a", "a", "b"});  // 150 a, 50 b
  const auto s = make_splits(t, 0.2, 0.0, 5);
  std::size_t a = 0;
  for (auto r : s.train) a += t.instances()[r].dataset == "a" ? 1 : 0;
  EXPECT_EQ(a, 30u);
  EXPECT_EQ(s.train.size() - a, 10u);
}

TEST(Splits, RejectsBadFractions) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(10, 2, 0.5);
  const auto t = table_from(u, u);
  EXPECT_THROW(make_splits(t, 0.0, 0.25, 0), ConfigError);
  EXPECT_THROW(make_splits(t, 1.0, 0.25, 0), ConfigError);
  EXPECT_THROW(make_splits(t, 0.5, 1.0, 0), ConfigError);
  EXPECT_THROW(make_splits(t, 0.5, -0.1, 0), ConfigError);
}

TEST(Splits, SerializationRoundTrip) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(30, 2, 0.5);
  const auto t = table_from(u, u, {"a", "b"});
  const auto s = make_splits(t, 0.4, 0.25, 9);
  const auto back = parse_split(format_split(s, t), t);
  EXPECT_EQ(back.train, s.train);
  EXPECT_EQ(back.val, s.val);
  EXPECT_EQ(back.test, s.test);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_DOUBLE_EQ(back.train_fraction, 0.4);
}

TEST(BestSingle, PicksHighestMeanUtility) {
  Eigen::MatrixXd u(2, 2), c(2, 2);
  u << 0.9, 0.8, 0.9, 0.8;
  c << 1.0, 0.1, 1.0, 0.1;
  const auto t = table_from(u, c);
  const std::vector<std::size_t> rows{0, 1};
  const auto b = best_single_model(t, rows);
  EXPECT_EQ(b.model, 0u);
  EXPECT_DOUBLE_EQ(b.p_best, 0.9);
  EXPECT_DOUBLE_EQ(b.c_best, 1.0);
  EXPECT_DOUBLE_EQ(b.c_min, 0.1);
  EXPECT_DOUBLE_EQ(b.c_max, 1.0);
}

TEST(BestSingle, SingleModelAndTieBreak) {
  Eigen::MatrixXd u1 = Eigen::MatrixXd::Constant(3, 1, 0.4);
  Eigen::MatrixXd c1 = Eigen::MatrixXd::Constant(3, 1, 0.3);
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto one = best_single_model(table_from(u1, c1), rows);
  EXPECT_EQ(one.model, 0u);
  EXPECT_DOUBLE_EQ(one.c_min, one.c_max);

  Eigen::MatrixXd u(3, 2), c(3, 2);
  u << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  c << 0.9, 0.2, 0.9, 0.2, 0.9, 0.2;
  EXPECT_EQ(best_single_model(table_from(u, c), rows).model, 1u);
}

TEST(BestSingle, OnlyFullyObservedColumnsQualify) {
  Eigen::MatrixXd u(2, 2), c(2, 2);
  u << 1.0, 0.2, kMissing, 0.2;
  c << 0.1, 0.1, 0.1, 0.1;
  const std::vector<std::size_t> rows{0, 1};
  EXPECT_EQ(best_single_model(table_from(u, c), rows).model, 1u);
  u(1, 1) = kMissing;
  EXPECT_THROW(best_single_model(table_from(u, c), rows), ValidationError);
}

TEST(OutcomeTable, DatasetQueries) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Constant(6, 1, 0.5);
  const auto t = table_from(u, u, {"b", "a"});
  EXPECT_EQ(t.datasets(), (std::vector<std::string>{"a", "b"}));
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  EXPECT_EQ(t.rows_in_dataset(rows, "a"), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(t.dataset_scenarios().at("a"), "ocr");
}

TEST(OutcomeFile, LoadPrefixesPath) {
  const testutil::TempDir dir;
  const auto path = dir.path() / "o.csv";
  write_file(path, header() + row("a", "gpt-5-0807", "3", "0"));
  try {
    load_outcomes(path, two_models());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("o.csv"), std::string::npos);
  }
}
