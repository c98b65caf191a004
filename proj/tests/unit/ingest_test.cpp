#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "catnet/contract.hpp"
#include "catnet/error.hpp"
#include "catnet/features.hpp"
#include "catnet/graph_builder.hpp"
#include "catnet/synth.hpp"
#include "test_support.hpp"

namespace catnet {
namespace {

std::string header() {
  std::string h;
  for (std::size_t i = 0; i < kContractColumns.size(); ++i) {
    if (i) h += ',';
    h += kContractColumns[i];
  }
  return h + '\n';
}

TEST(ParseCsv, SplitsListsAndKeepsUnknownModeler) {
  std::istringstream in(header() +
                        "CAT1,2010,3,100,0.07,0.01,0.02,0.005,0.4,BB,Indemnity;Parametric,UNKNOWN,"
                        "earthquake;hurricane,United States,Florida,Swiss Re,Aon;GC Securities,36\n");
  const ParseResult res = parse_csv(in);
  ASSERT_TRUE(res.errors.empty());
  ASSERT_EQ(res.records.size(), 1u);
  const ContractRecord& r = res.records[0];
  EXPECT_EQ(r.perils, (std::vector<std::string>{"earthquake", "hurricane"}));
  EXPECT_EQ(r.trigger_types.size(), 2u);
  EXPECT_EQ(r.risk_modeler, "UNKNOWN");
  EXPECT_EQ(r.issue_month, 3);
  EXPECT_DOUBLE_EQ(r.spread_premium, 0.07);

  const ContractGraph cg = build_graph(res.records);
  const auto modeler = cg.graph.find_node(NodeKind::RiskModeler, "UNKNOWN");
  ASSERT_TRUE(modeler.has_value());
  EXPECT_EQ(cg.graph.node(*modeler).label, "UNKNOWN");
}

TEST(ParseCsv, BadNumberIsARowErrorAndParsingContinues) {
  std::istringstream in(header() +
                        "A,2010,3,100,abc,0.01,0.02,0.005,0.4,BB,Indemnity,AIR,flood,Japan,,X,Y,12\n"
                        "B,2011,4,100,0.05,0.01,0.02,0.005,0.4,BB,Indemnity,AIR,flood,Japan,,X,Y,12\n");
  const ParseResult res = parse_csv(in);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].contract_id, "B");
  ASSERT_EQ(res.errors.size(), 1u);
  EXPECT_EQ(res.errors[0].line, 2u);
  EXPECT_EQ(res.errors[0].column, "spread_premium");
}

TEST(ParseCsv, MissingColumnIsNamed) {
  std::istringstream in("contract_id,issue_year\nA,2010\n");
  try {
    parse_csv(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("issue_month"), std::string::npos);
  }
}

TEST(ParseCsv, CorpusSizeIsPreserved) {
  const auto records = synth_dataset(803, 5);
  std::istringstream in(to_csv(records));
  const ParseResult res = parse_csv(in);
  EXPECT_TRUE(res.errors.empty());
  EXPECT_EQ(res.records.size(), 803u);
}

TEST(ParseCsv, CanonicalCsvRoundTripsExactly) {
  const auto records = synth_dataset(60, 9);
  const std::string text = to_csv(records);
  std::istringstream in(text);
  const ParseResult res = parse_csv(in);
  EXPECT_EQ(res.records, records);
  EXPECT_EQ(to_csv(res.records), text);
}

TEST(CsvEscape, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

ContractRecord single_entity_record(const std::string& id, const std::string& cedent) {
  ContractRecord r = testing::make_record(id, 2010, {"flood"}, cedent, 0.05, 0.01);
  r.underwriters = {"Aon"};
  r.countries = {"Japan"};
  r.states_provinces = {"Tokyo"};
  r.risk_modeler = "AIR";
  return r;
}

TEST(BuildGraph, SingleRecordEnumeration) {
  const std::vector<ContractRecord> records{single_entity_record("C1", "Swiss Re")};
  const ContractGraph cg = build_graph(records);
  EXPECT_EQ(cg.graph.num_nodes(), 7u);
  EXPECT_EQ(cg.graph.num_edges(), 6u + 15u);
  const NodeId c = cg.contract_nodes.at(0);
  EXPECT_EQ(cg.graph.degree(c), 6u);
  EXPECT_EQ(cg.issue_years.at(c), 2010);
  EXPECT_DOUBLE_EQ(cg.targets.at(c), 0.05);
  EXPECT_TRUE(cg.graph.frozen());
  const auto registry = relation_registry();
  EXPECT_EQ(std::vector<std::string>(cg.graph.relations().begin(), cg.graph.relations().end()), registry);
}

TEST(BuildGraph, SharedCedentIsOneNode) {
  const std::vector<ContractRecord> records{single_entity_record("C1", "Swiss Re"),
                                            single_entity_record("C2", "swiss re ")};
  const ContractGraph cg = build_graph(records);
  const auto swiss = cg.graph.find_node(NodeKind::Cedent, "Swiss Re");
  ASSERT_TRUE(swiss.has_value());
  EXPECT_GE(cg.graph.degree(*swiss), 2u);
  EXPECT_EQ(cg.graph.num_nodes(), 8u);
}

TEST(BuildGraph, DuplicateContractIdThrows) {
  const std::vector<ContractRecord> records{single_entity_record("C1", "A"), single_entity_record("C1", "B")};
  EXPECT_THROW(build_graph(records), DataError);
}

TEST(BuildGraph, PairRelationLabelIsSymmetric) {
  for (std::size_t i = 1; i < kAllNodeKinds.size(); ++i) {
    for (std::size_t j = 1; j < kAllNodeKinds.size(); ++j) {
      EXPECT_EQ(pair_relation_label(kAllNodeKinds[i], kAllNodeKinds[j]),
                pair_relation_label(kAllNodeKinds[j], kAllNodeKinds[i]));
    }
  }
  EXPECT_EQ(pair_relation_label(NodeKind::Country, NodeKind::Peril), "peril-with-country");
}

using LabelledEdge = std::tuple<std::string, std::string, std::string>;

std::multiset<LabelledEdge> labelled_edges(const HeteroGraph& g) {
  std::multiset<LabelledEdge> out;
  for (const Edge& e : g.edges()) {
    std::string a = entity_key(g.node(e.u).kind, g.node(e.u).label);
    std::string b = entity_key(g.node(e.v).kind, g.node(e.v).label);
    if (b < a) std::swap(a, b);
    out.emplace(a, g.relation_label(e.r), b);
  }
  return out;
}

TEST(BuildGraph, RecordOrderDoesNotChangeTheGraph) {
  auto records = synth_dataset(80, 21);
  const auto reference = labelled_edges(build_graph(records).graph);
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(records.begin(), records.end());
    const ContractGraph cg = build_graph(records);
    EXPECT_EQ(labelled_edges(cg.graph), reference);
  }
}

TEST(EncodeTemporal, ExactTrigValues) {
  ContractRecord r = testing::make_record("X", 2004, {"flood"}, "A", 0.05, 0.01);
  r.issue_month = 12;
  auto t = encode_temporal(r, 2004);
  EXPECT_NEAR(t.month_sin, 0.0, 1e-12);
  EXPECT_NEAR(t.month_cos, 1.0, 1e-12);
  EXPECT_EQ(t.years_since_epoch, 0.0);
  r.issue_month = 3;
  t = encode_temporal(r, 1999);
  EXPECT_NEAR(t.month_sin, 1.0, 1e-12);
  EXPECT_NEAR(t.month_cos, 0.0, 1e-12);
  EXPECT_EQ(t.years_since_epoch, 5.0);
  r.issue_month = 13;
  EXPECT_THROW(encode_temporal(r, 1999), DataError);
  r.issue_month = 0;
  EXPECT_THROW(encode_temporal(r, 1999), DataError);
}

TEST(EncodeTemporal, DecemberAndJanuaryAreNeighbours) {
  ContractRecord dec = testing::make_record("X", 2004, {"flood"}, "A", 0.05, 0.01);
  ContractRecord jan = dec;
  dec.issue_month = 12;
  jan.issue_month = 1;
  const auto a = encode_temporal(dec, 2000);
  const auto b = encode_temporal(jan, 2000);
  const double chord = std::hypot(a.month_sin - b.month_sin, a.month_cos - b.month_cos);
  EXPECT_NEAR(chord, 2.0 * std::sin(std::numbers::pi / 12.0), 1e-12);
}

TEST(EncodeTemporal, UnitCircleForEveryMonth) {
  ContractRecord r = testing::make_record("X", 2004, {"flood"}, "A", 0.05, 0.01);
  for (int m = 1; m <= 12; ++m) {
    r.issue_month = m;
    const auto t = encode_temporal(r, 2000);
    EXPECT_NEAR(t.month_sin * t.month_sin + t.month_cos * t.month_cos, 1.0, 1e-12);
  }
}

TEST(OneHot, MultiValuedRowSetsEveryCategory) {
  ContractRecord r = testing::make_record("X", 2004, {"flood"}, "A", 0.05, 0.01);
  r.trigger_types = {"Indemnity", "Parametric"};
  const std::vector<ContractRecord> records{r};
  const FeatureMatrix m = one_hot_multi(records, CategoricalField::TriggerTypes);
  ASSERT_EQ(m.values.cols(), 2);
  EXPECT_EQ(m.values(0, 0), 1.0);
  EXPECT_EQ(m.values(0, 1), 1.0);
}

TEST(OneHot, UnseenCategoryEncodesToZeros) {
  const CategoryVocabulary vocab({"Indemnity", "Parametric"});
  std::vector<double> out(2, 9.0);
  const std::vector<std::string> row{"Industry Index"};
  vocab.encode(row, out);
  EXPECT_EQ(out, (std::vector<double>{0.0, 0.0}));
}

TEST(OneHot, FifteenRatingLevels) {
  const MarginalTable& ratings = rating_marginal();
  ASSERT_EQ(ratings.levels.size(), 15u);
  std::vector<ContractRecord> records;
  for (std::size_t i = 0; i < ratings.levels.size(); ++i) {
    ContractRecord r = testing::make_record("R" + std::to_string(i), 2004, {"flood"}, "A", 0.05, 0.01);
    r.sp_rating = std::string(ratings.levels[i].label);
    records.push_back(r);
  }
  const FeatureMatrix m = one_hot_multi(records, CategoricalField::SpRating);
  EXPECT_EQ(m.values.cols(), 15);
  EXPECT_EQ(m.values.sum(), 15.0);
}

TEST(Standardize, HandArithmetic) {
  Matrix m(3, 2);
  m << 1, 5, 2, 5, 3, 5;
  const std::vector<std::size_t> cols{0, 1};
  const std::vector<std::size_t> rows{0, 1, 2};
  const StandardizeResult res = standardize(m, cols, rows);
  const double z = std::sqrt(1.5);
  EXPECT_NEAR(res.values(0, 0), -z, 1e-12);
  EXPECT_NEAR(res.values(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(res.values(2, 0), z, 1e-12);
  EXPECT_NEAR(res.values(0, 0), -1.2247, 1e-4);
  EXPECT_EQ(res.flagged, (std::vector<std::size_t>{1}));
  EXPECT_TRUE(res.scalers[1].degenerate);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(res.values(i, 1), 0.0);
}

TEST(Standardize, UsesFitRowsOnly) {
  Matrix m(4, 1);
  m << 0, 2, 100, -50;
  const std::vector<std::size_t> cols{0};
  const std::vector<std::size_t> rows{0, 1};
  const StandardizeResult res = standardize(m, cols, rows);
  EXPECT_DOUBLE_EQ(res.scalers[0].mean, 1.0);
  EXPECT_DOUBLE_EQ(res.scalers[0].std, 1.0);
  EXPECT_DOUBLE_EQ(res.values(2, 0), 99.0);
}

TEST(Encoding, TargetIsNotAFeature) {
  const auto records = synth_dataset(40, 3);
  const EncodingConfig config = fit_encoding(records);
  for (const auto& name : contract_feature_names(config)) EXPECT_EQ(name.find("spread"), std::string::npos);
  EXPECT_THROW(fit_encoding(std::span<const ContractRecord>{}), DataError);
}

TEST(AttachFeatures, BlocksAreZeroWhereTheyDoNotApply) {
  const auto records = synth_dataset(30, 8);
  const ContractGraph cg = build_graph(records);
  const EncodingConfig config = fit_encoding(records);
  const std::size_t n = cg.graph.num_nodes();

  const FeatureMatrix plain = attach_features(cg.graph, records, config, nullptr);
  TopoFeatures topo;
  topo.values = Matrix::Constant(static_cast<Eigen::Index>(n), kTopoFeatureCount, 0.0);
  for (Eigen::Index i = 0; i < topo.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < topo.values.cols(); ++j) topo.values(i, j) = static_cast<double>(i * 10 + j + 1);
  }
  const FeatureMatrix with = attach_features(cg.graph, records, config, &topo);
  const std::size_t n_contract = contract_feature_names(config).size();
  const std::size_t t0 = with.column(kTopoColumns[0]);

  for (NodeId u = 0; u < n; ++u) {
    const bool contract = cg.graph.node(u).kind == NodeKind::Contract;
    for (std::size_t j = 0; j < n_contract; ++j) {
      if (!contract) {
        EXPECT_EQ(plain.values(u, static_cast<Eigen::Index>(j)), 0.0);
        EXPECT_EQ(with.values(u, static_cast<Eigen::Index>(j)), 0.0);
      }
    }
    for (std::size_t k = 0; k < kTopoFeatureCount; ++k) {
      const double v = with.values(u, static_cast<Eigen::Index>(t0 + k));
      if (contract) {
        EXPECT_EQ(v, 0.0);
      } else {
        EXPECT_EQ(v, topo.values(u, static_cast<Eigen::Index>(k)));
      }
    }
  }

  TopoFeatures wrong;
  wrong.values = Matrix::Zero(static_cast<Eigen::Index>(n), 3);
  EXPECT_THROW(attach_features(cg.graph, records, config, &wrong), DataError);
}

}  // namespace
}  // namespace catnet
