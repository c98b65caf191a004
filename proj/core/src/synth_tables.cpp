#include "catnet/synth.hpp"

namespace catnet {

namespace {

constexpr int kReferenceContracts = 803;

MarginalTable make_rating() {
  MarginalTable t{"sp_rating", {}, 803.0 / kReferenceContracts};
  t.levels = {
      {"NR", 350},
      {"BB+", 127},
      {"UNKNOWN", 76},
      {"B", 63},
      {"BB", 58},
      {"BB-", 53},
      {"B+", 27},
      {"B-", 22},
      {"BBB-", 13},
      {"BBB+", 6},
      {"A-", 4},
      {"A", 1},
      {"BBB", 1},
      {"A+", 1},
      {"AA", 1},
  };
  return t;
}

MarginalTable make_trigger() {
  MarginalTable t{"trigger_types", {}, 830.0 / kReferenceContracts};
  t.levels = {
      {"Indemnity", 359},
      {"Industry Loss Index", 224},
      {"Parametric", 154},
      {"Modelled Loss", 44},
      {"Multiple Trigger", 31},
      {"UNKNOWN", 6},
      {"County-weighted Industry Loss Index", 5},
      {"Mortality Index", 4},
      {"Modelled Industry Loss Index", 3},
  };
  return t;
}

MarginalTable make_modeler() {
  MarginalTable t{"risk_modeler", {}, 803.0 / kReferenceContracts};
  t.levels = {
      {"AIR", 411},
      {"UNKNOWN", 175},
      {"RMS", 109},
      {"EQECAT", 92},
      {"KatRisk", 8},
      {"Investors Model", 5},
      {"Aon", 1},
      {"Multiple", 1},
      {"Towers Watson", 1},
  };
  return t;
}

MarginalTable make_peril() {
  MarginalTable t{"perils", {}, 1896.0 / kReferenceContracts};
  t.levels = {
      {"earthquake", 556},
      {"hurricane", 321},
      {"namedstorm", 226},
      {"windstorm", 194},
      {"thunderstorm", 158},
      {"winterstorm", 104},
      {"wildfire", 97},
      {"cyclone", 59},
      {"flood", 43},
      {"typhoon", 34},
      {"meteorite-impact", 29},
      {"volcanic-eruption", 29},
      {"multi-peril", 14},
      {"tornado", 6},
      {"brushfire", 6},
      {"hailstorm", 6},
      {"UNKNOWN", 4},
      {"atmospheric-peril", 4},
      {"mortality", 3},
      {"temperature", 2},
      {"snowstorm", 1},
  };
  return t;
}

MarginalTable make_underwriter() {
  MarginalTable t{"underwriters", {}, 1327.0 / kReferenceContracts};
  t.levels = {
      {"Swiss Re", 341},
      {"AON", 235},
      {"Goldman Sachs", 206},
      {"Guy Carpenter", 164},
      {"Deutsche Bank", 65},
      {"Willis Capital Markets", 49},
      {"BNP Paribas", 47},
      {"Munich Re", 45},
      {"Citibank", 36},
      {"Lehman Brothers", 29},
      {"Merrill Lynch", 21},
      {"NT", 14},
      {"BoA", 10},
      {"Tiger Capital Markets", 7},
      {"MMC Securities", 7},
      {"Rewire Securities", 7},
      {"AIG", 6},
      {"American Re", 6},
      {"ABN AMRO", 5},
      {"SDD", 4},
      {"BP", 4},
      {"JLT Capital Markets", 3},
      {"JP Morgan Chase", 3},
      {"Towers Watson Capital Markets", 2},
      {"LCM", 2},
      {"Morgan Stanley", 2},
      {"UBS", 2},
      {"E.W. Blanch", 2},
      {"Hanover Re", 1},
      {"CDC IXIS", 1},
      {"UNKNOWN", 1},
  };
  return t;
}

MarginalTable make_country() {
  MarginalTable t{"countries", {}, 1224.0 / kReferenceContracts};
  t.levels = {
      {"U.S.", 670},
      {"Europe", 184},
      {"Japan", 133},
      {"Canada", 80},
      {"Mexico", 29},
      {"Australia", 15},
      {"UK", 15},
      {"France", 14},
      {"Belgium", 8},
      {"Germany", 8},
      {"Netherlands", 8},
      {"Ireland", 7},
      {"UNKNOWN", 7},
      {"Caribbean", 7},
      {"Denmark", 7},
      {"Luxembourg", 6},
      {"Italy", 4},
      {"Turkey", 3},
      {"Switzerland", 2},
      {"Norway", 2},
      {"Sweden", 2},
      {"Mediterranean", 2},
      {"Philippines", 2},
      {"Gulf of Mexico", 1},
      {"Portugal", 1},
      {"Spain", 1},
      {"Madrid", 1},
      {"Taiwan", 1},
      {"China", 1},
      {"Chile", 1},
      {"Colombia", 1},
      {"Peru", 1},
  };
  return t;
}

MarginalTable make_cedent() {
  MarginalTable t{"cedent", {}, 812.0 / kReferenceContracts};
  t.levels = {
      {"Swiss Re", 178},
      {"USAA", 75},
      {"Munich Re", 30},
      {"Hannover Re", 27},
      {"SCOR", 20},
      {"Nationwide Mutual", 19},
      {"Everest Re", 19},
      {"CA EQ Authority", 18},
      {"Allianz", 18},
      {"XL Bermuda", 15},
      {"Zenkyoren Ins.", 15},
      {"State Farm", 15},
      {"IBRD", 14},
      {"Allstate", 12},
      {"Chubb Group", 10},
      {"Assurant", 9},
      {"Tokio Marine", 8},
      {"AIG", 8},
      {"National Union", 8},
      {"Heritage PC", 8},
      {"Liberty Mutual", 8},
      {"Travellers", 7},
      {"Catlin Ins", 7},
      {"Safepoint Ins Co", 7},
      {"Citizen's Property Ins.", 7},
      {"Hartford", 7},
      {"Am Strategic Ins", 6},
      {"FEMA", 6},
      {"Louisiana Citizens", 6},
      {"Sompo Nipponkoa", 5},
      {"Argo Re", 5},
      {"AXIS Re", 5},
      {"Mitsui Sumitomo", 5},
      {"United PC", 5},
      {"Palomar Specialty Ins.", 5},
      {"Avatar PC", 5},
      {"AXA Global", 4},
      {"Am Re", 4},
      {"Glacier Re", 4},
      {"Arrow Re", 4},
      {"Fidelis Ins.", 4},
      {"CIG Re", 4},
      {"Am Integrity", 4},
      {"Nephila Capital Ltd.", 4},
      {"PXRE", 4},
      {"Bayview Opp Fd", 4},
      {"CA St Comp Ins Fd", 3},
      {"UnipolSai Ass SpA", 3},
      {"Amlin AG", 3},
      {"Flagstone", 3},
      {"FONDEN", 3},
      {"Great American Ins.", 3},
      {"Cincinnati Ins.", 3},
      {"Renaissance Re", 3},
      {"OCIL", 3},
      {"XL Insurance", 3},
      {"Validus Re", 3},
      {"NC Ins. Underwriting Assn.", 3},
      {"CEA", 3},
      {"Zurich", 3},
      {"Brit Ins. Holdings", 3},
      {"Castle Key Ins", 3},
      {"MMM IARD SA", 3},
      {"Tokio Millenium Re", 3},
      {"Transatlantic Re", 3},
      {"Endurance Sp. Ltd.", 3},
      {"Achmea Re", 2},
      {"American Family Ins", 2},
      {"Alphabet", 2},
      {"First Prot Ins", 2},
      {"ICAT Syndicate", 2},
      {"Convex Re", 2},
      {"TWIA", 2},
      {"DaVinci", 2},
      {"USFG", 2},
      {"Gerling", 2},
      {"Vesta wildfire Ins.", 2},
      {"Montpelier Re", 2},
      {"FM Global", 2},
      {"AGF", 2},
      {"Koch", 2},
      {"Federal Ins. Co.", 2},
      {"Flagstone Re Ltd", 2},
      {"Oriental Land", 2},
      {"Nissay Dowa", 2},
      {"Flagstone Re", 2},
      {"Am Family Mutual", 2},
      {"Natixis SA", 2},
      {"Sorema", 2},
      {"Kemper", 2},
      {"Turkish Cat Ins Pool", 2},
      {"American Coastal Ins", 2},
      {"First Mutual Trans", 2},
      {"Lehman Re", 2},
      {"Sempra En", 1},
      {"Hiscox Syndicate", 1},
      {"Vivendi", 1},
      {"Oak Tree Assur", 1},
      {"Amer Modern Ins", 1},
      {"Markel Bermuda", 1},
      {"FMTA", 1},
      {"Electricite de France", 1},
      {"Allied World", 1},
      {"Hamilton Re", 1},
      {"Brit Syndicates", 1},
      {"Universal PC", 1},
      {"Central Re Corp.", 1},
      {"Aura Re", 1},
      {"Texas Windst Ins. Assn", 1},
      {"Aspen Bermuda Ltd.", 1},
      {"NJ Manuf Ins", 1},
      {"Florida Muni Ins Tr", 1},
      {"Generali", 1},
      {"China PC", 1},
      {"Passenger Railroad Ins.", 1},
      {"Platinum", 1},
      {"Groupama", 1},
      {"Aspen Ins. Holdings", 1},
      {"Balboa Ins", 1},
      {"Dominion Resources", 1},
      {"Mass Property", 1},
      {"Assicurazioni Generali", 1},
      {"AmTrust Fin Svc", 1},
      {"Equator Re Ltd", 1},
      {"Converium", 1},
      {"GI Capital Ltd.", 1},
      {"Aioi Nissay Dowa", 1},
      {"Security First Ins.", 1},
  };
  return t;
}

}  // namespace

int MarginalTable::total() const {
  int sum = 0;
  for (const auto& level : levels) sum += level.count;
  return sum;
}

const MarginalTable& rating_marginal() {
  static const MarginalTable table = make_rating();
  return table;
}

const MarginalTable& trigger_marginal() {
  static const MarginalTable table = make_trigger();
  return table;
}

const MarginalTable& modeler_marginal() {
  static const MarginalTable table = make_modeler();
  return table;
}

const MarginalTable& peril_marginal() {
  static const MarginalTable table = make_peril();
  return table;
}

const MarginalTable& underwriter_marginal() {
  static const MarginalTable table = make_underwriter();
  return table;
}

const MarginalTable& country_marginal() {
  static const MarginalTable table = make_country();
  return table;
}

const MarginalTable& cedent_marginal() {
  static const MarginalTable table = make_cedent();
  return table;
}

std::span<const NumericMoment> numeric_moments() {
  static const NumericMoment moments[] = {
      {"issue_amount_musd", 134.34, 115.46},
      {"spread_premium", 0.0758, 0.0503},
      {"expected_loss", 0.0003, 0.0004},
      {"prob_first_loss", 0.0024, 0.0084},
      {"prob_exhaust", 0.0016, 0.0056},
      {"conditional_expected_loss", 0.0078, 0.0319},
  };
  return moments;
}

std::span<const std::string_view> synthetic_states() {
  static constexpr std::string_view states[] = {
      "Florida", "California", "Texas", "Louisiana", "North Carolina", "South Carolina",
      "New York", "Massachusetts", "Hawaii", "Alabama", "Ontario", "British Columbia",
      "Quebec", "Tokyo", "Osaka", "Kanto"};
  return states;
}

}  // namespace catnet
