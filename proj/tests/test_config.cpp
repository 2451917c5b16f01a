#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "preflight/preflight.hpp"
#include "support/fixtures.hpp"

using namespace preflight;
using preflight::testing::reference_model;
using preflight::testing::reference_model_path;

namespace {

nlohmann::json reference_json() {
  std::ifstream in(reference_model_path());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(LoadModel, ReferenceNodeMasses) {
  const auto& m = reference_model();
  EXPECT_NEAR(m.node("BODY").mass, 3.518, 1e-12);
  EXPECT_NEAR(m.node("DSAP").mass, 0.117, 1e-12);
  EXPECT_EQ(m.name, "HOKUSHIN-1");
}

TEST(LoadModel, ReferenceValidatesClean) {
  const auto report = validate_model(reference_model());
  EXPECT_TRUE(report.errors.empty()) << report.errors.front();
  EXPECT_TRUE(report.usable());
}

TEST(LoadModel, EmptyTextIsParseError) { EXPECT_THROW(parse_model(""), ParseError); }

TEST(LoadModel, MissingFileIsParseError) { EXPECT_THROW(load_model("/nonexistent/model.json"), ParseError); }

TEST(LoadModel, UnknownFinishNamesIt) {
  auto j = reference_json();
  j["patches"]["DSAP_back"]["coating"] = {{"gold", 1.0}};
  try {
    parse_model(j.dump());
    FAIL() << "expected ReferenceError";
  } catch (const ReferenceError& e) {
    EXPECT_EQ(e.name(), "gold");
    EXPECT_NE(std::string(e.what()).find("gold"), std::string::npos);
  }
}

TEST(LoadModel, UnknownKeyRejected) {
  auto j = reference_json();
  j["materials"]["A6061"]["emisivity"] = 0.5;
  EXPECT_THROW(parse_model(j.dump()), SchemaError);
  auto k = reference_json();
  k["bogus_section"] = 1;
  EXPECT_THROW(parse_model(k.dump()), SchemaError);
}

TEST(LoadModel, MissingSectionRejected) {
  auto j = reference_json();
  j.erase("nodes");
  EXPECT_THROW(parse_model(j.dump()), SchemaError);
}

TEST(LoadModel, WrongSchemaVersion) {
  auto j = reference_json();
  j["schema_version"] = 2;
  EXPECT_THROW(parse_model(j.dump()), SchemaError);
}

TEST(LoadModel, UnitSuffixesConvertToSi) {
  const auto& m = reference_model();
  EXPECT_NEAR(m.material("A6061").youngs_modulus, 68.9e9, 1.0);
  EXPECT_NEAR(m.material("A6061").density, 2700.0, 1e-9);
  EXPECT_NEAR(m.patch("DSAP_back").area, 0.261 * 0.073, 1e-12);
  EXPECT_NEAR(m.requirements.envelope_m, 6.5e-3, 1e-15);
  ASSERT_FALSE(m.requirements.temperature_bands.empty());
  bool found = false;
  for (const auto& b : m.requirements.temperature_bands) {
    if (b.name == "ic_components") {
      EXPECT_NEAR(b.min_k, 233.15, 1e-9);
      EXPECT_NEAR(b.max_k, 353.15, 1e-9);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_NEAR(parse_quantity("-40 C", Dimension::kTemperature), 233.15, 1e-12);
  EXPECT_NEAR(parse_quantity("27 cm2", Dimension::kArea), 27e-4, 1e-15);
  EXPECT_THROW(parse_quantity("5 furlong", Dimension::kLength), SchemaError);
}

TEST(LoadModel, RoundTripIsStructurallyIdentical) {
  const auto& m = reference_model();
  const auto again = parse_model(model_to_json(m).dump());
  EXPECT_TRUE(again == m);
  // and a second pass is a fixed point of the serializer
  EXPECT_EQ(model_to_json(again).dump(), model_to_json(m).dump());
}

TEST(ValidateModel, FractionsSummingToPointNineGiveOneError) {
  SatelliteModel m = reference_model();
  for (auto& p : m.patches) {
    if (p.name == "DSAP_back") p.finish_fractions = {{"aluminum", 0.9}};
  }
  const auto report = validate_model(m);
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_NE(report.errors.front().find("DSAP_back"), std::string::npos);
}

TEST(ValidateModel, HighAlphaWarnsOnly) {
  SatelliteModel m = reference_model();
  m.finishes["aluminum"].alpha = 0.99;
  const auto report = validate_model(m);
  EXPECT_TRUE(report.errors.empty());
  ASSERT_FALSE(report.warnings.empty());
  EXPECT_NE(report.warnings.front().find("aluminum"), std::string::npos);
}

TEST(ValidateModel, CatchesBrokenInvariants) {
  SatelliteModel m = reference_model();
  m.patches.front().normal = Eigen::Vector3d(1.0, 1.0, 0.0);
  m.patches.back().area = 0.0;
  m.nodes.front().mass = -1.0;
  const auto report = validate_model(m);
  EXPECT_EQ(report.errors.size(), 3u);
  EXPECT_FALSE(report.usable());
}

TEST(EffectiveOptics, SingleFinishIsIdentity) {
  std::map<std::string, SurfaceFinish> cat{{"x", {"x", 0.5, 0.5}}};
  SurfacePatch p;
  p.finish_fractions = {{"x", 1.0}};
  const auto o = effective_optical_properties(p, cat);
  EXPECT_DOUBLE_EQ(o.alpha, 0.5);
  EXPECT_DOUBLE_EQ(o.epsilon, 0.5);
}

TEST(EffectiveOptics, SymmetricMix) {
  std::map<std::string, SurfaceFinish> cat{{"a", {"a", 0.2, 0.1}}, {"b", {"b", 0.8, 0.9}}};
  SurfacePatch p;
  p.finish_fractions = {{"a", 0.5}, {"b", 0.5}};
  const auto o = effective_optical_properties(p, cat);
  EXPECT_NEAR(o.alpha, 0.5, 1e-15);
  EXPECT_NEAR(o.epsilon, 0.5, 1e-15);
}

TEST(EffectiveOptics, SeventyThirtyMixFromCatalog) {
  const auto& base = reference_model();
  const auto m = with_surface(base, "d");
  const auto o = effective_optical_properties(m.patch("BODY-X"), m.finishes);
  const auto& al = m.finishes.at("aluminum");
  const auto& pi = m.finishes.at("polyimide");
  EXPECT_NEAR(o.alpha, 0.7 * al.alpha + 0.3 * pi.alpha, 1e-12);
  EXPECT_NEAR(o.epsilon, 0.7 * al.epsilon + 0.3 * pi.epsilon, 1e-12);
  EXPECT_GE(o.alpha, std::min(al.alpha, pi.alpha));
  EXPECT_LE(o.alpha, std::max(al.alpha, pi.alpha));
}

TEST(EffectiveOptics, UnknownFinishThrows) {
  SurfacePatch p;
  p.finish_fractions = {{"gold", 1.0}};
  EXPECT_THROW(effective_optical_properties(p, {}), ReferenceError);
}

TEST(AllowableStress, Examples) {
  const auto& m = reference_model();
  EXPECT_NEAR(allowable_stress(m.material("A6061"), 0.30), 88.5e6, 1.0);
  EXPECT_NEAR(allowable_stress(m.material("FR4"), 0.30), 93.0e6, 1.0);
  EXPECT_DOUBLE_EQ(allowable_stress(m.material("FR4"), 1.0), m.material("FR4").tensile_strength);
  EXPECT_THROW(allowable_stress(m.material("FR4"), 0.0), DomainError);
  EXPECT_THROW(allowable_stress(m.material("FR4"), 1.2), DomainError);
}

TEST(AllowableStress, MonotoneInBothArguments) {
  Material weak{"w", 1e9, 1000, 100e6, 900, 1};
  Material strong{"s", 1e9, 1000, 200e6, 900, 1};
  EXPECT_LT(allowable_stress(weak, 0.3), allowable_stress(weak, 0.4));
  EXPECT_LT(allowable_stress(weak, 0.3), allowable_stress(strong, 0.3));
}

TEST(SurfaceConfig, OverridesOnlyNamedPatches) {
  const auto& base = reference_model();
  const auto b = with_surface(base, "b");
  EXPECT_EQ(b.patch("DSAP_back").finish_fractions.front().finish, "polyimide");
  EXPECT_EQ(b.patch("DSAP_front").finish_fractions, base.patch("DSAP_front").finish_fractions);
  EXPECT_THROW(with_surface(base, "z"), ReferenceError);
}
