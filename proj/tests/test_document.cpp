#include <catch_amalgamated.hpp>

#include "picard/document.hpp"
#include "random_complexes.hpp"

using namespace picard;

namespace {

std::string str(const FgAbGroup& g) { return canonical_form(g).to_string(); }

// The error message of a DocumentError, or "" if the text parses.
std::string error_path(const std::string& text) {
  try {
    parse_document(text);
  } catch (const DocumentError& e) {
    return e.path();
  }
  return "";
}

std::string error_text(const std::string& text) {
  try {
    parse_document(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

void round_trip(const Document& d) {
  const std::string text = emit_document(d);
  CHECK(emit_document(parse_document(text)) == text);
}

SheafComplex circle_complex() {
  const PosetSite c({"a", "b", "c", "d"}, {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
  const PosetSheaf z = PosetSheaf::constant(c, FgAbGroup::free(1));
  const PosetSheaf z2 = PosetSheaf::constant(c, FgAbGroup::cyclic(2));
  return SheafComplex(-1, {z, z2}, {std::vector<IntMatrix>(4, IntMatrix{{1}})});
}

}  // namespace

TEST_CASE("group document with one relation is Z/2") {
  const auto d = parse_document(R"({"n_gens": 1, "relations": [[2]]})");
  REQUIRE(std::holds_alternative<FgAbGroup>(d));
  CHECK(str(std::get<FgAbGroup>(d)) == "Z/2");
  CHECK(str(std::get<FgAbGroup>(parse_document(R"({"kind":"group","n_gens":2})"))) == "Z^2");
  CHECK(canonical_document(R"({"relations":[[2]],"n_gens":1})") ==
        "{\n  \"kind\": \"group\",\n  \"n_gens\": 1,\n  \"relations\": [[2]]\n}\n");
}

TEST_CASE("complex with d o d != 0 is rejected naming the degree") {
  const std::string text = R"({"kind": "complex", "lo": -2,
    "groups": [{"n_gens": 1}, {"n_gens": 1}, {"n_gens": 1}],
    "differentials": [[[1]], [[1]]]})";
  const std::string msg = error_text(text);
  CHECK(msg.find("d^-1 o d^-2 is not zero") != std::string::npos);
  CHECK(msg.find("degree -2") != std::string::npos);
  CHECK(error_path(text) == "/differentials/1");
  // Mod 2 the same composite vanishes.
  CHECK_NOTHROW(parse_document(R"({"kind": "complex", "lo": 0,
    "groups": [{"n_gens": 1}, {"n_gens": 1, "relations": [[2]]}, {"n_gens": 1, "relations": [[2]]}],
    "differentials": [[[2]], [[1]]]})"));
}

TEST_CASE("errors carry a field path or a line") {
  CHECK(error_path(R"({"kind":"complex","lo":0,"groups":[{"n_gens":1},{"n_gens":1,"relations":[["x"]]}]})") ==
        "/groups/1/relations/0/0");
  CHECK(error_path(R"({"kind":"complex","lo":0,"groups":[{"n_gens":1},{"n_gens":2}],"differentials":[[[1]]]})") ==
        "/differentials/0");
  CHECK(error_path(R"({"kind":"group","n_gens":1,"relations":[[1.5]]})") == "/relations/0/0");
  CHECK(error_path(R"({"kind":"group","n_gens":1,"colour":3})") == "/colour");
  CHECK(error_path(R"({"kind":"banana"})") == "/kind");
  CHECK(error_path(R"({"lo":0})") == "");  // the root
  CHECK(error_path(R"({"kind":"matrix","rows":1,"cols":2,"entries":[[1]]})") == "/entries/0");
  CHECK(error_path(R"({"kind":"site","elements":["a"],"covers":[["a","q"]]})") == "/covers/0/1");
  // Differential not compatible with the relations.
  CHECK(error_path(R"({"kind":"complex","lo":0,"groups":[{"n_gens":1,"relations":[[2]]},{"n_gens":1}],"differentials":[[[1]]]})") ==
        "/differentials/0");
  const std::string bad = "{\n  \"kind\": \"group\",\n  \"n_gens\": 1,,\n}";
  const std::string msg = error_text(bad);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(parse_document("[1, 2]"), DocumentError);
}

TEST_CASE("integers are exact at any size") {
  const std::string big = "123456789012345678901234567890";
  const auto g = std::get<FgAbGroup>(
      parse_document("{\"kind\":\"group\",\"n_gens\":1,\"relations\":[[" + big + "]]}"));
  CHECK(str(g) == "Z/" + big);
  const auto h = std::get<FgAbGroup>(
      parse_document("{\"kind\":\"group\",\"n_gens\":1,\"relations\":[[\"-" + big + "\"]]}"));
  CHECK(str(h) == "Z/" + big);
  // Emitted as a string once it leaves the 64-bit range, as a number before.
  CHECK(emit_document(g).find("\"" + big + "\"") != std::string::npos);
  const auto m = std::get<IntMatrix>(parse_document(
      R"({"kind":"matrix","rows":1,"cols":2,"entries":[[9223372036854775807, "-9223372036854775808"]]})"));
  CHECK(emit_document(m).find("[[9223372036854775807,-9223372036854775808]]") != std::string::npos);
}

TEST_CASE("canonical emission is a fixed point") {
  const std::string loose = R"({ "entries": [["7", -2], [0, 3]], "kind": "matrix" })";
  const std::string c = canonical_document(loose);
  CHECK(c == "{\n  \"cols\": 2,\n  \"entries\": [[7,-2],[0,3]],\n  \"kind\": \"matrix\",\n  \"rows\": 2\n}\n");
  CHECK(canonical_document(c) == c);
  CHECK(std::get<IntMatrix>(parse_document(c)) == (IntMatrix{{7, -2}, {0, 3}}));
  const std::string empty = canonical_document(R"({"kind":"matrix","rows":0,"cols":3,"entries":[]})");
  CHECK(std::get<IntMatrix>(parse_document(empty)).cols() == 3);
  CHECK(canonical_document(R"({"kind":"matrix","rows":2,"cols":0,"entries":[[],[]]})") ==
        canonical_document(canonical_document(R"({"kind":"matrix","rows":2,"cols":0,"entries":[[],[]]})")));
  // Omitted differentials are zero.
  const auto k = std::get<CochainComplex>(
      parse_document(R"({"kind":"complex","lo":-1,"groups":[{"n_gens":1},{"n_gens":1}]})"));
  CHECK(k.diff(-1).is_zero());
}

TEST_CASE("random complexes round trip") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    const auto k = testing::random_complex(rng, -2 + static_cast<int>(rng() % 2), 0);
    const std::string text = emit_document(k);
    const auto back = std::get<CochainComplex>(parse_document(text));
    CHECK(back == k);
    CHECK(emit_document(back) == text);
  }
  round_trip(CochainComplex());
  round_trip(IntMatrix{{1, 2, 3}});
}

TEST_CASE("sites and sheaf complexes round trip") {
  const SheafComplex k = circle_complex();
  const std::string text = emit_document(k);
  const auto back = std::get<SheafComplex>(parse_document(text));
  CHECK(back.site() == k.site());
  CHECK(str(tors_groups(back)[0]) == str(tors_groups(k)[0]));
  CHECK(emit_document(back) == text);
  round_trip(k.site());
  round_trip(PosetSite::point());

  // Restriction listed in another order, integers as strings.
  const std::string loose = R"({"kind":"sheaf-complex","lo":0,
    "site":{"elements":["y","x"],"covers":[["x","y"]]},
    "degrees":[{"stalks":{"x":{"n_gens":1},"y":{"n_gens":1,"relations":[["3"]]}},
                "restrictions":[{"to":"y","from":"x","matrix":[[1]]}]}]})";
  const auto s = std::get<SheafComplex>(parse_document(loose));
  CHECK(str(global_sections(s.sheaf(0))) == "Z");
  CHECK(canonical_document(canonical_document(loose)) == canonical_document(loose));

  CHECK(error_path(R"({"kind":"sheaf-complex","lo":0,
    "site":{"elements":["x","y"],"covers":[["x","y"]]},
    "degrees":[{"stalks":{"x":{"n_gens":1},"y":{"n_gens":1}},"restrictions":[]}]})") ==
        "/degrees/0/restrictions");
  CHECK(error_path(R"({"kind":"sheaf-complex","lo":0,
    "site":{"elements":["x","y"],"covers":[["x","y"]]},
    "degrees":[{"stalks":{"x":{"n_gens":1,"relations":[[2]]},"y":{"n_gens":1}},
                "restrictions":[{"from":"x","to":"y","matrix":[[1]]}]}]})") == "/degrees/0");
}

TEST_CASE("extensions and classes round trip") {
  const CochainComplex z2 = CochainComplex::concentrated(FgAbGroup::cyclic(2), 0);
  const CochainComplex z4 = CochainComplex::concentrated(FgAbGroup::cyclic(4), 0);
  const CochainComplex z2m = CochainComplex::concentrated(FgAbGroup::cyclic(2), -1);
  for (const auto& [p, g] : std::vector<std::pair<CochainComplex, CochainComplex>>{
           {z2, z2}, {z2, z4}, {z2m, z2}}) {
    const ExtGroup ext(p, g);
    REQUIRE(ext.group().nontrivial_count() == 1);
    const IntVector cocycle = class_cocycle(ext, {1});
    const Extension x = realize_extension(ext, cocycle);
    const std::string text = emit_document(x);
    const auto back = std::get<Extension>(parse_document(text));
    CHECK(emit_document(back) == text);
    CHECK(class_coordinates(ext, classify_extension(ext, back)) == IntVector{1});

    const ExtClass c{p, g, {1}};
    round_trip(c);
  }
  // Class coordinates are reduced on the way in.
  const auto c = std::get<ExtClass>(parse_document(
      "{\"kind\":\"class\",\"p\":" + complex_json(z2, false).dump() +
      ",\"g\":" + complex_json(z2, false).dump() + ",\"coords\":[5]}"));
  CHECK(c.coords == IntVector{1});
  CHECK(error_path("{\"kind\":\"class\",\"p\":" + complex_json(z2, false).dump() +
                   ",\"g\":" + complex_json(z2, false).dump() + ",\"coords\":[1,1]}") == "/coords");
  // A map that is not an extension.
  const Extension x = realize_extension(ExtGroup(z2, z2), class_cocycle(ExtGroup(z2, z2), {1}));
  Json j = extension_json(x);
  j["j"]["components"] = Json::array();
  CHECK(error_path(j.dump()) == "");
  CHECK(error_text(j.dump()).find("surjective") != std::string::npos);
}

TEST_CASE("document kinds") {
  CHECK(document_kind(parse_document(emit_document(FgAbGroup::cyclic(3)))) == "group");
  CHECK(document_kind(parse_document(emit_document(circle_complex()))) == "sheaf-complex");
  CHECK_THROWS_AS(document_as<CochainComplex>(Document(FgAbGroup()), "complex"), DocumentError);
}
