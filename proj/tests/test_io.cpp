#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cayley/errors.hpp"
#include "cayley/io.hpp"

using namespace cayley;

TEST_CASE("state keys") {
  CHECK(state_key(0) == "-1,-1");
  CHECK(state_key(1) == "-1,+1");
  CHECK(state_key(2) == "+1,-1");
  CHECK(state_key(3) == "+1,+1");
  for (std::size_t s = 0; s < 4; ++s) CHECK(parse_state_key(state_key(s)) == s);
  CHECK(parse_state_key("1,-1") == 2);
  CHECK(parse_state_key("1,1") == 3);
  CHECK_THROWS_AS(parse_state_key("+1;-1"), validation_error);
  CHECK_THROWS_AS(state_key(4), std::domain_error);
}

TEST_CASE("derived group") {
  const DerivedParams d = parse_model(Json::parse(R"({"k": 3, "theta": 2.5, "a": 0.4})"));
  CHECK(d.k == 3);
  CHECK(d.theta == 2.5);
  CHECK(d.a == 0.4);
  CHECK(d.b == 1.0);
  CHECK(d.c == 1.0);
}

TEST_CASE("physical group agrees with the derived form") {
  const Json j = Json::parse(R"({"k": 2, "J": 0.5, "beta": 1.2,
      "emission": {"-1,-1": -0.1, "-1,+1": -2.0, "+1,-1": -2.3, "+1,+1": -0.2}})");
  const DerivedParams d = parse_model(j);
  CHECK(d.theta == doctest::Approx(std::exp(1.2)));
  CHECK(d.a == doctest::Approx(std::exp(1.2 * (-2.0 + 0.1))));
  CHECK(d.b == doctest::Approx(std::exp(1.2 * (-2.3 + 0.1))));
  CHECK(d.c == doctest::Approx(std::exp(1.2 * (-0.2 + 0.1))));
  const ModelParams p = parse_physical(j);
  CHECK(to_json(p)["emission"]["+1,-1"] == -2.3);
  CHECK(parse_model(to_json(p)).a == doctest::Approx(d.a).epsilon(1e-15));
}

TEST_CASE("group errors") {
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"k": 2})")), validation_error);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"k": 2, "theta": 2, "J": 1})")), validation_error);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"k": 2.5, "theta": 2})")), validation_error);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"k": 2, "theta": "2"})")), validation_error);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"k": 2, "theta": -2})")), validation_error);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"k": 2, "J": 1, "beta": 1, "emission": {"-1,-1": 0}})")),
                  validation_error);
  CHECK_THROWS_AS(parse_model(Json::parse("[1, 2]")), validation_error);
}

TEST_CASE("serialization") {
  const Json s = to_json(solve_invariant_sets(2, 4.0));
  CHECK(s["count"] == 3);
  CHECK(s["solutions"][0]["label"] == "I1");
  CHECK(s["solutions"][0]["u"] == 1.0);

  EdgeTable t;
  t.p = {0.1, 0.2, 0.3, 0.4};
  const Json e = to_json(t);
  std::vector<std::string> keys;
  for (const auto& [k, v] : e.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"+1,+1", "-1,+1", "+1,-1", "-1,-1"});
  CHECK(e["-1,+1"] == 0.2);
  CHECK(e["+1,-1"] == 0.3);

  const Json r = to_json(classify_tigm_count(2, 4.0));
  CHECK(r["count_lower_bound"] == 3);
}

TEST_CASE("layers") {
  const TreeShape shape(2, 1);
  const auto a = parse_layer(Json::parse(R"({"/": 1, "/0": -1, "/1": "+1", "/2": "-1"})"), shape);
  CHECK(a == std::vector<Spin>{Spin::up, Spin::down, Spin::up, Spin::down});
  CHECK(parse_layer(Json::parse("[1, -1, 1, -1]"), shape) == a);
  CHECK(parse_layer(layer_to_json(a, shape), shape) == a);
  CHECK_THROWS_AS(parse_layer(Json::parse("[1, -1, 1]"), shape), validation_error);
  CHECK_THROWS_AS(parse_layer(Json::parse(R"({"/": 1, "/0": -1, "/1": 1})"), shape), validation_error);
  CHECK_THROWS_AS(parse_layer(Json::parse(R"({"/": 1, "/0": -1, "/1": 1, "/2": 1, "/3": 1})"), shape),
                  validation_error);
  CHECK_THROWS_AS(parse_layer(Json::parse("[1, 0, 1, 1]"), shape), validation_error);
  CHECK_THROWS_AS(parse_layer(Json::parse("3"), shape), validation_error);

  const Json m = marginals_to_json({{0.25, 0.75}}, TreeShape(2, 0));
  CHECK(m["/"]["+1"] == 0.75);
}

TEST_CASE("json files") {
  const std::string path = "test_io_tmp.json";
  {
    std::ofstream f(path);
    f << R"({"k": 1, "theta": 3})";
  }
  CHECK(parse_model(read_json_file(path)).theta == 3.0);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK_THROWS_AS(read_json_file(path), validation_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_json_file("does/not/exist.json"), validation_error);
}
