#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "skyway/error.hpp"
#include "skyway/interference.hpp"

using namespace skyway;

TEST_CASE("payload classes") {
  CHECK(classify_payload(0.0) == PayloadClass::None);
  CHECK(classify_payload(3.0) == PayloadClass::Light);
  CHECK(classify_payload(4.5) == PayloadClass::Heavy);
  CHECK(classify_payload(1.5) == PayloadClass::Light);
  CHECK(classify_payload(1.49) == PayloadClass::None);
  CHECK(classify_payload(3.75) == PayloadClass::Heavy);
  CHECK_THROWS_AS(classify_payload(-1.0), InputError);
  CHECK_THROWS_AS(classify_payload(16.0), InputError);
}

TEST_CASE("separation bands are left-closed") {
  CHECK(classify_separation(0.45) == SeparationCategory::Close);
  CHECK(classify_separation(0.3) == SeparationCategory::Close);
  CHECK(classify_separation(0.5) == SeparationCategory::Moderate);
  CHECK(classify_separation(0.7) == SeparationCategory::Wide);
  CHECK(classify_separation(1.5) == SeparationCategory::Wide);
  CHECK_THROWS_AS(classify_separation(0.29), InputError);
}

TEST_CASE("formation classification") {
  const FormationThresholds th;
  CHECK(classify_formation({0, 0, 1.0}, {0, 0, 0.4}, th) == FormationClass::TopDown);
  CHECK(classify_formation({0, 0, 0.5}, {0.6, 0, 0.5}, th) == FormationClass::FrontBack);
  CHECK(classify_formation({0, 0, 0.5}, {0.05, 0.04, 0.55}, th) == FormationClass::None);
  CHECK(classify_formation({0, 0.4, 0.5}, {0, 0, 0.5}, th) == FormationClass::SideBySide);

  FormationThresholds along_y = th;
  along_y.travel_axis = {0, 1, 0};
  CHECK(classify_formation({0, 0.4, 0.5}, {0, 0, 0.5}, along_y) == FormationClass::FrontBack);
  CHECK(classify_formation({0.6, 0, 0.5}, {0, 0, 0.5}, along_y) == FormationClass::SideBySide);
}

TEST_CASE("position classification") {
  const FormationThresholds th;
  CHECK(classify_position(FormationClass::TopDown, {0, 0, 1.0}, {0, 0, 0.4}, th) ==
        PositionClass::Top);
  CHECK(classify_position(FormationClass::FrontBack, {1, 0, 0}, {0.4, 0, 0}, th) ==
        PositionClass::Front);
  CHECK(classify_position(FormationClass::SideBySide, {0, 0.3, 0}, {0, 0, 0}, th) ==
        PositionClass::Left);
  CHECK(classify_position(FormationClass::None, {0, 0, 0}, {1, 0, 0}, th) == PositionClass::None);
}

TEST_CASE("position classification is antisymmetric") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto opposite = [](PositionClass p) {
    switch (p) {
      case PositionClass::Top: return PositionClass::Down;
      case PositionClass::Down: return PositionClass::Top;
      case PositionClass::Front: return PositionClass::Back;
      case PositionClass::Back: return PositionClass::Front;
      case PositionClass::Left: return PositionClass::Right;
      case PositionClass::Right: return PositionClass::Left;
      case PositionClass::None: return PositionClass::None;
    }
    return PositionClass::None;
  };
  for (int i = 0; i < 2000; ++i) {
    FormationThresholds th;
    th.travel_axis = {u(rng), u(rng), 0.0};
    const Vec3 a{u(rng), u(rng), u(rng)};
    const Vec3 b{u(rng), u(rng), u(rng)};
    const auto fab = classify_formation(a, b, th);
    CHECK(fab == classify_formation(b, a, th));
    CHECK(classify_position(fab, b, a, th) == opposite(classify_position(fab, a, b, th)));
  }
}

TEST_CASE("factor encoding") {
  const auto cb = Codebook::defaults();
  CHECK(separation_code(1.5) == 0.0);
  CHECK(separation_code(0.3) == doctest::Approx(1.0));
  CHECK(separation_code(0.1) == doctest::Approx(1.0));
  CHECK(separation_code(3.0) == 0.0);
  const auto f = encode_factors(PositionClass::Front, 1.5, FormationClass::FrontBack,
                                WindCondition::None, PayloadClass::Heavy, cb);
  CHECK(f[Variable::Position] == -1.0);
  CHECK(f[Variable::Formation] == 0.66);
  CHECK(f[Variable::Wind] == 0.0);
  CHECK(f[Variable::Payload] == 1.0);

  Codebook partial = cb;
  partial.wind.erase(WindCondition::IntenseHeadwind);
  CHECK_THROWS_AS(encode_factors(PositionClass::None, 1.0, FormationClass::None,
                                 WindCondition::IntenseHeadwind, PayloadClass::None, partial),
                  InputError);
}

TEST_CASE("codes stay inside the codebook range") {
  const auto cb = Codebook::defaults();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> sep(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const auto pos = static_cast<PositionClass>(rng() % 7);
    const auto form = static_cast<FormationClass>(rng() % 4);
    const auto wind = static_cast<WindCondition>(rng() % 5);
    const auto pay = static_cast<PayloadClass>(rng() % 3);
    const auto f = encode_factors(pos, sep(rng), form, wind, pay, cb);
    CHECK(f[Variable::Position] >= -1.0);
    CHECK(f[Variable::Position] <= 1.0);
    for (Variable v : {Variable::Separation, Variable::Formation, Variable::Wind, Variable::Payload}) {
      CHECK(f[v] >= 0.0);
      CHECK(f[v] <= 1.0);
    }
  }
}

TEST_CASE("predicted interference ratio") {
  const SegmentInterferenceModel m;
  CHECK(predict_ir(m, FactorVector{}) == 1.0);
  FactorVector ones;
  ones.codes.fill(1.0);
  CHECK(predict_ir(m, ones) == doctest::Approx(2.0).epsilon(1e-9));
  FactorVector front;
  front[Variable::Position] = -1.0;
  CHECK(predict_ir(m, front) == doctest::Approx(0.5915));

  SegmentInterferenceModel scaled = m;
  scaled.intercept *= 3.0;
  for (double& c : scaled.coefficients) c *= 3.0;
  CHECK(predict_ir(scaled, ones) == doctest::Approx(3.0 * predict_ir(m, ones)));

  SegmentInterferenceModel broken = m;
  broken.intercept = 0.2;
  CHECK_THROWS_AS(predict_ir(broken, front), Error);
}

TEST_CASE("interference power") {
  CHECK(interference_power(10.0, 1.3) == doctest::Approx(13.0));
  CHECK(interference_power(9.80, 12.88 / 9.80) == doctest::Approx(12.88));
  CHECK(interference_power(7.7, 1.0) == 7.7);
}

TEST_CASE("node delay components") {
  NodeDelayInputs in;
  in.waiting_times = {100, 200};
  in.pad_times = {50, 150};
  CHECK(hover_delay(in) == doctest::Approx(100.0));
  in.waiting_times = {};
  CHECK(hover_delay(in) == 0.0);
  in.waiting_times = {50};
  in.pad_times = {100, 100};
  CHECK(hover_delay(in) == 0.0);

  NodeDelayInputs w;
  w.recharge_times = {300};
  w.pad_times = {120, 60};
  CHECK(waitpad_delay(w) == doctest::Approx(120.0));
  w.recharge_times = {};
  CHECK(waitpad_delay(w) == 0.0);
  w.recharge_times = {100};
  w.pad_times = {200};
  CHECK(waitpad_delay(w) == 0.0);

  const double pen = hover_recharge_penalty(0.3, 100.0, 0.04125);
  CHECK(pen == doctest::Approx(727.2727).epsilon(1e-6));
  CHECK(hover_recharge_penalty(0.3, 0.0, 0.04125) == 0.0);
  CHECK(hover_recharge_penalty(0.3, 200.0, 0.04125) == doctest::Approx(2 * pen));
  CHECK(node_wait(100, 120, pen) == doctest::Approx(947.27).epsilon(1e-5));
  CHECK(node_wait(0, 0, 0) == 0.0);
}

TEST_CASE("delay components are monotone and non-negative") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 600.0);
  for (int i = 0; i < 500; ++i) {
    NodeDelayInputs in;
    for (int k = 0; k < 3; ++k) {
      in.waiting_times.push_back(u(rng));
      in.recharge_times.push_back(u(rng));
    }
    in.pad_times = {u(rng), u(rng)};
    const double h = hover_delay(in);
    const double w = waitpad_delay(in);
    CHECK(h >= 0.0);
    CHECK(w >= 0.0);
    NodeDelayInputs more = in;
    more.waiting_times[0] += 10.0;
    more.recharge_times[0] += 10.0;
    CHECK(hover_delay(more) >= h);
    CHECK(waitpad_delay(more) >= w);
    NodeDelayInputs banked = in;
    banked.pad_times[1] += 10.0;
    CHECK(hover_delay(banked) <= h);
    CHECK(waitpad_delay(banked) <= w);
  }
}

TEST_CASE("delivery time with interference") {
  const std::vector<double> waits{100, 50};
  const std::vector<double> pens{30};
  CHECK(delivery_time_with_interference(500, waits, pens) == doctest::Approx(680.0));
  CHECK(delivery_time_with_interference(500, {}, {}) == 500.0);
  const double penalty = excess_power_time(12.88 - 9.80, 99.0 / 2400.0);
  CHECK(penalty == doctest::Approx(74.67).epsilon(1e-3));
  CHECK(excess_power_time(-1.0, 0.5) == -2.0);
}

TEST_CASE("relative importance") {
  const SegmentInterferenceModel m;
  const auto share = relative_importance(m);
  const std::array<double, 5> expected{40.85, 32.72, 12.62, 7.80, 6.01};
  for (std::size_t i = 0; i < 5; ++i) CHECK(share[i] == doctest::Approx(expected[i]).epsilon(1e-4));
  CHECK(std::accumulate(share.begin(), share.end(), 0.0) == doctest::Approx(100.0).epsilon(1e-12));

  SegmentInterferenceModel scaled = m;
  for (double& c : scaled.coefficients) c *= 7.0;
  const auto again = relative_importance(scaled);
  for (std::size_t i = 0; i < 5; ++i) CHECK(again[i] == doctest::Approx(share[i]).epsilon(1e-12));

  SegmentInterferenceModel single;
  single.coefficients = {0, 0, 0.5, 0, 0};
  CHECK(relative_importance(single)[2] == 100.0);
  single.coefficients.fill(0.0);
  CHECK_THROWS_AS(relative_importance(single), InputError);
}

TEST_CASE("model JSON round trip") {
  SegmentInterferenceModel m;
  m.intercept = 0.97;
  m.degrees = {2, 3, 1, 4, 1};
  m.codebook.position[PositionClass::Back] = 0.7;
  const auto back = model_from_json(model_to_json(m));
  CHECK(back == m);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), InputError);
  auto j = model_to_json(m);
  j["degrees"]["wind"] = 5;
  CHECK_THROWS_AS(model_from_json(j), InputError);
}
