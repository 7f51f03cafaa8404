#include <doctest.h>

#include <random>

#include "tnn/core.hpp"
#include "test_util.hpp"

using namespace tnn;

namespace {

const WeightFormat kFmt{8, 10};

Volley v(std::initializer_list<int64_t> times) {
  Volley out;
  for (int64_t t : times) {
    out.push_back(t < 0 ? SpikeTime::inf()
                        : SpikeTime(static_cast<uint32_t>(t)));
  }
  return out;
}

std::vector<int32_t> raw(std::initializer_list<int32_t> ints,
                         const WeightFormat& fmt = kFmt) {
  std::vector<int32_t> out;
  for (int32_t w : ints) out.push_back(w * fmt.unit());
  return out;
}

}  // namespace

TEST_CASE("ramp response rises one per step and plateaus at the weight") {
  CHECK(rnl_response(4, -2) == 0);
  CHECK(rnl_response(4, 0) == 1);
  CHECK(rnl_response(4, 1) == 2);
  CHECK(rnl_response(4, 3) == 4);
  CHECK(rnl_response(4, 10) == 4);
  CHECK(rnl_response(0, 5) == 0);
}

TEST_CASE("step response jumps straight to the weight") {
  CHECK(snl_response(4, 0) == 4);
  CHECK(snl_response(4, 7) == 4);
  CHECK(snl_response(4, -1) == 0);
  CHECK(snl_response(0, 0) == 0);
}

TEST_CASE("responses never exceed the weight and ramp stays under step") {
  for (int32_t w = 0; w <= 8; ++w) {
    for (int64_t t = -3; t <= 12; ++t) {
      CHECK(rnl_response(w, t) <= w);
      CHECK(snl_response(w, t) <= w);
      CHECK(rnl_response(w, t) <= snl_response(w, t));
      if (t >= 0) {
        CHECK(rnl_response(w, t) <= rnl_response(w, t + 1));
      }
    }
  }
}

TEST_CASE("body potential sums responses over finite lines") {
  auto w = raw({2, 3});
  Volley x = v({0, 1});
  CHECK(body_potential(w, x, 2, kFmt, NeuronModel::kRif) == 4);

  auto w2 = raw({4, 4, 4});
  Volley x2 = v({0, 0, 0});
  CHECK(body_potential(w2, x2, 1, kFmt, NeuronModel::kRif) == 6);

  Volley silent = v({-1, -1, -1});
  CHECK(body_potential(w2, silent, 5, kFmt, NeuronModel::kRif) == 0);
}

TEST_CASE("fire time crosses the threshold exactly when the ramps do") {
  WeightFormat fmt{4, 10};
  auto w = raw({4, 4, 4}, fmt);
  Volley x = v({0, 0, 0});
  CHECK(fire_time(w, x, 6, fmt, NeuronModel::kRif) == SpikeTime(1));

  auto w2 = raw({4, 4}, fmt);
  Volley x2 = v({0, 0});
  CHECK(fire_time(w2, x2, 6, fmt, NeuronModel::kRif) == SpikeTime(2));
  CHECK(fire_time(w2, x2, 6, fmt, NeuronModel::kIf) == SpikeTime(0));
  CHECK(fire_time(w2, x2, 9, fmt, NeuronModel::kIf) == SpikeTime::inf());

  auto w3 = raw({4, 4, 4}, fmt);
  CHECK(fire_time(w3, x, 6, fmt, NeuronModel::kIf) == SpikeTime(0));

  auto zero = raw({0, 0, 0}, fmt);
  CHECK(fire_time(zero, x, 1, fmt, NeuronModel::kRif) == SpikeTime::inf());

  Volley silent = v({-1, -1, -1});
  CHECK(fire_time(w3, silent, 1, fmt, NeuronModel::kRif) == SpikeTime::inf());
}

TEST_CASE("fire time matches the definitional search on random instances") {
  std::mt19937 rng(7151);
  std::uniform_int_distribution<int32_t> lines(1, 8);
  std::uniform_int_distribution<int32_t> wmax_pick(1, 8);
  std::uniform_int_distribution<int32_t> theta_scale(1, 100);
  std::uniform_int_distribution<int32_t> time_pick(-3, 9);
  std::uniform_int_distribution<int32_t> model_pick(0, 1);
  for (int iter = 0; iter < 4000; ++iter) {
    WeightFormat fmt{wmax_pick(rng), 10};
    int32_t p = lines(rng);
    std::vector<int32_t> w(p);
    Volley x(p);
    std::uniform_int_distribution<int32_t> weight_pick(0, fmt.raw_max());
    for (int32_t i = 0; i < p; ++i) {
      w[i] = weight_pick(rng);
      int32_t t = time_pick(rng);
      x[i] = t < 0 ? SpikeTime::inf() : SpikeTime(static_cast<uint32_t>(t));
    }
    int32_t theta =
        std::max<int32_t>(1, fmt.w_max * p * theta_scale(rng) / 100);
    NeuronModel model =
        model_pick(rng) == 0 ? NeuronModel::kRif : NeuronModel::kIf;
    SpikeTime got = fire_time(w, x, theta, fmt, model);
    SpikeTime want = tnn_test::naive_fire_time(w, x, theta, fmt, model);
    REQUIRE(got == want);
  }
}

TEST_CASE("raising the threshold never makes firing earlier") {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int32_t> time_pick(-2, 7);
  std::uniform_int_distribution<int32_t> weight_pick(0, kFmt.raw_max());
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<int32_t> w(6);
    Volley x(6);
    for (int i = 0; i < 6; ++i) {
      w[i] = weight_pick(rng);
      int32_t t = time_pick(rng);
      x[i] = t < 0 ? SpikeTime::inf() : SpikeTime(static_cast<uint32_t>(t));
    }
    for (int32_t theta = 1; theta < 20; ++theta) {
      CHECK(fire_time(w, x, theta, kFmt, NeuronModel::kRif) <=
            fire_time(w, x, theta + 1, kFmt, NeuronModel::kRif));
    }
  }
}

TEST_CASE("an extra spike never delays firing") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int32_t> time_pick(-2, 7);
  std::uniform_int_distribution<int32_t> weight_pick(0, kFmt.raw_max());
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<int32_t> w(6);
    Volley x(6);
    int silent = -1;
    for (int i = 0; i < 6; ++i) {
      w[i] = weight_pick(rng);
      int32_t t = time_pick(rng);
      x[i] = t < 0 ? SpikeTime::inf() : SpikeTime(static_cast<uint32_t>(t));
      if (x[i].is_inf()) silent = i;
    }
    if (silent < 0) continue;
    SpikeTime before = fire_time(w, x, 9, kFmt, NeuronModel::kRif);
    x[static_cast<size_t>(silent)] = SpikeTime(2);
    SpikeTime after = fire_time(w, x, 9, kFmt, NeuronModel::kRif);
    CHECK(after <= before);
  }
}

TEST_CASE("local time normalization shifts the earliest spike to zero") {
  CHECK(normalize_local_time(v({3, 5, -1})) == v({0, 2, -1}));
  CHECK(normalize_local_time(v({0, 2, -1})) == v({0, 2, -1}));
  CHECK(normalize_local_time(v({-1, -1})) == v({-1, -1}));
  CHECK(normalize_local_time(Volley{}) == Volley{});

  std::mt19937 rng(5);
  std::uniform_int_distribution<int32_t> time_pick(-2, 9);
  for (int iter = 0; iter < 200; ++iter) {
    Volley x(7);
    for (auto& t : x) {
      int32_t tv = time_pick(rng);
      t = tv < 0 ? SpikeTime::inf() : SpikeTime(static_cast<uint32_t>(tv));
    }
    Volley once = normalize_local_time(x);
    CHECK(normalize_local_time(once) == once);
    for (size_t i = 0; i < x.size(); ++i) {
      for (size_t j = 0; j < x.size(); ++j) {
        CHECK((x[i] < x[j]) == (once[i] < once[j]));
      }
    }
  }
}

TEST_CASE("binarize keeps only presence") {
  CHECK(binarize(v({0, 3, -1, 1})) == v({0, 0, -1, 0}));
  CHECK(binarize(v({-1})) == v({-1}));
  CHECK(binarize(v({7})) == v({0}));
}

TEST_CASE("saturating add clamps to the weight range") {
  const int32_t max = kFmt.raw_max();
  CHECK(saturating_add(max - 256, 512, max) == max);
  CHECK(saturating_add(256, -512, max) == 0);
  CHECK(saturating_add(4 * kFmt.unit(), 0, max) == 4 * kFmt.unit());
  CHECK(saturating_add(0, -1, max) == 0);
  CHECK(saturating_add(max, 1, max) == max);
}

TEST_CASE("fire time ignores the scratch buffer contents") {
  std::vector<int32_t> scratch(64, 12345);
  auto w = raw({4, 4});
  Volley x = v({0, 1});
  SpikeTime with = fire_time(w, x, 6, kFmt, NeuronModel::kRif, &scratch);
  SpikeTime without = fire_time(w, x, 6, kFmt, NeuronModel::kRif);
  CHECK(with == without);
}
