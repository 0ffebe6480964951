#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "vdfp/replay.hpp"

using namespace vdfp;

namespace {

Episode make_episode(int len, double base, Rng& rng) {
  Episode ep;
  for (int t = 0; t < len; ++t) {
    std::vector<double> s = {base + t, rng.uniform(-1, 1)};
    std::vector<double> a = {rng.uniform(-1, 1)};
    ep.push(s, a, base + 0.5 * t);
  }
  return ep;
}

}  // namespace

TEST_CASE("whole-episode FIFO eviction keeps total steps within capacity") {
  Rng rng(1);
  ReplayBuffer buf(100);
  buf.store_episode(make_episode(64, 0.0, rng));
  CHECK(buf.size_steps() == 64);
  buf.store_episode(make_episode(64, 100.0, rng));
  CHECK(buf.size_steps() == 64);
  CHECK(buf.num_episodes() == 1);
  // The survivor is the newer episode.
  CHECK(buf.episode(0).states[0] == 100.0);
}

TEST_CASE("stored episodes are bitwise-identical to their inputs") {
  Rng rng(2);
  Episode ep = make_episode(17, 3.0, rng);
  Episode copy = ep;
  ReplayBuffer buf(1000);
  buf.store_episode(std::move(ep));
  CHECK(buf.episode(0).states == copy.states);
  CHECK(buf.episode(0).actions == copy.actions);
  CHECK(buf.episode(0).rewards == copy.rewards);
}

TEST_CASE("degenerate stores are rejected") {
  ReplayBuffer buf(10);
  CHECK_THROWS_AS(buf.store_episode(Episode{}), std::invalid_argument);
  Rng rng(3);
  CHECK_THROWS_AS(buf.store_episode(make_episode(11, 0.0, rng)), std::invalid_argument);
  Rng rng2(4);
  CHECK_THROWS_AS(buf.sample_slice(4, rng2), std::runtime_error);
}

TEST_CASE("sampling from a single one-step episode always returns that step") {
  Rng rng(5);
  ReplayBuffer buf(100);
  buf.store_episode(make_episode(1, 9.0, rng));
  for (int i = 0; i < 20; ++i) {
    auto s = buf.sample_slice(8, rng);
    CHECK(s.length() == 1);
    CHECK(s.start == 0);
    CHECK(s.states[0] == 9.0);
  }
}

TEST_CASE("max length 1 truncates every slice to a single step") {
  Rng rng(6);
  ReplayBuffer buf(1000);
  buf.store_episode(make_episode(32, 0.0, rng));
  buf.store_episode(make_episode(48, 1.0, rng));
  for (int i = 0; i < 50; ++i) CHECK(buf.sample_slice(1, rng).length() == 1);
}

TEST_CASE("slices never cross episode boundaries and reference real data") {
  Rng rng(7);
  ReplayBuffer buf(10000);
  for (int e = 0; e < 5; ++e) buf.store_episode(make_episode(10 + 7 * e, 10.0 * e, rng));
  for (int i = 0; i < 500; ++i) {
    auto s = buf.sample_slice(64, rng);
    int ep_index = static_cast<int>(s.episode_id);
    const Episode& src = buf.episode(ep_index);
    REQUIRE(s.start + s.length() <= src.length());
    // First state matches the source at the sampled offset.
    CHECK(s.states[0] == src.states[static_cast<std::size_t>(s.start) * src.state_dim]);
  }
}

TEST_CASE("start indices are uniform within an episode") {
  Rng rng(8);
  ReplayBuffer buf(1000);
  const int len = 8;
  buf.store_episode(make_episode(len, 0.0, rng));
  const int draws = 100000;
  std::map<int, int> hist;
  for (int i = 0; i < draws; ++i) ++hist[buf.sample_slice(3, rng).start];
  // Binomial(draws, 1/len): mean and three-sigma band per bucket.
  double p = 1.0 / len;
  double mean = draws * p;
  double sigma = std::sqrt(draws * p * (1 - p));
  for (int t = 0; t < len; ++t) {
    INFO("start index " << t << " count " << hist[t]);
    CHECK(std::abs(hist[t] - mean) < 3.0 * sigma);
  }
}

TEST_CASE("two-level sampling picks episodes uniformly regardless of length") {
  Rng rng(9);
  ReplayBuffer buf(100000);
  buf.store_episode(make_episode(2, 0.0, rng));
  buf.store_episode(make_episode(60, 1.0, rng));
  const int draws = 100000;
  int first = 0;
  for (int i = 0; i < draws; ++i)
    if (buf.sample_slice(4, rng).episode_id == 0) ++first;
  double sigma = std::sqrt(draws * 0.25);
  CHECK(std::abs(first - draws / 2.0) < 3.0 * sigma);
}
