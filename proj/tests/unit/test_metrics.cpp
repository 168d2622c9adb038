#include <doctest.h>

#include <set>

#include "assort/error.hpp"
#include "assort/metrics.hpp"
#include "assort/random.hpp"

using namespace assort;

namespace {

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform() < 0.4) out.push_back(i);
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("hand examples") {
    const std::vector<std::size_t> g = {1, 2}, m = {2, 3};
    const Metrics r = metrics(g, m);
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 0.5);
    CHECK(r.f1 == 0.5);
    CHECK(r.counts == Counts{2, 2, 1});

    const Metrics same = metrics(g, g);
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.f1 == 1.0);

    const Metrics none = metrics(g, std::vector<std::size_t>{});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);

    const Metrics both_empty = metrics(std::vector<std::size_t>{}, std::vector<std::size_t>{});
    CHECK(both_empty.f1 == 1.0);

    const Metrics spurious = metrics(std::vector<std::size_t>{}, g);
    CHECK(spurious.precision == 0.0);
    CHECK(spurious.recall == 0.0);
    CHECK(spurious.f1 == 0.0);
  }

  TEST_CASE("duplicates are ignored") {
    const std::vector<std::size_t> g = {1, 1, 2}, m = {2, 2};
    CHECK(count(g, m) == Counts{2, 1, 1});
  }

  TEST_CASE("swapping gold and prediction swaps precision and recall") {
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
      const auto g = random_subset(rng, 20), m = random_subset(rng, 20);
      const Metrics a = metrics(g, m), b = metrics(m, g);
      CHECK(a.precision == b.recall);
      CHECK(a.recall == b.precision);
      CHECK(a.f1 == b.f1);
    }
  }

  TEST_CASE("micro aggregate equals a recount of the union") {
    Rng rng(5);
    std::vector<Counts> items;
    std::size_t gold = 0, pred = 0, overlap = 0;
    for (int post = 0; post < 40; ++post) {
      const auto g = random_subset(rng, 15), m = random_subset(rng, 15);
      items.push_back(count(g, m));
      std::set<std::size_t> gs(g.begin(), g.end());
      gold += g.size();
      pred += m.size();
      for (std::size_t x : m) overlap += gs.count(x);
    }
    const Metrics micro = aggregate(items, Averaging::kMicro);
    CHECK(micro.counts == Counts{gold, pred, overlap});
    CHECK(micro.precision == static_cast<double>(overlap) / static_cast<double>(pred));
    CHECK(micro.recall == static_cast<double>(overlap) / static_cast<double>(gold));
  }

  TEST_CASE("macro aggregate is the mean of per-item scores") {
    const std::vector<Counts> items = {{2, 2, 1}, {4, 1, 1}};
    const Metrics macro = aggregate(items, Averaging::kMacro);
    CHECK(macro.precision == doctest::Approx((0.5 + 1.0) / 2).epsilon(1e-15));
    CHECK(macro.recall == doctest::Approx((0.5 + 0.25) / 2).epsilon(1e-15));
    CHECK(macro.f1 == doctest::Approx((0.5 + 0.4) / 2).epsilon(1e-15));
    CHECK(macro.counts == Counts{6, 3, 2});
    CHECK(aggregate(std::vector<Counts>{}, Averaging::kMicro).f1 == 1.0);
  }

  TEST_CASE("averaging names") {
    CHECK(parse_averaging("micro") == Averaging::kMicro);
    CHECK(parse_averaging("macro") == Averaging::kMacro);
    CHECK(to_string(Averaging::kMacro) == "macro");
    CHECK_THROWS_AS(parse_averaging("weighted"), UsageError);
  }
}
