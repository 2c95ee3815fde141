#include <gtest/gtest.h>

#include "qres/ranking.hpp"
#include "support/plain_oracle.hpp"
#include "support/test_util.hpp"

using namespace qres;
using namespace qres::ranking;
using qres::test::code_of;

namespace {

ProviderMatches pm(std::string id, std::vector<MatchRow> rows) { return {std::move(id), std::move(rows)}; }

std::vector<std::string> order(const RankingResult& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.anon_id);
  return out;
}

EncryptedToken et(std::uint8_t b) {
  EncryptedToken t;
  t.bytes.fill(b);
  return t;
}

}  // namespace

TEST(Ranking, MatchValue) {
  EXPECT_EQ(match_value(et(1), et(1)), 1);
  auto t = et(1);
  t.bytes[7] ^= 1;
  EXPECT_EQ(match_value(et(1), t), 0);
  std::vector<EncryptedToken> slots{et(1), et(2), et(1)};
  EXPECT_EQ(match_row(et(1), slots), (MatchRow{1, 0, 1}));
}

TEST(Ranking, BooleanOrderAndTies) {
  std::vector<ProviderMatches> p{pm("P1", {{1, 1, 1}}), pm("P2", {{1, 0, 0}}), pm("P3", {{1, 1, 1}})};
  auto r = rank_boolean(p);
  EXPECT_EQ(order(r), (std::vector<std::string>{"P1", "P3", "P2"}));
  EXPECT_EQ(r.entries[0].score, 3);
  EXPECT_EQ(r.entries[2].score, 1);

  std::vector<ProviderMatches> single{pm("only", {{0, 1}, {1, 0}})};
  EXPECT_EQ(rank_boolean(single).entries[0].score, 2);

  std::vector<ProviderMatches> zero{pm("b", {{0}}), pm("a", {{0}}), pm("c", {{0}})};
  auto z = rank_boolean(zero);
  EXPECT_EQ(order(z), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(z.entries[0].score, 0);

  EXPECT_EQ(code_of([] { rank_boolean({}); }), ErrorCode::EmptyInput);
}

TEST(Ranking, BuildEm) {
  std::vector<ProviderMatches> p{pm("P1", {{1, 0}}), pm("P2", {{0, 0}})};
  EXPECT_EQ(build_em(0, p), (EvaluationMatrix{{1, 0}, {0, 0}}));
  std::vector<ProviderMatches> all{pm("P1", {{1, 1}}), pm("P2", {{1, 1}})};
  EXPECT_EQ(build_em(0, all), (EvaluationMatrix{{1, 1}, {1, 1}}));
  std::vector<ProviderMatches> ragged{pm("P1", {{1, 1}}), pm("P2", {{1}})};
  EXPECT_EQ(code_of([&] { build_em(0, ragged); }), ErrorCode::RaggedRows);
}

TEST(Ranking, NormalizeEv) {
  EXPECT_EQ(normalize_ev({{1}, {0}}), (EvaluationVector{1, 0}));
  EXPECT_EQ(normalize_ev({{1}, {1}}), (EvaluationVector{Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(normalize_ev({{1, 0}, {1, 1}}), (EvaluationVector{Rational(1, 2), Rational(3, 2)}));
  EXPECT_EQ(normalize_ev({{0, 0}, {0, 0}}), (EvaluationVector{0, 0}));
}

TEST(Ranking, AggregateBasics) {
  std::vector<EvaluationVector> evs{{1, 0}, {0, 1}};
  std::vector<Rational> w{1, 1};
  std::vector<std::string> ids{"Q", "P"};
  auto r = aggregate(evs, w, ids);
  EXPECT_EQ(order(r), (std::vector<std::string>{"P", "Q"}));
  EXPECT_EQ(r.entries[0].score, 1);
  EXPECT_EQ(r.entries[1].score, 1);

  std::vector<Rational> nr{1, 0};
  auto r2 = aggregate(evs, nr, ids);
  EXPECT_EQ(order(r2), (std::vector<std::string>{"Q", "P"}));
  EXPECT_EQ(r2.entries[1].score, 0);

  std::vector<Rational> short_w{1};
  EXPECT_EQ(code_of([&] { aggregate(evs, short_w, ids); }), ErrorCode::LengthMismatch);
}

TEST(Ranking, ThreeByThreeAgainstOracle) {
  // Three providers, three SLO slots, keywords weighted HI / LI / NR.
  std::vector<test::oracle::Provider> plain{
      {"pA", {"level3||3", "level2||4", "level1||5"}},
      {"pB", {"level3||3", "level4||4", "level2||5"}},
      {"pC", {"level1||3", "level2||4", "level2||5"}},
  };
  std::vector<std::string> kws{"level3||3", "level2||4", "level2||5"};
  std::vector<test::oracle::Frac> ow{1, {1, 2}, 0};
  auto want = test::oracle::rank_prioritized(plain, kws, ow);

  std::vector<ProviderMatches> enc;
  auto cube = test::oracle::match_cube(plain, kws);
  for (std::size_t i = 0; i < plain.size(); ++i) {
    ProviderMatches p{plain[i].anon_id, {}};
    for (std::size_t k = 0; k < kws.size(); ++k) p.rows.emplace_back(cube[k][i].begin(), cube[k][i].end());
    enc.push_back(p);
  }
  std::vector<Rational> w{1, Rational(1, 2), 0};
  auto got = rank_prioritized(enc, w);
  ASSERT_EQ(got.entries.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got.entries[i].anon_id, want[i].anon_id);
    EXPECT_EQ(got.entries[i].score, Rational(want[i].score.numerator(), want[i].score.denominator()));
  }
  // pA: 1/2 + 1/2 * 1/2 = 3/4; pB: 1/2; pC: 1/4
  EXPECT_EQ(got.entries[0].anon_id, "pA");
  EXPECT_EQ(got.entries[0].score, Rational(3, 4));
}

TEST(Ranking, ScaleInvarianceAndMonotonicity) {
  DeterministicRng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t m = 2 + rng.uniform(5), n = 1 + rng.uniform(6), kw = 1 + rng.uniform(4);
    std::vector<ProviderMatches> p;
    for (std::size_t i = 0; i < m; ++i) {
      ProviderMatches x{"id" + std::to_string(i), {}};
      for (std::size_t k = 0; k < kw; ++k) {
        MatchRow row(n);
        for (auto& v : row) v = rng.uniform(3) == 0;
        x.rows.push_back(row);
      }
      p.push_back(x);
    }
    std::vector<Rational> w;
    for (std::size_t k = 0; k < kw; ++k) w.push_back(Rational(static_cast<long>(rng.uniform(3)), 2));
    auto base = rank_prioritized(p, w);
    for (Rational c : {Rational(1, 2), Rational(2), Rational(10)}) {
      std::vector<Rational> scaled;
      for (auto& x : w) scaled.push_back(x * c);
      EXPECT_EQ(order(rank_prioritized(p, scaled)), order(base));
    }
    auto rank_of = [](const RankingResult& r, const std::string& id) {
      for (std::size_t i = 0; i < r.entries.size(); ++i)
        if (r.entries[i].anon_id == id) return i;
      return r.entries.size();
    };
    // Flip one zero to one for provider 0 and check it does not drop.
    auto bumped = p;
    bool flipped = false;
    for (auto& row : bumped[0].rows)
      for (auto& v : row)
        if (!flipped && v == 0) {
          v = 1;
          flipped = true;
        }
    if (flipped) {
      EXPECT_LE(rank_of(rank_boolean(bumped), "id0"), rank_of(rank_boolean(p), "id0"));
    }
    // Columns with at least one match distribute exactly one unit.
    for (std::size_t k = 0; k < kw; ++k) {
      auto em = build_em(k, p);
      Rational total = 0;
      std::size_t live = 0;
      for (std::size_t j = 0; j < n; ++j) {
        bool any = false;
        for (auto& row : em) any = any || row[j];
        live += any;
      }
      for (auto& v : normalize_ev(em)) total += v;
      EXPECT_EQ(total, Rational(static_cast<long>(live)));
    }
  }
}

TEST(Ranking, JsonRoundTrip) {
  std::vector<ProviderMatches> p{pm("P1", {{1, 0}, {1, 1}}), pm("P2", {{1, 0}, {0, 0}})};
  std::vector<Rational> w{1, Rational(1, 2)};
  auto r = rank_prioritized(p, w);
  r.excluded = {"P9"};
  auto back = RankingResult::from_json(r.to_json());
  EXPECT_EQ(back.scheme, Scheme::Prioritized);
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[0].score, r.entries[0].score);
  EXPECT_EQ(back.entries[0].hits_per_keyword, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(back.excluded, r.excluded);
  EXPECT_EQ(code_of([] { RankingResult::from_json("{}"); }), ErrorCode::FormatError);
}

TEST(Ranking, NumberParsingAndRendering) {
  EXPECT_EQ(parse_rational("0.5"), Rational(1, 2));
  EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
  EXPECT_EQ(parse_rational("2"), Rational(2));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("010"), Rational(10));
  EXPECT_EQ(parse_rational(".75"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-0.5"), Rational(-1, 2));
  EXPECT_EQ(parse_rational("08/016"), Rational(1, 2));
  EXPECT_EQ(code_of([] { parse_rational("0x10"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { parse_rational("1."); }), ErrorCode::Config);
  EXPECT_EQ(render_decimal(Rational(3, 2), 3), "1.500");
  EXPECT_EQ(render_decimal(Rational(1, 3), 4), "0.3333");
  EXPECT_EQ(code_of([] { parse_rational("abc"); }), ErrorCode::Config);
}
