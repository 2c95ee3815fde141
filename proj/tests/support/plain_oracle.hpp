#pragma once

#include <boost/rational.hpp>
#include <algorithm>
#include <map>
#include <string>
#include <vector>

// Plaintext reference for matching and ranking. Works on substrings rather
// than ciphertexts and uses its own fixed-width rational arithmetic.
namespace qres::test::oracle {

using Frac = boost::rational<long long>;

struct Provider {
  std::string anon_id;
  std::vector<std::string> substrings;  // token slots in order
};

struct Ranked {
  std::string anon_id;
  Frac score;
};

inline std::vector<std::vector<std::vector<int>>> match_cube(const std::vector<Provider>& providers,
                                                             const std::vector<std::string>& keywords) {
  // [keyword][provider][slot]
  std::vector<std::vector<std::vector<int>>> cube(keywords.size());
  for (std::size_t k = 0; k < keywords.size(); ++k)
    for (const auto& p : providers) {
      std::vector<int> row;
      for (const auto& s : p.substrings) row.push_back(s == keywords[k] ? 1 : 0);
      cube[k].push_back(row);
    }
  return cube;
}

inline std::vector<Ranked> sorted(std::vector<Ranked> r) {
  std::stable_sort(r.begin(), r.end(), [](const Ranked& a, const Ranked& b) {
    return a.score != b.score ? a.score > b.score : a.anon_id < b.anon_id;
  });
  return r;
}

inline std::vector<Ranked> rank_boolean(const std::vector<Provider>& providers,
                                        const std::vector<std::string>& keywords) {
  auto cube = match_cube(providers, keywords);
  std::vector<Ranked> out;
  for (std::size_t i = 0; i < providers.size(); ++i) {
    long long hits = 0;
    for (const auto& em : cube)
      for (int v : em[i]) hits += v;
    out.push_back({providers[i].anon_id, Frac(hits)});
  }
  return sorted(out);
}

inline std::vector<Ranked> rank_prioritized(const std::vector<Provider>& providers,
                                            const std::vector<std::string>& keywords,
                                            const std::vector<Frac>& weights) {
  auto cube = match_cube(providers, keywords);
  std::vector<Ranked> out;
  for (const auto& p : providers) out.push_back({p.anon_id, Frac(0)});
  for (std::size_t k = 0; k < keywords.size(); ++k) {
    const auto& em = cube[k];
    std::size_t cols = em.empty() ? 0 : em[0].size();
    for (std::size_t j = 0; j < cols; ++j) {
      long long colsum = 0;
      for (const auto& row : em) colsum += row[j];
      if (colsum == 0) continue;
      for (std::size_t i = 0; i < em.size(); ++i)
        if (em[i][j]) out[i].score += weights[k] * Frac(1, colsum);
    }
  }
  return sorted(out);
}

}  // namespace qres::test::oracle
