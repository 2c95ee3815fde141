#include "qres/ranking.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "qres/error.hpp"

namespace qres::ranking {
namespace {

void sort_entries(std::vector<RankedProvider>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedProvider& a, const RankedProvider& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.anon_id < b.anon_id;
  });
}

std::vector<std::uint32_t> hits_of(const ProviderMatches& p) {
  std::vector<std::uint32_t> h;
  for (const auto& row : p.rows)
    h.push_back(static_cast<std::uint32_t>(std::count(row.begin(), row.end(), 1)));
  return h;
}

}  // namespace

std::string_view scheme_name(Scheme s) { return s == Scheme::Boolean ? "boolean" : "prioritized"; }

Scheme parse_scheme(std::string_view s) {
  if (s == "boolean") return Scheme::Boolean;
  if (s == "prioritized") return Scheme::Prioritized;
  fail(ErrorCode::Config, "unknown ranking scheme '" + std::string(s) + "'");
}

const Rational& Weights::of(secsla::Priority p) const {
  switch (p) {
    case secsla::Priority::HI: return hi;
    case secsla::Priority::LI: return li;
    case secsla::Priority::NR: return nr;
  }
  return nr;
}

namespace {

// Decimal only: cpp_int would read "010" as octal and "0x10" as hex.
boost::multiprecision::cpp_int parse_decimal_int(std::string_view s, std::string_view whole) {
  bool neg = !s.empty() && s[0] == '-';
  if (neg) s.remove_prefix(1);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    fail(ErrorCode::Config, "not a number: '" + std::string(whole) + "'");
  while (s.size() > 1 && s[0] == '0') s.remove_prefix(1);
  boost::multiprecision::cpp_int v{std::string(s)};
  if (neg) v = -v;
  return v;
}

}  // namespace

Rational parse_rational(std::string_view s) {
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    auto n = parse_decimal_int(s.substr(0, slash), s);
    auto d = parse_decimal_int(s.substr(slash + 1), s);
    if (d == 0) fail(ErrorCode::Config, "zero denominator");
    return Rational(n, d);
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return Rational(parse_decimal_int(s, s));
  std::string_view frac = s.substr(dot + 1);
  if (frac.empty() || frac[0] == '-') fail(ErrorCode::Config, "not a number: '" + std::string(s) + "'");
  std::string digits = std::string(s.substr(0, dot)) + std::string(frac);
  if (dot == 0 || (dot == 1 && s[0] == '-')) digits.insert(dot, "0");
  boost::multiprecision::cpp_int den =
      boost::multiprecision::pow(boost::multiprecision::cpp_int(10), static_cast<unsigned>(frac.size()));
  return Rational(parse_decimal_int(digits, s), den);
}

std::string render_decimal(const Rational& r, int digits) {
  using boost::multiprecision::cpp_int;
  cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(digits));
  cpp_int num = boost::multiprecision::numerator(r) * scale;
  cpp_int den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  cpp_int q = (num * 2 + den) / (den * 2);
  std::string s = q.str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return (neg ? "-" : "") + s;
}

std::uint8_t match_value(const EncryptedToken& cw, const EncryptedToken& ct) { return cw == ct ? 1 : 0; }

MatchRow match_row(const EncryptedToken& cw, std::span<const EncryptedToken> tokens) {
  MatchRow row;
  row.reserve(tokens.size());
  for (const auto& t : tokens) row.push_back(match_value(cw, t));
  return row;
}

RankingResult rank_boolean(std::span<const ProviderMatches> providers) {
  if (providers.empty()) fail(ErrorCode::EmptyInput, "no providers to rank");
  RankingResult res;
  res.scheme = Scheme::Boolean;
  for (const auto& p : providers) {
    RankedProvider r;
    r.anon_id = p.anon_id;
    r.hits_per_keyword = hits_of(p);
    std::uint64_t total = 0;
    for (auto h : r.hits_per_keyword) total += h;
    r.score = Rational(total);
    res.entries.push_back(std::move(r));
  }
  sort_entries(res.entries);
  return res;
}

EvaluationMatrix build_em(std::size_t keyword, std::span<const ProviderMatches> providers) {
  EvaluationMatrix em;
  for (const auto& p : providers) {
    if (keyword >= p.rows.size()) fail(ErrorCode::RaggedRows, "provider " + p.anon_id + " lacks keyword row");
    em.push_back(p.rows[keyword]);
    if (em.back().size() != em.front().size())
      fail(ErrorCode::RaggedRows, "provider " + p.anon_id + " has a different token count");
  }
  return em;
}

EvaluationVector normalize_ev(const EvaluationMatrix& em) {
  EvaluationVector ev(em.size(), Rational(0));
  if (em.empty()) return ev;
  const std::size_t cols = em.front().size();
  for (std::size_t j = 0; j < cols; ++j) {
    std::uint64_t colsum = 0;
    for (const auto& row : em) colsum += row[j];
    if (colsum == 0) continue;
    for (std::size_t i = 0; i < em.size(); ++i)
      if (em[i][j]) ev[i] += Rational(1, colsum);
  }
  return ev;
}

RankingResult aggregate(std::span<const EvaluationVector> evs, std::span<const Rational> weights,
                        std::span<const std::string> ids) {
  if (evs.size() != weights.size()) fail(ErrorCode::LengthMismatch, "one weight per keyword required");
  if (ids.empty()) fail(ErrorCode::EmptyInput, "no providers to rank");
  RankingResult res;
  res.scheme = Scheme::Prioritized;
  for (std::size_t i = 0; i < ids.size(); ++i) res.entries.push_back({ids[i], Rational(0), {}});
  for (std::size_t k = 0; k < evs.size(); ++k) {
    if (evs[k].size() != ids.size()) fail(ErrorCode::LengthMismatch, "evaluation vector length");
    if (weights[k] < 0) fail(ErrorCode::Config, "negative weight");
    for (std::size_t i = 0; i < ids.size(); ++i) res.entries[i].score += weights[k] * evs[k][i];
  }
  sort_entries(res.entries);
  return res;
}

RankingResult rank_prioritized(std::span<const ProviderMatches> providers,
                               std::span<const Rational> keyword_weights) {
  if (providers.empty()) fail(ErrorCode::EmptyInput, "no providers to rank");
  std::vector<EvaluationVector> evs;
  for (std::size_t k = 0; k < keyword_weights.size(); ++k) evs.push_back(normalize_ev(build_em(k, providers)));
  std::vector<std::string> ids;
  for (const auto& p : providers) ids.push_back(p.anon_id);
  auto res = aggregate(evs, keyword_weights, ids);
  for (auto& e : res.entries) {
    auto it = std::find_if(providers.begin(), providers.end(), [&](const auto& p) { return p.anon_id == e.anon_id; });
    e.hits_per_keyword = hits_of(*it);
  }
  return res;
}

std::vector<Rational> keyword_weights(const secsla::RequirementSet& req, const Weights& w) {
  std::vector<Rational> out;
  for (const auto& kw : req.keywords) out.push_back(w.of(kw.priority));
  return out;
}

std::string RankingResult::to_json() const {
  nlohmann::json j;
  j["scheme"] = scheme_name(scheme);
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    j["entries"].push_back({{"anonymous_id", e.anon_id},
                            {"score_numerator", boost::multiprecision::numerator(e.score).str()},
                            {"score_denominator", boost::multiprecision::denominator(e.score).str()},
                            {"hits_per_keyword", e.hits_per_keyword}});
  }
  j["excluded"] = excluded;
  return j.dump(2);
}

RankingResult RankingResult::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    RankingResult r;
    r.scheme = parse_scheme(j.at("scheme").get<std::string>());
    for (const auto& e : j.at("entries")) {
      RankedProvider p;
      p.anon_id = e.at("anonymous_id").get<std::string>();
      p.score = Rational(boost::multiprecision::cpp_int(e.at("score_numerator").get<std::string>()),
                         boost::multiprecision::cpp_int(e.at("score_denominator").get<std::string>()));
      p.hits_per_keyword = e.at("hits_per_keyword").get<std::vector<std::uint32_t>>();
      r.entries.push_back(std::move(p));
    }
    if (j.contains("excluded")) r.excluded = j.at("excluded").get<std::vector<std::string>>();
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::FormatError, std::string("ranking document: ") + e.what());
  }
}

}  // namespace qres::ranking
