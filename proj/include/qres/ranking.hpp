#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <string>
#include <vector>

#include "qres/crypto.hpp"
#include "qres/secsla.hpp"

namespace qres::ranking {

using Rational = boost::multiprecision::cpp_rational;

enum class Scheme : std::uint8_t { Boolean, Prioritized };
std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view s);  // Config

// One entry per provider token slot, 1 where the slot equals the keyword ciphertext.
using MatchRow = std::vector<std::uint8_t>;

struct ProviderMatches {
  std::string anon_id;
  std::vector<MatchRow> rows;  // one per keyword
};

using EvaluationMatrix = std::vector<std::vector<std::uint8_t>>;  // providers x token slots
using EvaluationVector = std::vector<Rational>;

struct RankedProvider {
  std::string anon_id;
  Rational score;
  std::vector<std::uint32_t> hits_per_keyword;
};

struct RankingResult {
  Scheme scheme = Scheme::Boolean;
  std::vector<RankedProvider> entries;  // best first
  std::vector<std::string> excluded;    // providers that failed mid-protocol

  std::string to_json() const;
  static RankingResult from_json(std::string_view text);  // FormatError
};

struct Weights {
  Rational hi{1};
  Rational li{1, 2};
  Rational nr{0};

  const Rational& of(secsla::Priority p) const;
};

// Parses "3", "1/2" or a finite decimal such as "0.25" exactly.
Rational parse_rational(std::string_view s);  // Config
std::string render_decimal(const Rational& r, int digits = 6);

std::uint8_t match_value(const EncryptedToken& cw, const EncryptedToken& ct);
MatchRow match_row(const EncryptedToken& cw, std::span<const EncryptedToken> tokens);

RankingResult rank_boolean(std::span<const ProviderMatches> providers);  // EmptyInput

EvaluationMatrix build_em(std::size_t keyword, std::span<const ProviderMatches> providers);  // RaggedRows
EvaluationVector normalize_ev(const EvaluationMatrix& em);

// score_i = sum over keywords of weight * EV[i]. `ids` names the providers in EV order.
RankingResult aggregate(std::span<const EvaluationVector> evs, std::span<const Rational> weights,
                        std::span<const std::string> ids);  // LengthMismatch, EmptyInput

RankingResult rank_prioritized(std::span<const ProviderMatches> providers,
                               std::span<const Rational> keyword_weights);

std::vector<Rational> keyword_weights(const secsla::RequirementSet& req, const Weights& w = {});

}  // namespace qres::ranking
