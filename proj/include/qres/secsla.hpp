#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qres/crypto.hpp"

namespace qres::secsla {

enum class NodeKind : std::uint8_t { Service, Control, Slo };

struct Node {
  NodeKind kind = NodeKind::Service;
  std::string id;
  std::string name;
  std::string category;
  std::string value;  // SLO service-level label, e.g. "level3"
  std::uint32_t prefield = 0;
  std::vector<Node> children;

  friend bool operator==(const Node&, const Node&) = default;
};

struct SecSlaDocument {
  std::string sla_id;
  std::vector<Node> services;

  friend bool operator==(const SecSlaDocument&, const SecSlaDocument&) = default;
};

// Root element <sla>/<SLA> containing <service>, which nests <control> and
// <slo>. Any "pre" attribute is ignored and recomputed.
SecSlaDocument parse_secsla(std::string_view xml_text);  // MalformedXml, SchemaViolation, DuplicateId

// Open-tag ordinals in document order, root excluded, starting at 1.
SecSlaDocument compute_prefields(SecSlaDocument doc);

// value || "||" || decimal(prefield) per SLO, in pre-field order.
std::vector<std::string> extract_slo_substrings(const SecSlaDocument& doc);  // MissingValue

// First 8 bytes of SHA-256 over the UTF-8 substring.
Token derive_token(std::string_view substring);  // EmptySubstring

std::string to_xml(const SecSlaDocument& doc);

struct SloRef {
  const Node* slo;
  const Node* service;  // top-level ancestor
};
std::vector<SloRef> slos(const SecSlaDocument& doc);

// Offering tokens, one per SLO, in pre-field order.
std::vector<Token> tokenize_offering(const SecSlaDocument& doc);

enum class Priority : std::uint8_t { HI, LI, NR };
std::string_view priority_name(Priority p);
Priority parse_priority(std::string_view s);  // SchemaViolation

// An SLO whose value is this marker carries no requirement.
inline constexpr std::string_view kAnyValue = "*";

struct Keyword {
  Token token;
  std::string slo_id;
  std::string service_id;
  Priority priority = Priority::HI;
  std::string source;  // the substring; never leaves the customer
};

struct RequirementSet {
  std::vector<Keyword> keywords;
  std::map<std::string, Priority> priorities;
};

// Throws TemplateMismatch unless both documents have the same node ids,
// kinds and pre-field layout.
void check_template(const SecSlaDocument& doc, const SecSlaDocument& reference);

// Priorities are keyed by top-level service id. MissingPriority if a service
// holding a keyword has none; EmptyInput if no SLO carries a requirement.
RequirementSet tokenize_requirements(const SecSlaDocument& doc,
                                     const std::map<std::string, Priority>& priorities,
                                     const SecSlaDocument* reference = nullptr);

// <requirements><sla .../><priorities><priority service="S1" level="HI"/></priorities></requirements>
struct RequirementsFile {
  SecSlaDocument doc;
  std::map<std::string, Priority> priorities;
};
RequirementsFile parse_requirements(std::string_view xml_text);
std::string requirements_to_xml(const RequirementsFile& req);

}  // namespace qres::secsla
