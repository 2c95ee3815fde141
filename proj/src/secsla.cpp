#include "qres/secsla.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "qres/error.hpp"
#include "qres/xml.hpp"

namespace qres::secsla {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string attr_or(const xml::Element& e, std::string_view key, std::string fallback = {}) {
  const std::string* v = e.attribute(key);
  return v ? *v : fallback;
}

const std::string& required_attr(const xml::Element& e, std::string_view key) {
  const std::string* v = e.attribute(key);
  if (!v) fail(ErrorCode::SchemaViolation, "<" + e.name + "> lacks attribute '" + std::string(key) + "'");
  return *v;
}

Node convert(const xml::Element& e, NodeKind kind, std::set<std::string>& ids) {
  Node n;
  n.kind = kind;
  n.id = required_attr(e, "id");
  if (n.id.empty()) fail(ErrorCode::SchemaViolation, "empty id on <" + e.name + ">");
  if (!ids.insert(n.id).second) fail(ErrorCode::DuplicateId, "duplicate id '" + n.id + "'");
  n.name = attr_or(e, "name");
  n.category = attr_or(e, "category");
  if (kind == NodeKind::Slo) {
    n.value = required_attr(e, "value");
    if (!e.children.empty()) fail(ErrorCode::SchemaViolation, "<slo id='" + n.id + "'> has children");
    return n;
  }
  for (const auto& c : e.children) {
    if (c.name == "control") {
      n.children.push_back(convert(c, NodeKind::Control, ids));
    } else if (c.name == "slo") {
      n.children.push_back(convert(c, NodeKind::Slo, ids));
    } else {
      fail(ErrorCode::SchemaViolation, "unexpected <" + c.name + "> inside <" + e.name + ">");
    }
  }
  return n;
}

SecSlaDocument from_element(const xml::Element& root) {
  if (!iequals(root.name, "sla")) fail(ErrorCode::SchemaViolation, "root element must be <sla>, got <" + root.name + ">");
  SecSlaDocument doc;
  doc.sla_id = attr_or(root, "slaid");
  std::set<std::string> ids;
  for (const auto& c : root.children) {
    if (c.name != "service") fail(ErrorCode::SchemaViolation, "unexpected <" + c.name + "> at top level");
    doc.services.push_back(convert(c, NodeKind::Service, ids));
  }
  if (doc.services.empty()) fail(ErrorCode::SchemaViolation, "document has no services");
  return doc;
}

void number(Node& n, std::uint32_t& next) {
  n.prefield = next++;
  for (auto& c : n.children) number(c, next);
}

std::string_view tag_of(NodeKind k) {
  switch (k) {
    case NodeKind::Service: return "service";
    case NodeKind::Control: return "control";
    case NodeKind::Slo: return "slo";
  }
  return "slo";
}

void write_node(std::string& out, const Node& n, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "<";
  out += tag_of(n.kind);
  out += " id=\"" + xml::escape(n.id) + "\"";
  if (!n.name.empty()) out += " name=\"" + xml::escape(n.name) + "\"";
  if (!n.category.empty()) out += " category=\"" + xml::escape(n.category) + "\"";
  if (n.kind == NodeKind::Slo) out += " value=\"" + xml::escape(n.value) + "\"";
  if (n.prefield) out += " pre=\"" + std::to_string(n.prefield) + "\"";
  if (n.children.empty()) {
    out += "></" + std::string(tag_of(n.kind)) + ">\n";
    return;
  }
  out += ">\n";
  for (const auto& c : n.children) write_node(out, c, depth + 1);
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "</" + std::string(tag_of(n.kind)) + ">\n";
}

void collect(const Node& n, const Node* service, std::vector<SloRef>& out) {
  if (n.kind == NodeKind::Slo) out.push_back({&n, service});
  for (const auto& c : n.children) collect(c, service, out);
}

void layout(const Node& n, std::vector<std::tuple<NodeKind, std::string, std::uint32_t>>& out) {
  out.emplace_back(n.kind, n.id, n.prefield);
  for (const auto& c : n.children) layout(c, out);
}

const SecSlaDocument& numbered(const SecSlaDocument& doc, SecSlaDocument& scratch) {
  scratch = compute_prefields(doc);
  return scratch;
}

}  // namespace

SecSlaDocument parse_secsla(std::string_view xml_text) { return from_element(xml::parse(xml_text)); }

SecSlaDocument compute_prefields(SecSlaDocument doc) {
  std::uint32_t next = 1;
  for (auto& s : doc.services) number(s, next);
  return doc;
}

std::vector<SloRef> slos(const SecSlaDocument& doc) {
  std::vector<SloRef> out;
  for (const auto& s : doc.services) collect(s, &s, out);
  return out;
}

std::vector<std::string> extract_slo_substrings(const SecSlaDocument& doc) {
  SecSlaDocument scratch;
  const auto& d = numbered(doc, scratch);
  std::vector<std::string> out;
  for (const auto& ref : slos(d)) {
    if (ref.slo->value.empty()) fail(ErrorCode::MissingValue, "SLO '" + ref.slo->id + "' has no value");
    out.push_back(ref.slo->value + "||" + std::to_string(ref.slo->prefield));
  }
  return out;
}

Token derive_token(std::string_view substring) {
  if (substring.empty()) fail(ErrorCode::EmptySubstring, "cannot derive a token from an empty substring");
  Digest d = hash(as_bytes(substring));
  Token t;
  std::copy_n(d.begin(), kTokenSize, t.bytes.begin());
  return t;
}

std::string to_xml(const SecSlaDocument& doc) {
  std::string out = "<sla slaid=\"" + xml::escape(doc.sla_id) + "\">\n";
  for (const auto& s : doc.services) write_node(out, s, 1);
  out += "</sla>\n";
  return out;
}

std::vector<Token> tokenize_offering(const SecSlaDocument& doc) {
  std::vector<Token> out;
  for (const auto& s : extract_slo_substrings(doc)) out.push_back(derive_token(s));
  return out;
}

std::string_view priority_name(Priority p) {
  switch (p) {
    case Priority::HI: return "HI";
    case Priority::LI: return "LI";
    case Priority::NR: return "NR";
  }
  return "NR";
}

Priority parse_priority(std::string_view s) {
  if (iequals(s, "HI")) return Priority::HI;
  if (iequals(s, "LI")) return Priority::LI;
  if (iequals(s, "NR")) return Priority::NR;
  fail(ErrorCode::SchemaViolation, "unknown priority '" + std::string(s) + "'");
}

void check_template(const SecSlaDocument& doc, const SecSlaDocument& reference) {
  SecSlaDocument s1, s2;
  const auto& a = numbered(doc, s1);
  const auto& b = numbered(reference, s2);
  std::vector<std::tuple<NodeKind, std::string, std::uint32_t>> la, lb;
  for (const auto& s : a.services) layout(s, la);
  for (const auto& s : b.services) layout(s, lb);
  if (la != lb) fail(ErrorCode::TemplateMismatch, "document structure differs from the template");
}

RequirementSet tokenize_requirements(const SecSlaDocument& doc,
                                     const std::map<std::string, Priority>& priorities,
                                     const SecSlaDocument* reference) {
  SecSlaDocument scratch;
  const auto& d = numbered(doc, scratch);
  if (reference) check_template(d, *reference);
  RequirementSet req;
  req.priorities = priorities;
  for (const auto& ref : slos(d)) {
    if (ref.slo->value == kAnyValue) continue;
    if (ref.slo->value.empty()) fail(ErrorCode::MissingValue, "SLO '" + ref.slo->id + "' has no value");
    auto it = priorities.find(ref.service->id);
    if (it == priorities.end())
      fail(ErrorCode::MissingPriority, "no priority for service '" + ref.service->id + "'");
    Keyword kw;
    kw.source = ref.slo->value + "||" + std::to_string(ref.slo->prefield);
    kw.token = derive_token(kw.source);
    kw.slo_id = ref.slo->id;
    kw.service_id = ref.service->id;
    kw.priority = it->second;
    req.keywords.push_back(std::move(kw));
  }
  if (req.keywords.empty()) fail(ErrorCode::EmptyInput, "requirements contain no keywords");
  return req;
}

RequirementsFile parse_requirements(std::string_view xml_text) {
  xml::Element root = xml::parse(xml_text);
  if (root.name != "requirements") fail(ErrorCode::SchemaViolation, "root element must be <requirements>");
  RequirementsFile req;
  bool have_doc = false;
  for (const auto& c : root.children) {
    if (iequals(c.name, "sla")) {
      if (have_doc) fail(ErrorCode::SchemaViolation, "more than one <sla> in requirements");
      req.doc = compute_prefields(from_element(c));
      have_doc = true;
    } else if (c.name == "priorities") {
      for (const auto& p : c.children) {
        if (p.name != "priority") fail(ErrorCode::SchemaViolation, "unexpected <" + p.name + "> in <priorities>");
        req.priorities[required_attr(p, "service")] = parse_priority(required_attr(p, "level"));
      }
    } else {
      fail(ErrorCode::SchemaViolation, "unexpected <" + c.name + "> in <requirements>");
    }
  }
  if (!have_doc) fail(ErrorCode::SchemaViolation, "requirements lack an <sla>");
  return req;
}

std::string requirements_to_xml(const RequirementsFile& req) {
  std::string out = "<requirements>\n" + to_xml(req.doc) + "<priorities>\n";
  for (const auto& [svc, p] : req.priorities)
    out += "  <priority service=\"" + xml::escape(svc) + "\" level=\"" + std::string(priority_name(p)) + "\"/>\n";
  out += "</priorities>\n</requirements>\n";
  return out;
}

}  // namespace qres::secsla
