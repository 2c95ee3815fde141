#include "qres/scenario.hpp"

#include <algorithm>
#include <numeric>

#include "qres/error.hpp"
#include "qres/rng.hpp"

namespace qres::scenario {

using secsla::Node;
using secsla::NodeKind;

namespace {

constexpr std::size_t kSlosPerControl = 5;
constexpr std::size_t kControlsPerService = 2;

secsla::SecSlaDocument build_template(std::size_t slos) {
  secsla::SecSlaDocument doc;
  doc.sla_id = "generated";
  std::size_t made = 0;
  for (std::size_t s = 0; made < slos; ++s) {
    Node svc{NodeKind::Service, "S" + std::to_string(s + 1), "service " + std::to_string(s + 1), "security", "", 0, {}};
    for (std::size_t c = 0; c < kControlsPerService && made < slos; ++c) {
      Node ctl{NodeKind::Control, svc.id + ".C" + std::to_string(c + 1), "control", "security", "", 0, {}};
      for (std::size_t o = 0; o < kSlosPerControl && made < slos; ++o, ++made) {
        ctl.children.push_back({NodeKind::Slo, ctl.id + ".O" + std::to_string(o + 1), "objective", "security", "", 0, {}});
      }
      svc.children.push_back(std::move(ctl));
    }
    doc.services.push_back(std::move(svc));
  }
  return secsla::compute_prefields(std::move(doc));
}

template <typename F>
void for_each_slo(std::vector<Node>& nodes, F&& f) {
  for (auto& n : nodes) {
    if (n.kind == NodeKind::Slo) f(n);
    for_each_slo(n.children, f);
  }
}

}  // namespace

std::string level_name(std::size_t i) { return "level" + std::to_string(i + 1); }

ScenarioData generate(const Scenario& s) {
  if (s.providers == 0 || s.slos == 0 || s.levels == 0 || s.keywords == 0)
    fail(ErrorCode::Usage, "scenario counts must be at least 1");
  if (s.keywords > s.slos) fail(ErrorCode::Usage, "more keywords than SLOs");
  DeterministicRng rng(s.seed);
  ScenarioData out;
  out.template_doc = build_template(s.slos);

  for (std::size_t p = 0; p < s.providers; ++p) {
    auto doc = out.template_doc;
    doc.sla_id = "offering-" + std::to_string(p + 1);
    for_each_slo(doc.services, [&](Node& n) { n.value = level_name(rng.uniform(s.levels)); });
    out.offerings.push_back(std::move(doc));
  }

  std::vector<std::size_t> order(s.slos);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = s.slos - 1; i > 0; --i) std::swap(order[i], order[rng.uniform(i + 1)]);
  std::vector<bool> wanted(s.slos, false);
  for (std::size_t i = 0; i < s.keywords; ++i) wanted[order[i]] = true;

  auto req = out.template_doc;
  req.sla_id = "requirements";
  std::size_t idx = 0;
  for_each_slo(req.services, [&](Node& n) {
    n.value = wanted[idx++] ? level_name(rng.uniform(s.levels)) : std::string(secsla::kAnyValue);
  });
  out.requirements.doc = std::move(req);
  for (const auto& svc : out.template_doc.services) {
    secsla::Priority p = secsla::Priority::HI;
    if (s.profile == WeightProfile::Mixed) p = static_cast<secsla::Priority>(rng.uniform(3));
    out.requirements.priorities[svc.id] = p;
  }
  return out;
}

}  // namespace qres::scenario
