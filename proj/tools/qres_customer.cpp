// Customer client: submits requirements and prints the ranking.
#include "cli_common.hpp"
#include "qres/actors.hpp"

using namespace qres;

namespace {

ranking::Weights parse_weights(const std::string& s) {
  ranking::Weights w;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Usage, "weights look like HI=1,LI=1/2,NR=0");
    auto key = item.substr(0, eq);
    auto val = ranking::parse_rational(item.substr(eq + 1));
    if (val < 0) fail(ErrorCode::Usage, "weights must be non-negative");
    if (key == "HI") w.hi = val;
    else if (key == "LI") w.li = val;
    else if (key == "NR") w.nr = val;
    else fail(ErrorCode::Usage, "unknown priority " + key);
  }
  return w;
}

nlohmann::json response_json(const broker::SubmitResponse& r) {
  nlohmann::json j;
  j["ranking"] = nlohmann::json::parse(r.ranking.to_json());
  if (r.resolved_top) j["resolved_top"] = *r.resolved_top;
  if (!r.resolve_error.empty()) j["resolve_error"] = r.resolve_error;
  return j;
}

broker::SubmitResponse response_from_json(const nlohmann::json& j) {
  broker::SubmitResponse r;
  try {
    r.ranking = ranking::RankingResult::from_json(j.at("ranking").dump());
    if (j.contains("resolved_top")) r.resolved_top = j["resolved_top"].get<std::string>();
    if (j.contains("resolve_error")) r.resolve_error = j["resolve_error"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, e.what());
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRES customer"};
  app.require_subcommand(1);

  std::string broker_ep, req_file, template_file, scheme = "boolean", weights, out_file, in_file;
  bool resolve = false;
  auto* submit = app.add_subcommand("submit", "Send requirements to the broker");
  submit->add_option("--broker", broker_ep, "Broker endpoint")->required();
  submit->add_option("--requirements", req_file, "Requirements XML")->required();
  submit->add_option("--template", template_file, "secSLA template the requirements must follow");
  submit->add_option("--scheme", scheme, "boolean | prioritized")->capture_default_str();
  submit->add_option("--weights", weights, "e.g. HI=1,LI=1/2,NR=0");
  submit->add_flag("--resolve", resolve, "Ask the auditor to name the top provider");
  submit->add_option("--out", out_file, "Also write the ranking as JSON");

  auto* show = app.add_subcommand("show-ranking", "Print a saved ranking");
  show->add_option("--in", in_file, "Ranking JSON from `submit --out`")->required();

  return cli::run("qres-customer", app, argc, argv, [&] {
    if (show->parsed()) {
      std::cout << actors::render_ranking(response_from_json(cli::read_json(in_file)));
      return;
    }
    auto text = cli::read_file(req_file);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) fail(ErrorCode::Usage, req_file + " is empty");
    auto rf = secsla::parse_requirements(text);
    std::optional<secsla::SecSlaDocument> tmpl;
    if (!template_file.empty()) tmpl = secsla::parse_secsla(cli::read_file(template_file));
    secsla::RequirementSet rs;
    try {
      rs = secsla::tokenize_requirements(rf.doc, rf.priorities, tmpl ? &*tmpl : nullptr);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmptyInput) fail(ErrorCode::Usage, "requirements contain no keywords");
      throw;
    }
    auto req = broker::make_request(rs, ranking::parse_scheme(scheme),
                                    weights.empty() ? std::nullopt : std::optional(parse_weights(weights)), resolve);
    net::Network network;
    auto ch = network.dial(net::Endpoint::parse(broker_ep));
    auto resp = actors::customer_submit(*ch, req);
    if (!out_file.empty()) cli::write_file(out_file, response_json(resp).dump(2) + "\n");
    std::cout << actors::render_ranking(resp);
  });
}
