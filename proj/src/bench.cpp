#include "qres/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "qres/deployment.hpp"
#include "qres/error.hpp"
#include "qres/scenario.hpp"

namespace qres::bench {

CellResult run_cell(const CellSpec& spec, const std::filesystem::path& work_dir) {
  if (spec.reps == 0) fail(ErrorCode::Usage, "repetitions must be at least 1");
  auto data = scenario::generate({spec.providers, spec.slos, 4, spec.keywords, scenario::WeightProfile::Mixed, spec.seed});

  std::filesystem::remove_all(work_dir);
  LocalDeployment dep({work_dir, spec.mode, 0, spec.seed ^ 0x9e3779b97f4a7c15ull});
  for (std::size_t i = 0; i < data.offerings.size(); ++i) dep.add_provider("bench-" + std::to_string(i), data.offerings[i]);
  auto rs = secsla::tokenize_requirements(data.requirements.doc, data.requirements.priorities, &data.template_doc);
  auto req = broker::make_request(rs, spec.scheme);

  CellResult out;
  out.spec = spec;
  for (std::size_t r = 0; r < spec.reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    auto resp = dep.submit(req);
    auto t1 = std::chrono::steady_clock::now();
    if (!resp.ranking.excluded.empty()) fail(ErrorCode::ProviderUnreachable, "a provider dropped out during the benchmark");
    out.samples_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  double n = static_cast<double>(out.samples_ms.size());
  out.mean_ms = std::accumulate(out.samples_ms.begin(), out.samples_ms.end(), 0.0) / n;
  double ss = 0;
  for (double s : out.samples_ms) ss += (s - out.mean_ms) * (s - out.mean_ms);
  out.stddev_ms = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return out;
}

std::string csv_header() { return "keywords,slos,providers,scheme,mean_ms,stddev_ms,reps"; }

std::string csv_row(const CellResult& r) {
  std::ostringstream o;
  o << r.spec.keywords << ',' << r.spec.slos << ',' << r.spec.providers << ',' << ranking::scheme_name(r.spec.scheme)
    << ',' << std::fixed << std::setprecision(3) << r.mean_ms << ',' << r.stddev_ms << ',' << r.spec.reps;
  return o.str();
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::LengthMismatch, "need at least two points");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0) return 1.0;
  if (sxx == 0) return 0.0;
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace qres::bench
