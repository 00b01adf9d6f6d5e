#include "dateiv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "compensated_sum.hpp"
#include "dateiv/format.hpp"

namespace dateiv {

namespace {

constexpr std::uint64_t kBootstrapStreamTag = 0x626F6F7473747261ULL;

int draw_from_row(std::span<const double> distribution, double u) {
  double cumulative = 0.0;
  for (std::size_t j = 0; j < distribution.size(); ++j) {
    cumulative += distribution[j];
    if (u < cumulative) return static_cast<int>(j);
  }
  return static_cast<int>(distribution.size()) - 1;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + mid - 1,
                     values.begin() + mid);
    m = (m + values[mid - 1]) / 2.0;
  }
  return m;
}

}  // namespace

AncestralSampler::AncestralSampler(const CausalBayesNet& net) : net_(&net) {
  for (const std::string& name : net.dag().topological_order()) {
    order_.push_back(net.dag().index_of(name));
  }
}

std::vector<int> AncestralSampler::draw_indices(SplitMix64& stream) const {
  std::vector<int> values(net_->dag().variable_count(), -1);
  for (std::size_t v : order_) {
    const std::size_t row = net_->row_index(v, values);
    if (!net_->has_row(v, row)) {
      throw ValidationError("missing CPT row for variable '" +
                            net_->dag().variable(v).name + "'");
    }
    values[v] = draw_from_row(net_->row_distribution(v, row), stream.next_unit());
  }
  return values;
}

FullAssignment AncestralSampler::draw(SplitMix64& stream) const {
  const std::vector<int> values = draw_indices(stream);
  FullAssignment assignment;
  for (std::size_t v = 0; v < values.size(); ++v) {
    const Variable& var = net_->dag().variable(v);
    assignment.set(var.name, var.domain[static_cast<std::size_t>(values[v])]);
  }
  return assignment;
}

std::vector<TrialSample> sample(const CausalBayesNet& net, std::uint64_t seed,
                                std::size_t n) {
  const Dag& dag = net.dag();
  const std::size_t assign = dag.index_of("Assign");
  const std::size_t indiv = dag.index_of("Indiv");
  const std::size_t take = dag.index_of("Take");
  const std::size_t cure = dag.index_of("Cure");
  const std::vector<std::string> binary{"0", "1"};
  for (std::size_t v : {assign, take, cure}) {
    if (dag.variable(v).domain != binary) {
      throw ValidationError("variable '" + dag.variable(v).name +
                            "' must have domain {0, 1} for trial sampling");
    }
  }

  const AncestralSampler sampler(net);
  std::vector<TrialSample> samples;
  samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    SplitMix64 stream = SplitMix64::stream(seed, k);
    const std::vector<int> values = sampler.draw_indices(stream);
    samples.push_back(
        {dag.variable(indiv).domain[static_cast<std::size_t>(values[indiv])],
         values[assign], values[take], values[cure]});
  }
  return samples;
}

namespace {

struct ArmCounts {
  std::size_t n1 = 0, n0 = 0;
  std::size_t take1 = 0, take0 = 0;
  std::size_t cure1 = 0, cure0 = 0;

  void add(const TrialSample& s) {
    if (s.assign == 1) {
      ++n1;
      take1 += static_cast<std::size_t>(s.take);
      cure1 += static_cast<std::size_t>(s.cure);
    } else {
      ++n0;
      take0 += static_cast<std::size_t>(s.take);
      cure0 += static_cast<std::size_t>(s.cure);
    }
  }

  bool both_arms() const { return n1 > 0 && n0 > 0; }

  IvConditionals means() const {
    return IvConditionals{
        static_cast<double>(cure1) / static_cast<double>(n1),
        static_cast<double>(cure0) / static_cast<double>(n0),
        static_cast<double>(take1) / static_cast<double>(n1),
        static_cast<double>(take0) / static_cast<double>(n0)};
  }
};

}  // namespace

std::uint64_t bootstrap_seed_for(std::uint64_t seed) {
  return SplitMix64::mix(seed ^ kBootstrapStreamTag);
}

TrialResult wald_estimate(const std::vector<TrialSample>& samples,
                          const WaldOptions& opts) {
  ArmCounts counts;
  for (const TrialSample& s : samples) counts.add(s);
  if (!counts.both_arms()) {
    throw EmptyArmError("both assignment arms must be non-empty");
  }
  const IvConditionals means = counts.means();
  const double take_contrast = means.take_given_assign1 - means.take_given_assign0;
  if (take_contrast == 0.0) {
    throw ZeroSampleDenominatorError("sample uptake contrast is zero");
  }

  TrialResult result;
  result.n = samples.size();
  result.wald_estimate = wald_ratio(means);
  result.cure_contrast = means.cure_given_assign1 - means.cure_given_assign0;
  result.take_contrast = take_contrast;

  if (opts.bootstrap_resamples > 0) {
    std::vector<double> estimates;
    estimates.reserve(opts.bootstrap_resamples);
    for (std::size_t r = 0; r < opts.bootstrap_resamples; ++r) {
      SplitMix64 stream = SplitMix64::stream(opts.bootstrap_seed, r);
      ArmCounts resample;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        resample.add(samples[stream.next_below(samples.size())]);
      }
      if (!resample.both_arms()) continue;
      const IvConditionals m = resample.means();
      if (m.take_given_assign1 - m.take_given_assign0 == 0.0) continue;
      estimates.push_back(wald_ratio(m));
    }
    if (estimates.size() >= 2) {
      detail::CompensatedSum sum;
      for (double e : estimates) sum.add(e);
      const double mean = sum.value() / static_cast<double>(estimates.size());
      detail::CompensatedSum sq;
      for (double e : estimates) sq.add((e - mean) * (e - mean));
      result.empirical_se =
          std::sqrt(sq.value() / static_cast<double>(estimates.size() - 1));
    }
  }
  return result;
}

TrialResult run_trial(const Population& pop, const IvNetConfig& cfg,
                      std::uint64_t seed, std::size_t n,
                      std::size_t bootstrap_resamples) {
  const CausalBayesNet net = build_iv_net(pop, cfg);
  const std::vector<TrialSample> samples = sample(net, seed, n);
  TrialResult result = wald_estimate(
      samples, WaldOptions{bootstrap_resamples, bootstrap_seed_for(seed)});
  result.exact_date = date(pop);
  return result;
}

ConvergenceReport convergence_report(const Population& pop,
                                     const IvNetConfig& cfg,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::vector<std::size_t>& ns) {
  ConvergenceReport report;
  report.exact_date = date(pop);
  for (std::size_t n : ns) {
    std::vector<double> errors;
    errors.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
      const TrialResult r = run_trial(pop, cfg, seed, n, 0);
      const double abs_error = std::abs(r.wald_estimate - report.exact_date);
      report.rows.push_back({n, seed, r.wald_estimate, abs_error});
      errors.push_back(abs_error);
    }
    report.median_abs_error.emplace_back(n, median(std::move(errors)));
  }
  for (std::size_t i = 1; i < report.median_abs_error.size(); ++i) {
    if (report.median_abs_error[i].second >
        report.median_abs_error[i - 1].second) {
      report.median_non_increasing = false;
    }
  }
  return report;
}

void write_samples_csv(std::ostream& out,
                       const std::vector<TrialSample>& samples) {
  out << "indiv_id,assign,take,cure\n";
  for (const TrialSample& s : samples) {
    out << csv_escape(s.indiv_id) << ',' << s.assign << ',' << s.take << ','
        << s.cure << '\n';
  }
}

std::string to_json(const TrialResult& r, int indent) {
  nlohmann::json j;
  j["n"] = r.n;
  j["wald_estimate"] = r.wald_estimate;
  j["empirical_se"] = r.empirical_se;
  j["exact_date"] = r.exact_date;
  j["cure_contrast"] = r.cure_contrast;
  j["take_contrast"] = r.take_contrast;
  return j.dump(indent);
}

std::string to_csv(const TrialResult& r) {
  std::string out = "n,wald_estimate,empirical_se,exact_date,cure_contrast,take_contrast\n";
  out += std::to_string(r.n) + ',' + format_double(r.wald_estimate) + ',' +
         format_double(r.empirical_se) + ',' + format_double(r.exact_date) +
         ',' + format_double(r.cure_contrast) + ',' +
         format_double(r.take_contrast) + '\n';
  return out;
}

std::string to_json(const ConvergenceReport& r, int indent) {
  nlohmann::json j;
  j["exact_date"] = r.exact_date;
  j["rows"] = nlohmann::json::array();
  for (const ConvergenceRow& row : r.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"seed", row.seed},
                         {"wald_estimate", row.wald_estimate},
                         {"abs_error", row.abs_error}});
  }
  j["median_abs_error"] = nlohmann::json::array();
  for (const auto& [n, m] : r.median_abs_error) {
    j["median_abs_error"].push_back({{"n", n}, {"median", m}});
  }
  j["median_non_increasing"] = r.median_non_increasing;
  return j.dump(indent);
}

std::string to_csv(const ConvergenceReport& r) {
  std::string out = "n,seed,wald_estimate,abs_error\n";
  for (const ConvergenceRow& row : r.rows) {
    out += std::to_string(row.n) + ',' + std::to_string(row.seed) + ',' +
           format_double(row.wald_estimate) + ',' +
           format_double(row.abs_error) + '\n';
  }
  return out;
}

}  // namespace dateiv
