#include "detect/eval/detect.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "detect/core/errors.hpp"
#include "detect/data/text.hpp"
#include "detect/model/trainer.hpp"

namespace detect::eval {
namespace {

constexpr double kZ95 = 1.96;

std::string fixed2(double v) { return data::format_fixed(v, 2); }
const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string_view to_string(NrsPredicate predicate) {
  return predicate == NrsPredicate::both ? "and" : "or";
}

NrsPredicate parse_nrs_predicate(std::string_view text) {
  if (text == "and") return NrsPredicate::both;
  if (text == "or") return NrsPredicate::either;
  throw ConfigError("nrs_predicate must be 'and' or 'or', got '" + std::string(text) + "'");
}

double compute_tes(double acc_pre, double acc_post) {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 100.0)) {
      throw ContractError(std::string(name) + " must be a percentage in [0, 100], got " +
                          data::format_exact(v));
    }
  };
  check(acc_pre, "acc_pre");
  check(acc_post, "acc_post");
  return acc_pre - acc_post;
}

bool nrs_improved(int nrs_pre, int nrs_post, NrsPredicate predicate) {
  if (nrs_pre < 0 || nrs_pre > 10 || nrs_post < 0 || nrs_post > 10) {
    throw ContractError("NRS values must be in [0, 10]");
  }
  const int drop = nrs_pre - nrs_post;
  if (drop <= 0) return false;
  const bool absolute = drop >= 2;
  const bool relative = 100 * drop >= 33 * nrs_pre;
  return predicate == NrsPredicate::both ? (absolute && relative)
                                         : (absolute || relative);
}

PatientOutcome make_outcome(std::string patient_id, double acc_pre, double acc_post,
                            int nrs_pre, int nrs_post, NrsPredicate predicate) {
  PatientOutcome o;
  o.patient_id = std::move(patient_id);
  o.acc_pre = acc_pre;
  o.acc_post = acc_post;
  o.tes = compute_tes(acc_pre, acc_post);
  o.nrs_pre = nrs_pre;
  o.nrs_post = nrs_post;
  o.sig_nrs = nrs_improved(nrs_pre, nrs_post, predicate);
  return o;
}

double compute_threshold(const std::vector<PatientOutcome>& outcomes) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& o : outcomes) {
    if (!o.sig_nrs) continue;
    sum += o.tes;
    ++count;
  }
  if (count == 0) {
    throw CalibrationError("no threshold defined: no patient shows an NRS improvement");
  }
  return sum / static_cast<double>(count);
}

std::vector<PatientOutcome> flag_significance(std::vector<PatientOutcome> outcomes,
                                              double threshold) {
  for (auto& o : outcomes) o.sig_detect = o.tes >= threshold;
  return outcomes;
}

double patient_accuracy(const model::ClassifierBundle& bundle,
                        const data::WindowSet& windows) {
  if (windows.empty()) throw EvaluationError("no windows to evaluate");
  if (!windows.normalized || !windows.norm_stats || !bundle.norm_stats ||
      !(*windows.norm_stats == *bundle.norm_stats)) {
    throw ContractError(
        "windows must be normalized with the bundle's training statistics");
  }
  return model::accuracy_percent(bundle, windows);
}

std::optional<ColumnSummary> summarize(std::string column,
                                       const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double half = kZ95 * sd / std::sqrt(n);
  return ColumnSummary{std::move(column), values.size(), mean, sd, mean - half,
                       mean + half};
}

CohortReport build_report(std::vector<PatientOutcome> outcomes) {
  CohortReport report;
  if (outcomes.empty()) throw EvaluationError("no patient outcomes to report");
  report.tes_threshold = compute_threshold(outcomes);
  report.outcomes = flag_significance(std::move(outcomes), report.tes_threshold);

  std::size_t agree = 0;
  for (const auto& o : report.outcomes) agree += o.sig_nrs == o.sig_detect ? 1 : 0;
  report.consistency_rate =
      100.0 * static_cast<double>(agree) / static_cast<double>(report.outcomes.size());

  std::vector<double> pre, post, tes, nrs_pre, nrs_post;
  for (const auto& o : report.outcomes) {
    pre.push_back(o.acc_pre);
    post.push_back(o.acc_post);
    tes.push_back(o.tes);
    nrs_pre.push_back(o.nrs_pre);
    nrs_post.push_back(o.nrs_post);
  }
  const std::pair<const char*, const std::vector<double>*> columns[] = {
      {"acc_pre", &pre}, {"acc_post", &post}, {"tes", &tes},
      {"nrs_pre", &nrs_pre}, {"nrs_post", &nrs_post}};
  for (const auto& [name, values] : columns) {
    if (auto s = summarize(name, *values)) report.summary.push_back(*s);
  }
  if (report.summary.empty()) {
    report.warnings.push_back("summary omitted: fewer than 2 patients");
  }
  return report;
}

std::string render_report_csv(const CohortReport& report) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const auto& o : report.outcomes) {
    out += o.patient_id + "," + fixed2(o.acc_pre) + "," + fixed2(o.acc_post) + "," +
           fixed2(o.tes) + "," + fixed2(report.tes_threshold) + "," +
           std::to_string(o.nrs_pre) + "," + std::to_string(o.nrs_post) + "," +
           flag(o.sig_nrs) + "," + flag(o.sig_detect) + "\n";
  }
  return out;
}

std::string render_summary_csv(const CohortReport& report) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& s : report.summary) {
    out += s.column + "," + std::to_string(s.n) + "," + fixed2(s.mean) + "," +
           fixed2(s.sd) + "," + fixed2(s.ci_low) + "," + fixed2(s.ci_high) + "\n";
  }
  return out;
}

std::string render_markdown(const CohortReport& report) {
  std::ostringstream md;
  md << "# Treatment effect report\n\n";
  md << "| Patient | Acc pre (%) | Acc post (%) | TES | Threshold | NRS pre | NRS post "
        "| NRS improved | DETECT significant |\n";
  md << "|---|---:|---:|---:|---:|---:|---:|:---:|:---:|\n";
  for (const auto& o : report.outcomes) {
    md << "| " << o.patient_id << " | " << fixed2(o.acc_pre) << " | "
       << fixed2(o.acc_post) << " | " << fixed2(o.tes) << " | "
       << fixed2(report.tes_threshold) << " | " << o.nrs_pre << " | " << o.nrs_post
       << " | " << (o.sig_nrs ? "yes" : "no") << " | " << (o.sig_detect ? "yes" : "no")
       << " |\n";
  }
  md << "\nTES threshold: " << fixed2(report.tes_threshold) << "\n";
  md << "Consistency rate: " << fixed2(report.consistency_rate) << "% ("
     << report.outcomes.size() << " patients)\n";
  if (!report.summary.empty()) {
    md << "\n## Summary (n = " << report.outcomes.size() << ")\n\n";
    md << "| Column | Mean | SD | 95% CI |\n|---|---:|---:|---|\n";
    for (const auto& s : report.summary) {
      md << "| " << s.column << " | " << fixed2(s.mean) << " | " << fixed2(s.sd)
         << " | [" << fixed2(s.ci_low) << ", " << fixed2(s.ci_high) << "] |\n";
    }
  }
  if (!report.excluded_patients.empty()) {
    md << "\nExcluded (no NRS entry):";
    for (const auto& id : report.excluded_patients) md << ' ' << id;
    md << '\n';
  }
  for (const auto& w : report.warnings) md << "\nWarning: " << w << '\n';
  return md.str();
}

std::vector<PatientOutcome> parse_outcomes_csv(const std::string& text,
                                               NrsPredicate predicate) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& message) {
    throw IngestionError("outcomes line " + std::to_string(line_no) + ": " + message);
  };
  if (!std::getline(in, line)) throw IngestionError("outcomes file is empty");
  ++line_no;
  std::map<std::string, std::size_t> column;
  const auto header = data::split_fields(data::trim_space(line));
  for (std::size_t i = 0; i < header.size(); ++i) {
    column[std::string(data::trim_space(header[i]))] = i;
  }
  for (const char* required : {"patient_id", "acc_pre", "acc_post", "nrs_pre", "nrs_post"}) {
    if (!column.count(required)) fail(std::string("missing column '") + required + "'");
  }
  std::vector<PatientOutcome> outcomes;
  while (std::getline(in, line)) {
    ++line_no;
    if (data::trim_space(line).empty()) continue;
    const auto fields = data::split_fields(data::trim_space(line));
    if (fields.size() != header.size()) fail("column count differs from header");
    auto field = [&](const char* name) { return data::trim_space(fields[column[name]]); };
    const auto pre = data::parse_double(field("acc_pre"));
    const auto post = data::parse_double(field("acc_post"));
    const auto npre = data::parse_int(field("nrs_pre"));
    const auto npost = data::parse_int(field("nrs_post"));
    if (!pre || !post || !(*pre >= 0 && *pre <= 100) || !(*post >= 0 && *post <= 100)) {
      fail("accuracies must be numbers in [0, 100]");
    }
    if (!npre || !npost || *npre < 0 || *npre > 10 || *npost < 0 || *npost > 10) {
      fail("NRS values must be integers in [0, 10]");
    }
    outcomes.push_back(make_outcome(std::string(field("patient_id")), *pre, *post,
                                    static_cast<int>(*npre), static_cast<int>(*npost),
                                    predicate));
  }
  return outcomes;
}

}  // namespace detect::eval
