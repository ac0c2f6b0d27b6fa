#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detect/data/types.hpp"
#include "detect/model/transformer.hpp"

namespace detect::eval {

/// How an NRS drop counts as a meaningful improvement.
///   both:   drop >= 2 points AND drop >= 33% of the baseline
///   either: drop >= 2 points OR  drop >= 33% of the baseline
enum class NrsPredicate { both, either };

std::string_view to_string(NrsPredicate predicate);
/// Accepts "and" / "or". Throws ConfigError otherwise.
NrsPredicate parse_nrs_predicate(std::string_view text);

struct PatientOutcome {
  std::string patient_id;
  double acc_pre = 0.0;   // percent
  double acc_post = 0.0;  // percent
  double tes = 0.0;       // acc_pre - acc_post, percentage points
  int nrs_pre = 0;
  int nrs_post = 0;
  bool sig_nrs = false;
  bool sig_detect = false;
};

/// acc_pre - acc_post. Both must lie in [0, 100] (ContractError otherwise).
double compute_tes(double acc_pre, double acc_post);

/// Integer arithmetic, so the 33% clause has no rounding slack:
/// 100 * (pre - post) >= 33 * pre. A rise in pain is never an improvement.
bool nrs_improved(int nrs_pre, int nrs_post,
                  NrsPredicate predicate = NrsPredicate::both);

/// Fills tes and sig_nrs; sig_detect stays false until flagged.
PatientOutcome make_outcome(std::string patient_id, double acc_pre,
                            double acc_post, int nrs_pre, int nrs_post,
                            NrsPredicate predicate = NrsPredicate::both);

/// Mean TES over outcomes with sig_nrs set, at full precision.
/// Throws CalibrationError when no outcome has sig_nrs.
double compute_threshold(const std::vector<PatientOutcome>& outcomes);

/// Copy with sig_detect = (tes >= threshold).
std::vector<PatientOutcome> flag_significance(std::vector<PatientOutcome> outcomes,
                                              double threshold);

/// Percent of windows classified correctly. The windows must be normalized
/// with exactly the bundle's statistics (ContractError otherwise); an empty
/// set is an EvaluationError.
double patient_accuracy(const model::ClassifierBundle& bundle,
                        const data::WindowSet& windows);

struct ColumnSummary {
  std::string column;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;       // sample standard deviation (n - 1)
  double ci_low = 0.0;   // mean - 1.96 sd / sqrt(n)
  double ci_high = 0.0;  // mean + 1.96 sd / sqrt(n)
};

/// Returns nullopt for fewer than two values.
std::optional<ColumnSummary> summarize(std::string column,
                                       const std::vector<double>& values);

struct CohortReport {
  std::vector<PatientOutcome> outcomes;
  double tes_threshold = 0.0;
  double consistency_rate = 0.0;  // percent of patients with sig_nrs == sig_detect
  /// acc_pre, acc_post, tes, nrs_pre, nrs_post; empty when n < 2.
  std::vector<ColumnSummary> summary;
  /// Patients with recordings but no NRS entry; not part of the outcomes.
  std::vector<std::string> excluded_patients;
  std::vector<std::string> warnings;
};

/// Threshold from the NRS responders, significance flags, consistency rate
/// and per-column summaries. `outcomes` must carry tes and sig_nrs
/// (see make_outcome). Throws CalibrationError when nobody improved.
CohortReport build_report(std::vector<PatientOutcome> outcomes);

/// Column order of the per-patient CSV.
inline constexpr const char* kReportHeader =
    "patient_id,acc_pre,acc_post,tes,tes_threshold,nrs_pre,nrs_post,sig_nrs,sig_detect";
inline constexpr const char* kSummaryHeader = "column,n,mean,sd,ci_low,ci_high";

/// Numbers are rendered with two decimals; flags as `true` / `false`.
std::string render_report_csv(const CohortReport& report);
std::string render_summary_csv(const CohortReport& report);
std::string render_markdown(const CohortReport& report);

/// Parses a CSV in the per-patient layout back into outcomes with
/// recomputed tes and sig_nrs (used to re-run the decision layer on
/// externally supplied accuracies). Only patient_id, acc_pre, acc_post,
/// nrs_pre and nrs_post are read; other columns may be absent.
std::vector<PatientOutcome> parse_outcomes_csv(const std::string& text,
                                               NrsPredicate predicate);

}  // namespace detect::eval
