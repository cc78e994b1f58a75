#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nonlocal {

inline constexpr const char* kReportSchema = "nonlocal.report.v1";

// How abs_err / rel_err are formed and compared with tol.
//   abs, rel, either: two-sided |computed - reference|
//   upper: one-sided violation max(0, computed - reference)
//   lower: one-sided violation max(0, reference - computed)
enum class TolMode { abs, rel, either, upper, lower };

std::string to_string(TolMode m);

struct CheckReport {
    std::string check_id;
    std::string statement;
    double computed = 0;
    std::optional<double> reference;
    double abs_err = 0;
    double rel_err = 0;
    double tol = 0;
    TolMode mode = TolMode::either;
    bool converged = true;  // false forces pass = false
    bool pass = false;
    std::map<std::string, std::string> metadata;

    // Fills abs_err, rel_err and pass from computed, reference, tol, mode and converged.
    // Without a reference, pass = converged and computed is finite.
    void finalize();
};

CheckReport make_check(std::string id, std::string statement, double computed, std::optional<double> reference,
                       double tol, TolMode mode, bool converged = true);

struct Report {
    std::string schema_version = kReportSchema;
    std::string suite;
    std::map<std::string, std::string> params;
    std::vector<CheckReport> checks;

    bool all_pass() const;
};

// %.17g, with "nan" / "inf" / "-inf" for non-finite values
std::string format_real(double x);
std::string format_list(const std::vector<double>& xs);

std::string report_json(const Report& r);  // two-space indent, trailing newline
// One row per check: check_id,computed,reference,abs_err,rel_err,tol,mode,pass
std::string report_csv(const Report& r);

}  // namespace nonlocal
