#include "nonlocal/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace nonlocal {

std::string to_string(TolMode m) {
    switch (m) {
        case TolMode::abs: return "abs";
        case TolMode::rel: return "rel";
        case TolMode::either: return "abs_or_rel";
        case TolMode::upper: return "upper_bound";
        case TolMode::lower: return "lower_bound";
    }
    throw std::logic_error("to_string: bad TolMode");
}

void CheckReport::finalize() {
    const bool finite = std::isfinite(computed);
    if (!reference) {
        abs_err = rel_err = 0;
        pass = converged && finite;
        return;
    }
    const double ref = *reference;
    double d = 0;
    switch (mode) {
        case TolMode::upper: d = std::max(0.0, computed - ref); break;
        case TolMode::lower: d = std::max(0.0, ref - computed); break;
        default: d = std::fabs(computed - ref);
    }
    abs_err = d;
    rel_err = ref != 0 ? d / std::fabs(ref) : (d == 0 ? 0.0 : INFINITY);
    bool ok = false;
    switch (mode) {
        case TolMode::rel: ok = rel_err <= tol; break;
        case TolMode::either: ok = abs_err <= tol || rel_err <= tol; break;
        default: ok = abs_err <= tol;
    }
    pass = ok && converged && finite;
}

CheckReport make_check(std::string id, std::string statement, double computed, std::optional<double> reference,
                       double tol, TolMode mode, bool converged) {
    CheckReport c;
    c.check_id = std::move(id);
    c.statement = std::move(statement);
    c.computed = computed;
    c.reference = reference;
    c.tol = tol;
    c.mode = mode;
    c.converged = converged;
    c.finalize();
    return c;
}

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_real(xs[i]);
    }
    return out;
}

namespace {

// non-finite reals become strings so the document stays valid JSON
nlohmann::json real(double x) {
    if (std::isfinite(x)) return x;
    return format_real(x);
}

}  // namespace

std::string report_json(const Report& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json j;
        j["check_id"] = c.check_id;
        j["statement"] = c.statement;
        j["computed"] = real(c.computed);
        j["reference"] = c.reference ? real(*c.reference) : nlohmann::json(nullptr);
        j["abs_err"] = real(c.abs_err);
        j["rel_err"] = real(c.rel_err);
        j["tol"] = real(c.tol);
        j["mode"] = to_string(c.mode);
        j["converged"] = c.converged;
        j["pass"] = c.pass;
        j["metadata"] = c.metadata;
        checks.push_back(std::move(j));
    }
    nlohmann::json doc;
    doc["schema_version"] = r.schema_version;
    doc["suite"] = r.suite;
    doc["params"] = r.params;
    doc["checks"] = std::move(checks);
    return doc.dump(2) + "\n";
}

std::string report_csv(const Report& r) {
    std::string out = "check_id,computed,reference,abs_err,rel_err,tol,mode,pass\n";
    for (const auto& c : r.checks) {
        out += c.check_id.find(',') == std::string::npos ? c.check_id : "\"" + c.check_id + "\"";
        out += ',' + format_real(c.computed) + ',' + (c.reference ? format_real(*c.reference) : std::string()) + ',' +
               format_real(c.abs_err) + ',' + format_real(c.rel_err) + ',' + format_real(c.tol) + ',' +
               to_string(c.mode) + ',' + (c.pass ? "true" : "false") + '\n';
    }
    return out;
}

}  // namespace nonlocal
