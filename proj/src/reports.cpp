#include "reports.hpp"

#include <cstdio>
#include <sstream>

#include "core.hpp"
#include "error.hpp"

namespace mtlab {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const char* header) { out_ << header << '\n'; }
  CsvWriter& num(double v) { return field(format_number(v)); }
  CsvWriter& integer(long long v) { return field(std::to_string(v)); }
  CsvWriter& text(const std::string& v) { return field(v); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  CsvWriter& field(const std::string& v) {
    if (!first_) out_ << ',';
    out_ << v;
    first_ = false;
    return *this;
  }
  std::ostringstream out_;
  bool first_ = true;
};

}  // namespace

std::string lemma31_csv(const std::vector<Lemma31Row>& rows) {
  CsvWriter csv("t,lhs,rhs,ratio,defect_scaled");
  for (const auto& r : rows) {
    csv.num(r.t).num(r.lhs).num(r.rhs).num(r.ratio).num(r.defect_scaled);
    csv.end_row();
  }
  return csv.str();
}

std::string excess_csv(const std::vector<ExcessRow>& rows) {
  CsvWriter csv("eps,L,C,Lambda,value,excess,scaled_excess");
  for (const auto& r : rows) {
    csv.num(r.eps).num(r.L).num(r.C).num(r.Lambda).num(r.value).num(r.excess).num(r.scaled_excess);
    csv.end_row();
  }
  return csv.str();
}

std::string lambda_scan_csv(const LambdaScan& scan) {
  CsvWriter csv("lambda,value,excess,peak,conc_fraction,converged");
  for (const auto& r : scan.rows) {
    csv.num(r.lambda).num(r.value).num(r.excess).num(r.peak).num(r.conc_fraction).integer(r.converged ? 1 : 0);
    csv.end_row();
  }
  return csv.str();
}

std::string continuation_csv(const ContinuationResult& result) {
  CsvWriter csv("theta,value,peak,conc_fraction,grad_norm,iterations,converged");
  for (const auto& s : result.stages) {
    const OptResult& r = s.result;
    csv.num(s.theta).num(r.value).num(r.peak).num(r.conc_fraction).num(r.grad_norm).integer(r.iterations).integer(
        r.converged ? 1 : 0);
    csv.end_row();
  }
  return csv.str();
}

std::string opt_result_csv(const OptResult& r) {
  CsvWriter csv("seed,value,grad_norm,iterations,peak,conc_fraction,converged");
  csv.text(r.seed).num(r.value).num(r.grad_norm).integer(r.iterations).num(r.peak).num(r.conc_fraction).integer(
      r.converged ? 1 : 0);
  csv.end_row();
  return csv.str();
}

IdentityTable identities_csv(int n_max, int m_max) {
  require(n_max >= 2, ErrorCode::kInvalidArgument, "n_max must be >= 2");
  require(m_max >= 0, ErrorCode::kInvalidArgument, "m_max must be >= 0");
  CsvWriter csv("identity,index,lhs,rhs,pass");
  bool all = true;
  for (int n = 2; n <= n_max; ++n) {
    const auto [lhs, rhs] = verify_identity_harmonic(n);
    all = all && lhs == rhs;
    csv.text("harmonic").integer(n).text(lhs.str()).text(rhs.str()).integer(lhs == rhs ? 1 : 0);
    csv.end_row();
  }
  for (int m = 0; m <= m_max; ++m) {
    const auto [lhs, rhs] = verify_identity_beta(m);
    all = all && lhs == rhs;
    csv.text("beta").integer(m).text(lhs.str()).text(rhs.str()).integer(lhs == rhs ? 1 : 0);
    csv.end_row();
  }
  return {csv.str(), all};
}

}  // namespace mtlab
