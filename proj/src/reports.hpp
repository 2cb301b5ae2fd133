#pragma once

#include <string>
#include <vector>

#include "green.hpp"
#include "optimize.hpp"
#include "sequence.hpp"

namespace mtlab {

// 17 significant digits, so every value round-trips through text.
std::string format_number(double value);

std::string lemma31_csv(const std::vector<Lemma31Row>& rows);
std::string excess_csv(const std::vector<ExcessRow>& rows);
std::string lambda_scan_csv(const LambdaScan& scan);
std::string continuation_csv(const ContinuationResult& result);
std::string opt_result_csv(const OptResult& result);

struct IdentityTable {
  std::string csv;
  bool all_pass;
};
// Rows for the harmonic identity at 2..n_max and the beta identity at 0..m_max.
IdentityTable identities_csv(int n_max, int m_max);

}  // namespace mtlab
