#include "pander/core.hpp"

#include <stdexcept>

namespace pander {

int hamming(const IssueVector& x, const IssueVector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("hamming: size mismatch");
  int d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] != y[i]);
  return d;
}

double agreement(const IssueVector& x, const IssueVector& y) {
  if (x.empty()) throw std::invalid_argument("agreement: empty vectors");
  const int d = hamming(x, y);
  return 1.0 - static_cast<double>(d) / static_cast<double>(x.size());
}

IssueVector sample_issue_vector(int r, double p, RngStream& rng) {
  IssueVector v(static_cast<std::size_t>(r));
  for (auto& b : v) b = rng.bernoulli(p) ? 1 : 0;
  return v;
}

RoundProfile sample_profile(int n, int r, double p, RngStream& rng) {
  RoundProfile profile;
  profile.voters.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    profile.voters.push_back(sample_issue_vector(r, p, rng));
  return profile;
}

Bit voter_majority(const RoundProfile& profile, int t, RngStream& tie_rng) {
  const int n = profile.voter_count();
  if (t < 0 || (n > 0 && t >= profile.issue_count()))
    throw std::invalid_argument("voter_majority: issue index out of range");
  int ones = 0;
  for (const auto& voter : profile.voters) ones += voter[static_cast<std::size_t>(t)];
  const int zeros = n - ones;
  if (ones > zeros) return 1;
  if (ones < zeros) return 0;
  return tie_rng.coin() ? 1 : 0;
}

IssueVector majority_vector(const RoundProfile& profile, RngStream& tie_rng) {
  const int r = profile.issue_count();
  IssueVector m(static_cast<std::size_t>(r));
  for (int t = 0; t < r; ++t) m[static_cast<std::size_t>(t)] = voter_majority(profile, t, tie_rng);
  return m;
}

const char* to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::Truthful: return "truthful";
    case CandidateKind::Selfish: return "selfish";
    case CandidateKind::Malicious: return "malicious";
  }
  return "?";
}

const char* to_string(System system) {
  return system == System::RD ? "RD" : "FRD";
}

CandidateKind candidate_kind_from_string(const std::string& s) {
  if (s == "truthful" || s == "none") return CandidateKind::Truthful;
  if (s == "selfish") return CandidateKind::Selfish;
  if (s == "malicious") return CandidateKind::Malicious;
  throw std::invalid_argument("unknown candidate kind: " + s);
}

System system_from_string(const std::string& s) {
  if (s == "RD" || s == "rd") return System::RD;
  if (s == "FRD" || s == "frd") return System::FRD;
  throw std::invalid_argument("unknown system: " + s);
}

void SystemConfig::validate() const {
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (m < 1) throw std::invalid_argument("config: m must be >= 1");
  if (k < 1 || k > m) throw std::invalid_argument("config: need 1 <= k <= m");
  if (r < 1) throw std::invalid_argument("config: r must be >= 1");
  if (rounds < 1) throw std::invalid_argument("config: rounds must be >= 1");
  if (beta1 < 0.0 || beta1 > 1.0)
    throw std::invalid_argument("config: beta1 must be in [0, 1]");
  if (beta2 < 0.0) throw std::invalid_argument("config: beta2 must be >= 0");
  if (beta3 < 0.0) throw std::invalid_argument("config: beta3 must be >= 0");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("config: p must be in [0, 1]");
  if (strategic_count < 0 || strategic_count > m)
    throw std::invalid_argument("config: strategic_count must be in [0, m]");
  if (strategic_count > 0 && strategic_kind == CandidateKind::Truthful)
    throw std::invalid_argument(
        "config: strategic_count > 0 requires a strategic kind");
}

}  // namespace pander
