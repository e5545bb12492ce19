#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "posheaf/cli.hpp"
#include "support/golden_cases.hpp"

// Pinned CLI reports for the canonical documents. Set POSHEAF_UPDATE_GOLDEN=1
// to rewrite the files under golden/reports after an intended change.

namespace {

using golden::Case;
using golden::kRoot;
using golden::slurp;

class Golden : public testing::TestWithParam<Case> {};

TEST_P(Golden, ReportIsByteIdentical) {
  const Case& c = GetParam();
  setenv("POSHEAF_SEED", "0", 1);
  auto args = golden::expand(c.args);
  std::ostringstream out, err;
  int code = posheaf::cli::run(args, out, err);
  EXPECT_EQ(code, c.exit_code) << err.str();
  const std::string path = kRoot + "reports/" + c.report;
  if (const char* up = std::getenv("POSHEAF_UPDATE_GOLDEN"); up && std::string(up) == "1") {
    std::ofstream(path, std::ios::binary) << out.str();
    return;
  }
  EXPECT_EQ(out.str(), slurp(path)) << c.report;
}

std::string case_name(const testing::TestParamInfo<Case>& info) {
  std::string n = info.param.report.substr(0, info.param.report.size() - 5);
  for (auto& ch : n)
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  return n;
}

INSTANTIATE_TEST_SUITE_P(Reports, Golden, testing::ValuesIn(golden::cases()), case_name);

TEST(GoldenMobius, PinnedBettiIsAcyclic) {
  auto j = posheaf::Json::parse(slurp(kRoot + "reports/mobius_c4.betti.roos.json"));
  EXPECT_EQ(j["betti"], posheaf::Json::array({0, 0}));
}

}  // namespace
