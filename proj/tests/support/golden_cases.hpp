#pragma once

// Table of pinned CLI reports shared by the golden-file tests and the
// acceptance runner. "@x" in an argument expands to <tests>/golden/x.

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace golden {

inline const std::string kRoot = std::string(POSHEAF_TEST_DIR) + "/golden/";

struct Case {
  std::string report;             // file name under golden/reports
  std::vector<std::string> args;  // "@x" expands to golden/x
  int exit_code = 0;
};

// Keeps gtest from dumping the raw bytes of a Case into test names.
inline void PrintTo(const Case& c, std::ostream* os) { *os << c.report; }

inline const std::vector<std::string> kDocs{"path_constant",   "cycle3_constant", "cycle4_constant",
                                            "cycle5_constant", "cycle6_constant", "mobius_c4",
                                            "morse_poset",     "triangle_complex", "hypergraph"};

inline bool simplicial(const std::string& doc) { return doc != "morse_poset" && doc != "hypergraph"; }

inline std::vector<Case> cases() {
  std::vector<Case> out;
  for (const auto& d : kDocs) {
    const std::string doc = "@docs/" + d + ".json";
    for (const std::string cmd : {"validate", "classify", "sections", "incidence", "spectrum"})
      out.push_back({d + "." + cmd + ".json", {cmd, doc}});
    for (const std::string m : {"roos", "cellular", "minimal"})
      out.push_back({d + ".betti." + m + ".json", {"betti", "--method", m, doc}, m == "cellular" && !simplicial(d) ? 1 : 0});
  }
  out.push_back({"cycle5_constant.spectrum.deg1_strong.json",
                 {"spectrum", "--degree", "1", "--norm", "strong", "@docs/cycle5_constant.json"}});
  out.push_back({"triangle_complex.spectrum.roos_weak.json",
                 {"spectrum", "--method", "roos", "--norm", "weak", "@docs/triangle_complex.json"}});
  out.push_back({"mobius_c4.spectrum.deg2.json", {"spectrum", "--degree", "2", "@docs/mobius_c4.json"}, 1});
  out.push_back({"path_constant.diffuse.json", {"diffuse", "--x0", "@inputs/path_x0.json", "@docs/path_constant.json"}});
  out.push_back({"cycle4_constant.diffuse.json",
                 {"diffuse", "--eta", "0.1", "--steps", "200", "--x0", "@inputs/cycle4_x0.json", "@docs/cycle4_constant.json"}});
  out.push_back({"cycle4_constant.diffuse.continuous.json",
                 {"diffuse", "--mode", "continuous", "--eta", "0.1", "--steps", "30", "--x0", "@inputs/cycle4_x0.json",
                  "@docs/cycle4_constant.json"}});
  out.push_back({"mobius_c4.diffuse.json", {"diffuse", "--x0", "@inputs/mobius_x0.json", "@docs/mobius_c4.json"}});
  out.push_back({"cycle4_constant.nsd-forward.json",
                 {"nsd-forward", "--layer", "@inputs/cycle4_layer.json", "--features", "@inputs/cycle4_features.json",
                  "@docs/cycle4_constant.json"}});
  out.push_back({"path_constant.learn.json",
                 {"learn", "--signals", "@inputs/path_signals.json", "--iters", "50", "@docs/path_constant.json"}});
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> expand(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) out.push_back(a.rfind('@', 0) == 0 ? kRoot + a.substr(1) : a);
  return out;
}

}  // namespace golden
