#include <gtest/gtest.h>

#include "posheaf/posheaf.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace posheaf;

namespace {

const Field<Rational> Q{};

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::SchemaError;
}

// Constant sheaf of dimension n twisted by a random invertible change of basis
// per element: maps U_b U_a^{-1}. Always compositional with invertible maps.
Sheaf<Rational> random_connection(const Poset& p, std::size_t n) {
  std::vector<Matrix<Rational>> u;
  for (Element e = 0; e < p.size(); ++e) u.push_back(testsupport::random_unimodular(Q, n));
  std::map<CoverPair, Matrix<Rational>> maps;
  for (auto [a, b] : p.covers()) maps.emplace(CoverPair{a, b}, u[b] * inverse(u[a]));
  return Sheaf<Rational>(p, Q, std::vector<std::size_t>(p.size(), n), maps);
}

// Random monotone map S -> T, assigned in topological order of S.
std::optional<std::vector<Element>> random_monotone(const Poset& s, const Poset& t) {
  std::vector<Element> f(s.size());
  for (Element a : s.topo_order()) {
    std::vector<Element> options;
    for (Element y = 0; y < t.size(); ++y) {
      bool ok = true;
      for (Element b = 0; b < s.size() && ok; ++b)
        if (s.less(b, a)) ok = t.leq(f[b], y);
      if (ok) options.push_back(y);
    }
    if (options.empty()) return std::nullopt;
    f[a] = options[static_cast<std::size_t>(testsupport::uniform(0, static_cast<int>(options.size()) - 1))];
  }
  return f;
}

// Random tree on v vertices as a graph poset.
Poset random_tree_poset(std::size_t v) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i < v; ++i) edges.push_back({static_cast<std::size_t>(testsupport::uniform(0, static_cast<int>(i) - 1)), i});
  return graph_poset(v, edges);
}

}  // namespace

TEST(BuildSheaf, Examples) {
  auto p = path_poset(2);
  auto s = build_sheaf<Rational>(p, Q, {{"v0", 1}, {"v1", 1}, {"e0", 1}},
                                 {{{"v0", "e0"}, Matrix<Rational>::identity(Q, 1)},
                                  {{"v1", "e0"}, Matrix<Rational>::identity(Q, 1)}});
  EXPECT_EQ(s.total_dim(), 3u);
  EXPECT_EQ(global_sections_bruteforce(s).dim(), 1u);

  auto g = build_sheaf<Rational>(p, Q, {{"v0", 2}, {"v1", 2}, {"e0", 3}},
                                 {{{"v0", "e0"}, Matrix<Rational>(Q, 3, 2)}, {{"v1", "e0"}, Matrix<Rational>(Q, 3, 2)}});
  EXPECT_EQ(g.edge_map(p.index("v0"), p.index("e0")).rows(), 3u);

  EXPECT_EQ(code_of([&] {
              build_sheaf<Rational>(p, Q, {{"v0", 2}, {"v1", 2}, {"e0", 3}},
                                    {{{"v0", "e0"}, Matrix<Rational>(Q, 2, 3)}, {{"v1", "e0"}, Matrix<Rational>(Q, 3, 2)}});
            }),
            ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] {
              build_sheaf<Rational>(p, Q, {{"v0", 1}, {"v1", 1}, {"e0", 1}}, {{{"v0", "e0"}, Matrix<Rational>::identity(Q, 1)}});
            }),
            ErrorCode::MissingEdgeMap);
  EXPECT_EQ(code_of([&] {
              build_sheaf<Rational>(p, Q, {{"v0", 1}, {"v1", 1}, {"e0", 1}},
                                    {{{"v0", "e0"}, Matrix<Rational>::identity(Q, 1)},
                                     {{"v1", "e0"}, Matrix<Rational>::identity(Q, 1)},
                                     {{"v0", "v1"}, Matrix<Rational>::identity(Q, 1)}});
            }),
            ErrorCode::ExtraEdgeMap);
}

TEST(Compositionality, GraphSheavesAreVacuouslyCompositional) {
  for (int trial = 0; trial < 50; ++trial) {
    auto s = testsupport::random_graph_sheaf(testsupport::random_graph_poset(6), Q);
    EXPECT_TRUE(check_compositionality(s).empty());
  }
}

TEST(Compositionality, TriangleExamples) {
  auto p = simplicial_complex_poset({{0, 1, 2}});
  EXPECT_TRUE(check_compositionality(constant_sheaf<Rational>(p, 2)).empty());

  auto maps = constant_sheaf<Rational>(p, 1).edge_maps();
  maps.at({p.index("1,2"), p.index("0,1,2")})(0, 0) = 2;
  Sheaf<Rational> twisted(p, Q, std::vector<std::size_t>(p.size(), 1), maps);
  auto v = check_compositionality(twisted);
  ASSERT_EQ(v.size(), 2u);
  std::set<std::string> lowers;
  for (const auto& x : v) {
    lowers.insert(p.name(x.lower));
    EXPECT_EQ(p.name(x.upper), "0,1,2");
    EXPECT_DOUBLE_EQ(x.defect, 1.0);
  }
  EXPECT_EQ(lowers, (std::set<std::string>{"1", "2"}));
}

TEST(Compositionality, RandomCompositionalSheavesPass) {
  for (int trial = 0; trial < 50; ++trial) {
    auto p = testsupport::random_poset(8, 0.35);
    EXPECT_TRUE(check_compositionality(testsupport::random_compositional_sheaf(p, Q)).empty());
    EXPECT_TRUE(check_compositionality(random_connection(p, 2)).empty());
  }
}

TEST(Constructors, ConstantSheaf) {
  EXPECT_EQ(global_sections_bruteforce(constant_sheaf<Rational>(cycle_poset(4), 1)).dim(), 1u);
  auto two = graph_poset(4, {{0, 1}, {2, 3}});
  EXPECT_EQ(global_sections_bruteforce(constant_sheaf<Rational>(two, 1)).dim(), 2u);
  auto empty = constant_sheaf<Rational>(Poset::build({}, {}), 3);
  EXPECT_EQ(empty.total_dim(), 0u);
  EXPECT_EQ(global_sections_bruteforce(constant_sheaf<Rational>(path_poset(3), 1)).dim(), 1u);
}

TEST(Constructors, SkyscraperCone) {
  auto chain = Poset::build({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  auto top = skyscraper_cone_sheaf<Rational>(chain, chain.index("c"), 2);
  EXPECT_EQ(top.stalk_dims(), (std::vector<std::size_t>{2, 2, 2}));
  auto bottom = skyscraper_cone_sheaf<Rational>(chain, chain.index("a"), 2);
  EXPECT_EQ(bottom.stalk_dims(), (std::vector<std::size_t>{2, 0, 0}));

  auto g = path_poset(3);
  auto e = skyscraper_cone_sheaf<Rational>(g, g.index("e1"), 1);
  for (Element x = 0; x < g.size(); ++x) {
    bool in = g.name(x) == "e1" || g.name(x) == "v1" || g.name(x) == "v2";
    EXPECT_EQ(e.stalk_dim(x), in ? 1u : 0u) << g.name(x);
  }
  EXPECT_EQ(code_of([&] { skyscraper_cone_sheaf<Rational>(g, 99, 1); }), ErrorCode::UnknownElement);
}

TEST(Constructors, SkyscraperSectionsEqualStalk) {
  for (int trial = 0; trial < 40; ++trial) {
    auto p = testsupport::random_poset(8, 0.3);
    if (p.size() == 0) continue;
    Element s = static_cast<Element>(testsupport::uniform(0, static_cast<int>(p.size()) - 1));
    std::size_t n = static_cast<std::size_t>(testsupport::uniform(1, 3));
    EXPECT_EQ(global_sections_bruteforce(skyscraper_cone_sheaf<Rational>(p, s, n)).dim(), n);
  }
}

TEST(Constructors, Dirac) {
  auto anti = Poset::build({"x", "y"}, {});
  EXPECT_EQ(dirac_sheaf<Rational>(anti, 1, 2).stalk_dims(), (std::vector<std::size_t>{0, 2}));
  auto chain = Poset::build({"a", "b"}, {{"a", "b"}});
  auto d = dirac_sheaf<Rational>(chain, chain.index("b"), 1);
  EXPECT_EQ(d.stalk_dims(), (std::vector<std::size_t>{0, 1}));
  // A section at the top must be the image of the zero stalk below it.
  EXPECT_EQ(global_sections_bruteforce(d).dim(), 0u);
  EXPECT_EQ(global_sections_bruteforce(dirac_sheaf<Rational>(chain, chain.index("a"), 1)).dim(), 1u);
  auto g = path_poset(2);
  auto dg = dirac_sheaf<Rational>(g, g.index("e0"), 1);
  EXPECT_EQ(dg.total_dim(), 1u);
  EXPECT_EQ(code_of([&] { dirac_sheaf<Rational>(g, 7, 1); }), ErrorCode::UnknownElement);
}

TEST(Constructors, Mobius) {
  EXPECT_EQ(global_sections_bruteforce(mobius_sheaf<Rational>(4)).dim(), 0u);
  EXPECT_EQ(global_sections_bruteforce(mobius_sheaf<Rational>(3)).dim(), 0u);
  EXPECT_EQ(global_sections_bruteforce(mobius_sheaf<ModP>(4, Field<ModP>{2})).dim(), 1u);
  EXPECT_EQ(code_of([] { mobius_sheaf<Rational>(2); }), ErrorCode::TooShort);
}

TEST(Pullback, Examples) {
  auto d = random_connection(cycle_poset(4), 2);
  std::vector<Element> id(d.poset().size());
  std::iota(id.begin(), id.end(), 0);
  auto same = pullback(d, d.poset(), id);
  EXPECT_EQ(same.edge_maps(), d.edge_maps());
  EXPECT_EQ(same.stalk_dims(), d.stalk_dims());

  // Constant map to a point.
  auto point = Poset::build({"*"}, {});
  auto v = constant_sheaf<Rational>(point, 3);
  auto s = path_poset(3);
  auto c = pullback(v, s, std::vector<Element>(s.size(), 0));
  for (const auto& [e, m] : c.edge_maps()) EXPECT_EQ(m, Matrix<Rational>::identity(Q, 3));
  EXPECT_EQ(c.stalk_dims(), std::vector<std::size_t>(s.size(), 3));

  // A path inside C4 that misses the flipped edge.
  auto mob = mobius_sheaf<Rational>(4);
  auto path = path_poset(4);
  std::map<std::string, std::string> incl;
  for (const auto& n : path.names()) incl[n] = n;
  auto pb = pullback(mob, path, incl);
  for (const auto& [e, m] : pb.edge_maps()) EXPECT_EQ(m, Matrix<Rational>::identity(Q, 1));
  EXPECT_EQ(global_sections_bruteforce(pb).dim(), 1u);

  auto chain = Poset::build({"a", "b"}, {{"a", "b"}});
  auto target = constant_sheaf<Rational>(chain, 1);
  EXPECT_EQ(code_of([&] { pullback(target, chain, std::vector<Element>{1, 0}); }), ErrorCode::NotMonotone);
}

TEST(Pullback, PreservesCompositionality) {
  int done = 0;
  for (int trial = 0; trial < 400 && done < 60; ++trial) {
    auto s = testsupport::random_poset(8, 0.3);
    auto t = testsupport::random_poset(8, 0.3);
    if (t.size() == 0) continue;
    auto f = random_monotone(s, t);
    if (!f) continue;
    auto d = testsupport::random_compositional_sheaf(t, Q);
    ASSERT_TRUE(check_compositionality(d).empty());
    EXPECT_TRUE(check_compositionality(pullback(d, s, *f)).empty());
    ++done;
  }
  EXPECT_GE(done, 30);
}

TEST(Sections, ConstantSheafCountsComponents) {
  for (int trial = 0; trial < 100; ++trial) {
    auto p = testsupport::random_graph_poset(10);
    std::vector<std::pair<std::size_t, std::size_t>> edges(p.covers().begin(), p.covers().end());
    EXPECT_EQ(global_sections_bruteforce(constant_sheaf<Rational>(p, 1)).dim(), oracle::components(p.size(), edges));
  }
}

TEST(Sections, BasisSatisfiesEveryEdge) {
  for (int trial = 0; trial < 50; ++trial) {
    auto d = testsupport::random_graph_sheaf(testsupport::random_graph_poset(6), Q);
    auto sec = global_sections_bruteforce(d);
    for (const auto& x : sec.basis)
      for (const auto& [a, b] : d.poset().covers()) {
        Vector<Rational> xa(x.begin() + static_cast<std::ptrdiff_t>(d.offset(a)),
                            x.begin() + static_cast<std::ptrdiff_t>(d.offset(a) + d.stalk_dim(a)));
        Vector<Rational> xb(x.begin() + static_cast<std::ptrdiff_t>(d.offset(b)),
                            x.begin() + static_cast<std::ptrdiff_t>(d.offset(b) + d.stalk_dim(b)));
        EXPECT_EQ(d.edge_map(a, b).apply(xa), xb);
      }
  }
}

TEST(Transport, Examples) {
  auto c = constant_sheaf<Rational>(cycle_poset(4), 2);
  const auto& p = c.poset();
  std::vector<Element> walk{p.index("v0"), p.index("e0"), p.index("v1"), p.index("e1"), p.index("v2")};
  EXPECT_EQ(parallel_transport(c, walk).matrix, Matrix<Rational>::identity(Q, 2));

  auto m = mobius_sheaf<Rational>(4);
  std::vector<Element> loop;
  for (const auto& n : {"v0", "e0", "v1", "e1", "v2", "e2", "v3", "e3", "v0"}) loop.push_back(p.index(n));
  EXPECT_EQ(parallel_transport(m, loop).matrix, Matrix<Rational>::from_ints(Q, 1, 1, {-1}));

  auto d = random_connection(p, 3);
  auto there = walk;
  auto back = walk;
  std::reverse(back.begin(), back.end());
  there.insert(there.end(), back.begin() + 1, back.end());
  EXPECT_EQ(parallel_transport(d, there).matrix, Matrix<Rational>::identity(Q, 3));

  EXPECT_EQ(code_of([&] { parallel_transport(c, {p.index("v0"), p.index("v1")}); }), ErrorCode::NotAPath);
  auto proj = c.edge_maps();
  proj.at({p.index("v0"), p.index("e0")}) = Matrix<Rational>::from_ints(Q, 2, 2, {1, 0, 0, 0});
  Sheaf<Rational> singular(p, Q, c.stalk_dims(), proj);
  EXPECT_EQ(code_of([&] { parallel_transport(singular, {p.index("e0"), p.index("v0")}); }), ErrorCode::NonInvertibleMap);
}

TEST(Transport, HomotopicPathsAgree) {
  // Two saturated paths s < t differ by triangular reductions; a compositional
  // connection sheaf transports them identically.
  for (int trial = 0; trial < 40; ++trial) {
    auto p = testsupport::random_poset(8, 0.4);
    auto d = random_connection(p, 2);
    for (Element s = 0; s < p.size(); ++s)
      for (Element t = 0; t < p.size(); ++t) {
        if (!p.less(s, t)) continue;
        auto paths = saturated_paths(p, s, t);
        for (const auto& path : paths) EXPECT_EQ(parallel_transport(d, path).matrix, parallel_transport(d, paths[0]).matrix);
      }
  }
}

TEST(Monodromy, Examples) {
  auto c = constant_sheaf<Rational>(cycle_poset(4), 1);
  auto loops = monodromy(c, 0);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].matrix, Matrix<Rational>::identity(Q, 1));
  EXPECT_EQ(loops[0].path.front(), loops[0].path.back());

  auto m = monodromy(mobius_sheaf<Rational>(4), 0);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].matrix, Matrix<Rational>::from_ints(Q, 1, 1, {-1}));

  auto two = constant_sheaf<Rational>(graph_poset(4, {{0, 1}, {2, 3}}), 1);
  EXPECT_EQ(code_of([&] { monodromy(two, 0); }), ErrorCode::Disconnected);
}

TEST(Monodromy, TreesAreSimplyConnected) {
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t v = static_cast<std::size_t>(testsupport::uniform(1, 8));
    std::size_t n = static_cast<std::size_t>(testsupport::uniform(1, 3));
    auto d = random_connection(random_tree_poset(v), n);
    EXPECT_TRUE(monodromy(d, 0).empty());
    EXPECT_EQ(global_sections_bruteforce(d).dim(), n);
  }
}

TEST(Monodromy, LoopCountIsCycleRank) {
  for (int trial = 0; trial < 40; ++trial) {
    auto p = testsupport::random_graph_poset(7, 0.5);
    std::vector<std::pair<std::size_t, std::size_t>> edges(p.covers().begin(), p.covers().end());
    if (oracle::components(p.size(), edges) != 1) continue;
    auto loops = monodromy(random_connection(p, 1), 0);
    EXPECT_EQ(loops.size(), edges.size() - p.size() + 1);
    for (const auto& l : loops) EXPECT_EQ(l.matrix, Matrix<Rational>::identity(Q, 1));
  }
}
