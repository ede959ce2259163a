#include "oracles.hpp"
#include "rfh/complexes.hpp"
#include "rfh/error.hpp"

#include <doctest.h>

using namespace rfh;

namespace {

GF2Matrix to_gf2(const oracle::Bits& b, int cols) {
  std::vector<std::string> rows;
  for (const auto& r : b) {
    std::string s;
    for (int x : r) s.push_back(x ? '1' : '0');
    rows.push_back(s);
  }
  return GF2Matrix::from_bits(rows, cols);
}

oracle::Bits from_gf2(const GF2Matrix& m) {
  oracle::Bits b(m.rows(), std::vector<int>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) b[r][c] = m.get(r, c);
  return b;
}

CriticalRecord rec(const std::string& id, int index, double action, const std::string& orbit = "") {
  CriticalRecord r;
  r.id = id;
  r.rel_index = index;
  r.action = action;
  r.orbit_id = orbit.empty() ? id : orbit;
  return r;
}

/// Random d_{k+1} with d_k d_{k+1} = 0: columns drawn from ker d_k.
oracle::Bits compatible(std::mt19937_64& g, const oracle::Bits& dk, int rows, int cols) {
  const auto ker = oracle::gf2_kernel(dk, rows);
  oracle::Bits out(rows, std::vector<int>(cols, 0));
  std::bernoulli_distribution coin(0.5);
  for (int c = 0; c < cols; ++c) {
    for (const auto& v : ker) {
      if (!coin(g)) continue;
      for (int r = 0; r < rows; ++r) out[r][c] ^= v[r];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("GF2Matrix arithmetic agrees with naive oracles") {
  auto g = oracle::rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 20, k = 1 + (trial * 7) % 23, m = 1 + (trial * 3) % 70;
    const auto a = oracle::random_bits(g, n, k);
    const auto b = oracle::random_bits(g, k, m);
    const GF2Matrix ga = to_gf2(a, k), gb = to_gf2(b, m);
    CHECK(from_gf2(ga * gb) == oracle::gf2_mul(a, b));
    CHECK(ga.rank() == oracle::gf2_rank(a));
    CHECK(ga.transpose().rank() == ga.rank());
    const GF2Matrix ker = ga.kernel_basis();
    CHECK(ker.cols() == k - ga.rank());
    CHECK((ga * ker).is_zero());
    CHECK(ker.rank() == ker.cols());
    CHECK(to_gf2(from_gf2(ga), k) == ga);
    CHECK((ga + ga).is_zero());
  }
  CHECK(GF2Matrix::identity(70).rank() == 70);
  CHECK(GF2Matrix::from_bits({"010", "001"}, 3).to_bits() == std::vector<std::string>{"010", "001"});
}

TEST_CASE("property: homology of random complexes matches the naive rank formula") {
  auto g = oracle::rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const int n0 = 20, n1 = 20, n2 = 20;
    const auto d1 = oracle::random_bits(g, n0, n1, 0.3);
    const auto d2 = compatible(g, d1, n1, n2);
    ChainComplexData cc;
    for (int i = 0; i < n0; ++i) cc.generators[0].push_back("a" + std::to_string(i));
    for (int i = 0; i < n1; ++i) cc.generators[1].push_back("b" + std::to_string(i));
    for (int i = 0; i < n2; ++i) cc.generators[2].push_back("c" + std::to_string(i));
    cc.boundary[1] = to_gf2(d1, n1);
    cc.boundary[2] = to_gf2(d2, n2);
    CHECK_NOTHROW(verify_boundary_square(cc));
    const HomologyTable h = homology_z2(cc);
    const int r1 = oracle::gf2_rank(d1), r2 = oracle::gf2_rank(d2);
    CHECK(h.ranks.at(0) == n0 - r1);
    CHECK(h.ranks.at(1) == n1 - r1 - r2);
    CHECK(h.ranks.at(2) == n2 - r2);
    CHECK(h.interior_degrees == std::vector<int>{1});
  }
}

TEST_CASE("linear plain chain: d iso from even to odd, zero interior homology") {
  // children of broken circles: min_k at 2k, max_k at 2k+1
  std::vector<CriticalRecord> recs;
  for (int k = 0; k < 3; ++k) {
    recs.push_back(rec("min" + std::to_string(k), 2 * k, k + 0.1));
    recs.push_back(rec("max" + std::to_string(k), 2 * k + 1, k + 0.2));
  }
  OrbitCounts counts;
  for (int k = 0; k < 3; ++k) counts[{"max" + std::to_string(k), "min" + std::to_string(k)}] = 2;
  for (int k = 0; k + 1 < 3; ++k) counts[{"min" + std::to_string(k + 1), "max" + std::to_string(k)}] = 1;
  const ChainComplexData cc = assemble_plain(recs, counts, -1, 10);
  CHECK(cc.boundary_at(1).is_zero());
  CHECK(cc.boundary_at(2).rank() == 1);
  const HomologyTable h = homology_z2(cc);
  for (int k : h.interior_degrees) CHECK(h.ranks.at(k) == 0);
  CHECK(h.interior_degrees == std::vector<int>{1, 2, 3, 4});
  CHECK(cc.provenance.size() == counts.size());
}

TEST_CASE("single generator and empty boundaries") {
  const ChainComplexData one = assemble_plain({rec("z", 3, 0.0)}, {}, -1, 1);
  CHECK(one.boundary_at(3).rows() == 0);
  const HomologyTable h = homology_z2(one);
  CHECK(h.ranks.at(3) == 1);

  std::vector<CriticalRecord> recs{rec("a", 0, 0.0), rec("b", 2, 0.1), rec("c", 4, 0.2)};
  const HomologyTable gap = homology_z2(assemble_plain(recs, {}, -1, 1));
  CHECK(gap.ranks.at(0) == 1);
  CHECK(gap.ranks.at(1) == 0);
  CHECK(gap.ranks.at(2) == 1);
}

TEST_CASE("missing counts and nonzero d^2 are reported") {
  std::vector<CriticalRecord> recs{rec("a", 0, 0.0), rec("b", 1, 0.1), rec("c", 2, 0.2)};
  CHECK_THROWS_WITH_AS(assemble_plain(recs, {{{"b", "a"}, 1}}, -1, 1), doctest::Contains("MissingCounts"), Error);
  const OrbitCounts bad{{{"b", "a"}, 1}, {{"c", "b"}, 1}};
  CHECK_THROWS_WITH_AS(assemble_plain(recs, bad, -1, 1), doctest::Contains("BoundarySquareNonzero"), Error);
}

TEST_CASE("window excludes records outside [a, b]") {
  std::vector<CriticalRecord> recs{rec("a", 0, -5.0), rec("b", 1, 0.1), rec("c", 2, 0.2)};
  const ChainComplexData cc = assemble_plain(recs, {{{"c", "b"}, 0}}, -1, 1);
  CHECK(cc.count(0) == 0);
  CHECK(cc.count(1) == 1);
}

TEST_CASE("s1 complex reads counts between max children") {
  std::vector<CriticalRecord> circles;
  std::vector<CriticalRecord> children;
  for (int k = 0; k < 3; ++k) {
    CriticalRecord c = rec("c" + std::to_string(k), 2 * k, k);
    c.orbit_type = OrbitType::circle;
    c.broken_children = std::make_pair("lo" + std::to_string(k), "hi" + std::to_string(k));
    circles.push_back(c);
    children.push_back(rec("lo" + std::to_string(k), 2 * k, k - 0.01));
    children.push_back(rec("hi" + std::to_string(k), 2 * k + 1, k + 0.01));
  }
  // gap of two between circles: no adjacent pairs, zero boundary
  const ChainComplexData cc = assemble_s1(circles, children, {}, -1, 10);
  const HomologyTable h = homology_z2(cc);
  for (int k : h.interior_degrees) CHECK(h.ranks.at(k) == (k % 2 == 0 ? 1 : 0));

  // adjacent circles: entries come from the hi -> hi counts
  circles[1].rel_index = 1;
  const ChainComplexData adj = assemble_s1(circles, children, {{{"hi1", "hi0"}, 3}}, -1, 10);
  CHECK(adj.boundary_at(1).get(0, 0));
  CHECK(adj.provenance.front().find("hi1->hi0") != std::string::npos);

  CriticalRecord unbroken = circles[0];
  unbroken.broken_children.reset();
  CHECK_THROWS_AS(assemble_s1({unbroken}, children, {}, -1, 10), Error);
}

TEST_CASE("z2 complex sums counts over the target pair and commutes with the quotient") {
  std::vector<CriticalRecord> recs;
  for (int k = 0; k < 3; ++k) {
    recs.push_back(rec("p" + std::to_string(k), k, k, "o" + std::to_string(k)));
    recs.push_back(rec("m" + std::to_string(k), k, k, "o" + std::to_string(k)));
  }
  OrbitCounts counts;
  for (int k = 1; k < 3; ++k) {
    for (const char* s : {"p", "m"}) {
      for (const char* t : {"p", "m"}) counts[{s + std::to_string(k), t + std::to_string(k - 1)}] = 1;
    }
  }
  const ChainComplexData z2 = assemble_z2(recs, counts, -1, 10);
  CHECK(z2.generators.at(0) == std::vector<std::string>{"o0"});
  CHECK(z2.boundary_at(1).is_zero());
  CHECK(z2.boundary_at(2).is_zero());
  const ChainComplexData plain = assemble_plain(recs, counts, -1, 10);
  CHECK(quotient_commutes(plain, z2, recs));
  const auto f = z2_quotient_map(plain, z2, recs);
  CHECK(f.at(1).to_bits() == std::vector<std::string>{"11"});

  // asymmetric counts: <p1, p0> + <p1, m0> = 1
  counts[{"p1", "m0"}] = 0;
  counts[{"m1", "p0"}] = 0;
  const ChainComplexData z2b = assemble_z2(recs, counts, -1, 10);
  CHECK(z2b.boundary_at(1).get(0, 0));
}

TEST_CASE("flavor names round-trip") {
  for (Flavor f : {Flavor::plain, Flavor::s1, Flavor::z2}) CHECK(flavor_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(flavor_from_string("zz"), Error);
}
