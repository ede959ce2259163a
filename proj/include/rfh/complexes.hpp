#pragma once

#include "rfh/critical.hpp"
#include "rfh/orbits.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rfh {

/// Dense matrix over Z2 with bit-packed rows.
class GF2Matrix {
 public:
  GF2Matrix() = default;
  GF2Matrix(int rows, int cols);
  static GF2Matrix identity(int n);
  /// Row-major bit strings, e.g. {"010", "001"}.
  static GF2Matrix from_bits(const std::vector<std::string>& rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool get(int r, int c) const;
  void set(int r, int c, bool value);
  void flip(int r, int c);
  bool is_zero() const;

  GF2Matrix operator*(const GF2Matrix& other) const;
  GF2Matrix operator+(const GF2Matrix& other) const;
  bool operator==(const GF2Matrix& other) const = default;
  GF2Matrix transpose() const;
  /// [this | other], same row count.
  GF2Matrix hconcat(const GF2Matrix& other) const;

  int rank() const;
  /// Columns form a basis of the kernel.
  GF2Matrix kernel_basis() const;

  std::vector<std::string> to_bits() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> data_;

  std::uint64_t* row_ptr(int r) { return data_.data() + static_cast<std::size_t>(r) * words_; }
  const std::uint64_t* row_ptr(int r) const { return data_.data() + static_cast<std::size_t>(r) * words_; }
};

enum class Flavor { plain, s1, z2 };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& name);

/// Graded Z2 complex in an action window. boundary[k] maps degree k to
/// degree k-1 (rows indexed by generators[k-1], columns by generators[k]).
struct ChainComplexData {
  Flavor flavor = Flavor::plain;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::map<int, std::vector<std::string>> generators;
  std::map<int, GF2Matrix> boundary;
  /// "source->target:count" for every entry read from orbit counts.
  std::vector<std::string> provenance;

  int count(int degree) const;
  /// Empty matrix of the right shape when no boundary is stored.
  GF2Matrix boundary_at(int degree) const;
};

struct HomologyTable {
  Flavor flavor = Flavor::plain;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::map<int, int> ranks;
  std::vector<int> interior_degrees;
};

/// Raw orbit counts keyed by (source id, target id); parities are taken on assembly.
using OrbitCounts = CountTable;

/// One generator per record. Throws MissingCounts when an adjacent pair has
/// no entry and BoundarySquareNonzero when d^2 != 0.
ChainComplexData assemble_plain(const std::vector<CriticalRecord>& records, const OrbitCounts& counts,
                                double window_lo, double window_hi);

/// One generator per circle, graded by the circle's index; entries are counts
/// between the max children.
ChainComplexData assemble_s1(const std::vector<CriticalRecord>& circles, const std::vector<CriticalRecord>& children,
                             const OrbitCounts& counts, double window_lo, double window_hi);

/// One generator per +-pair (grouped by orbit_id, represented by the first
/// member); entry = <z, y> + <z, -y> mod 2.
ChainComplexData assemble_z2(const std::vector<CriticalRecord>& records, const OrbitCounts& counts,
                             double window_lo, double window_hi);

/// Throws BoundarySquareNonzero if some d_{k-1} d_k is nonzero.
void verify_boundary_square(const ChainComplexData& cc);

/// Quotient map f from the plain complex to the z2 complex, degree by degree.
std::map<int, GF2Matrix> z2_quotient_map(const ChainComplexData& plain, const ChainComplexData& z2,
                                         const std::vector<CriticalRecord>& records);

/// f d = d f on every degree.
bool quotient_commutes(const ChainComplexData& plain, const ChainComplexData& z2,
                       const std::vector<CriticalRecord>& records);

/// rank H_k = dim C_k - rank d_k - rank d_{k+1}. The lowest and highest
/// degrees present are not interior.
HomologyTable homology_z2(const ChainComplexData& cc);

}  // namespace rfh
