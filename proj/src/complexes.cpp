#include "rfh/complexes.hpp"

#include "rfh/error.hpp"

#include <algorithm>
#include <set>

namespace rfh {

GF2Matrix::GF2Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(static_cast<std::size_t>(rows) * words_, 0) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::InvalidArgument, "negative matrix shape");
}

GF2Matrix GF2Matrix::identity(int n) {
  GF2Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

GF2Matrix GF2Matrix::from_bits(const std::vector<std::string>& rows, int cols) {
  GF2Matrix m(static_cast<int>(rows.size()), cols);
  for (int r = 0; r < m.rows(); ++r) {
    if (static_cast<int>(rows[r].size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "bit row " + std::to_string(r) + " has wrong length");
    }
    for (int c = 0; c < cols; ++c) {
      const char ch = rows[r][c];
      if (ch != '0' && ch != '1') throw Error(ErrorCode::ParseError, "bit rows must contain only 0 and 1");
      m.set(r, c, ch == '1');
    }
  }
  return m;
}

bool GF2Matrix::get(int r, int c) const { return (row_ptr(r)[c / 64] >> (c % 64)) & 1u; }

void GF2Matrix::set(int r, int c, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << (c % 64);
  if (value) {
    row_ptr(r)[c / 64] |= bit;
  } else {
    row_ptr(r)[c / 64] &= ~bit;
  }
}

void GF2Matrix::flip(int r, int c) { row_ptr(r)[c / 64] ^= std::uint64_t{1} << (c % 64); }

bool GF2Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
}

GF2Matrix GF2Matrix::operator*(const GF2Matrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorCode::DimensionMismatch, "GF2 product shapes");
  GF2Matrix out(rows_, other.cols_);
  for (int r = 0; r < rows_; ++r) {
    std::uint64_t* dst = out.row_ptr(r);
    for (int k = 0; k < cols_; ++k) {
      if (!get(r, k)) continue;
      const std::uint64_t* src = other.row_ptr(k);
      for (int w = 0; w < out.words_; ++w) dst[w] ^= src[w];
    }
  }
  return out;
}

GF2Matrix GF2Matrix::operator+(const GF2Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(ErrorCode::DimensionMismatch, "GF2 sum shapes");
  GF2Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] ^= other.data_[i];
  return out;
}

GF2Matrix GF2Matrix::transpose() const {
  GF2Matrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (get(r, c)) out.set(c, r, true);
    }
  }
  return out;
}

GF2Matrix GF2Matrix::hconcat(const GF2Matrix& other) const {
  if (rows_ != other.rows_) throw Error(ErrorCode::DimensionMismatch, "hconcat row counts");
  GF2Matrix out(rows_, cols_ + other.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out.set(r, c, get(r, c));
    for (int c = 0; c < other.cols_; ++c) out.set(r, cols_ + c, other.get(r, c));
  }
  return out;
}

int GF2Matrix::rank() const {
  GF2Matrix m = *this;
  int rank = 0;
  for (int c = 0; c < cols_ && rank < rows_; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows_; ++r) {
      if (m.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      std::swap_ranges(m.row_ptr(pivot), m.row_ptr(pivot) + words_, m.row_ptr(rank));
    }
    for (int r = 0; r < rows_; ++r) {
      if (r != rank && m.get(r, c)) {
        for (int w = 0; w < words_; ++w) m.row_ptr(r)[w] ^= m.row_ptr(rank)[w];
      }
    }
    ++rank;
  }
  return rank;
}

GF2Matrix GF2Matrix::kernel_basis() const {
  // reduced row echelon form, then one kernel vector per free column
  GF2Matrix m = *this;
  std::vector<int> pivot_cols;
  int rank = 0;
  for (int c = 0; c < cols_ && rank < rows_; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows_; ++r) {
      if (m.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) std::swap_ranges(m.row_ptr(pivot), m.row_ptr(pivot) + words_, m.row_ptr(rank));
    for (int r = 0; r < rows_; ++r) {
      if (r != rank && m.get(r, c)) {
        for (int w = 0; w < words_; ++w) m.row_ptr(r)[w] ^= m.row_ptr(rank)[w];
      }
    }
    pivot_cols.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(cols_, false);
  for (int c : pivot_cols) is_pivot[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < cols_; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }
  GF2Matrix basis(cols_, static_cast<int>(free_cols.size()));
  for (std::size_t j = 0; j < free_cols.size(); ++j) {
    const int f = free_cols[j];
    basis.set(f, static_cast<int>(j), true);
    for (int r = 0; r < rank; ++r) {
      if (m.get(r, f)) basis.set(pivot_cols[r], static_cast<int>(j), true);
    }
  }
  return basis;
}

std::vector<std::string> GF2Matrix::to_bits() const {
  std::vector<std::string> out(rows_, std::string(cols_, '0'));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (get(r, c)) out[r][c] = '1';
    }
  }
  return out;
}

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::plain: return "plain";
    case Flavor::s1: return "s1";
    case Flavor::z2: return "z2";
  }
  return "plain";
}

Flavor flavor_from_string(const std::string& name) {
  if (name == "plain") return Flavor::plain;
  if (name == "s1") return Flavor::s1;
  if (name == "z2") return Flavor::z2;
  throw Error(ErrorCode::InvalidArgument, "unknown flavor '" + name + "'");
}

int ChainComplexData::count(int degree) const {
  auto it = generators.find(degree);
  return it == generators.end() ? 0 : static_cast<int>(it->second.size());
}

GF2Matrix ChainComplexData::boundary_at(int degree) const {
  auto it = boundary.find(degree);
  if (it != boundary.end()) return it->second;
  return GF2Matrix(count(degree - 1), count(degree));
}

void verify_boundary_square(const ChainComplexData& cc) {
  for (const auto& [k, dk] : cc.boundary) {
    auto lower = cc.boundary.find(k - 1);
    if (lower == cc.boundary.end()) continue;
    if (!(lower->second * dk).is_zero()) {
      throw Error(ErrorCode::BoundarySquareNonzero, to_string(cc.flavor) + " complex: d_" + std::to_string(k - 1) +
                                                        " d_" + std::to_string(k) + " != 0");
    }
  }
}

namespace {

bool in_window(double action, double lo, double hi) { return action >= lo && action <= hi; }

int lookup(const OrbitCounts& counts, const std::string& src, const std::string& tgt,
           std::vector<std::string>& provenance) {
  auto it = counts.find({src, tgt});
  if (it == counts.end()) {
    throw Error(ErrorCode::MissingCounts, "no orbit count for " + src + " -> " + tgt);
  }
  provenance.push_back(src + "->" + tgt + ":" + std::to_string(it->second));
  return it->second;
}

/// Fills boundary matrices from an entry function over adjacent degrees.
template <typename Entry>
void fill_boundary(ChainComplexData& cc, Entry entry) {
  for (const auto& [k, gens] : cc.generators) {
    auto lower = cc.generators.find(k - 1);
    if (lower == cc.generators.end()) continue;
    GF2Matrix d(static_cast<int>(lower->second.size()), static_cast<int>(gens.size()));
    for (int c = 0; c < d.cols(); ++c) {
      for (int r = 0; r < d.rows(); ++r) d.set(r, c, entry(gens[c], lower->second[r]) % 2 != 0);
    }
    cc.boundary[k] = d;
  }
}

}  // namespace

ChainComplexData assemble_plain(const std::vector<CriticalRecord>& records, const OrbitCounts& counts,
                                double window_lo, double window_hi) {
  ChainComplexData cc;
  cc.flavor = Flavor::plain;
  cc.window_lo = window_lo;
  cc.window_hi = window_hi;
  for (const auto& r : records) {
    if (in_window(r.action, window_lo, window_hi)) cc.generators[r.rel_index].push_back(r.id);
  }
  fill_boundary(cc, [&](const std::string& src, const std::string& tgt) {
    return lookup(counts, src, tgt, cc.provenance);
  });
  verify_boundary_square(cc);
  return cc;
}

ChainComplexData assemble_s1(const std::vector<CriticalRecord>& circles, const std::vector<CriticalRecord>& children,
                             const OrbitCounts& counts, double window_lo, double window_hi) {
  ChainComplexData cc;
  cc.flavor = Flavor::s1;
  cc.window_lo = window_lo;
  cc.window_hi = window_hi;
  std::map<std::string, std::string> max_child;
  std::set<std::string> child_ids;
  for (const auto& ch : children) child_ids.insert(ch.id);
  for (const auto& c : circles) {
    if (!in_window(c.action, window_lo, window_hi)) continue;
    if (c.orbit_type != OrbitType::circle) throw Error(ErrorCode::NotACircle, c.id + " is not a circle");
    if (!c.broken_children) throw Error(ErrorCode::MissingCounts, "circle " + c.id + " has not been broken");
    if (!child_ids.count(c.broken_children->second)) {
      throw Error(ErrorCode::MissingCounts, "max child of " + c.id + " missing");
    }
    max_child[c.id] = c.broken_children->second;
    cc.generators[c.rel_index].push_back(c.id);
  }
  fill_boundary(cc, [&](const std::string& src, const std::string& tgt) {
    return lookup(counts, max_child.at(src), max_child.at(tgt), cc.provenance);
  });
  verify_boundary_square(cc);
  return cc;
}

namespace {

/// orbit_id -> member ids in record order.
std::map<std::string, std::vector<std::string>> pair_members(const std::vector<CriticalRecord>& records, double lo,
                                                             double hi) {
  std::map<std::string, std::vector<std::string>> members;
  for (const auto& r : records) {
    if (in_window(r.action, lo, hi)) members[r.orbit_id].push_back(r.id);
  }
  return members;
}

}  // namespace

ChainComplexData assemble_z2(const std::vector<CriticalRecord>& records, const OrbitCounts& counts,
                             double window_lo, double window_hi) {
  ChainComplexData cc;
  cc.flavor = Flavor::z2;
  cc.window_lo = window_lo;
  cc.window_hi = window_hi;
  const auto members = pair_members(records, window_lo, window_hi);
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!in_window(r.action, window_lo, window_hi) || seen.count(r.orbit_id)) continue;
    seen.insert(r.orbit_id);
    cc.generators[r.rel_index].push_back(r.orbit_id);
  }
  fill_boundary(cc, [&](const std::string& src_orbit, const std::string& tgt_orbit) {
    const std::string& rep = members.at(src_orbit).front();
    int total = 0;
    for (const auto& y : members.at(tgt_orbit)) total += lookup(counts, rep, y, cc.provenance);
    return total;
  });
  verify_boundary_square(cc);
  return cc;
}

std::map<int, GF2Matrix> z2_quotient_map(const ChainComplexData& plain, const ChainComplexData& z2,
                                         const std::vector<CriticalRecord>& records) {
  std::map<std::string, std::string> orbit_of;
  for (const auto& r : records) orbit_of[r.id] = r.orbit_id;
  std::map<int, GF2Matrix> f;
  std::set<int> degrees;
  for (const auto& [k, g] : plain.generators) degrees.insert(k);
  for (const auto& [k, g] : z2.generators) degrees.insert(k);
  for (int k : degrees) {
    GF2Matrix m(z2.count(k), plain.count(k));
    if (plain.count(k) > 0 && z2.count(k) > 0) {
      const auto& cols = plain.generators.at(k);
      const auto& rows = z2.generators.at(k);
      for (int c = 0; c < m.cols(); ++c) {
        auto it = std::find(rows.begin(), rows.end(), orbit_of.at(cols[c]));
        if (it != rows.end()) m.set(static_cast<int>(it - rows.begin()), c, true);
      }
    }
    f[k] = m;
  }
  return f;
}

bool quotient_commutes(const ChainComplexData& plain, const ChainComplexData& z2,
                       const std::vector<CriticalRecord>& records) {
  const auto f = z2_quotient_map(plain, z2, records);
  for (const auto& [k, fk] : f) {
    auto lower = f.find(k - 1);
    if (lower == f.end()) continue;
    const GF2Matrix lhs = lower->second * plain.boundary_at(k);
    const GF2Matrix rhs = z2.boundary_at(k) * fk;
    if (!(lhs == rhs)) return false;
  }
  return true;
}

HomologyTable homology_z2(const ChainComplexData& cc) {
  HomologyTable table;
  table.flavor = cc.flavor;
  table.window_lo = cc.window_lo;
  table.window_hi = cc.window_hi;
  if (cc.generators.empty()) return table;
  const int lo = cc.generators.begin()->first;
  const int hi = cc.generators.rbegin()->first;
  // degrees without generators inside the range still get an explicit 0
  for (int k = lo; k <= hi; ++k) {
    const int dim = cc.count(k);
    const int rank_out = dim > 0 && cc.count(k - 1) > 0 ? cc.boundary_at(k).rank() : 0;
    const int rank_in = dim > 0 && cc.count(k + 1) > 0 ? cc.boundary_at(k + 1).rank() : 0;
    table.ranks[k] = dim - rank_out - rank_in;
    if (k > lo && k < hi) table.interior_degrees.push_back(k);
  }
  return table;
}

}  // namespace rfh
