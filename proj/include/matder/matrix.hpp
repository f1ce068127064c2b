#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "matder/ring.hpp"

namespace matder {

/// The index set is the naturals; genuinely infinite structure is expressed
/// through total accessor functions over it.
using Index = std::uint64_t;

/// Finite observation rectangle {0..bound-1} x {0..bound-1}.
struct Window {
  explicit Window(Index b) : bound(b) {
    if (b < 1) throw UsageError("window bound must be >= 1");
  }
  Index bound;
};

/// One nonzero entry of a column or row: (index, value).
using Entry = std::pair<Index, RingElement>;
/// Canonical entry list: strictly ascending indices, no zero values.
using EntryList = std::vector<Entry>;

/// Matrix with finitely many nonzero entries overall. Zero values are never
/// stored; support enumeration is deterministic in ascending (i, j) order.
class FiniteMatrix {
 public:
  using Key = std::pair<Index, Index>;
  using Map = std::map<Key, RingElement>;

  explicit FiniteMatrix(RingPtr ring) : ring_(std::move(ring)) {}

  const RingPtr& ring_ptr() const { return ring_; }
  const Ring& ring() const { return *ring_; }
  const Map& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  /// Entry at (i, j); the ring zero when absent.
  RingElement entry(Index i, Index j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? ring_->zero() : it->second;
  }

  /// Set (i, j) to v; storing a zero erases the entry.
  void set_entry(Index i, Index j, const RingElement& v) {
    ring_->require_mine(v);
    if (ring_->is_zero(v))
      entries_.erase({i, j});
    else
      entries_.insert_or_assign({i, j}, v);
  }

  /// Add v into (i, j).
  void add_entry(Index i, Index j, const RingElement& v) {
    set_entry(i, j, entry(i, j) + v);
  }

  friend bool operator==(const FiniteMatrix& a, const FiniteMatrix& b);
  friend bool operator!=(const FiniteMatrix& a, const FiniteMatrix& b) {
    return !(a == b);
  }

 private:
  RingPtr ring_;
  Map entries_;
};

/// Matrix unit e_ij(r): the single entry r at (i, j), empty when r = 0.
FiniteMatrix unit(Index i, Index j, const RingElement& r);

FiniteMatrix add(const FiniteMatrix& a, const FiniteMatrix& b);
FiniteMatrix neg(const FiniteMatrix& a);
FiniteMatrix sub(const FiniteMatrix& a, const FiniteMatrix& b);
FiniteMatrix mul(const FiniteMatrix& a, const FiniteMatrix& b);
FiniteMatrix bracket(const FiniteMatrix& a, const FiniteMatrix& b);

/// Sum of the diagonal entries (finite matrices only; operators have no
/// trace here).
RingElement trace(const FiniteMatrix& a);

/// Whether A = e_kk(1)A + Ae_kk(1): every nonzero entry has exactly one
/// coordinate equal to k and (k, k) is vacant. Computes both the identity
/// and the entrywise criterion and insists they agree.
bool lemma1_shape(const FiniteMatrix& a, Index k);

namespace detail {
struct OpState;
}

/// Element of the column-finite matrix ring: a total accessor j -> nonzero
/// entries of column j. Accessors must be deterministic; computed columns
/// are memoized (insertion is serialized and idempotent, so operators may
/// be read concurrently). Copies share state; nothing mutates a value.
class ColumnFiniteOperator {
 public:
  EntryList col(Index j) const;
  RingElement entry(Index i, Index j) const;
  const RingPtr& ring_ptr() const;
  bool has_row_accessor() const;

  /// Internal; use the operator_from_* factories.
  explicit ColumnFiniteOperator(std::shared_ptr<detail::OpState> s)
      : state_(std::move(s)) {}

 protected:
  std::shared_ptr<detail::OpState> state_;
};

/// Row-and-column-finite operator: adds a total row accessor. Slicing down
/// to ColumnFiniteOperator is the subring inclusion and loses nothing but
/// the row view.
class RcfOperator : public ColumnFiniteOperator {
 public:
  EntryList row(Index i) const;

  /// Internal; use the operator_from_* factories.
  explicit RcfOperator(std::shared_ptr<detail::OpState> s)
      : ColumnFiniteOperator(std::move(s)) {}
};

/// Wrap a column accessor (memoizing). List canonicality (ascending,
/// zero-free, duplicate-free) is enforced on first access of each column.
ColumnFiniteOperator operator_from_col(RingPtr ring,
                                       std::function<EntryList(Index)> col);

/// Wrap column + row accessors as a row-and-column-finite operator.
RcfOperator operator_from_accessors(RingPtr ring,
                                    std::function<EntryList(Index)> col,
                                    std::function<EntryList(Index)> row);

/// Diagonal operator diag(f(0), f(1), ...). f must be total and pure.
RcfOperator diag_operator(RingPtr ring,
                          std::function<RingElement(Index)> f);

/// The subdiagonal shift: entry 1 at (k+1, k) for every k.
RcfOperator shift_operator(RingPtr ring);

/// diag(1, 1, ...).
RcfOperator identity_operator(RingPtr ring);

/// Ones across row `row`: entry 1 at (row, j) for every j. Column-finite
/// but not row-finite; the stock non-rcf specimen.
ColumnFiniteOperator ones_row_operator(RingPtr ring, Index row);

/// A finite matrix viewed as an operator (the inclusion into the rcf ring).
RcfOperator to_operator(const FiniteMatrix& a);

FiniteMatrix window_of(const FiniteMatrix& a, Window w);
FiniteMatrix window_of(const ColumnFiniteOperator& a, Window w);

// --- addition / multiplication closure -------------------------------------
// Result classes: fin+fin=fin, widening otherwise; products follow the
// table (fin,fin)->fin, (col,fin)->fin, (fin,rcf)->fin, (col,col)->col,
// (rcf,rcf)->rcf, mixed operator pairs ->col, and (fin,col)->col (the
// product may have an infinite row; e_00(1) * ones_row shows finiteness
// genuinely fails).

ColumnFiniteOperator add(const ColumnFiniteOperator& a,
                         const ColumnFiniteOperator& b);
RcfOperator add(const RcfOperator& a, const RcfOperator& b);
RcfOperator add(const RcfOperator& a, const FiniteMatrix& b);
RcfOperator add(const FiniteMatrix& a, const RcfOperator& b);
ColumnFiniteOperator add(const ColumnFiniteOperator& a, const FiniteMatrix& b);
ColumnFiniteOperator add(const FiniteMatrix& a, const ColumnFiniteOperator& b);

ColumnFiniteOperator neg(const ColumnFiniteOperator& a);
RcfOperator neg(const RcfOperator& a);

FiniteMatrix mul(const ColumnFiniteOperator& a, const FiniteMatrix& b);
FiniteMatrix mul(const FiniteMatrix& a, const RcfOperator& b);
ColumnFiniteOperator mul(const ColumnFiniteOperator& a,
                         const ColumnFiniteOperator& b);
RcfOperator mul(const RcfOperator& a, const RcfOperator& b);
ColumnFiniteOperator mul(const FiniteMatrix& a, const ColumnFiniteOperator& b);

/// [a, b] = ab - ba, classed per the closure table. The rcf/finite pairs
/// land in the finite class (the ideal property); a column-only operator
/// against a finite matrix may have an infinite row and stays an operator.
FiniteMatrix bracket(const RcfOperator& a, const FiniteMatrix& x);
FiniteMatrix bracket(const FiniteMatrix& x, const RcfOperator& a);
ColumnFiniteOperator bracket(const ColumnFiniteOperator& a,
                             const FiniteMatrix& x);
ColumnFiniteOperator bracket(const FiniteMatrix& x,
                             const ColumnFiniteOperator& a);
ColumnFiniteOperator bracket(const ColumnFiniteOperator& a,
                             const ColumnFiniteOperator& b);
RcfOperator bracket(const RcfOperator& a, const RcfOperator& b);

/// Row/column agreement on the window, plus canonicality of every list
/// touched. Full consistency of accessor pairs is not decidable; this is
/// the window-scoped surrogate.
bool is_rcf_consistent_on_window(const RcfOperator& a, Window w);

/// Outcome of the row-finiteness probe. `ok` means no violation found on
/// this window (a window-scoped verdict, never a global fact).
struct RowProbeReport {
  bool ok = true;
  std::optional<Index> witness_row;
  std::vector<Index> witness_columns;
  Index scanned_columns = 0;
};

/// Row-finiteness probe: scans columns [0, 2*bound) and flags any row
/// k < bound whose nonzero count exceeds 3*bound/2.
RowProbeReport lemma3_row_probe(const FiniteMatrix& v, Window w);
RowProbeReport lemma3_row_probe(const RcfOperator& v, Window w);
RowProbeReport lemma3_row_probe(const ColumnFiniteOperator& v, Window w);

}  // namespace matder
