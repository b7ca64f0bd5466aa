#pragma once

// Boxes, uniform grids, open covers and minimal subcovers.
//
// Everything here is a plain value type; operations are pure functions.
// Cover verification is exact on the continuum (a `true` verdict certifies
// that the closed target region, not just sampled points, is covered by the
// union of open elements), which is what makes the entropy numbers computed
// on top of it certified upper bounds.

#include "fbent/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace fbent::geom {

// ---------------------------------------------------------------------------
// Box

struct Box {
    Vec lo;
    Vec hi;
    bool open = false;

    Box() = default;
    Box(Vec lo_, Vec hi_, bool open_ = false)
        : lo(std::move(lo_)), hi(std::move(hi_)), open(open_) {
        if (lo.size() != hi.size()) throw error("Box: lo/hi dimension mismatch");
        for (Eigen::Index i = 0; i < lo.size(); ++i)
            if (lo[i] > hi[i]) throw error("Box: lo > hi on axis " + std::to_string(i));
    }

    static Box interval(double a, double b, bool open_ = false) {
        return Box(make_vec({a}), make_vec({b}), open_);
    }

    int dim() const { return static_cast<int>(lo.size()); }

    /// An open box that is degenerate on any axis contains no point.
    bool empty() const {
        if (!open) return false;
        for (Eigen::Index i = 0; i < lo.size(); ++i)
            if (lo[i] >= hi[i]) return true;
        return false;
    }

    bool contains(const Vec& x) const {
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            if (open) {
                if (!(lo[i] < x[i] && x[i] < hi[i])) return false;
            } else {
                if (!(lo[i] <= x[i] && x[i] <= hi[i])) return false;
            }
        }
        return true;
    }

    Vec center() const { return 0.5 * (lo + hi); }
    Vec widths() const { return hi - lo; }

    double max_width() const {
        double w = 0.0;
        for (Eigen::Index i = 0; i < lo.size(); ++i) w = std::max(w, hi[i] - lo[i]);
        return w;
    }

    Box inflate(double r) const {
        Box b = *this;
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            b.lo[i] -= r;
            b.hi[i] += r;
        }
        return b;
    }

    Box closure() const {
        Box b = *this;
        b.open = false;
        return b;
    }

    Box as_open() const {
        Box b = *this;
        b.open = true;
        return b;
    }

    /// Closed intersection; empty result reported via optional.
    std::optional<Box> intersect(const Box& o) const {
        Vec l(lo.size()), h(lo.size());
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            l[i] = std::max(lo[i], o.lo[i]);
            h[i] = std::min(hi[i], o.hi[i]);
            if (l[i] > h[i]) return std::nullopt;
        }
        return Box(l, h, false);
    }

    /// Closed overlap test (shared faces count as overlap).
    bool overlaps(const Box& o) const {
        for (Eigen::Index i = 0; i < lo.size(); ++i)
            if (lo[i] > o.hi[i] || o.lo[i] > hi[i]) return false;
        return true;
    }

    static Box hull(const Box& a, const Box& b) {
        Vec l(a.lo.size()), h(a.lo.size());
        for (Eigen::Index i = 0; i < a.lo.size(); ++i) {
            l[i] = std::min(a.lo[i], b.lo[i]);
            h[i] = std::max(a.hi[i], b.hi[i]);
        }
        return Box(l, h, a.open && b.open);
    }
};

/// closed ⊆ open, strictly on every face.
inline bool closed_in_open(const Box& closed, const Box& open) {
    for (Eigen::Index i = 0; i < closed.lo.size(); ++i)
        if (!(open.lo[i] < closed.lo[i] && closed.hi[i] < open.hi[i])) return false;
    return true;
}

/// closed ⊆ closed.
inline bool closed_in_closed(const Box& inner, const Box& outer) {
    for (Eigen::Index i = 0; i < inner.lo.size(); ++i)
        if (!(outer.lo[i] <= inner.lo[i] && inner.hi[i] <= outer.hi[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Exact coverage of a closed box by a union of open boxes.
//
// Recursive splitting at element boundaries. The base case (no element
// boundary strictly inside the box) checks that a single element contains the
// relative interior and recurses on the faces, so configurations where
// different elements cover different faces are decided correctly.

namespace detail {

inline bool covered_by_union_rec(const Box& b, const std::vector<Box>& elems,
                                 const std::vector<int>& cand, int depth) {
    if (depth > 256) throw error("coverage recursion too deep");
    const int n = b.dim();

    // fast path: one element strictly contains the closed box
    for (int ei : cand)
        if (closed_in_open(b, elems[ei])) return true;

    // keep only elements whose closure meets b
    std::vector<int> local;
    local.reserve(cand.size());
    for (int ei : cand)
        if (b.overlaps(elems[ei].closure())) local.push_back(ei);
    if (local.empty()) return false;

    // split at the first element boundary strictly inside b
    for (int i = 0; i < n; ++i) {
        for (int ei : local) {
            for (double c : {elems[ei].lo[i], elems[ei].hi[i]}) {
                if (b.lo[i] < c && c < b.hi[i]) {
                    Box left = b, right = b;
                    left.hi[i] = c;
                    right.lo[i] = c;
                    return covered_by_union_rec(left, elems, local, depth + 1) &&
                           covered_by_union_rec(right, elems, local, depth + 1);
                }
            }
        }
    }

    // no interior boundaries: some single element must contain the relative
    // interior (strict on degenerate axes, non-strict otherwise)
    bool interior_ok = false;
    for (int ei : local) {
        const Box& e = elems[ei];
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (b.lo[i] == b.hi[i])
                ok = e.lo[i] < b.lo[i] && b.hi[i] < e.hi[i];
            else
                ok = e.lo[i] <= b.lo[i] && b.hi[i] <= e.hi[i];
        }
        if (ok) {
            interior_ok = true;
            break;
        }
    }
    if (!interior_ok) return false;

    // every face is a lower-dimensional closed box and must be covered too
    for (int i = 0; i < n; ++i) {
        if (b.lo[i] == b.hi[i]) continue;
        Box flo = b, fhi = b;
        flo.hi[i] = flo.lo[i];
        fhi.lo[i] = fhi.hi[i];
        if (!covered_by_union_rec(flo, elems, local, depth + 1)) return false;
        if (!covered_by_union_rec(fhi, elems, local, depth + 1)) return false;
    }
    return true;
}

} // namespace detail

/// Does the union of the open `elems` contain the closed box `b`? Exact.
inline bool covered_by_union(const Box& b, const std::vector<Box>& elems) {
    std::vector<Box> clean;
    clean.reserve(elems.size());
    for (const Box& e : elems)
        if (!e.empty()) clean.push_back(e);
    std::vector<int> all(clean.size());
    std::iota(all.begin(), all.end(), 0);
    return detail::covered_by_union_rec(b, clean, all, 0);
}

// ---------------------------------------------------------------------------
// Grid

struct Grid {
    Box domain;                   // closed
    std::vector<int> resolution;  // cells per axis, >= 1

    Grid() = default;
    Grid(Box domain_, std::vector<int> resolution_)
        : domain(std::move(domain_)), resolution(std::move(resolution_)) {
        if (static_cast<int>(resolution.size()) != domain.dim())
            throw error("Grid: resolution dimension mismatch");
        for (int r : resolution)
            if (r < 1) throw error("Grid: resolution must be positive");
    }

    int dim() const { return domain.dim(); }

    std::int64_t cell_count() const {
        std::int64_t n = 1;
        for (int r : resolution) n *= r;
        return n;
    }

    double cell_width(int axis) const {
        return (domain.hi[axis] - domain.lo[axis]) / resolution[axis];
    }

    /// Per-axis index of the cell containing x. Boundaries belong to the cell
    /// with the larger index; the domain's upper edge folds into the last cell.
    int axis_index(int axis, double x) const {
        if (x < domain.lo[axis] || x > domain.hi[axis])
            throw domain_error("point outside grid domain on axis " + std::to_string(axis));
        double t = (x - domain.lo[axis]) / cell_width(axis);
        int k = static_cast<int>(std::floor(t));
        if (k >= resolution[axis]) k = resolution[axis] - 1;
        if (k < 0) k = 0;
        return k;
    }

    std::int64_t flatten(const std::vector<int>& idx) const {
        std::int64_t f = 0;
        for (int i = 0; i < dim(); ++i) f = f * resolution[i] + idx[i];
        return f;
    }

    std::vector<int> unflatten(std::int64_t f) const {
        std::vector<int> idx(dim());
        for (int i = dim() - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(f % resolution[i]);
            f /= resolution[i];
        }
        return idx;
    }

    std::int64_t cell_of(const Vec& x) const {
        std::vector<int> idx(dim());
        for (int i = 0; i < dim(); ++i) idx[i] = axis_index(i, x[i]);
        return flatten(idx);
    }

    /// Closed box of one cell.
    Box cell_box(std::int64_t cell) const {
        auto idx = unflatten(cell);
        Vec l(dim()), h(dim());
        for (int i = 0; i < dim(); ++i) {
            double w = cell_width(i);
            l[i] = domain.lo[i] + idx[i] * w;
            h[i] = (idx[i] + 1 == resolution[i]) ? domain.hi[i] : domain.lo[i] + (idx[i] + 1) * w;
        }
        return Box(l, h, false);
    }

    Vec cell_center(std::int64_t cell) const { return cell_box(cell).center(); }

    /// Inclusive per-axis index range of cells whose closure meets [lo, hi].
    /// Empty optional when the range misses the domain entirely.
    std::optional<std::pair<std::vector<int>, std::vector<int>>>
    index_range(const Box& b) const {
        std::vector<int> lo_idx(dim()), hi_idx(dim());
        for (int i = 0; i < dim(); ++i) {
            if (b.hi[i] < domain.lo[i] || b.lo[i] > domain.hi[i]) return std::nullopt;
            double w = cell_width(i);
            double tlo = (std::max(b.lo[i], domain.lo[i]) - domain.lo[i]) / w;
            double thi = (std::min(b.hi[i], domain.hi[i]) - domain.lo[i]) / w;
            int klo = static_cast<int>(std::floor(tlo));
            int khi = static_cast<int>(std::ceil(thi)) - 1;
            if (khi < klo) khi = klo;
            lo_idx[i] = std::clamp(klo, 0, resolution[i] - 1);
            hi_idx[i] = std::clamp(khi, 0, resolution[i] - 1);
        }
        return std::make_pair(lo_idx, hi_idx);
    }

    bool operator==(const Grid& o) const {
        return resolution == o.resolution && domain.lo == o.domain.lo && domain.hi == o.domain.hi;
    }
};

// ---------------------------------------------------------------------------
// GridRegion: a finite set of cells of one grid, kept sorted.

struct GridRegion {
    Grid grid;
    std::vector<std::int64_t> cells;  // sorted, unique

    GridRegion() = default;
    GridRegion(Grid g, std::vector<std::int64_t> cs) : grid(std::move(g)), cells(std::move(cs)) {
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        if (!cells.empty() && (cells.front() < 0 || cells.back() >= grid.cell_count()))
            throw error("GridRegion: cell index out of range");
    }

    static GridRegion full(const Grid& g) {
        std::vector<std::int64_t> cs(static_cast<std::size_t>(g.cell_count()));
        std::iota(cs.begin(), cs.end(), std::int64_t{0});
        return GridRegion(g, std::move(cs));
    }

    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }

    bool contains_cell(std::int64_t c) const {
        return std::binary_search(cells.begin(), cells.end(), c);
    }

    GridRegion intersect(const GridRegion& o) const {
        if (!(grid == o.grid)) throw error("GridRegion: grid mismatch");
        std::vector<std::int64_t> out;
        std::set_intersection(cells.begin(), cells.end(), o.cells.begin(), o.cells.end(),
                              std::back_inserter(out));
        GridRegion r;
        r.grid = grid;
        r.cells = std::move(out);
        return r;
    }

    GridRegion unite(const GridRegion& o) const {
        if (!(grid == o.grid)) throw error("GridRegion: grid mismatch");
        std::vector<std::int64_t> out;
        std::set_union(cells.begin(), cells.end(), o.cells.begin(), o.cells.end(),
                       std::back_inserter(out));
        GridRegion r;
        r.grid = grid;
        r.cells = std::move(out);
        return r;
    }

    /// Hull box of all member cells (closed). Throws on empty regions.
    Box hull() const {
        if (cells.empty()) throw error("GridRegion::hull on empty region");
        Box h = grid.cell_box(cells.front());
        for (std::size_t i = 1; i < cells.size(); ++i) h = Box::hull(h, grid.cell_box(cells[i]));
        return h;
    }

    /// Contiguous index runs (1-D grids only), as [first, last] cell pairs.
    std::vector<std::pair<std::int64_t, std::int64_t>> runs_1d() const {
        if (grid.dim() != 1) throw error("runs_1d: grid is not 1-D");
        std::vector<std::pair<std::int64_t, std::int64_t>> rs;
        for (std::size_t i = 0; i < cells.size();) {
            std::size_t j = i;
            while (j + 1 < cells.size() && cells[j + 1] == cells[j] + 1) ++j;
            rs.emplace_back(cells[i], cells[j]);
            i = j + 1;
        }
        return rs;
    }
};

// ---------------------------------------------------------------------------
// OpenCover

struct OpenCover {
    std::vector<Box> elements;  // open boxes
    GridRegion target;

    OpenCover() = default;
    OpenCover(std::vector<Box> elems, GridRegion tgt)
        : elements(std::move(elems)), target(std::move(tgt)) {
        for (auto& e : elements) e.open = true;
    }
};

/// Certified covering check: every target cell's closed box must lie in the
/// union of the open elements.
inline bool is_cover(const OpenCover& cover) {
    if (cover.target.empty()) throw error("is_cover: empty target");
    for (std::int64_t c : cover.target.cells) {
        if (!covered_by_union(cover.target.grid.cell_box(c), cover.elements)) return false;
    }
    return true;
}

/// First uncovered target cell, if any (diagnostic companion to is_cover).
inline std::optional<std::int64_t> first_uncovered_cell(const OpenCover& cover) {
    for (std::int64_t c : cover.target.cells)
        if (!covered_by_union(cover.target.grid.cell_box(c), cover.elements)) return c;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Set cover over a finite universe (bitset engine).
//
// Used twice: for minimal subcovers of box covers (after reducing the
// continuum question to atoms) and for grid-region families (refinement
// covers). Three routes: optimal interval sweep when every set is a
// contiguous range, branch-and-bound when the family is small, greedy with a
// combinatorial lower bound otherwise. `exact` is true whenever the chosen
// route proves optimality (B&B completed, or lower bound == upper bound).

struct CellCoverResult {
    std::vector<int> chosen;       // indices into the set family
    std::int64_t cardinality = 0;  // == chosen.size()
    std::int64_t lower_bound = 0;
    bool exact = false;
};

namespace detail {

class BitMask {
public:
    explicit BitMask(std::size_t n = 0) : n_(n), w_((n + 63) / 64, 0) {}
    void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    std::size_t size() const { return n_; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    BitMask& operator|=(const BitMask& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    bool covers_all() const {
        for (std::size_t i = 0; i + 1 < w_.size(); ++i)
            if (~w_[i] != 0) return false;
        if (w_.empty()) return true;
        std::size_t rem = n_ & 63;
        std::uint64_t last = w_.back();
        std::uint64_t full = rem == 0 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rem) - 1);
        return (last & full) == full;
    }
    bool subset_of(const BitMask& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    std::size_t count_new(const BitMask& covered) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < w_.size(); ++i)
            c += static_cast<std::size_t>(__builtin_popcountll(w_[i] & ~covered.w_[i]));
        return c;
    }

private:
    std::size_t n_;
    std::vector<std::uint64_t> w_;
};

struct CoverSearch {
    const std::vector<BitMask>& sets;
    std::size_t n_items;
    std::vector<std::vector<int>> covering;  // per item: which sets cover it
    std::vector<int> best;
    std::uint64_t nodes = 0;
    std::uint64_t node_budget;

    CoverSearch(const std::vector<BitMask>& s, std::size_t n, std::uint64_t budget)
        : sets(s), n_items(n), node_budget(budget) {
        covering.resize(n_items);
        for (std::size_t k = 0; k < sets.size(); ++k)
            for (std::size_t i = 0; i < n_items; ++i)
                if (sets[k].test(i)) covering[i].push_back(static_cast<int>(k));
    }

    bool dfs(BitMask& covered, std::vector<int>& chosen) {
        if (++nodes > node_budget) throw budget_error("set-cover branch-and-bound budget exceeded");
        if (covered.covers_all()) {
            best = chosen;
            return true;
        }
        if (chosen.size() + 1 >= best.size() && !best.empty()) return false;
        // branch on the uncovered item with the fewest candidate sets
        std::size_t pick = n_items;
        std::size_t pick_deg = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < n_items; ++i) {
            if (covered.test(i)) continue;
            std::size_t deg = 0;
            for (int k : covering[i])
                if (sets[k].count_new(covered) > 0) ++deg;
            if (deg == 0) return false;  // uncoverable
            if (deg < pick_deg) {
                pick_deg = deg;
                pick = i;
            }
        }
        if (pick == n_items) return false;
        // order candidates by coverage gain, descending; index tiebreak
        std::vector<std::pair<std::size_t, int>> cands;
        for (int k : covering[pick]) {
            auto gain = sets[k].count_new(covered);
            if (gain > 0) cands.emplace_back(gain, k);
        }
        std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        bool improved = false;
        for (auto& [gain, k] : cands) {
            if (!best.empty() && chosen.size() + 1 >= best.size()) break;
            BitMask next = covered;
            next |= sets[k];
            chosen.push_back(k);
            improved |= dfs(next, chosen);
            chosen.pop_back();
        }
        return improved;
    }
};

inline std::vector<int> greedy_cover(const std::vector<BitMask>& sets, std::size_t n_items) {
    BitMask covered(n_items);
    std::vector<int> chosen;
    while (!covered.covers_all()) {
        std::size_t best_gain = 0;
        int best_k = -1;
        for (std::size_t k = 0; k < sets.size(); ++k) {
            auto gain = sets[k].count_new(covered);
            if (gain > best_gain) {
                best_gain = gain;
                best_k = static_cast<int>(k);
            }
        }
        if (best_k < 0) throw infeasible_error("greedy set cover: uncoverable item");
        covered |= sets[best_k];
        chosen.push_back(best_k);
    }
    return chosen;
}

/// Maximal family of items no two of which share a covering set: a valid
/// lower bound for the cover cardinality.
inline std::int64_t independent_items_bound(const std::vector<BitMask>& sets, std::size_t n_items) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n_items; ++i) {
        bool indep = true;
        for (std::size_t k = 0; k < sets.size() && indep; ++k) {
            if (!sets[k].test(i)) continue;
            for (std::size_t j : kept)
                if (sets[k].test(j)) {
                    indep = false;
                    break;
                }
        }
        if (indep) {
            bool coverable = false;
            for (std::size_t k = 0; k < sets.size(); ++k)
                if (sets[k].test(i)) {
                    coverable = true;
                    break;
                }
            if (coverable) kept.push_back(i);
        }
    }
    return static_cast<std::int64_t>(kept.size());
}

} // namespace detail

struct SetCoverOptions {
    int exact_threshold = 25;              // B&B when family size <= this
    std::uint64_t node_budget = 20'000'000;
};

/// Minimal cover of {0,...,n_items-1} by the given item sets.
inline CellCoverResult minimal_cell_cover(const std::vector<std::vector<std::int64_t>>& sets,
                                          std::int64_t n_items_in,
                                          const SetCoverOptions& opt = {}) {
    const auto n_items = static_cast<std::size_t>(n_items_in);
    CellCoverResult res;
    if (n_items == 0) {
        res.exact = true;
        return res;
    }

    // contiguous-range fast path: optimal interval sweep over items
    bool all_ranges = true;
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges(sets.size());
    for (std::size_t k = 0; k < sets.size() && all_ranges; ++k) {
        if (sets[k].empty()) {
            ranges[k] = {1, 0};
            continue;
        }
        std::int64_t lo = sets[k].front(), hi = sets[k].back();
        all_ranges = (hi - lo + 1) == static_cast<std::int64_t>(sets[k].size()) &&
                     std::is_sorted(sets[k].begin(), sets[k].end());
        ranges[k] = {lo, hi};
    }
    if (all_ranges) {
        std::int64_t cursor = 0;
        std::vector<int> chosen;
        while (cursor < n_items_in) {
            std::int64_t best_hi = -1;
            int best_k = -1;
            for (std::size_t k = 0; k < sets.size(); ++k) {
                if (ranges[k].first <= cursor && cursor <= ranges[k].second &&
                    ranges[k].second > best_hi) {
                    best_hi = ranges[k].second;
                    best_k = static_cast<int>(k);
                }
            }
            if (best_k < 0) throw infeasible_error("minimal_cell_cover: item not coverable");
            chosen.push_back(best_k);
            cursor = best_hi + 1;
        }
        res.chosen = std::move(chosen);
        res.cardinality = static_cast<std::int64_t>(res.chosen.size());
        // each sweep cursor item is in no set together with the next cursor item
        res.lower_bound = res.cardinality;
        res.exact = true;
        return res;
    }

    std::vector<detail::BitMask> masks;
    masks.reserve(sets.size());
    for (auto& s : sets) {
        detail::BitMask m(n_items);
        for (auto i : s) m.set(static_cast<std::size_t>(i));
        masks.push_back(std::move(m));
    }

    auto greedy = detail::greedy_cover(masks, n_items);
    std::int64_t lb = detail::independent_items_bound(masks, n_items);

    if (static_cast<int>(sets.size()) <= opt.exact_threshold) {
        // drop dominated sets first (keep the lower index among equals)
        std::vector<int> alive;
        for (std::size_t k = 0; k < masks.size(); ++k) {
            bool dominated = false;
            for (std::size_t j = 0; j < masks.size() && !dominated; ++j) {
                if (j == k) continue;
                if (masks[k].subset_of(masks[j]) &&
                    (!masks[j].subset_of(masks[k]) || j < k))
                    dominated = true;
            }
            if (!dominated) alive.push_back(static_cast<int>(k));
        }
        std::vector<detail::BitMask> sub;
        sub.reserve(alive.size());
        for (int k : alive) sub.push_back(masks[k]);
        detail::CoverSearch search(sub, n_items, opt.node_budget);
        detail::BitMask covered(n_items);
        std::vector<int> chosen;
        search.dfs(covered, chosen);
        if (search.best.empty()) throw infeasible_error("set cover: no feasible cover found");
        res.chosen.clear();
        for (int k : search.best) res.chosen.push_back(alive[k]);
        res.cardinality = static_cast<std::int64_t>(res.chosen.size());
        res.lower_bound = res.cardinality;
        res.exact = true;
        return res;
    }

    res.chosen = std::move(greedy);
    res.cardinality = static_cast<std::int64_t>(res.chosen.size());
    res.lower_bound = lb;
    res.exact = (lb == res.cardinality);
    return res;
}

// ---------------------------------------------------------------------------
// Minimal subcover of an open box cover.

struct SubcoverResult {
    OpenCover subcover;
    std::vector<int> indices;      // into the original element list
    std::int64_t cardinality = 0;  // N(alpha | target) when exact
    std::int64_t lower_bound = 0;
    bool exact = false;
};

namespace detail {

/// 1-D continuum sweep: optimal subcover of the closed runs of the target by
/// open intervals, with a matching independent-point lower bound.
inline SubcoverResult subcover_sweep_1d(const OpenCover& cover) {
    SubcoverResult out;
    std::vector<int> chosen;
    std::int64_t stalls = 0;
    for (auto [c0, c1] : cover.target.runs_1d()) {
        double p = cover.target.grid.cell_box(c0).lo[0];
        double hi = cover.target.grid.cell_box(c1).hi[0];
        while (true) {
            double best_b = -std::numeric_limits<double>::infinity();
            int best_k = -1;
            for (std::size_t k = 0; k < cover.elements.size(); ++k) {
                const Box& e = cover.elements[k];
                if (e.lo[0] < p && p < e.hi[0] && e.hi[0] > best_b) {
                    best_b = e.hi[0];
                    best_k = static_cast<int>(k);
                }
            }
            if (best_k < 0) throw infeasible_error("subcover: target point uncovered");
            chosen.push_back(best_k);
            ++stalls;
            if (best_b > hi) break;
            p = best_b;
        }
    }
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    out.indices = chosen;
    std::vector<Box> elems;
    for (int k : chosen) elems.push_back(cover.elements[k]);
    out.subcover = OpenCover(std::move(elems), cover.target);
    out.cardinality = static_cast<std::int64_t>(chosen.size());
    out.lower_bound = stalls;
    // dedup can only shrink; stall points certify optimality when they agree
    out.exact = (out.lower_bound == out.cardinality);
    return out;
}

/// Arrangement atoms of the target region against the element boundaries.
/// Each atom is a product of point- and open-interval slabs; an element covers
/// an atom iff it covers it entirely, so covering all atoms == covering the
/// continuum region.
struct AtomUniverse {
    std::vector<std::vector<std::int64_t>> element_atoms;  // per element, sorted atom ids
    std::int64_t n_atoms = 0;
};

inline AtomUniverse build_atoms(const OpenCover& cover) {
    const Grid& g = cover.target.grid;
    const int n = g.dim();
    // per-axis sorted values: element bounds clipped to the target hull,
    // plus all cell boundaries of the grid (so atoms refine cells)
    std::vector<std::vector<double>> vals(n);
    Box hull = cover.target.hull();
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k <= g.resolution[i]; ++k) {
            double v = (k == g.resolution[i]) ? g.domain.hi[i] : g.domain.lo[i] + k * g.cell_width(i);
            if (v >= hull.lo[i] && v <= hull.hi[i]) vals[i].push_back(v);
        }
        for (const Box& e : cover.elements) {
            for (double v : {e.lo[i], e.hi[i]})
                if (v > hull.lo[i] && v < hull.hi[i]) vals[i].push_back(v);
        }
        std::sort(vals[i].begin(), vals[i].end());
        vals[i].erase(std::unique(vals[i].begin(), vals[i].end()), vals[i].end());
    }
    // slabs along axis i: [v0,v0], (v0,v1), [v1,v1], ...
    std::vector<std::int64_t> slab_count(n);
    for (int i = 0; i < n; ++i) slab_count[i] = 2 * static_cast<std::int64_t>(vals[i].size()) - 1;

    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) total *= slab_count[i];
    if (total > 4'000'000) throw budget_error("subcover atom universe too large");

    auto slab_bounds = [&](int axis, std::int64_t s, double& a, double& b, bool& point) {
        if (s % 2 == 0) {
            a = b = vals[axis][static_cast<std::size_t>(s / 2)];
            point = true;
        } else {
            a = vals[axis][static_cast<std::size_t>(s / 2)];
            b = vals[axis][static_cast<std::size_t>(s / 2 + 1)];
            point = false;
        }
    };

    // enumerate atoms, keep those inside the target region
    AtomUniverse uni;
    uni.element_atoms.resize(cover.elements.size());
    std::vector<std::int64_t> slab(n, 0);
    std::vector<std::int64_t> atom_ids;
    std::int64_t next_id = 0;
    while (true) {
        // midpoint of the atom locates its containing cell(s)
        Vec mid(n);
        bool in_target = true;
        for (int i = 0; i < n; ++i) {
            double a, b;
            bool point;
            slab_bounds(i, slab[i], a, b, point);
            mid[i] = point ? a : 0.5 * (a + b);
        }
        // a point-slab midpoint on a cell boundary belongs to the target if
        // any adjacent cell does; cell_of's tie-break picks one, so nudge both ways
        bool member = false;
        {
            std::vector<int> idx(n);
            bool ok = true;
            for (int i = 0; i < n; ++i) {
                if (mid[i] < g.domain.lo[i] || mid[i] > g.domain.hi[i]) {
                    ok = false;
                    break;
                }
                idx[i] = g.axis_index(i, mid[i]);
            }
            if (ok) {
                // enumerate neighbor combinations for boundary-sitting axes
                std::vector<std::vector<int>> cand(n);
                for (int i = 0; i < n; ++i) {
                    cand[i].push_back(idx[i]);
                    double a, b;
                    bool point;
                    slab_bounds(i, slab[i], a, b, point);
                    if (point && idx[i] > 0) {
                        double boundary = g.domain.lo[i] + idx[i] * g.cell_width(i);
                        if (a == boundary) cand[i].push_back(idx[i] - 1);
                    }
                }
                std::vector<int> pickv(n, 0);
                while (true) {
                    std::vector<int> cidx(n);
                    for (int i = 0; i < n; ++i) cidx[i] = cand[i][pickv[i]];
                    if (cover.target.contains_cell(g.flatten(cidx))) {
                        member = true;
                        break;
                    }
                    int ax = n - 1;
                    while (ax >= 0 && ++pickv[ax] >= static_cast<int>(cand[ax].size())) {
                        pickv[ax] = 0;
                        --ax;
                    }
                    if (ax < 0) break;
                }
            }
            in_target = member;
        }
        if (in_target) {
            std::int64_t id = next_id++;
            for (std::size_t k = 0; k < cover.elements.size(); ++k) {
                const Box& e = cover.elements[k];
                bool covers = true;
                for (int i = 0; i < n && covers; ++i) {
                    double a, b;
                    bool point;
                    slab_bounds(i, slab[i], a, b, point);
                    covers = point ? (e.lo[i] < a && a < e.hi[i]) : (e.lo[i] <= a && b <= e.hi[i]);
                }
                if (covers) uni.element_atoms[k].push_back(id);
            }
        }
        int ax = n - 1;
        while (ax >= 0 && ++slab[ax] >= slab_count[ax]) {
            slab[ax] = 0;
            --ax;
        }
        if (ax < 0) break;
    }
    uni.n_atoms = next_id;
    return uni;
}

} // namespace detail

struct SubcoverOptions {
    int exact_threshold = 25;
    std::uint64_t node_budget = 20'000'000;
};

/// Minimal subcover of the target region. Exact when provable (1-D sweep,
/// completed branch-and-bound, or matching bounds); greedy upper bound with a
/// reported combinatorial lower bound otherwise.
inline SubcoverResult minimal_subcover(const OpenCover& cover, const SubcoverOptions& opt = {}) {
    if (!is_cover(cover)) throw infeasible_error("minimal_subcover: input is not a cover of the target");

    if (cover.target.grid.dim() == 1) return detail::subcover_sweep_1d(cover);

    if (static_cast<int>(cover.elements.size()) <= opt.exact_threshold) {
        auto uni = detail::build_atoms(cover);
        SetCoverOptions sopt;
        sopt.exact_threshold = opt.exact_threshold;
        sopt.node_budget = opt.node_budget;
        auto cc = minimal_cell_cover(uni.element_atoms, uni.n_atoms, sopt);
        SubcoverResult out;
        out.indices = cc.chosen;
        std::sort(out.indices.begin(), out.indices.end());
        std::vector<Box> elems;
        for (int k : out.indices) elems.push_back(cover.elements[k]);
        out.subcover = OpenCover(std::move(elems), cover.target);
        out.cardinality = cc.cardinality;
        out.lower_bound = cc.lower_bound;
        out.exact = cc.exact;
        return out;
    }

    // large families: greedy over cells that single elements contain, plus
    // union-coverage augmentation for any cells left over
    const Grid& g = cover.target.grid;
    std::vector<std::vector<std::int64_t>> covered_cells(cover.elements.size());
    std::vector<std::int64_t> compact(cover.target.cells.size());
    for (std::size_t i = 0; i < cover.target.cells.size(); ++i) compact[i] = cover.target.cells[i];
    for (std::size_t k = 0; k < cover.elements.size(); ++k) {
        const Box& e = cover.elements[k];
        auto rng = g.index_range(e.closure());
        if (!rng) continue;
        for (std::size_t i = 0; i < compact.size(); ++i) {
            if (closed_in_open(g.cell_box(compact[i]), e))
                covered_cells[k].push_back(static_cast<std::int64_t>(i));
        }
    }
    CellCoverResult cc;
    bool greedy_ok = true;
    try {
        SetCoverOptions sopt;
        sopt.exact_threshold = 0;  // force greedy route
        cc = minimal_cell_cover(covered_cells, static_cast<std::int64_t>(compact.size()), sopt);
    } catch (const infeasible_error&) {
        greedy_ok = false;
    }
    std::vector<int> chosen = cc.chosen;
    if (!greedy_ok) {
        // some cells are covered only jointly: add elements until union covers
        chosen.clear();
        std::vector<Box> acc;
        for (std::size_t k = 0; k < cover.elements.size(); ++k) {
            bool all = true;
            for (std::int64_t c : cover.target.cells)
                if (!covered_by_union(g.cell_box(c), acc)) {
                    all = false;
                    break;
                }
            if (all) break;
            chosen.push_back(static_cast<int>(k));
            acc.push_back(cover.elements[k]);
        }
    }
    SubcoverResult out;
    out.indices = chosen;
    std::sort(out.indices.begin(), out.indices.end());
    out.indices.erase(std::unique(out.indices.begin(), out.indices.end()), out.indices.end());
    std::vector<Box> elems;
    for (int k : out.indices) elems.push_back(cover.elements[k]);
    out.subcover = OpenCover(std::move(elems), cover.target);
    out.cardinality = static_cast<std::int64_t>(out.indices.size());
    out.lower_bound = greedy_ok ? cc.lower_bound : 1;
    out.exact = greedy_ok && (out.lower_bound == out.cardinality);
    return out;
}

// ---------------------------------------------------------------------------
// Pullback (outer preimage on a grid)

/// Outer grid approximation of the preimage of `target` under a map given by
/// its per-cell image over-approximation. A cell is kept whenever any piece of
/// its image bound meets the target, so the result is a guaranteed superset of
/// the true preimage intersected with the grid domain.
template <typename ImageFn>
inline GridRegion pullback_region(ImageFn&& image_of_box, const Grid& grid, const Box& target) {
    std::vector<std::int64_t> cells;
    const std::int64_t n = grid.cell_count();
    for (std::int64_t c = 0; c < n; ++c) {
        std::vector<Box> pieces = image_of_box(grid.cell_box(c));
        for (const Box& p : pieces) {
            if (p.overlaps(target.closure())) {
                cells.push_back(c);
                break;
            }
        }
    }
    GridRegion r;
    r.grid = grid;
    r.cells = std::move(cells);
    return r;
}

template <typename ImageFn>
inline GridRegion pullback_region(ImageFn&& image_of_box, const Grid& grid,
                                  const GridRegion& target) {
    std::vector<std::int64_t> cells;
    const std::int64_t n = grid.cell_count();
    for (std::int64_t c = 0; c < n; ++c) {
        std::vector<Box> pieces = image_of_box(grid.cell_box(c));
        bool hit = false;
        for (const Box& p : pieces) {
            auto rng = target.grid.index_range(p.closure());
            if (!rng) continue;
            // scan the index hyper-rectangle for a member cell
            std::vector<int> idx = rng->first;
            while (true) {
                if (target.contains_cell(target.grid.flatten(idx))) {
                    hit = true;
                    break;
                }
                int ax = target.grid.dim() - 1;
                while (ax >= 0 && ++idx[ax] > rng->second[ax]) {
                    idx[ax] = rng->first[ax];
                    --ax;
                }
                if (ax < 0) break;
            }
            if (hit) break;
        }
        if (hit) cells.push_back(c);
    }
    GridRegion r;
    r.grid = grid;
    r.cells = std::move(cells);
    return r;
}

} // namespace fbent::geom
