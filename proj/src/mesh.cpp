#include "dgheat/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace dgheat {

Element Mesh1D::make_element(const CellKey& key) const {
    // ldexp keeps the dyadic fractions exact, so shared nodes of neighboring
    // leaves at different levels agree bitwise.
    const double w = (b_ - a_) / n_root_;
    const double frac0 = std::ldexp(static_cast<double>(key.path), -key.level);
    const double frac1 = std::ldexp(static_cast<double>(key.path + 1), -key.level);
    Element e;
    e.key = key;
    e.xl = a_ + (key.root + frac0) * w;
    e.xr = a_ + (key.root + frac1) * w;
    return e;
}

Mesh1D Mesh1D::uniform(double a, double b, int n_root, int levels) {
    if (!(b > a)) throw std::invalid_argument("mesh domain must satisfy a < b");
    if (n_root < 1) throw std::invalid_argument("root partition must be non-empty");
    Mesh1D m;
    m.a_ = a;
    m.b_ = b;
    m.n_root_ = n_root;
    const std::uint64_t per_root = std::uint64_t{1} << levels;
    m.leaves_.reserve(n_root * per_root);
    for (int r = 0; r < n_root; ++r)
        for (std::uint64_t p = 0; p < per_root; ++p)
            m.leaves_.push_back(m.make_element({r, levels, p}));
    return m;
}

std::size_t Mesh1D::locate(double x) const {
    if (x < a_ || x > b_) throw std::out_of_range("point outside mesh domain");
    // Rightmost leaf with xl <= x; an interior node belongs to its right element.
    auto it = std::upper_bound(leaves_.begin(), leaves_.end(), x,
                               [](double v, const Element& e) { return v < e.xl; });
    std::size_t i = static_cast<std::size_t>(it - leaves_.begin());
    if (i > 0) --i;
    return i;
}

void Mesh1D::rebuild_from_keys(std::vector<CellKey>& keys) {
    // Spatial order: by root cell, then by the dyadic offset of the path
    // (ldexp is exact here, so the comparison is too).
    std::sort(keys.begin(), keys.end(), [](const CellKey& a, const CellKey& b) {
        if (a.root != b.root) return a.root < b.root;
        return std::ldexp(static_cast<double>(a.path), -a.level) <
               std::ldexp(static_cast<double>(b.path), -b.level);
    });
    leaves_.clear();
    leaves_.reserve(keys.size());
    for (const auto& k : keys) leaves_.push_back(make_element(k));
}

void Mesh1D::enforce_grading() {
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<CellKey> keys;
        keys.reserve(leaves_.size() + 8);
        for (std::size_t i = 0; i < leaves_.size(); ++i) {
            const auto& e = leaves_[i];
            int lnb = (i > 0) ? leaves_[i - 1].key.level : e.key.level;
            int rnb = (i + 1 < leaves_.size()) ? leaves_[i + 1].key.level : e.key.level;
            if (std::max(lnb, rnb) - e.key.level > max_level_gap) {
                keys.push_back(e.key.child(0));
                keys.push_back(e.key.child(1));
                changed = true;
            } else {
                keys.push_back(e.key);
            }
        }
        if (changed) rebuild_from_keys(keys);
    }
}

Mesh1D Mesh1D::apply(const MeshDelta& delta) const {
    for (auto id : delta.refine)
        if (delta.coarsen.count(id))
            throw std::invalid_argument("element requested for both refinement and coarsening");

    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < leaves_.size(); ++i) index[leaves_[i].key.packed()] = i;
    for (auto id : delta.refine)
        if (!index.count(id)) throw std::invalid_argument("stale refine request: unknown element");
    for (auto id : delta.coarsen)
        if (!index.count(id)) throw std::invalid_argument("stale coarsen request: unknown element");

    std::vector<CellKey> keys;
    keys.reserve(leaves_.size() + 2 * delta.refine.size());
    for (const auto& e : leaves_) {
        if (delta.refine.count(e.key.packed())) {
            keys.push_back(e.key.child(0));
            keys.push_back(e.key.child(1));
        } else {
            keys.push_back(e.key);
        }
    }

    Mesh1D out;
    out.a_ = a_;
    out.b_ = b_;
    out.n_root_ = n_root_;
    out.rebuild_from_keys(keys);
    out.enforce_grading();

    // Coarsening pass: merge sibling pairs that were both requested, survived
    // the refinement stage, and do not break the level grading.
    if (!delta.coarsen.empty()) {
        std::vector<CellKey> merged;
        merged.reserve(out.leaves_.size());
        const auto& ls = out.leaves_;
        for (std::size_t i = 0; i < ls.size();) {
            bool can_merge = false;
            if (i + 1 < ls.size()) {
                const CellKey &k0 = ls[i].key, &k1 = ls[i + 1].key;
                can_merge = k0.level > 0 && k0.level == k1.level && k0.root == k1.root &&
                            k0.path % 2 == 0 && k1.path == k0.path + 1 &&
                            delta.coarsen.count(k0.packed()) &&
                            delta.coarsen.count(k1.packed()) &&
                            !delta.refine.count(k0.packed()) &&
                            !delta.refine.count(k1.packed());
                if (can_merge) {
                    const int parent_level = k0.level - 1;
                    int lnb = merged.empty() ? parent_level : merged.back().level;
                    int rnb = (i + 2 < ls.size()) ? ls[i + 2].key.level : parent_level;
                    if (std::max(lnb, rnb) - parent_level > max_level_gap)
                        can_merge = false;
                }
            }
            if (can_merge) {
                merged.push_back(ls[i].key.parent());
                i += 2;
            } else {
                merged.push_back(ls[i].key);
                i += 1;
            }
        }
        out.rebuild_from_keys(merged);
    }
    return out;
}

bool Mesh1D::is_split_below(const CellKey& key) const {
    const Element probe = make_element(key);
    const std::size_t i = locate(0.5 * (probe.xl + probe.xr));
    return leaves_[i].key.level > key.level;
}

Mesh1D Mesh1D::common_refinement(std::span<const Mesh1D* const> meshes) {
    if (meshes.empty()) throw std::invalid_argument("common refinement of nothing");
    const Mesh1D& first = *meshes.front();
    for (const Mesh1D* m : meshes)
        if (m->a_ != first.a_ || m->b_ != first.b_ || m->n_root_ != first.n_root_)
            throw std::invalid_argument("common refinement requires identical domains");

    Mesh1D out;
    out.a_ = first.a_;
    out.b_ = first.b_;
    out.n_root_ = first.n_root_;

    // A cell is split in the union iff it is split in any input; descend until
    // no input splits, so the result is the coarsest mesh refining them all.
    std::vector<CellKey> keys;
    std::vector<CellKey> stack;
    for (int r = first.n_root_ - 1; r >= 0; --r) stack.push_back({r, 0, 0});
    while (!stack.empty()) {
        CellKey key = stack.back();
        stack.pop_back();
        bool split = false;
        for (const Mesh1D* m : meshes)
            if (m->is_split_below(key)) { split = true; break; }
        if (split) {
            stack.push_back(key.child(1));
            stack.push_back(key.child(0));
        } else {
            keys.push_back(key);
        }
    }
    out.rebuild_from_keys(keys);
    return out;
}

Mesh1D Mesh1D::common_refinement(const Mesh1D& m1, const Mesh1D& m2) {
    const Mesh1D* ms[] = {&m1, &m2};
    return common_refinement(std::span<const Mesh1D* const>(ms));
}

Mesh1D Mesh1D::common_refinement(const Mesh1D& m1, const Mesh1D& m2, const Mesh1D& m3) {
    const Mesh1D* ms[] = {&m1, &m2, &m3};
    return common_refinement(std::span<const Mesh1D* const>(ms));
}

bool Mesh1D::refines(const Mesh1D& coarser) const {
    for (const auto& e : leaves_) {
        const auto& c = coarser.leaves_[coarser.locate(e.mid())];
        if (e.xl < c.xl || e.xr > c.xr) return false;
    }
    return true;
}

int Mesh1D::max_level() const {
    int v = 0;
    for (const auto& e : leaves_) v = std::max(v, e.key.level);
    return v;
}

int Mesh1D::min_level() const {
    int v = leaves_.empty() ? 0 : leaves_.front().key.level;
    for (const auto& e : leaves_) v = std::min(v, e.key.level);
    return v;
}

double Mesh1D::min_h() const {
    double v = b_ - a_;
    for (const auto& e : leaves_) v = std::min(v, e.h());
    return v;
}

void Mesh1D::write(std::ostream& os) const {
    char buf[96];
    for (const auto& e : leaves_) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", e.xl, e.xr, e.key.level);
        os << buf;
    }
}

bool Mesh1D::operator==(const Mesh1D& other) const {
    if (a_ != other.a_ || b_ != other.b_ || n_root_ != other.n_root_ ||
        leaves_.size() != other.leaves_.size())
        return false;
    for (std::size_t i = 0; i < leaves_.size(); ++i)
        if (!(leaves_[i].key == other.leaves_[i].key)) return false;
    return true;
}

} // namespace dgheat
