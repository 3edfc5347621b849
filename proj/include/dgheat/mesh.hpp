#ifndef DGHEAT_MESH_HPP
#define DGHEAT_MESH_HPP

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <vector>

namespace dgheat {

// Stable key of a cell in the bisection hierarchy: root cell index, depth
// below the root, and the binary path at that depth.
struct CellKey {
    int root = 0;
    int level = 0;
    std::uint64_t path = 0;

    std::uint64_t packed() const {
        return (static_cast<std::uint64_t>(root) << 54) |
               (static_cast<std::uint64_t>(level) << 48) | path;
    }
    static CellKey unpack(std::uint64_t v) {
        return {static_cast<int>(v >> 54), static_cast<int>((v >> 48) & 0x3f),
                v & ((std::uint64_t{1} << 48) - 1)};
    }
    CellKey child(int side) const { return {root, level + 1, 2 * path + side}; }
    CellKey parent() const { return {root, level - 1, path / 2}; }
    bool operator==(const CellKey&) const = default;
    auto operator<=>(const CellKey&) const = default;
};

struct Element {
    double xl = 0.0;
    double xr = 0.0;
    CellKey key;

    double h() const { return xr - xl; }
    double mid() const { return 0.5 * (xl + xr); }
};

// Refine/coarsen request against a specific mesh. Coarsening is honored only
// when both siblings are requested and neither is scheduled for refinement.
struct MeshDelta {
    std::set<std::uint64_t> refine;
    std::set<std::uint64_t> coarsen;

    bool empty() const { return refine.empty() && coarsen.empty(); }
};

// Hierarchical 1D mesh: nested binary bisections of a uniform root partition.
// Immutable; refinement returns a new mesh. Adjacent leaves never differ by
// more than max_level_gap levels (enforced by refinement closure).
class Mesh1D {
  public:
    static constexpr int max_level_gap = 2;

    Mesh1D() = default;
    static Mesh1D uniform(double a, double b, int n_root, int levels = 0);

    double a() const { return a_; }
    double b() const { return b_; }
    int n_root() const { return n_root_; }
    std::size_t size() const { return leaves_.size(); }
    const std::vector<Element>& leaves() const { return leaves_; }
    const Element& leaf(std::size_t i) const { return leaves_[i]; }

    // Leaf containing x; ties at interior nodes resolve to the right element.
    std::size_t locate(double x) const;

    Mesh1D apply(const MeshDelta& delta) const;

    // Coarsest common refinement of the given meshes (same domain and root
    // partition required).
    static Mesh1D common_refinement(std::span<const Mesh1D* const> meshes);
    static Mesh1D common_refinement(const Mesh1D& m1, const Mesh1D& m2);
    static Mesh1D common_refinement(const Mesh1D& m1, const Mesh1D& m2,
                                    const Mesh1D& m3);

    // True when every leaf of this mesh is contained in a leaf of the other.
    bool refines(const Mesh1D& coarser) const;

    int max_level() const;
    int min_level() const;
    double min_h() const;

    // One "x_left x_right level" line per leaf.
    void write(std::ostream& os) const;

    bool operator==(const Mesh1D& other) const;

  private:
    double a_ = 0.0;
    double b_ = 1.0;
    int n_root_ = 0;
    std::vector<Element> leaves_; // sorted by xl, gap-free partition of (a,b)

    Element make_element(const CellKey& key) const;
    void rebuild_from_keys(std::vector<CellKey>& keys);
    void enforce_grading();
    bool is_split_below(const CellKey& key) const;
};

} // namespace dgheat

#endif
