#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace ptb {

// lattice vector, column (q, p)
struct Vec2 {
    long long q = 0;
    long long p = 0;
    Vec2 operator+(const Vec2& o) const { return {q + o.q, p + o.p}; }
    Vec2 operator-(const Vec2& o) const { return {q - o.q, p - o.p}; }
    Vec2 operator-() const { return {-q, -p}; }
    Vec2 operator*(long long s) const { return {q * s, p * s}; }
    bool operator==(const Vec2&) const = default;
};

inline long long det(const Vec2& a, const Vec2& b) { return a.q * b.p - a.p * b.q; }

struct Mat2 {
    long long a = 1, b = 0, c = 0, d = 1;
    Mat2 operator*(const Mat2& o) const;
    Vec2 operator*(const Vec2& v) const { return {a * v.q + b * v.p, c * v.q + d * v.p}; }
    long long trace() const { return a + d; }
    long long determinant() const { return a * d - b * c; }
    Mat2 inverse() const; // determinant 1 only
    Vec2 col0() const { return {a, c}; }
    Vec2 col1() const { return {b, d}; }
    bool operator==(const Mat2&) const = default;
};

Mat2 generator(char letter);
Mat2 power(const Mat2& m, long long k);

// primitive slope, sign normalised: q > 0, or (0, 1)
struct Slope {
    long long q = 0;
    long long p = 1;
    static Slope of(const Vec2& v);
    bool operator==(const Slope&) const = default;
    auto operator<=>(const Slope&) const = default;
    std::string str() const;
};

struct MonodromyWord {
    std::string letters;
    int period() const { return static_cast<int>(letters.size()); }
    char at(long long i) const;
    bool operator==(const MonodromyWord&) const = default;
};

MonodromyWord parse_word(std::string_view text);
std::string canonical_rotation(const std::string& letters);
Mat2 monodromy_matrix(const MonodromyWord& word);
Mat2 monodromy_matrix(std::string_view letters);

// M_k = phi_1 ... phi_k, extended to all integers by M_{k+N} = phi M_k
Mat2 partial_product(const MonodromyWord& word, long long k);

struct Fan {
    char letter = 'L';
    int first = 0; // word index of the first letter of the run
    int ntri = 1;  // run length
    int lower_hinge() const { return first - 1; }
    int upper_hinge() const { return first + ntri - 1; }
};

enum class Side { Left, Right };

struct FareyStrip {
    MonodromyWord word;
    Mat2 phi;
    // T_j = (c_j, d_j, c_j + d_j) for j = 0..N-1, columns of M_j
    std::vector<std::array<Vec2, 3>> triangles;
    std::vector<Fan> fans;
    std::vector<int> fan_boundaries;
    std::vector<int> fan_lengths;

    int period() const { return word.period(); }
    int fan_count() const { return static_cast<int>(fans.size()); }
    const Fan& fan(int i) const;
    std::array<Vec2, 3> triangle(long long j) const;
    Vec2 pivot(int fan) const;
    Side pivot_side(int fan) const { return fans[fan].letter == 'L' ? Side::Left : Side::Right; }
    // interior vertices on the far side of fan i, bottom to top (ntri - 1 of them)
    std::vector<Vec2> side_interior(int fan) const;
    int fan_of_letter(long long j) const;
};

FareyStrip build_farey_strip(const MonodromyWord& word);

enum class SectionType { LL, RR, RL, LR };
const char* section_name(SectionType t);

struct Section {
    SectionType type = SectionType::LL;
    int fan = 0;        // outer fan for LL/RR, lower fan for RL/LR
    int fan_length = 1; // run length of that fan
    int span = 0;       // letters since the previous section's anchor; spans sum to the period
    int hinge = 0;      // anchor tet: upper hinge of `fan`
};

struct EdgePath {
    std::vector<int> labels;          // per fan: 1 = pivot visited, 0 = outer
    std::vector<Vec2> vertices;       // one period, lifted; vertex n is phi * vertices[0]
    std::vector<Side> vertex_side;
    std::vector<int> vertex_fan;      // fan owning the vertex (pivot or far side)
    std::vector<bool> crossing_flags; // per edge vertices[i] -> vertices[i+1]
    std::vector<Section> sections;

    int edge_count() const { return static_cast<int>(vertices.size()); }
    Vec2 vertex(long long i) const; // cyclic with phi shifts
    Mat2 phi;
};

bool valid_labels(const FareyStrip& strip, const std::vector<int>& labels);
EdgePath make_path(const FareyStrip& strip, const std::vector<int>& labels);
std::vector<EdgePath> enumerate_minimal_paths(const FareyStrip& strip);
std::vector<Section> decompose_sections(const FareyStrip& strip, const std::vector<int>& labels);
bool is_minimal(const EdgePath& path);

struct TightSubpath {
    int start = 0;  // first vertex index
    int length = 0; // number of vertices
    std::vector<int> lr_sections;
};

struct SemiFiberInfo {
    bool semi_fiber = false;
    std::vector<bool> vertex_tight;
    std::vector<TightSubpath> tight_subpaths; // maximal runs containing an LR section
};

SemiFiberInfo classify_semi_fiber(const FareyStrip& strip, const EdgePath& path);

} // namespace ptb
