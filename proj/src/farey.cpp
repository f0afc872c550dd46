#include "ptb/farey.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>

#include "ptb/errors.hpp"

namespace ptb {

Mat2 Mat2::operator*(const Mat2& o) const
{
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mat2 Mat2::inverse() const
{
    return {d, -b, -c, a};
}

Mat2 generator(char letter)
{
    if (letter == 'L')
        return {1, 1, 0, 1};
    if (letter == 'R')
        return {1, 0, 1, 1};
    throw Error(ErrorCode::InvalidCharacter, std::string("not a generator: ") + letter);
}

Mat2 power(const Mat2& m, long long k)
{
    Mat2 base = k >= 0 ? m : m.inverse();
    Mat2 out;
    for (long long i = 0; i < std::llabs(k); ++i)
        out = out * base;
    return out;
}

Slope Slope::of(const Vec2& v)
{
    long long g = std::gcd(std::llabs(v.q), std::llabs(v.p));
    if (g == 0)
        throw Error(ErrorCode::DegenerateValue, "zero vector has no slope");
    Slope s{v.q / g, v.p / g};
    if (s.q < 0 || (s.q == 0 && s.p < 0)) {
        s.q = -s.q;
        s.p = -s.p;
    }
    return s;
}

std::string Slope::str() const
{
    return std::to_string(p) + "/" + std::to_string(q);
}

char MonodromyWord::at(long long i) const
{
    long long n = period();
    return letters[static_cast<size_t>(((i % n) + n) % n)];
}

std::string canonical_rotation(const std::string& letters)
{
    std::string best = letters;
    for (size_t r = 1; r < letters.size(); ++r) {
        std::string rot = letters.substr(r) + letters.substr(0, r);
        if (rot < best)
            best = rot;
    }
    return best;
}

MonodromyWord parse_word(std::string_view text)
{
    std::string s;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch)))
            continue;
        char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (up != 'L' && up != 'R')
            throw Error(ErrorCode::InvalidCharacter, std::string("unexpected character '") + ch + "'");
        s.push_back(up);
    }
    if (s.empty())
        throw Error(ErrorCode::EmptyWord, "monodromy word is empty");
    if (s.find('L') == std::string::npos || s.find('R') == std::string::npos)
        throw Error(ErrorCode::NotHyperbolic,
                    "word " + s + " uses a single generator (|trace| = 2, not hyperbolic)");
    return MonodromyWord{canonical_rotation(s)};
}

Mat2 monodromy_matrix(std::string_view letters)
{
    Mat2 m;
    for (char ch : letters)
        m = m * generator(ch);
    return m;
}

Mat2 monodromy_matrix(const MonodromyWord& word)
{
    return monodromy_matrix(word.letters);
}

Mat2 partial_product(const MonodromyWord& word, long long k)
{
    long long n = word.period();
    long long q = k >= 0 ? k / n : -((-k + n - 1) / n);
    long long r = k - q * n;
    Mat2 m = power(monodromy_matrix(word), q);
    for (long long i = 0; i < r; ++i)
        m = m * generator(word.letters[static_cast<size_t>(i)]);
    return m;
}

const Fan& FareyStrip::fan(int i) const
{
    int f = fan_count();
    return fans[static_cast<size_t>(((i % f) + f) % f)];
}

std::array<Vec2, 3> FareyStrip::triangle(long long j) const
{
    Mat2 m = partial_product(word, j);
    return {m.col0(), m.col1(), m.col0() + m.col1()};
}

Vec2 FareyStrip::pivot(int f) const
{
    const Fan& fn = fan(f);
    Mat2 m = partial_product(word, fn.first);
    return fn.letter == 'L' ? m.col0() : m.col1();
}

std::vector<Vec2> FareyStrip::side_interior(int f) const
{
    const Fan& fn = fan(f);
    std::vector<Vec2> out;
    for (int k = 1; k < fn.ntri; ++k) {
        Mat2 m = partial_product(word, fn.first + k);
        out.push_back(fn.letter == 'L' ? m.col1() : m.col0());
    }
    return out;
}

int FareyStrip::fan_of_letter(long long j) const
{
    long long n = period();
    for (int f = 0; f < fan_count(); ++f) {
        const Fan& fn = fans[static_cast<size_t>(f)];
        long long off = ((j - fn.first) % n + n) % n;
        if (off < fn.ntri)
            return f;
    }
    return -1;
}

FareyStrip build_farey_strip(const MonodromyWord& word)
{
    FareyStrip s;
    s.word = word;
    s.phi = monodromy_matrix(word);
    int n = word.period();
    for (int j = 0; j < n; ++j)
        s.triangles.push_back(s.triangle(j));

    int start = -1;
    for (int i = 0; i < n; ++i)
        if (word.at(i) != word.at(i - 1)) {
            start = i;
            break;
        }
    if (start < 0)
        throw Error(ErrorCode::NotHyperbolic, "word needs both letters");
    int i = start;
    while (i < start + n) {
        int j = i;
        while (j + 1 < start + n && word.at(j + 1) == word.at(i))
            ++j;
        s.fans.push_back(Fan{word.at(i), i, j - i + 1});
        s.fan_boundaries.push_back(i % n);
        s.fan_lengths.push_back(j - i + 1);
        i = j + 1;
    }
    return s;
}

const char* section_name(SectionType t)
{
    switch (t) {
    case SectionType::LL: return "LL";
    case SectionType::RR: return "RR";
    case SectionType::RL: return "RL";
    case SectionType::LR: return "LR";
    }
    return "?";
}

Vec2 EdgePath::vertex(long long i) const
{
    long long n = edge_count();
    long long q = i >= 0 ? i / n : -((-i + n - 1) / n);
    long long r = i - q * n;
    return power(phi, q) * vertices[static_cast<size_t>(r)];
}

bool valid_labels(const FareyStrip& strip, const std::vector<int>& labels)
{
    int f = strip.fan_count();
    if (static_cast<int>(labels.size()) != f)
        return false;
    for (int i = 0; i < f; ++i) {
        int prev = labels[static_cast<size_t>((i + f - 1) % f)];
        int next = labels[static_cast<size_t>((i + 1) % f)];
        int cur = labels[static_cast<size_t>(i)];
        if (!cur && !next)
            return false;
        // a pivot entered and left by crossings needs room to turn
        if (cur && prev && next && strip.fans[static_cast<size_t>(i)].ntri < 2)
            return false;
    }
    return true;
}

std::vector<Section> decompose_sections(const FareyStrip& strip, const std::vector<int>& labels)
{
    if (!valid_labels(strip, labels))
        throw Error(ErrorCode::MalformedPath, "fan labels do not describe a minimal path");
    int f = strip.fan_count();
    std::vector<Section> out;
    for (int i = 0; i < f; ++i) {
        const Fan& fn = strip.fans[static_cast<size_t>(i)];
        Section s;
        s.fan = i;
        s.fan_length = fn.ntri;
        s.hinge = fn.upper_hinge();
        if (!labels[static_cast<size_t>(i)]) {
            s.type = fn.letter == 'R' ? SectionType::LL : SectionType::RR;
        } else if (labels[static_cast<size_t>((i + 1) % f)]) {
            s.type = fn.letter == 'L' ? SectionType::RL : SectionType::LR;
        } else {
            continue;
        }
        out.push_back(s);
    }
    int n = strip.period();
    for (size_t k = 0; k < out.size(); ++k) {
        int prev = k == 0 ? out.back().hinge - n : out[k - 1].hinge;
        out[k].span = out[k].hinge - prev;
    }
    return out;
}

EdgePath make_path(const FareyStrip& strip, const std::vector<int>& labels)
{
    EdgePath path;
    path.sections = decompose_sections(strip, labels);
    path.labels = labels;
    path.phi = strip.phi;
    for (int i = 0; i < strip.fan_count(); ++i) {
        if (labels[static_cast<size_t>(i)]) {
            path.vertices.push_back(strip.pivot(i));
            path.vertex_side.push_back(strip.pivot_side(i));
            path.vertex_fan.push_back(i);
        } else {
            Side far = strip.pivot_side(i) == Side::Left ? Side::Right : Side::Left;
            for (const Vec2& v : strip.side_interior(i)) {
                path.vertices.push_back(v);
                path.vertex_side.push_back(far);
                path.vertex_fan.push_back(i);
            }
        }
    }
    size_t n = path.vertices.size();
    for (size_t k = 0; k < n; ++k)
        path.crossing_flags.push_back(path.vertex_side[k] != path.vertex_side[(k + 1) % n]);
    return path;
}

std::vector<EdgePath> enumerate_minimal_paths(const FareyStrip& strip)
{
    int f = strip.fan_count();
    std::vector<EdgePath> out;
    for (long long mask = 0; mask < (1LL << f); ++mask) {
        std::vector<int> labels(static_cast<size_t>(f));
        for (int i = 0; i < f; ++i)
            labels[static_cast<size_t>(i)] = static_cast<int>((mask >> (f - 1 - i)) & 1);
        if (valid_labels(strip, labels))
            out.push_back(make_path(strip, labels));
    }
    return out;
}

bool is_minimal(const EdgePath& path)
{
    long long n = path.edge_count();
    for (long long i = 0; i < n; ++i) {
        Vec2 a = path.vertex(i - 1), b = path.vertex(i), c = path.vertex(i + 1);
        if (std::llabs(det(a, b)) != 1 || std::llabs(det(b, c)) != 1)
            return false;
        if (a == c || a == -c || std::llabs(det(a, c)) == 1)
            return false;
    }
    return true;
}

SemiFiberInfo classify_semi_fiber(const FareyStrip& strip, const EdgePath& path)
{
    SemiFiberInfo info;
    int f = strip.fan_count();
    int n = path.edge_count();
    std::vector<int> pivot_vertex(static_cast<size_t>(f), -1);
    for (int k = 0; k < n; ++k) {
        int fan = path.vertex_fan[static_cast<size_t>(k)];
        bool tight = true;
        if (path.labels[static_cast<size_t>(fan)]) {
            pivot_vertex[static_cast<size_t>(fan)] = k;
            int in = path.labels[static_cast<size_t>((fan + f - 1) % f)] ? 0 : 1;
            int out = path.labels[static_cast<size_t>((fan + 1) % f)] ? 0 : 1;
            // triangles of the strip in the wedge between the two edges
            int wedge = strip.fans[static_cast<size_t>(fan)].ntri + in + out;
            tight = wedge == 2;
        }
        info.vertex_tight.push_back(tight);
    }
    info.semi_fiber = std::all_of(info.vertex_tight.begin(), info.vertex_tight.end(), [](bool b) { return b; });

    auto lr_inside = [&](int start, int len, TightSubpath& sp) {
        for (size_t s = 0; s < path.sections.size(); ++s) {
            const Section& sec = path.sections[s];
            if (sec.type != SectionType::LR)
                continue;
            int a = pivot_vertex[static_cast<size_t>(sec.fan)];
            int b = pivot_vertex[static_cast<size_t>((sec.fan + 1) % f)];
            auto in = [&](int v) { return ((v - start) % n + n) % n < len; };
            if (len >= n || (in(a) && in(b) && ((a - start + n) % n) < ((b - start + n) % n)))
                sp.lr_sections.push_back(static_cast<int>(s));
        }
    };

    if (info.semi_fiber) {
        TightSubpath sp{0, n, {}};
        lr_inside(0, n, sp);
        if (!sp.lr_sections.empty())
            info.tight_subpaths.push_back(sp);
        return info;
    }
    int s0 = 0;
    while (info.vertex_tight[static_cast<size_t>(s0)])
        ++s0;
    // walk once around starting just after a non-tight vertex
    int k = 0;
    while (k < n) {
        int v = (s0 + 1 + k) % n;
        if (!info.vertex_tight[static_cast<size_t>(v)]) {
            ++k;
            continue;
        }
        int len = 0;
        while (k + len < n && info.vertex_tight[static_cast<size_t>((s0 + 1 + k + len) % n)])
            ++len;
        TightSubpath sp{v, len, {}};
        lr_inside(v, len, sp);
        if (!sp.lr_sections.empty())
            info.tight_subpaths.push_back(sp);
        k += len;
    }
    return info;
}

} // namespace ptb
