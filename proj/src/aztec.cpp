#include "aztec.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace aztec {

void Tiling::canonicalize() { std::sort(dominos.begin(), dominos.end()); }

bool in_diamond(int M, int x, int y) { return std::abs(2 * x - 1) + std::abs(2 * y - 1) <= 2 * M; }

bool is_black(int x, int y) { return ((x + y) % 2 + 2) % 2 == 0; }

namespace {

bool odd(int v) { return (v % 2 + 2) % 2 == 1; }

// Dense cell grid covering x,y in [-M+1, M].
struct CellGrid {
    int M;
    int side;
    std::vector<int> id;

    explicit CellGrid(int M_) : M(M_), side(2 * M_), id(static_cast<std::size_t>(side) * side, -1) {}
    bool inside(int x, int y) const { return x > -M && x <= M && y > -M && y <= M; }
    int& at(int x, int y) { return id[static_cast<std::size_t>(y + M - 1) * side + (x + M - 1)]; }
    int get(int x, int y) const {
        return inside(x, y) ? id[static_cast<std::size_t>(y + M - 1) * side + (x + M - 1)] : -1;
    }
};

std::pair<int, int> second_cell(const Domino& d) {
    return d.orient == Orientation::Horizontal ? std::pair{d.x + 1, d.y} : std::pair{d.x, d.y + 1};
}

CellGrid domino_grid(const Tiling& t) {
    CellGrid g(t.M);
    for (std::size_t k = 0; k < t.dominos.size(); ++k) {
        const auto& d = t.dominos[k];
        auto [x2, y2] = second_cell(d);
        for (auto [x, y] : {std::pair{d.x, d.y}, std::pair{x2, y2}}) {
            if (!in_diamond(t.M, x, y))
                throw std::invalid_argument("tiling: domino leaves the diamond at cell (" + std::to_string(x) + "," +
                                            std::to_string(y) + ")");
            int& slot = g.at(x, y);
            if (slot != -1)
                throw std::invalid_argument("tiling: overlap at cell (" + std::to_string(x) + "," +
                                            std::to_string(y) + ")");
            slot = static_cast<int>(k);
        }
    }
    return g;
}

// Per-column particle flags in rotated coordinates u = x+y-1, v = y-x.
struct ColumnView {
    int M;
    std::vector<std::int8_t> right;  // cell matched to column u+1

    explicit ColumnView(const Tiling& t) : M(t.M), right(static_cast<std::size_t>(2 * t.M + 1) * (2 * t.M + 1), 0) {
        for (const auto& d : t.dominos) right[index(d.x + d.y - 1, d.y - d.x)] = 1;
    }
    std::size_t index(int u, int v) const { return static_cast<std::size_t>(u + M) * (2 * M + 1) + (v + M); }
    bool right_matched(int u, int v) const { return right[index(u, v)] != 0; }
};

Signature lambda_from_columns(const ColumnView& cv, int t) {
    const int M = cv.M, u = M - 2 * t;
    Signature lam;
    lam.reserve(t);
    for (int k = M - 1; k >= 0; --k)
        if (cv.right_matched(u, 2 * k - M + 1)) lam.push_back(k);
    if (static_cast<int>(lam.size()) != t) throw std::logic_error("tiling: wrong particle count in column");
    for (int i = 0; i < t; ++i) lam[i] -= t - 1 - i;
    return lam;
}

Signature upsilon_from_columns(const ColumnView& cv, int t) {
    const int M = cv.M, u = M - 2 * t + 1;
    Signature ups;
    ups.reserve(t);
    for (int k = M; k >= 0; --k)
        if (!cv.right_matched(u, 2 * k - M)) ups.push_back(k);
    if (static_cast<int>(ups.size()) != t) throw std::logic_error("tiling: wrong particle count in column");
    for (int i = 0; i < t; ++i) ups[i] -= t - 1 - i;
    return ups;
}

Domino domino_at(int u, int v, Orientation o) { return Domino{(u - v + 1) / 2, (u + v + 1) / 2, o}; }

}  // namespace

DominoType domino_type(int M, const Domino& d) {
    const bool par = odd(d.x + d.y + M);
    if (d.orient == Orientation::Horizontal) return par ? DominoType::S : DominoType::N;
    return par ? DominoType::W : DominoType::E;
}

char type_letter(DominoType t) {
    switch (t) {
        case DominoType::N: return 'N';
        case DominoType::S: return 'S';
        case DominoType::E: return 'E';
        default: return 'W';
    }
}

int weighted_index(int M, const Domino& d) {
    if (domino_type(M, d) != DominoType::W) return 0;
    return (M - d.x - d.y + 1) / 2;
}

void validate_tiling(const Tiling& t) {
    if (t.M < 0) throw std::invalid_argument("tiling: negative size");
    const std::size_t expected = static_cast<std::size_t>(t.M) * (t.M + 1);
    if (t.dominos.size() != expected)
        throw std::invalid_argument("tiling: expected " + std::to_string(expected) + " dominos, got " +
                                    std::to_string(t.dominos.size()));
    domino_grid(t);  // throws on overlap or escape; count then forces coverage
}

bool is_valid_tiling(const Tiling& t) {
    try {
        validate_tiling(t);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::vector<Tiling> enumerate_tilings(int M) {
    if (M < 0 || M > 5) throw std::invalid_argument("enumerate_tilings: M must be in [0,5]");
    std::vector<std::pair<int, int>> order;
    for (int y = -M + 1; y <= M; ++y)
        for (int x = -M + 1; x <= M; ++x)
            if (in_diamond(M, x, y)) order.emplace_back(x, y);
    CellGrid g(M);
    std::vector<Tiling> out;
    Tiling cur;
    cur.M = M;
    auto rec = [&](auto&& self, std::size_t pos) -> void {
        while (pos < order.size() && g.get(order[pos].first, order[pos].second) != -1) ++pos;
        if (pos == order.size()) {
            Tiling t = cur;
            t.canonicalize();
            out.push_back(std::move(t));
            return;
        }
        auto [x, y] = order[pos];
        for (auto o : {Orientation::Horizontal, Orientation::Vertical}) {
            Domino d{x, y, o};
            auto [x2, y2] = second_cell(d);
            if (!in_diamond(M, x2, y2) || g.get(x2, y2) != -1) continue;
            g.at(x, y) = g.at(x2, y2) = 1;
            cur.dominos.push_back(d);
            self(self, pos + 1);
            cur.dominos.pop_back();
            g.at(x, y) = g.at(x2, y2) = -1;
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end(), [](const Tiling& a, const Tiling& b) { return a.dominos < b.dominos; });
    return out;
}

std::vector<int> weighted_counts(const Tiling& t) {
    std::vector<int> counts(t.M, 0);
    for (const auto& d : t.dominos)
        if (int i = weighted_index(t.M, d); i > 0) ++counts[i - 1];
    return counts;
}

double tiling_weight(const Tiling& t, const std::vector<double>& weights) {
    if (static_cast<int>(weights.size()) != t.M) throw std::invalid_argument("tiling_weight: need M weights");
    double w = 1.0;
    for (const auto& d : t.dominos)
        if (int i = weighted_index(t.M, d); i > 0) w *= weights[i - 1];
    return w;
}

Rational tiling_weight(const Tiling& t, const std::vector<Rational>& weights) {
    if (static_cast<int>(weights.size()) != t.M) throw std::invalid_argument("tiling_weight: need M weights");
    Rational w = 1;
    for (const auto& d : t.dominos)
        if (int i = weighted_index(t.M, d); i > 0) w *= weights[i - 1];
    w.canonicalize();
    return w;
}

Rational partition_function(const std::vector<Rational>& weights) {
    Rational z = 1;
    for (std::size_t i = 0; i < weights.size(); ++i)
        for (std::size_t r = 0; r <= i; ++r) z *= 1 + weights[i];
    z.canonicalize();
    return z;
}

bool HeightFunction::defined(int i, int j) const {
    if (i < -M || i > M || j < -M || j > M) return false;
    return at(i, j) != kUndefined;
}

HeightFunction height_function(const Tiling& t) {
    const int M = t.M;
    const CellGrid g = domino_grid(t);
    const int side = 2 * M + 1;
    HeightFunction h;
    h.M = M;
    h.values.assign(static_cast<std::size_t>(side) * side, HeightFunction::kUndefined);
    auto vidx = [&](int i, int j) { return static_cast<std::size_t>(j + M) * side + (i + M); };
    auto cell_in = [&](int x, int y) { return g.get(x, y) != -1; };

    // increment from (i,j) to the neighbor in direction dir (0:+x 1:+y 2:-x 3:-y); returns false when the edge is
    // outside the region
    auto step = [&](int i, int j, int dir, int& di, int& dj, int& inc) {
        int ai = i, aj = j, horizontal = (dir % 2 == 0);
        int sign = dir < 2 ? 1 : -1;
        if (dir == 2) ai = i - 1;
        if (dir == 3) aj = j - 1;
        int lx, ly, rx, ry;  // cells left and right of the positively oriented edge
        if (horizontal) {
            lx = ai + 1, ly = aj + 1, rx = ai + 1, ry = aj;
        } else {
            lx = ai, ly = aj + 1, rx = ai + 1, ry = aj + 1;
        }
        const bool lin = cell_in(lx, ly), rin = cell_in(rx, ry);
        if (!lin && !rin) return false;
        const bool crossed = lin && rin && g.get(lx, ly) == g.get(rx, ry);
        int e = is_black(lx, ly) ? (crossed ? -3 : 1) : (crossed ? 3 : -1);
        inc = sign * e;
        di = i + (dir == 0) - (dir == 2);
        dj = j + (dir == 1) - (dir == 3);
        return true;
    };

    std::deque<std::pair<int, int>> queue;
    h.values[vidx(0, -M)] = 0;
    queue.emplace_back(0, -M);
    while (!queue.empty()) {
        auto [i, j] = queue.front();
        queue.pop_front();
        for (int dir = 0; dir < 4; ++dir) {
            int ni, nj, inc;
            if (!step(i, j, dir, ni, nj, inc)) continue;
            int& slot = h.values[vidx(ni, nj)];
            const int want = h.values[vidx(i, j)] + inc;
            if (slot == HeightFunction::kUndefined) {
                slot = want;
                queue.emplace_back(ni, nj);
            } else if (slot != want) {
                throw std::logic_error("height_function: inconsistent increments");
            }
        }
    }
    return h;
}

Tiling reconstruct_tiling(const HeightFunction& h) {
    const int M = h.M;
    Tiling t;
    t.M = M;
    for (int j = -M; j <= M; ++j)
        for (int i = -M; i <= M; ++i) {
            if (!h.defined(i, j)) continue;
            // edge to (i+1,j) separates cells (i+1,j+1) and (i+1,j)
            if (h.defined(i + 1, j) && std::abs(h.at(i + 1, j) - h.at(i, j)) == 3)
                t.dominos.push_back({i + 1, j, Orientation::Vertical});
            // edge to (i,j+1) separates cells (i,j+1) and (i+1,j+1)
            if (h.defined(i, j + 1) && std::abs(h.at(i, j + 1) - h.at(i, j)) == 3)
                t.dominos.push_back({i, j + 1, Orientation::Horizontal});
        }
    t.canonicalize();
    validate_tiling(t);
    return t;
}

SignatureSequence tiling_to_signatures(const Tiling& t) {
    validate_tiling(t);
    const ColumnView cv(t);
    SignatureSequence seq;
    seq.M = t.M;
    seq.lambdas.assign(t.M + 1, {});
    seq.upsilons.assign(t.M + 1, {});
    for (int s = 0; s <= t.M; ++s) seq.lambdas[s] = lambda_from_columns(cv, s);
    for (int s = 1; s <= t.M; ++s) seq.upsilons[s] = upsilon_from_columns(cv, s);
    return seq;
}

Signature level_signature(const Tiling& t, int level) {
    if (level < 0 || level > t.M) throw std::invalid_argument("level_signature: level out of range");
    return lambda_from_columns(ColumnView(t), level);
}

Tiling signatures_to_tiling(const SignatureSequence& seq) {
    if (!is_valid_sequence(seq)) throw std::invalid_argument("signatures_to_tiling: sequence violates interlacing");
    const int M = seq.M;
    Tiling t;
    t.M = M;
    t.dominos.reserve(static_cast<std::size_t>(M) * (M + 1));
    for (int s = 1; s <= M; ++s) {
        const int u = M - 2 * s;
        const auto& lam = seq.lambdas[s];
        const auto& ups = seq.upsilons[s];
        for (int i = 0; i < s; ++i) {
            const int k = lam[i] + s - 1 - i;
            const auto o = ups[i] == lam[i] ? Orientation::Horizontal : Orientation::Vertical;
            t.dominos.push_back(domino_at(u, 2 * k - M + 1, o));
        }
        // holes of column u+1 pair off in order with holes of column u+2
        std::vector<char> occ1(M + 1, 0), occ2(M, 0);
        for (int i = 0; i < s; ++i) occ1[ups[i] + s - 1 - i] = 1;
        const auto& next = seq.lambdas[s - 1];
        for (int i = 0; i < s - 1; ++i) occ2[next[i] + s - 2 - i] = 1;
        std::vector<int> holes1, holes2;
        for (int k = 0; k <= M; ++k)
            if (!occ1[k]) holes1.push_back(k);
        for (int k = 0; k < M; ++k)
            if (!occ2[k]) holes2.push_back(k);
        if (holes1.size() != holes2.size()) throw std::invalid_argument("signatures_to_tiling: hole count mismatch");
        for (std::size_t h = 0; h < holes1.size(); ++h) {
            const int shift = holes2[h] - holes1[h];
            if (shift != -1 && shift != 0) throw std::invalid_argument("signatures_to_tiling: holes cannot be paired");
            t.dominos.push_back(
                domino_at(u + 1, 2 * holes1[h] - M, shift == -1 ? Orientation::Horizontal : Orientation::Vertical));
        }
    }
    t.canonicalize();
    validate_tiling(t);
    return t;
}

std::string render_svg(const Tiling& t, Palette palette, double cell_px) {
    static const char* four[4] = {"#f2c12e", "#2e6fd9", "#3aa655", "#d63a2f"};  // N S E W
    const int M = t.M;
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    const double side = 2 * M * cell_px;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << side << "\" height=\"" << side
       << "\" viewBox=\"0 0 " << side << ' ' << side << "\">\n";
    for (const auto& d : t.dominos) {
        const auto type = domino_type(M, d);
        std::string fill;
        if (palette == Palette::FourColor) {
            fill = four[static_cast<int>(type)];
        } else {
            const int shade = 2 * static_cast<int>(type) + (odd(d.x) ? 1 : 0);
            const int g = 24 + shade * 30;
            char buf[16];
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
            fill = buf;
        }
        const bool horiz = d.orient == Orientation::Horizontal;
        const double px = (d.x - 1 + M) * cell_px;
        const double py = (M - d.y - (horiz ? 0 : 1)) * cell_px;
        os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << (horiz ? 2 : 1) * cell_px << "\" height=\""
           << (horiz ? 1 : 2) * cell_px << "\" fill=\"" << fill << "\" stroke=\"#000\" stroke-width=\"0.3\" "
           << "data-type=\"" << type_letter(type) << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[pos + b]) << (8 * b);
    return v;
}

constexpr std::uint8_t kFormatVersion = 1;

}  // namespace

std::vector<std::uint8_t> encode_binary(const Tiling& t) {
    std::vector<std::uint8_t> out = {'A', 'Z', 'T', 'C', kFormatVersion};
    out.reserve(9 + t.dominos.size() * 9);
    put_u32(out, static_cast<std::uint32_t>(t.M));
    for (const auto& d : t.dominos) {
        put_u32(out, static_cast<std::uint32_t>(d.x));
        put_u32(out, static_cast<std::uint32_t>(d.y));
        out.push_back(static_cast<std::uint8_t>(d.orient));
    }
    return out;
}

Tiling decode_binary(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 9 || std::memcmp(bytes.data(), "AZTC", 4) != 0)
        throw std::invalid_argument("decode_binary: bad magic");
    if (bytes[4] != kFormatVersion) throw std::invalid_argument("decode_binary: unsupported version");
    Tiling t;
    t.M = static_cast<std::int32_t>(get_u32(bytes, 5));
    if (t.M < 0) throw std::invalid_argument("decode_binary: negative size");
    const std::size_t n = static_cast<std::size_t>(t.M) * (t.M + 1);
    if (bytes.size() != 9 + 9 * n) throw std::invalid_argument("decode_binary: truncated or oversized payload");
    t.dominos.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t p = 9 + 9 * k;
        t.dominos[k].x = static_cast<std::int32_t>(get_u32(bytes, p));
        t.dominos[k].y = static_cast<std::int32_t>(get_u32(bytes, p + 4));
        if (bytes[p + 8] > 1) throw std::invalid_argument("decode_binary: bad orientation byte");
        t.dominos[k].orient = static_cast<Orientation>(bytes[p + 8]);
    }
    validate_tiling(t);
    return t;
}

std::string height_pgm(const HeightFunction& h) {
    const int side = 2 * h.M + 1;
    int lo = 0, hi = 0;
    bool first = true;
    for (int v : h.values)
        if (v != HeightFunction::kUndefined) {
            if (first) lo = hi = v, first = false;
            lo = std::min(lo, v), hi = std::max(hi, v);
        }
    std::string out = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
    for (int j = h.M; j >= -h.M; --j)
        for (int i = -h.M; i <= h.M; ++i) {
            int v = h.at(i, j);
            int g = (v == HeightFunction::kUndefined || hi == lo) ? 0 : 1 + (v - lo) * 254 / (hi - lo);
            out.push_back(static_cast<char>(g));
        }
    return out;
}

}  // namespace aztec
