#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "combinatorics.hpp"

namespace aztec {

// Cell (x,y) is the unit square [x-1,x] x [y-1,y]; the diamond of size M is
// {|x-1/2| + |y-1/2| <= M}. A horizontal domino anchored at (x,y) covers
// (x,y),(x+1,y); a vertical one covers (x,y),(x,y+1). Cells with x+y even
// are black.
enum class Orientation : std::uint8_t { Horizontal = 0, Vertical = 1 };
enum class DominoType : std::uint8_t { N = 0, S = 1, E = 2, W = 3 };

struct Domino {
    int x = 0;
    int y = 0;
    Orientation orient = Orientation::Horizontal;

    auto operator<=>(const Domino&) const = default;
};

struct Tiling {
    int M = 0;
    std::vector<Domino> dominos;  // kept sorted

    auto operator<=>(const Tiling&) const = default;
    void canonicalize();
};

bool in_diamond(int M, int x, int y);
bool is_black(int x, int y);
DominoType domino_type(int M, const Domino& d);
char type_letter(DominoType t);

// Index t in 1..M of the weight W_t carried by a domino, or 0 when the domino
// is unweighted. Shared by tiling_weight and the renderers.
int weighted_index(int M, const Domino& d);

// Throws std::invalid_argument unless the dominos exactly cover the diamond.
void validate_tiling(const Tiling& t);
bool is_valid_tiling(const Tiling& t);

std::vector<Tiling> enumerate_tilings(int M);

double tiling_weight(const Tiling& t, const std::vector<double>& weights);
Rational tiling_weight(const Tiling& t, const std::vector<Rational>& weights);
// Number of weighted dominos per index; entry t-1 counts W_t.
std::vector<int> weighted_counts(const Tiling& t);
Rational partition_function(const std::vector<Rational>& weights);

struct HeightFunction {
    int M = 0;
    // vertices (i,j) with -M <= i,j <= M, row-major in j then i; kUndefined
    // off the closed region
    std::vector<int> values;
    static constexpr int kUndefined = -0x3fffffff;

    int at(int i, int j) const { return values[(j + M) * (2 * M + 1) + (i + M)]; }
    bool defined(int i, int j) const;
    bool operator==(const HeightFunction&) const = default;
};

// Normalized to h = 0 at the bottom corner vertex (0,-M).
HeightFunction height_function(const Tiling& t);
Tiling reconstruct_tiling(const HeightFunction& h);

SignatureSequence tiling_to_signatures(const Tiling& t);
Tiling signatures_to_tiling(const SignatureSequence& seq);
// λ^(level) only, without building the whole sequence.
Signature level_signature(const Tiling& t, int level);

enum class Palette { FourColor, EightShade };
std::string render_svg(const Tiling& t, Palette palette, double cell_px = 8.0);

// Binary "AZTC" container: magic, version byte, M as int32 LE, then M(M+1)
// records (x:int32 LE, y:int32 LE, orient:uint8).
std::vector<std::uint8_t> encode_binary(const Tiling& t);
Tiling decode_binary(const std::vector<std::uint8_t>& bytes);

// Binary PGM (P5) of the height field, darker = lower; undefined vertices are 0.
std::string height_pgm(const HeightFunction& h);

}  // namespace aztec
