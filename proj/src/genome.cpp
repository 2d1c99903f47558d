#include "vawt/genome.hpp"

#include <algorithm>
#include <charconv>

namespace vawt {

namespace {

int clamp_xy(int v) { return std::clamp(v, kXyMin, kXyMax); }
int clamp_z(int v) { return std::clamp(v, kZMin, kZMax); }

// Nonzero step in [-max_step, max_step]: draw from 2*max_step values and skip 0.
int mutation_step(Rng& rng, int max_step) {
    int s = rng.int_in(-max_step, max_step - 1);
    return s >= 0 ? s + 1 : s;
}

}  // namespace

bool is_valid(const Genotype& g) {
    for (int a : g.xy)
        if (a < kXyMin || a > kXyMax) return false;
    if (g.z)
        for (int a : *g.z)
            if (a < kZMin || a > kZMax) return false;
    return true;
}

void require_valid(const Genotype& g) {
    if (!is_valid(g)) throw std::invalid_argument("genotype allele out of range");
}

Genotype random_genotype(Rng& rng, GenomeMode mode) {
    Genotype g;
    for (int& a : g.xy) a = rng.int_in(kXyMin, kXyMax);
    if (mode != GenomeMode::flat) {
        g.z.emplace();
        for (int& a : *g.z) a = rng.int_in(kZMin, kZMax);
    }
    if (mode == GenomeMode::array) g.rotation = rng.bounded(2) == 1;
    return g;
}

Genotype mutate(const Genotype& g, Rng& rng, double rate, int max_step) {
    require_valid(g);
    Genotype out = g;
    for (int& a : out.xy)
        if (rng.coin(rate)) a = clamp_xy(a + mutation_step(rng, max_step));
    if (out.z)
        for (int& a : *out.z)
            if (rng.coin(rate)) a = clamp_z(a + mutation_step(rng, max_step));
    if (out.rotation && rng.coin(rate)) out.rotation = !*out.rotation;
    return out;
}

std::size_t tournament_select(const std::vector<double>& fitness, Rng& rng, int k,
                              TournamentDirection direction) {
    if (fitness.empty()) throw std::invalid_argument("tournament on empty population");
    if (k < 1) throw std::invalid_argument("tournament size must be >= 1");
    std::size_t pick = rng.bounded(fitness.size());
    for (int i = 1; i < k; ++i) {
        std::size_t c = rng.bounded(fitness.size());
        bool better = direction == TournamentDirection::best
                          ? fitness[c] > fitness[pick]
                          : fitness[c] < fitness[pick];
        if (better || (fitness[c] == fitness[pick] && c < pick)) pick = c;
    }
    return pick;
}

std::string format_genotype(const Genotype& g) {
    std::string s = "xy=";
    for (int i = 0; i < kXyGenes; ++i) {
        if (i) s += ',';
        s += std::to_string(g.xy[i]);
    }
    if (g.z) {
        s += ";z=";
        for (int i = 0; i < kZGenes; ++i) {
            if (i) s += ',';
            s += std::to_string((*g.z)[i]);
        }
    }
    if (g.rotation) {
        s += ";rot=";
        s += *g.rotation ? '1' : '0';
    }
    return s;
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    [[noreturn]] void fail(const std::string& what) const { throw GenomeParseError(pos, what); }

    void expect(char c) {
        if (done() || text[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    int parse_int(int lo, int hi, const char* what) {
        std::size_t start = pos;
        int value = 0;
        auto [ptr, ec] =
            std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc()) fail(std::string("expected integer ") + what);
        pos = static_cast<std::size_t>(ptr - text.data());
        if (value < lo || value > hi) {
            pos = start;
            fail(std::string(what) + " allele " + std::to_string(value) +
                 " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
        }
        return value;
    }
};

}  // namespace

Genotype parse_genotype(const std::string& text) {
    Cursor c{text};
    Genotype g;
    if (text.rfind("xy=", 0) != 0) c.fail("genome must start with 'xy='");
    c.pos = 3;
    for (int i = 0; i < kXyGenes; ++i) {
        if (i) c.expect(',');
        g.xy[i] = c.parse_int(kXyMin, kXyMax, "xy");
    }
    while (!c.done()) {
        c.expect(';');
        if (text.compare(c.pos, 2, "z=") == 0) {
            if (g.z) c.fail("duplicate z field");
            c.pos += 2;
            g.z.emplace();
            for (int i = 0; i < kZGenes; ++i) {
                if (i) c.expect(',');
                (*g.z)[i] = c.parse_int(kZMin, kZMax, "z");
            }
        } else if (text.compare(c.pos, 4, "rot=") == 0) {
            if (g.rotation) c.fail("duplicate rot field");
            c.pos += 4;
            g.rotation = c.parse_int(0, 1, "rot") == 1;
        } else {
            c.fail("unknown field (expected 'z=' or 'rot=')");
        }
    }
    return g;
}

}  // namespace vawt
