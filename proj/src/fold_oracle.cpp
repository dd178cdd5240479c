#include "seqforge/fold_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "seqforge/hash.hpp"
#include "seqforge/rng.hpp"

namespace seqforge::oracle {

namespace {

// Move order fixes the lexicographic tie-break: an all-ties sequence folds
// to the straight chain (all +x).
constexpr int kDirs[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

// Kyte-Doolittle hydropathy, indexed by the canonical alphabet
// ACDEFGHIKLMNPQRSTVWY.
constexpr double kHydropathy[20] = {1.8,  2.5,  -3.5, -3.5, 2.8,  -0.4, -3.2, 4.5,  -3.9, 3.8,
                                    1.9,  -3.5, -1.6, -3.5, -4.5, -0.8, -0.7, 4.2,  -0.9, -1.3};

struct LatticeWalk {
    std::vector<std::array<int, 3>> pos;
    std::vector<std::uint8_t> moves;
    double energy = 0.0;
};

std::vector<int> residue_indices(const Sequence& seq, const Alphabet& a) {
    std::vector<int> idx(static_cast<std::size_t>(seq.length()));
    for (int i = 0; i < seq.length(); ++i) idx[static_cast<std::size_t>(i)] = a.index_of(seq[i]);
    return idx;
}

// Canonical-form constraint on free walks: first move +x, first move off
// the x axis is +y, first move off the xy plane is +z. This quotients the
// 48 lattice symmetries away so enumeration and beam search agree.
bool dir_allowed(int dir, bool seen_y, bool seen_z) {
    if (!seen_y) return dir == 0 || dir == 1 || dir == 2;
    if (!seen_z) return dir != 5;
    return true;
}

class ExhaustiveSearch {
public:
    ExhaustiveSearch(const std::vector<int>& res, const ContactTable& table, int len)
        : res_(res), table_(table), len_(len), side_(2 * len + 1) {
        grid_.assign(static_cast<std::size_t>(side_) * side_ * side_, 0);
        pos_.resize(static_cast<std::size_t>(len));
        moves_.resize(static_cast<std::size_t>(len) - 1);
        best_.energy = std::numeric_limits<double>::infinity();
    }

    LatticeWalk run() {
        // residue 0 at origin, residue 1 at +x (canonical first move)
        place(0, {0, 0, 0});
        place(1, {1, 0, 0});
        moves_[0] = 0;
        if (len_ == 2) {
            best_.energy = 0.0;
            record();
        } else {
            dfs(2, 0.0, false, false);
        }
        return best_;
    }

private:
    std::size_t cell(const std::array<int, 3>& p) const {
        return (static_cast<std::size_t>(p[0] + len_) * side_ + static_cast<std::size_t>(p[1] + len_)) * side_ +
               static_cast<std::size_t>(p[2] + len_);
    }

    void place(int i, const std::array<int, 3>& p) {
        pos_[static_cast<std::size_t>(i)] = p;
        grid_[cell(p)] = static_cast<std::uint8_t>(i + 1);
    }

    void remove(const std::array<int, 3>& p) { grid_[cell(p)] = 0; }

    // Contact energy gained by placing residue i at p: lattice-adjacent,
    // non-bonded partners only.
    double delta_energy(int i, const std::array<int, 3>& p) const {
        double de = 0.0;
        for (const auto& d : kDirs) {
            const std::array<int, 3> q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
            const std::uint8_t occ = grid_[cell(q)];
            if (occ == 0) continue;
            const int j = occ - 1;
            if (j == i - 1) continue;
            de += table_.energy(res_[static_cast<std::size_t>(i)], res_[static_cast<std::size_t>(j)]);
        }
        return de;
    }

    void record() {
        best_.pos = pos_;
        best_.moves = moves_;
    }

    void dfs(int i, double energy, bool seen_y, bool seen_z) {
        const std::array<int, 3>& head = pos_[static_cast<std::size_t>(i - 1)];
        for (int dir = 0; dir < 6; ++dir) {
            if (!dir_allowed(dir, seen_y, seen_z)) continue;
            const std::array<int, 3> p{head[0] + kDirs[dir][0], head[1] + kDirs[dir][1], head[2] + kDirs[dir][2]};
            if (grid_[cell(p)] != 0) continue;
            const double de = delta_energy(i, p);
            const double e = energy + de;
            place(i, p);
            moves_[static_cast<std::size_t>(i - 1)] = static_cast<std::uint8_t>(dir);
            if (i == len_ - 1) {
                // strict < keeps the lexicographically first walk among ties
                // (DFS visits walks in move order)
                if (e < best_.energy) {
                    best_.energy = e;
                    record();
                }
            } else {
                dfs(i + 1, e, seen_y || dir == 2, seen_z || dir == 4);
            }
            remove(p);
        }
    }

    const std::vector<int>& res_;
    const ContactTable& table_;
    int len_;
    int side_;
    std::vector<std::uint8_t> grid_;
    std::vector<std::array<int, 3>> pos_;
    std::vector<std::uint8_t> moves_;
    LatticeWalk best_;
};

struct BeamState {
    double energy = 0.0;
    std::vector<std::uint8_t> moves;
    bool seen_y = false;
    bool seen_z = false;
};

bool beam_less(const BeamState& a, const BeamState& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.moves < b.moves;
}

std::vector<std::array<int, 3>> decode_moves(const std::vector<std::uint8_t>& moves) {
    std::vector<std::array<int, 3>> pos(moves.size() + 1);
    pos[0] = {0, 0, 0};
    for (std::size_t k = 0; k < moves.size(); ++k) {
        const auto& d = kDirs[moves[k]];
        pos[k + 1] = {pos[k][0] + d[0], pos[k][1] + d[1], pos[k][2] + d[2]};
    }
    return pos;
}

LatticeWalk beam_search(const std::vector<int>& res, const ContactTable& table, int len, int width) {
    std::vector<BeamState> beam;
    beam.push_back(BeamState{0.0, {0}, false, false});
    if (len > 2) {
        std::vector<BeamState> candidates;
        for (int i = 2; i < len; ++i) {
            candidates.clear();
            for (const BeamState& st : beam) {
                const auto pos = decode_moves(st.moves);
                const auto& head = pos.back();
                for (int dir = 0; dir < 6; ++dir) {
                    if (!dir_allowed(dir, st.seen_y, st.seen_z)) continue;
                    const std::array<int, 3> p{head[0] + kDirs[dir][0], head[1] + kDirs[dir][1],
                                               head[2] + kDirs[dir][2]};
                    bool occupied = false;
                    double de = 0.0;
                    for (std::size_t j = 0; j < pos.size(); ++j) {
                        const auto& q = pos[j];
                        if (q == p) {
                            occupied = true;
                            break;
                        }
                        const int manh = std::abs(q[0] - p[0]) + std::abs(q[1] - p[1]) + std::abs(q[2] - p[2]);
                        if (manh == 1 && static_cast<int>(j) != i - 1) {
                            de += table.energy(res[static_cast<std::size_t>(i)], res[j]);
                        }
                    }
                    if (occupied) continue;
                    BeamState next;
                    next.energy = st.energy + de;
                    next.moves = st.moves;
                    next.moves.push_back(static_cast<std::uint8_t>(dir));
                    next.seen_y = st.seen_y || dir == 2;
                    next.seen_z = st.seen_z || dir == 4;
                    candidates.push_back(std::move(next));
                }
            }
            std::sort(candidates.begin(), candidates.end(), beam_less);
            if (static_cast<int>(candidates.size()) > width) candidates.resize(static_cast<std::size_t>(width));
            beam = std::move(candidates);
            candidates = {};
        }
    }
    const BeamState& best = beam.front();
    LatticeWalk walk;
    walk.energy = best.energy;
    walk.moves = best.moves;
    walk.pos = decode_moves(best.moves);
    return walk;
}

geom::Structure walk_to_structure(const LatticeWalk& walk, double bond_length) {
    geom::Structure s;
    s.source = geom::StructureSource::OraclePredicted;
    s.coords.reserve(walk.pos.size());
    for (const auto& p : walk.pos) {
        s.coords.push_back(geom::Vec3{p[0] * bond_length, p[1] * bond_length, p[2] * bond_length});
    }
    return s;
}

}  // namespace

ContactTable ContactTable::hydropathy_product() {
    ContactTable t;
    t.alphabet = Alphabet::canonical();
    const int n = t.alphabet.size();
    t.e.resize(static_cast<std::size_t>(n) * n);
    const double scale = 1.0 / (4.5 * 4.5);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            t.e[static_cast<std::size_t>(a) * n + b] = -kHydropathy[a] * kHydropathy[b] * scale;
    return t;
}

void ContactTable::validate() const {
    const int n = alphabet.size();
    if (static_cast<int>(e.size()) != n * n) throw ConfigError("contact table size does not match alphabet");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < a; ++b)
            if (energy(a, b) != energy(b, a)) throw ConfigError("contact table must be symmetric");
}

void OracleConfig::validate() const {
    if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
    if (exhaustive_max_len < 4) throw ConfigError("exhaustive_max_len must be >= 4");
    if (!(bond_length > 0.0)) throw ConfigError("bond_length must be positive");
    contact_energy.validate();
}

std::string OracleConfig::content_hash() const {
    std::uint64_t h = fnv1a64(contact_energy.alphabet.letters);
    h = fnv1a64(contact_energy.e, h);
    const double bl = bond_length;
    h = fnv1a64(&bl, sizeof bl, h);
    const std::int64_t fields[3] = {beam_width, exhaustive_max_len, static_cast<std::int64_t>(seed)};
    h = fnv1a64(fields, sizeof fields, h);
    return hash_hex(h);
}

FoldResult fold_exhaustive(const Sequence& seq, const OracleConfig& cfg) {
    cfg.validate();
    validate_sequence(seq, cfg.contact_energy.alphabet);
    const auto res = residue_indices(seq, cfg.contact_energy.alphabet);
    ExhaustiveSearch search(res, cfg.contact_energy, seq.length());
    LatticeWalk walk = search.run();
    FoldResult out;
    out.structure = walk_to_structure(walk, cfg.bond_length);
    out.energy = walk.energy;
    out.moves = std::move(walk.moves);
    return out;
}

FoldResult fold_beam(const Sequence& seq, const OracleConfig& cfg) {
    cfg.validate();
    validate_sequence(seq, cfg.contact_energy.alphabet);
    const auto res = residue_indices(seq, cfg.contact_energy.alphabet);
    LatticeWalk walk = beam_search(res, cfg.contact_energy, seq.length(), cfg.beam_width);
    FoldResult out;
    out.structure = walk_to_structure(walk, cfg.bond_length);
    out.energy = walk.energy;
    out.moves = std::move(walk.moves);
    return out;
}

FoldResult fold_detailed(const Sequence& seq, const OracleConfig& cfg) {
    if (seq.length() <= cfg.exhaustive_max_len) return fold_exhaustive(seq, cfg);
    return fold_beam(seq, cfg);
}

geom::Structure fold(const Sequence& seq, const OracleConfig& cfg) { return fold_detailed(seq, cfg).structure; }

std::vector<const CorpusItem*> Corpus::split_items(Split s) const {
    std::vector<const CorpusItem*> out;
    for (const CorpusItem& item : items)
        if (item.split == s) out.push_back(&item);
    return out;
}

const CorpusItem* Corpus::find(const std::string& id) const {
    for (const CorpusItem& item : items)
        if (item.native.id == id) return &item;
    return nullptr;
}

Corpus generate_corpus(int count, int min_len, int max_len, const OracleConfig& cfg, std::uint64_t seed) {
    if (count < 1) throw ConfigError("corpus count must be >= 1");
    if (min_len < 4 || min_len > max_len) throw ConfigError("corpus lengths must satisfy 4 <= min <= max");
    cfg.validate();

    Corpus corpus;
    corpus.oracle_cfg = cfg;
    corpus.items.reserve(static_cast<std::size_t>(count));
    const Alphabet& alphabet = cfg.contact_energy.alphabet;

    for (int n = 0; n < count; ++n) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
        const int len = min_len + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_len - min_len + 1)));
        std::string letters(static_cast<std::size_t>(len), '?');
        for (char& c : letters) c = alphabet.letters[rng.bounded(static_cast<std::uint64_t>(alphabet.size()))];

        CorpusItem item;
        item.wild_type = Sequence(std::move(letters));
        item.native = fold(item.wild_type, cfg);
        char idbuf[32];
        std::snprintf(idbuf, sizeof idbuf, "syn-%05d", n);
        item.native.id = idbuf;
        item.native.source = geom::StructureSource::SyntheticNative;
        item.native.single_chain = rng.uniform() < 0.5;
        corpus.items.push_back(std::move(item));
    }

    // Hash-ranked split: order ids by (fnv hash, id) and send the top
    // decile to Test, so sizes are exact for any count.
    const int test_count = (count + 5) / 10;
    std::vector<int> order(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const std::uint64_t ha = fnv1a64(corpus.items[static_cast<std::size_t>(a)].native.id);
        const std::uint64_t hb = fnv1a64(corpus.items[static_cast<std::size_t>(b)].native.id);
        if (ha != hb) return ha < hb;
        return corpus.items[static_cast<std::size_t>(a)].native.id < corpus.items[static_cast<std::size_t>(b)].native.id;
    });
    for (int k = 0; k < count; ++k) {
        corpus.items[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])].split =
            k < test_count ? Split::Test : Split::Train;
    }
    return corpus;
}

}  // namespace seqforge::oracle
