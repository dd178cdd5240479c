#pragma once

// Deterministic folding surrogate: maps a sequence to the minimum-energy
// self-avoiding walk on the cubic lattice under a symmetric residue-pair
// contact-energy table. Exhaustive enumeration up to exhaustive_max_len,
// deterministic beam search beyond.

#include <cstdint>
#include <string>
#include <vector>

#include "seqforge/geometry.hpp"
#include "seqforge/sequence.hpp"

namespace seqforge::oracle {

struct ContactTable {
    Alphabet alphabet;
    // |A| x |A| energies, symmetric.
    std::vector<double> e;

    double energy(int a, int b) const { return e[static_cast<std::size_t>(a) * alphabet.size() + b]; }

    // Product of Kyte-Doolittle hydropathies, scaled to [-1, 1] and negated,
    // so that pairing two strongly apolar (or two strongly polar) residues
    // is favorable. Any symmetric table is accepted in its place.
    static ContactTable hydropathy_product();

    void validate() const;
};

enum class Lattice { Cubic3d };

struct OracleConfig {
    Lattice lattice = Lattice::Cubic3d;
    double bond_length = 3.8;  // Angstrom, CA-CA virtual bond
    ContactTable contact_energy = ContactTable::hydropathy_product();
    int beam_width = 64;
    int exhaustive_max_len = 12;
    std::uint64_t seed = 0;

    void validate() const;
    std::string content_hash() const;
};

struct FoldResult {
    geom::Structure structure;
    double energy = 0.0;
    // Direction indices of the winning walk (canonicalized, lexicographic
    // tie-break); kept for determinism checks.
    std::vector<std::uint8_t> moves;
};

// Minimum-energy fold of `seq`. Deterministic: identical (seq, cfg) yields
// bit-identical coordinates.
FoldResult fold_detailed(const Sequence& seq, const OracleConfig& cfg);
geom::Structure fold(const Sequence& seq, const OracleConfig& cfg);

// Force a specific search path regardless of cfg.exhaustive_max_len.
FoldResult fold_exhaustive(const Sequence& seq, const OracleConfig& cfg);
FoldResult fold_beam(const Sequence& seq, const OracleConfig& cfg);

enum class Split { Train, Test };

struct CorpusItem {
    geom::Structure native;
    Sequence wild_type;
    Split split = Split::Train;
};

struct Corpus {
    std::vector<CorpusItem> items;
    OracleConfig oracle_cfg;

    std::vector<const CorpusItem*> split_items(Split s) const;
    const CorpusItem* find(const std::string& id) const;
};

// Random sequences folded into native structures. Split assignment ranks
// ids by hash and sends the top decile to Test, so sizes are exact.
Corpus generate_corpus(int count, int min_len, int max_len, const OracleConfig& cfg, std::uint64_t seed);

}  // namespace seqforge::oracle
