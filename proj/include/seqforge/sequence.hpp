#pragma once

#include <array>
#include <string>

#include "seqforge/common.hpp"

namespace seqforge {

// Residue alphabet. Default is the 20 canonical amino-acid letters in
// alphabetical order; tiny test alphabets are also supported.
struct Alphabet {
    std::string letters;

    Alphabet() = default;
    explicit Alphabet(std::string l) : letters(std::move(l)) {}

    static Alphabet canonical() { return Alphabet("ACDEFGHIKLMNPQRSTVWY"); }

    int size() const { return static_cast<int>(letters.size()); }

    int index_of(char c) const {
        for (int i = 0; i < size(); ++i)
            if (letters[static_cast<std::size_t>(i)] == c) return i;
        throw AlphabetError(std::string("residue '") + c + "' not in alphabet " + letters);
    }

    bool contains(char c) const { return letters.find(c) != std::string::npos; }

    bool operator==(const Alphabet& o) const { return letters == o.letters; }
};

struct Sequence {
    std::string residues;

    Sequence() = default;
    explicit Sequence(std::string r) : residues(std::move(r)) {}

    int length() const { return static_cast<int>(residues.size()); }
    char operator[](int i) const { return residues[static_cast<std::size_t>(i)]; }

    bool operator==(const Sequence& o) const { return residues == o.residues; }
    bool operator!=(const Sequence& o) const { return residues != o.residues; }
    bool operator<(const Sequence& o) const { return residues < o.residues; }
};

inline void validate_sequence(const Sequence& s, const Alphabet& a) {
    if (s.length() < 2) throw AlphabetError("sequence length must be >= 2");
    for (char c : s.residues)
        if (!a.contains(c)) throw AlphabetError(std::string("residue '") + c + "' not in alphabet " + a.letters);
}

}  // namespace seqforge
