#!/usr/bin/env python3
"""Regenerate crates/core/data/features.csv.

Ternary articulatory features in the usual 22-feature layout. Values follow
common feature-geometry conventions; the table covers the segment
inventories of French, Haitian, English and Jamaican plus general IPA
consonants and vowels.
"""
import sys
import unicodedata

FEATURES = [
    "syl", "son", "cons", "cont", "delrel", "lat", "nas", "strid", "voi", "sg",
    "cg", "ant", "cor", "distr", "lab", "hi", "lo", "back", "round", "velaric",
    "tense", "long",
]

# place -> (ant, cor, distr, lab, hi, lo, back, round)
PLACES = {
    "bilabial":     ("+", "-", "0", "+", "-", "-", "-", "-"),
    "labiodental":  ("+", "-", "0", "+", "-", "-", "-", "-"),
    "dental":       ("+", "+", "+", "-", "-", "-", "-", "-"),
    "alveolar":     ("+", "+", "-", "-", "-", "-", "-", "-"),
    "postalveolar": ("-", "+", "+", "-", "+", "-", "-", "-"),
    "retroflex":    ("-", "+", "-", "-", "-", "-", "-", "-"),
    "palatal":      ("-", "-", "0", "-", "+", "-", "-", "-"),
    "labiopalatal": ("-", "-", "0", "+", "+", "-", "-", "+"),
    "velar":        ("-", "-", "0", "-", "+", "-", "+", "-"),
    "labiovelar":   ("-", "-", "0", "+", "+", "-", "+", "+"),
    "uvular":       ("-", "-", "0", "-", "-", "-", "+", "-"),
    "pharyngeal":   ("-", "-", "0", "-", "-", "+", "+", "-"),
    "glottal":      ("-", "-", "0", "-", "-", "-", "-", "-"),
}

# manner -> (son, cons, cont, delrel, lat, nas)
MANNERS = {
    "stop":        ("-", "+", "-", "-", "-", "-"),
    "affricate":   ("-", "+", "-", "+", "-", "-"),
    "fricative":   ("-", "+", "+", "-", "-", "-"),
    "nasal":       ("+", "+", "-", "-", "-", "+"),
    "trill":       ("+", "+", "+", "-", "-", "-"),
    "tap":         ("+", "+", "+", "-", "-", "-"),
    "approximant": ("+", "-", "+", "-", "-", "-"),
    "lateral":     ("+", "+", "+", "-", "+", "-"),
    "latfric":     ("-", "+", "+", "-", "+", "-"),
}

STRIDENT = {"f", "v", "s", "z", "ʃ", "ʒ", "ts", "dz", "tʃ", "dʒ", "pf", "χ", "ʁ"}

CONSONANTS = [
    ("p", "bilabial", "stop", "-"), ("b", "bilabial", "stop", "+"),
    ("t", "alveolar", "stop", "-"), ("d", "alveolar", "stop", "+"),
    ("ʈ", "retroflex", "stop", "-"), ("ɖ", "retroflex", "stop", "+"),
    ("c", "palatal", "stop", "-"), ("ɟ", "palatal", "stop", "+"),
    ("k", "velar", "stop", "-"), ("g", "velar", "stop", "+"),
    ("q", "uvular", "stop", "-"), ("ɢ", "uvular", "stop", "+"),
    ("ʔ", "glottal", "stop", "-"),
    ("m", "bilabial", "nasal", "+"), ("ɱ", "labiodental", "nasal", "+"),
    ("n", "alveolar", "nasal", "+"), ("ɳ", "retroflex", "nasal", "+"),
    ("ɲ", "palatal", "nasal", "+"), ("ŋ", "velar", "nasal", "+"),
    ("ɴ", "uvular", "nasal", "+"),
    ("ʙ", "bilabial", "trill", "+"), ("r", "alveolar", "trill", "+"),
    ("ʀ", "uvular", "trill", "+"),
    ("ɾ", "alveolar", "tap", "+"), ("ɽ", "retroflex", "tap", "+"),
    ("ɸ", "bilabial", "fricative", "-"), ("β", "bilabial", "fricative", "+"),
    ("f", "labiodental", "fricative", "-"), ("v", "labiodental", "fricative", "+"),
    ("θ", "dental", "fricative", "-"), ("ð", "dental", "fricative", "+"),
    ("s", "alveolar", "fricative", "-"), ("z", "alveolar", "fricative", "+"),
    ("ʃ", "postalveolar", "fricative", "-"), ("ʒ", "postalveolar", "fricative", "+"),
    ("ʂ", "retroflex", "fricative", "-"), ("ʐ", "retroflex", "fricative", "+"),
    ("ç", "palatal", "fricative", "-"), ("ʝ", "palatal", "fricative", "+"),
    ("x", "velar", "fricative", "-"), ("ɣ", "velar", "fricative", "+"),
    ("χ", "uvular", "fricative", "-"), ("ʁ", "uvular", "fricative", "+"),
    ("ħ", "pharyngeal", "fricative", "-"), ("ʕ", "pharyngeal", "fricative", "+"),
    ("h", "glottal", "approximant", "-"), ("ɦ", "glottal", "approximant", "+"),
    ("ɬ", "alveolar", "latfric", "-"), ("ɮ", "alveolar", "latfric", "+"),
    ("ʋ", "labiodental", "approximant", "+"), ("ɹ", "alveolar", "approximant", "+"),
    ("ɻ", "retroflex", "approximant", "+"), ("j", "palatal", "approximant", "+"),
    ("ɰ", "velar", "approximant", "+"), ("w", "labiovelar", "approximant", "+"),
    ("ɥ", "labiopalatal", "approximant", "+"),
    ("l", "alveolar", "lateral", "+"), ("ɭ", "retroflex", "lateral", "+"),
    ("ʎ", "palatal", "lateral", "+"), ("ʟ", "velar", "lateral", "+"),
    ("ts", "alveolar", "affricate", "-"), ("dz", "alveolar", "affricate", "+"),
    ("tʃ", "postalveolar", "affricate", "-"), ("dʒ", "postalveolar", "affricate", "+"),
    ("pf", "labiodental", "affricate", "-"),
]

# vowel -> (hi, lo, back, round, tense)
VOWELS = {
    "i": ("+", "-", "-", "-", "+"), "y": ("+", "-", "-", "+", "+"),
    "ɨ": ("+", "-", "0", "-", "+"), "ʉ": ("+", "-", "0", "+", "+"),
    "ɯ": ("+", "-", "+", "-", "+"), "u": ("+", "-", "+", "+", "+"),
    "ɪ": ("+", "-", "-", "-", "-"), "ʏ": ("+", "-", "-", "+", "-"),
    "ʊ": ("+", "-", "+", "+", "-"),
    "e": ("-", "-", "-", "-", "+"), "ø": ("-", "-", "-", "+", "+"),
    "ɘ": ("-", "-", "0", "-", "+"), "ɵ": ("-", "-", "0", "+", "+"),
    "ɤ": ("-", "-", "+", "-", "+"), "o": ("-", "-", "+", "+", "+"),
    "ə": ("-", "-", "0", "-", "-"),
    "ɛ": ("-", "-", "-", "-", "-"), "œ": ("-", "-", "-", "+", "-"),
    "ɜ": ("-", "-", "0", "-", "-"), "ɞ": ("-", "-", "0", "+", "-"),
    "ʌ": ("-", "-", "+", "-", "-"), "ɔ": ("-", "-", "+", "+", "-"),
    "æ": ("-", "+", "-", "-", "+"), "ɐ": ("-", "+", "0", "-", "-"),
    "a": ("-", "+", "-", "-", "-"), "ɶ": ("-", "+", "-", "+", "-"),
    "ɑ": ("-", "+", "+", "-", "-"), "ɒ": ("-", "+", "+", "+", "-"),
}

NASAL_VOWELS = ["a", "ɑ", "ɛ", "ɔ", "œ", "e", "i", "o", "u", "ə"]
LONG_VOWELS = list(VOWELS)
LONG_CONSONANTS = []

TILDE = "̃"
LONG = "ː"


def consonant(seg, place, manner, voi):
    son, cons, cont, delrel, lat, nas = MANNERS[manner]
    ant, cor, distr, lab, hi, lo, back, rnd = PLACES[place]
    sg = "+" if seg == "h" else "-"
    cg = "+" if seg == "ʔ" else "-"
    if place == "glottal":
        cons = "-"
    strid = "+" if seg in STRIDENT else "-"
    if manner in ("nasal", "approximant", "lateral", "trill", "tap"):
        strid = "0"
    return {
        "syl": "-", "son": son, "cons": cons, "cont": cont, "delrel": delrel,
        "lat": lat, "nas": nas, "strid": strid, "voi": voi, "sg": sg, "cg": cg,
        "ant": ant, "cor": cor, "distr": distr, "lab": lab, "hi": hi, "lo": lo,
        "back": back, "round": rnd, "velaric": "-", "tense": "0", "long": "-",
    }


def vowel(hi, lo, back, rnd, tense):
    return {
        "syl": "+", "son": "+", "cons": "-", "cont": "+", "delrel": "-",
        "lat": "-", "nas": "-", "strid": "0", "voi": "+", "sg": "-", "cg": "-",
        "ant": "0", "cor": "-", "distr": "0", "lab": rnd, "hi": hi, "lo": lo,
        "back": back, "round": rnd, "velaric": "-", "tense": tense, "long": "-",
    }


def rows():
    out = []
    for seg, place, manner, voi in CONSONANTS:
        out.append((seg, consonant(seg, place, manner, voi)))
    for seg, f in VOWELS.items():
        out.append((seg, vowel(*f)))
    for seg in LONG_VOWELS:
        f = dict(vowel(*VOWELS[seg]))
        f["long"] = "+"
        out.append((seg + LONG, f))
    for seg in NASAL_VOWELS:
        f = dict(vowel(*VOWELS[seg]))
        f["nas"] = "+"
        out.append((seg + TILDE, f))
    return [(unicodedata.normalize("NFC", s), f) for s, f in out]


def main():
    seen = set()
    lines = ["segment," + ",".join(FEATURES)]
    for seg, f in rows():
        assert seg not in seen, seg
        seen.add(seg)
        lines.append(seg + "," + ",".join(f[name] for name in FEATURES))
    sys.stdout.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
