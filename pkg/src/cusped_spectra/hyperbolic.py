"""SL(2,R) elements, free-group words and certified geodesic length spectra.

Group elements are unit-determinant 2x2 real matrices acting on the upper
half-plane.  Conjugacy classes of the two rank-2 presets are enumerated by
cyclically reduced words over {A, A^-1, B, B^-1}; traces are computed in exact
integer arithmetic (the preset generators are integer matrices), floating
point enters only at the arccosh step.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

DET_TOL = 1e-12
DET_RENORM_TOL = 1e-13
PARABOLIC_TOL = 1e-10
LENGTH_MERGE_TOL = 1e-10

# letter encoding: 1 = A, -1 = A^-1, 2 = B, -2 = B^-1
_LETTERS = (1, -1, 2, -2)
_LETTER_STR = {1: "A", -1: "a", 2: "B", -2: "b"}
_STR_LETTER = {v: k for k, v in _LETTER_STR.items()}


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class Moebius:
    """Real 2x2 matrix of determinant one."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > DET_TOL:
            raise GroupError(f"determinant {det!r} is not 1 within {DET_TOL}")

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Moebius") -> "Moebius":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        det = a * d - b * c
        if abs(det - 1.0) > DET_RENORM_TOL:
            if det <= 0.0:
                raise GroupError("composition drifted to a non-positive determinant")
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        return Moebius(a, b, c, d)


@dataclass(frozen=True)
class Word:
    """Freely reduced word over {A, A^-1, B, B^-1}, stored as signed letters."""

    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        for x in self.letters:
            if x not in _LETTERS:
                raise GroupError(f"invalid letter {x}")
        for u, v in zip(self.letters, self.letters[1:]):
            if u == -v:
                raise GroupError("word is not freely reduced")

    @classmethod
    def from_string(cls, s: str) -> "Word":
        try:
            return cls(tuple(_STR_LETTER[ch] for ch in s))
        except KeyError as exc:
            raise GroupError(f"unknown letter in {s!r}") from exc

    def __str__(self) -> str:
        return "".join(_LETTER_STR[x] for x in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    @property
    def is_cyclically_reduced(self) -> bool:
        w = self.letters
        return len(w) < 2 or w[0] != -w[-1]


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(letters: tuple[int, ...]) -> tuple[int, ...]:
    w = free_reduce(letters)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


# letter order A < B < a < b for canonical forms
_ORDER = {1: 0, 2: 1, -1: 2, -2: 3}


def _word_key(w: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(_ORDER[x] for x in w)


def canonical_class(letters: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical form of the non-oriented conjugacy class of a word.

    Lexicographically minimal cyclic rotation (letter order A < B < a < b)
    over the cyclic reduction of the word and of its inverse; exact for free
    groups.
    """
    w = cyclic_reduce(letters)
    if not w:
        return w
    winv = tuple(-x for x in reversed(w))
    n = len(w)
    best = w
    best_key = _word_key(w)
    for v in (w, winv):
        for i in range(n):
            r = v[i:] + v[:i]
            rk = _word_key(r)
            if rk < best_key:
                best, best_key = r, rk
    return best


def is_primitive(letters: tuple[int, ...]) -> bool:
    """True iff a cyclically reduced word is not a proper power."""
    n = len(letters)
    for d in range(1, n):
        if n % d == 0 and letters == letters[d:] + letters[:d]:
            return False
    return True


@dataclass(frozen=True)
class GeodesicClass:
    representative: Word
    trace: float  # |trace| of the matrix image
    length: float
    multiplicity: int

    def __post_init__(self) -> None:
        if self.trace <= 2.0:
            raise GroupError("geodesic class must be hyperbolic (|trace| > 2)")
        if self.multiplicity < 1:
            raise GroupError("multiplicity must be positive")


@dataclass(frozen=True)
class LengthSpectrum:
    classes: tuple[GeodesicClass, ...]
    cutoff: float
    group_id: str
    complete: bool
    certificate: str = "none"

    @property
    def class_count(self) -> int:
        """Number of distinct non-oriented primitive classes (sum of multiplicities)."""
        return sum(c.multiplicity for c in self.classes)

    def counting_function(self, x: float) -> int:
        return sum(c.multiplicity for c in self.classes if c.length <= x)

    @property
    def systole(self) -> float | None:
        return self.classes[0].length if self.classes else None


_PRESETS: dict[str, dict] = {
    "thrice_punctured_sphere": {
        # level-2 principal congruence generators; every element is congruent
        # to the identity mod 2, forcing trace = 2 (mod 4), so hyperbolic
        # elements have |trace| >= 6.
        "mats": (((1, 2), (0, 1)), ((1, 0), (2, 1))),
        "min_hyperbolic_trace": 6,
    },
    "once_punctured_torus": {
        # standard pair with parabolic commutator; integer matrices, so
        # hyperbolic elements have |trace| >= 3.
        "mats": (((1, 1), (1, 2)), ((1, -1), (-1, 2))),
        "min_hyperbolic_trace": 3,
    },
}

PRESET_IDS = tuple(sorted(_PRESETS))


def preset_group(group_id: str) -> tuple[Moebius, Moebius]:
    """Generator pair of a preset Fuchsian group."""
    try:
        (a, b), (c, d) = _PRESETS[group_id]["mats"][0]
        (e, f), (g, h) = _PRESETS[group_id]["mats"][1]
    except KeyError as exc:
        raise GroupError(f"unknown preset group {group_id!r}") from exc
    return Moebius(float(a), float(b), float(c), float(d)), Moebius(
        float(e), float(f), float(g), float(h)
    )


def classify(m: Moebius) -> str:
    """One of 'identity', 'parabolic', 'elliptic', 'hyperbolic' by |trace|."""
    t = abs(m.trace)
    if t > 2.0 + PARABOLIC_TOL:
        return "hyperbolic"
    if t < 2.0 - PARABOLIC_TOL:
        return "elliptic"
    if (
        abs(abs(m.a) - 1.0) < PARABOLIC_TOL
        and abs(abs(m.d) - 1.0) < PARABOLIC_TOL
        and abs(m.b) < PARABOLIC_TOL
        and abs(m.c) < PARABOLIC_TOL
    ):
        return "identity"
    return "parabolic"


def geodesic_length(m: Moebius) -> float:
    """Translation length 2 arccosh(|tr|/2) of a hyperbolic element."""
    kind = classify(m)
    if kind != "hyperbolic":
        raise GroupError(f"geodesic length requires a hyperbolic element, got {kind}")
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


def trace_to_length(t: int | float) -> float:
    return 2.0 * math.acosh(abs(float(t)) / 2.0)


def _int_generator_mats(group_id: str) -> dict[int, tuple[int, int, int, int]]:
    (a, b), (c, d) = _PRESETS[group_id]["mats"][0]
    (e, f), (g, h) = _PRESETS[group_id]["mats"][1]
    return {
        1: (a, b, c, d),
        -1: (d, -b, -c, a),
        2: (e, f, g, h),
        -2: (h, -f, -g, e),
    }


def _word_trace(word: tuple[int, ...], mats: dict[int, tuple[int, int, int, int]]) -> int:
    a, b, c, d = 1, 0, 0, 1
    for x in word:
        e, f, g, h = mats[x]
        a, b, c, d = a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h
    return a + d


def _cyclically_reduced_words(n: int, first_letters: tuple[int, ...] = _LETTERS) -> Iterator[tuple[int, ...]]:
    # depth-first over freely reduced words, keeping only those whose first
    # and last letters are not inverse.
    stack: list[tuple[int, ...]]
    for first in first_letters:
        stack = [(first,)]
        while stack:
            w = stack.pop()
            if len(w) == n:
                if w[0] != -w[-1]:
                    yield w
                continue
            last = w[-1]
            for l in _LETTERS:
                if l != -last:
                    stack.append(w + (l,))


def _collect_shard(group_id: str, word_bound: int, first_letters: tuple[int, ...]):
    mats = _int_generator_mats(group_id)
    classes: dict[tuple[int, ...], int] = {}
    for n in range(1, word_bound + 1):
        for w in _cyclically_reduced_words(n, first_letters):
            c = canonical_class(w)
            if c not in classes:
                classes[c] = _word_trace(c, mats)
    return classes


def enumerate_length_spectrum(
    group_id: str,
    cutoff: float,
    word_bound: int,
    threads: int = 1,
) -> LengthSpectrum:
    """Primitive non-oriented conjugacy classes with length <= cutoff.

    Enumerates all cyclically reduced words of up to ``word_bound`` letters,
    deduplicates conjugacy classes under cyclic rotation and word inversion,
    and discards parabolic/elliptic classes and proper powers.  Classes whose
    lengths agree within ``LENGTH_MERGE_TOL`` are merged into a single entry
    carrying the multiplicity.

    ``complete`` is certified only in the provable case: when the cutoff lies
    below the group's hyperbolic trace floor, so that no closed geodesic at
    all can be shorter.  The minimum trace per word length is *not* monotone
    non-decreasing in these groups (new short classes keep appearing at
    longer word lengths), so no enumeration-depth certificate is sound;
    everything else is reported as complete=False.
    """
    if group_id not in _PRESETS:
        raise GroupError(f"unknown preset group {group_id!r}")
    if cutoff <= 0:
        raise GroupError("cutoff must be positive")
    if word_bound < 1:
        raise GroupError("word_bound must be a positive integer")

    if threads > 1:
        shards = [(l,) for l in _LETTERS]
        with ThreadPoolExecutor(max_workers=min(threads, len(shards))) as pool:
            parts = list(pool.map(lambda fl: _collect_shard(group_id, word_bound, fl), shards))
        classes: dict[tuple[int, ...], int] = {}
        for part in parts:
            classes.update(part)
    else:
        classes = _collect_shard(group_id, word_bound, _LETTERS)

    hyperbolic_classes: list[tuple[float, int, tuple[int, ...]]] = []
    for w, tr in classes.items():
        if abs(tr) <= 2 or not is_primitive(w):
            continue
        length = trace_to_length(tr)
        if length <= cutoff:
            hyperbolic_classes.append((length, abs(tr), w))
    hyperbolic_classes.sort()

    merged: list[GeodesicClass] = []
    i = 0
    while i < len(hyperbolic_classes):
        j = i
        while (
            j + 1 < len(hyperbolic_classes)
            and hyperbolic_classes[j + 1][0] - hyperbolic_classes[i][0] <= LENGTH_MERGE_TOL
        ):
            j += 1
        group = hyperbolic_classes[i : j + 1]
        rep = min((g[2] for g in group), key=lambda w: (len(w), _word_key(w)))
        merged.append(
            GeodesicClass(
                representative=Word(rep),
                trace=float(group[0][1]),
                length=group[0][0],
                multiplicity=len(group),
            )
        )
        i = j + 1

    floor_trace = _PRESETS[group_id]["min_hyperbolic_trace"]
    floor_length = trace_to_length(floor_trace)
    if cutoff < floor_length:
        complete, certificate = True, f"below-systole-floor(|tr|>={floor_trace})"
    else:
        complete, certificate = False, "none"

    return LengthSpectrum(
        classes=tuple(merged),
        cutoff=cutoff,
        group_id=group_id,
        complete=complete,
        certificate=certificate,
    )


def spectrum_to_csv(spectrum: LengthSpectrum, path: str) -> None:
    """CSV export with columns word,trace,length,multiplicity."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "trace", "length", "multiplicity"])
        for c in spectrum.classes:
            writer.writerow(
                [str(c.representative), f"{c.trace:.17g}", f"{c.length:.17g}", c.multiplicity]
            )
