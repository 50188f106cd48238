import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from textwrap import fill

import numpy as np
import sympy

BASE_KINDS = ("P2", "S2xS2", "Hirzebruch")

_BASE_LABELS = {"P2": "CP2", "S2xS2": "S2xS2", "Hirzebruch": "E_S2"}

# hard ceiling on any coefficient produced by the pipeline
COEFF_LIMIT = 10**4


class InvalidClassError(ValueError):
    pass


@dataclass(frozen=True)
class CohClass:
    """Integer (or rational, for ω_t at fractional t) vector in the ordered
    basis of a :py:class:`SurfaceModel`."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(_normalize_number(c) for c in self.coeffs)
        for c in coeffs:
            if abs(c) > COEFF_LIMIT:
                raise OverflowError(
                    fill(f"Coefficient {c} exceeds the lattice bound {COEFF_LIMIT}")
                )
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def _check_len(self, other):
        if len(other) != len(self):
            raise InvalidClassError(
                f"Cannot combine classes of length {len(self)} and {len(other)}"
            )

    def __add__(self, other):
        self._check_len(other)
        return CohClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check_len(other)
        return CohClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CohClass(tuple(-a for a in self.coeffs))

    def __mul__(self, scalar):
        return CohClass(tuple(scalar * a for a in self.coeffs))

    __rmul__ = __mul__

    @property
    def is_integral(self):
        return all(isinstance(c, int) for c in self.coeffs)

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


def _normalize_number(c):
    if isinstance(c, (bool, np.bool_)):
        raise InvalidClassError("Boolean is not a valid coefficient")
    if isinstance(c, (int, np.integer)):
        return int(c)
    if isinstance(c, sympy.Integer):
        return int(c)
    if isinstance(c, sympy.Rational):
        c = Fraction(int(c.p), int(c.q))
    if isinstance(c, Rational):
        c = Fraction(c)
        return int(c) if c.denominator == 1 else c
    raise InvalidClassError(f"Coefficient {c!r} is not an exact rational number")


@dataclass(frozen=True)
class SurfaceModel:
    """Second cohomology lattice of a reduced space.

    The model is a base surface (ℙ², S²×S² or the Hirzebruch surface E_{S²})
    blown up ``blowups`` times. The basis is ``(u, E1, ...)`` for ℙ²-models
    and ``(x, y, E1, ...)`` for ruled models.
    """

    base: str
    blowups: int = 0

    def __post_init__(self):
        if self.base not in BASE_KINDS:
            raise ValueError(f"Unknown base surface {self.base!r}")
        if self.blowups < 0:
            raise ValueError("Number of blow-ups must be nonnegative")

    @property
    def kind(self):
        if self.blowups == 0:
            return self.base
        return f"BlowupOf({self.base}, {self.blowups})"

    @property
    def is_ruled(self):
        return self.base != "P2"

    @property
    def base_rank(self):
        return 1 if self.base == "P2" else 2

    @property
    def rank(self):
        return self.base_rank + self.blowups

    @cached_property
    def basis(self):
        head = ("u",) if self.base == "P2" else ("x", "y")
        return head + tuple(f"E{i}" for i in range(1, self.blowups + 1))

    @cached_property
    def gram(self):
        gram = -np.eye(self.rank, dtype=int)
        if self.base == "P2":
            gram[0, 0] = 1
        else:
            gram[0, 0] = 0
            gram[0, 1] = gram[1, 0] = 1
            gram[1, 1] = 0 if self.base == "S2xS2" else -1
        gram.setflags(write=False)
        return gram

    @cached_property
    def c1(self):
        head = {"P2": (3,), "S2xS2": (2, 2), "Hirzebruch": (3, 2)}[self.base]
        return CohClass(head + (-1,) * self.blowups)

    @property
    def label(self):
        name = _BASE_LABELS[self.base]
        if self.blowups == 0:
            return name
        count = "" if self.blowups == 1 else str(self.blowups)
        return f"{name} # {count}CP2bar"

    def zero(self):
        return CohClass((0,) * self.rank)

    def basis_class(self, label):
        """Return the basis vector named ``label`` (e.g. ``"x"`` or ``"E2"``)."""
        try:
            i = self.basis.index(label)
        except ValueError:
            raise InvalidClassError(f"{label!r} is not a basis label of {self.label}")
        coeffs = [0] * self.rank
        coeffs[i] = 1
        return CohClass(tuple(coeffs))

    def exceptional_basis(self):
        return [self.basis_class(f"E{i}") for i in range(1, self.blowups + 1)]

    def cls(self, *coeffs):
        return validate_class(self, CohClass(coeffs))

    def __repr__(self):
        return f"SurfaceModel({self.label})"


def p2():
    return SurfaceModel("P2")


def s2xs2():
    return SurfaceModel("S2xS2")


def hirzebruch():
    return SurfaceModel("Hirzebruch")


def validate_class(m, a):
    """Check that `a` is a class of model `m` and return it."""
    if not isinstance(a, CohClass):
        a = CohClass(tuple(a))
    if len(a) != m.rank:
        raise InvalidClassError(
            f"Class of length {len(a)} is not valid in {m.label} (rank {m.rank})"
        )
    return a


def pair(m, a, b):
    """Intersection pairing ``aᵀ · gram · b``.

    Parameters
    ----------
    m: SurfaceModel
    a, b: CohClass
        Classes of ``m``. Rational coefficients are allowed.

    Returns
    -------
    value: int or Fraction
    """
    a = validate_class(m, a)
    b = validate_class(m, b)
    gram = m.gram
    total = 0
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in enumerate(b.coeffs):
            if bj != 0 and gram[i, j] != 0:
                total += ai * int(gram[i, j]) * bj
    return _normalize_number(total)


def square(m, a):
    return pair(m, a, a)


def blow_up(m, times=1):
    """Blow ``m`` up at ``times`` points, appending exceptional classes
    E_{k+1}, ... with self-intersection −1."""
    return SurfaceModel(m.base, m.blowups + times)


def embed(a, target):
    """Push a class of a model into a blow-up of it (isometric embedding)."""
    if len(a) > target.rank:
        raise InvalidClassError(
            f"Cannot embed a class of length {len(a)} into {target.label}"
        )
    return CohClass(tuple(a.coeffs) + (0,) * (target.rank - len(a)))


def symplectic_area(m, omega, z):
    return pair(m, omega, z)


def gram_matrix(m, classes):
    """Matrix of pairwise products of ``classes``."""
    return np.array([[pair(m, a, b) for b in classes] for a in classes], dtype=object)


def signature(gram):
    """Return (n_positive, n_negative) of a symmetric integer matrix.

    The characteristic polynomial of a real symmetric matrix has only real
    roots, so Descartes' rule of signs counts them exactly.
    """
    t = sympy.Symbol("t")
    poly = sympy.Matrix(np.asarray(gram).tolist()).charpoly(t)
    coeffs = [int(c) for c in poly.all_coeffs()]
    mirrored = [c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)]
    return _sign_changes(coeffs), _sign_changes(mirrored)


def _sign_changes(coeffs):
    signs = [np.sign(c) for c in coeffs if c != 0]
    return int(sum(1 for s, t in zip(signs, signs[1:]) if s != t))


def check_model(m):
    """Verify that the intersection form of `m` is symmetric, unimodular and
    of signature (1, rank − 1), and that c1² drops by one per blow-up
    (9 for ℙ², 8 for the ruled surfaces).

    Returns
    -------
    problems: list of str
        Empty when the model is valid.
    """
    problems = []
    gram = m.gram
    if not np.array_equal(gram, gram.T):
        problems.append(f"{m.label}: gram matrix is not symmetric")
    det = sympy.Matrix(gram.tolist()).det()
    if abs(det) != 1:
        problems.append(f"{m.label}: gram matrix has determinant {det}")
    if signature(gram) != (1, m.rank - 1):
        problems.append(f"{m.label}: signature is {signature(gram)}")
    expected = (9 if m.base == "P2" else 8) - m.blowups
    if square(m, m.c1) != expected:
        problems.append(f"{m.label}: c1^2 = {square(m, m.c1)}, expected {expected}")
    return problems


def is_even(m, classes=None):
    """Whether the lattice (or the span of ``classes``) has only even squares."""
    if classes is None:
        classes = [m.basis_class(label) for label in m.basis]
    return all(square(m, a) % 2 == 0 for a in classes)


_TERM = re.compile(r"([+-]?)\s*(\d*)\s*([A-Za-z]\d*)")


def format_class(m, a):
    """Human readable form, e.g. ``2x + 2y - E1 - E2``."""
    a = validate_class(m, a)
    terms = []
    for coeff, label in zip(a.coeffs, m.basis):
        if coeff == 0:
            continue
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = label if mag == 1 else f"{mag}{label}"
        terms.append((sign, body))
    if not terms:
        return "0"
    head_sign, head = terms[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


def parse_class(m, text):
    """Inverse of :py:func:`format_class` for integer classes."""
    coeffs = [0] * m.rank
    stripped = text.replace(" ", "").replace("−", "-")
    if stripped in ("", "0"):
        return m.zero()
    pos = 0
    while pos < len(stripped):
        match = _TERM.match(stripped, pos)
        if match is None or match.end() == pos:
            raise InvalidClassError(f"Cannot parse class {text!r}")
        sign, mag, label = match.groups()
        if pos > 0 and not sign:
            raise InvalidClassError(f"Missing sign before {label!r} in {text!r}")
        value = int(mag) if mag else 1
        if label not in m.basis:
            raise InvalidClassError(f"{label!r} is not a basis label of {m.label}")
        coeffs[m.basis.index(label)] += -value if sign == "-" else value
        pos = match.end()
    return CohClass(tuple(coeffs))
