"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial is a dictionary mapping exponent tuples to Fraction
coefficients; the zero polynomial is the empty dict.  Every polynomial is
bound to a :class:`VarRegistry`, a fixed ordered list of variable names.
Mixing polynomials from different registries raises immediately — this
catches the classic "same name, different ring" bug at the call site.

The default term order everywhere is graded reverse lexicographic with
respect to the registry order.  Elimination orders are built on top of it
(see :mod:`lgresolve.groebner`).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]


class VarRegistry:
    """An immutable, ordered collection of variable names.

    The order matters: it fixes the grevlex term order and the printing
    order.  Registries compare equal iff their name tuples are equal.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names in registry")
        for n in names:
            if not n or not _is_name(n):
                raise ValueError(f"invalid variable name: {n!r}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("VarRegistry is immutable")

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in registry {self.names}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarRegistry) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarRegistry({list(self.names)!r})"

    def extend(self, extra: Iterable[str]) -> "VarRegistry":
        """A new registry with the extra names appended."""
        return VarRegistry(self.names + tuple(extra))


def _is_name(s: str) -> bool:
    if not (s[0].isalpha() or s[0] == "_"):
        return False
    return all(c.isalnum() or c in "_[]'" for c in s[1:])


def grevlex_key(exp: Exponent):
    """Sort key: larger key = larger monomial in grevlex."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


class Polynomial:
    """An exact multivariate polynomial over Q, bound to a registry.

    Immutable by convention: no method mutates ``terms`` after
    construction, and all arithmetic returns fresh objects.
    """

    __slots__ = ("registry", "terms")

    def __init__(self, registry: VarRegistry, terms: Mapping[Exponent, Fraction]):
        clean: Dict[Exponent, Fraction] = {}
        n = len(registry)
        for exp, c in terms.items():
            if len(exp) != n:
                raise ValueError("exponent length does not match registry")
            if c:
                clean[exp] = c if isinstance(c, Fraction) else Fraction(c)
        object.__setattr__(self, "registry", registry)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(registry: VarRegistry) -> "Polynomial":
        return Polynomial(registry, {})

    @staticmethod
    def const(registry: VarRegistry, value) -> "Polynomial":
        return Polynomial(registry, {(0,) * len(registry): Fraction(value)})

    @staticmethod
    def variable(registry: VarRegistry, name: str) -> "Polynomial":
        exp = [0] * len(registry)
        exp[registry.index(name)] = 1
        return Polynomial(registry, {tuple(exp): Fraction(1)})

    @staticmethod
    def monomial(registry: VarRegistry, exp: Exponent, coeff=1) -> "Polynomial":
        return Polynomial(registry, {tuple(exp): Fraction(coeff)})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial (0 for the zero polynomial)."""
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.registry.index(name)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables(self) -> Tuple[str, ...]:
        """Names actually occurring, in registry order."""
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return tuple(self.registry.names[i] for i in sorted(used))

    def leading(self, key=grevlex_key) -> Tuple[Exponent, Fraction]:
        """(exponent, coefficient) of the leading term under the order key."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=key)
        return exp, self.terms[exp]

    def sorted_terms(self, key=grevlex_key):
        """Terms sorted descending by the order key."""
        return sorted(self.terms.items(), key=lambda kv: key(kv[0]), reverse=True)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.registry != other.registry:
            raise ValueError("registry mismatch between polynomials")

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Polynomial(self.registry, out)

    def __sub__(self, other):
        other = self._coerce(other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) - c
        return Polynomial(self.registry, out)

    def __neg__(self):
        return Polynomial(self.registry, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Polynomial.zero(self.registry)
            q = Fraction(other)
            return Polynomial(self.registry, {e: c * q for e, c in self.terms.items()})
        self._check(other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.registry)
        out: Dict[Exponent, Fraction] = {}
        a_items = list(self.terms.items())
        for eb, cb in other.terms.items():
            for ea, ca in a_items:
                e = tuple(x + y for x, y in zip(ea, eb))
                prev = out.get(e)
                out[e] = ca * cb if prev is None else prev + ca * cb
        return Polynomial(self.registry, out)

    __rmul__ = __mul__

    def __radd__(self, other):
        return self.__add__(other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = Polynomial.const(self.registry, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base2 = base * base if n > 1 else base
            base = base2
            n >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.registry, other)
        if not isinstance(other, Polynomial):
            raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")
        return other

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.registry, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.registry == other.registry and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.registry, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        from .parse import format_poly

        return format_poly(self)

    # -- structure ---------------------------------------------------------

    def map_registry(
        self, target: VarRegistry, rename: Mapping[str, str] | None = None
    ) -> "Polynomial":
        """Re-express this polynomial in another registry.

        Every variable occurring here must exist in the target (after the
        optional rename).  This is a pure renaming/reindexing, not a
        substitution.
        """
        rename = rename or {}
        src = self.registry.names
        idx = [
            target.index(rename.get(n, n)) if (rename.get(n, n) in target) else None
            for n in src
        ]
        out: Dict[Exponent, Fraction] = {}
        m = len(target)
        for e, c in self.terms.items():
            new = [0] * m
            for i, k in enumerate(e):
                if not k:
                    continue
                j = idx[i]
                if j is None:
                    raise KeyError(
                        f"variable {src[i]!r} has no image in target registry"
                    )
                new[j] += k
            t = tuple(new)
            out[t] = out.get(t, Fraction(0)) + c
        return Polynomial(target, out)

    def substitute(
        self,
        bindings: Mapping[str, "Polynomial"],
        target: VarRegistry | None = None,
    ) -> "Polynomial":
        """Substitute polynomials for variables.

        Unbound variables map to their namesakes in the target registry
        (which defaults to the registry of the bound values, or to this
        polynomial's registry if ``bindings`` is empty).
        """
        if not bindings:
            return self if target is None else self.map_registry(target)
        if target is None:
            target = next(iter(bindings.values())).registry
        for name, val in bindings.items():
            self.registry.index(name)
            if val.registry != target:
                raise ValueError("binding value registry mismatch")
        # Cache powers of each bound variable as needed.
        powers: Dict[Tuple[str, int], Polynomial] = {}

        def power(name: str, k: int) -> Polynomial:
            got = powers.get((name, k))
            if got is None:
                got = bindings[name] ** k
                powers[(name, k)] = got
            return got

        result = Polynomial.zero(target)
        src = self.registry.names
        for e, c in self.terms.items():
            fixed = [0] * len(target)
            factors = []
            for i, k in enumerate(e):
                if not k:
                    continue
                n = src[i]
                if n in bindings:
                    factors.append(power(n, k))
                else:
                    fixed[target.index(n)] += k
            term = Polynomial.monomial(target, tuple(fixed), c)
            for f in factors:
                term = term * f
            result = result + term
        return result

    def derivative(self, name: str) -> "Polynomial":
        """Formal partial derivative with respect to one variable."""
        i = self.registry.index(name)
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[i]
            if not k:
                continue
            ne = list(e)
            ne[i] = k - 1
            t = tuple(ne)
            out[t] = out.get(t, Fraction(0)) + c * k
        return Polynomial(self.registry, out)

    def evaluate(self, point: Mapping[str, Fraction | int]) -> Fraction:
        """Evaluate at a full rational point (every used variable bound)."""
        vals = {}
        for n in self.variables():
            if n not in point:
                raise KeyError(f"no value for variable {n!r}")
            vals[self.registry.index(n)] = Fraction(point[n])
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term *= vals[i] ** k
            total += term
        return total

    def monomial_content(self) -> Exponent:
        """Componentwise min of exponents: the largest monomial dividing
        every term.  Zero polynomial -> all-zero tuple."""
        n = len(self.registry)
        if not self.terms:
            return (0,) * n
        mins = [min(e[i] for e in self.terms) for i in range(n)]
        return tuple(mins)

    def strip_monomial(self, only: Sequence[str] | None = None) -> "Polynomial":
        """Divide out the monomial content (restricted to ``only`` names)."""
        content = list(self.monomial_content())
        if only is not None:
            allowed = {self.registry.index(n) for n in only}
            content = [c if i in allowed else 0 for i, c in enumerate(content)]
        if not any(content):
            return self
        out = {
            tuple(k - m for k, m in zip(e, content)): c for e, c in self.terms.items()
        }
        return Polynomial(self.registry, out)

    def content_and_primitive(self) -> Tuple[Fraction, "Polynomial"]:
        """(c, g) with self = c*g, g integer-primitive with positive leading
        coefficient (grevlex)."""
        if not self.terms:
            return Fraction(0), self
        denom = math.lcm(*[c.denominator for c in self.terms.values()])
        numer = math.gcd(*[c.numerator for c in self.terms.values()])
        c = Fraction(numer, denom)
        _, lead = self.leading()
        if lead < 0:
            c = -c
        inv = 1 / c
        return c, Polynomial(self.registry, {e: k * inv for e, k in self.terms.items()})


def exact_div(numerator: Polynomial, divisor: Polynomial) -> Polynomial:
    """Exact polynomial division; raises ValueError if not divisible."""
    if divisor.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if numerator.registry != divisor.registry:
        raise ValueError("registry mismatch")
    reg = numerator.registry
    rem = dict(numerator.terms)
    out: Dict[Exponent, Fraction] = {}
    dexp, dc = divisor.leading()
    dterms = list(divisor.terms.items())
    while rem:
        e = max(rem, key=grevlex_key)
        c = rem[e]
        q = tuple(a - b for a, b in zip(e, dexp))
        if any(x < 0 for x in q):
            raise ValueError("not exactly divisible")
        qc = c / dc
        out[q] = out.get(q, Fraction(0)) + qc
        for de, dcf in dterms:
            t = tuple(a + b for a, b in zip(q, de))
            nv = rem.get(t, Fraction(0)) - qc * dcf
            if nv:
                rem[t] = nv
            else:
                rem.pop(t, None)
    return Polynomial(reg, out)


def try_exact_div(numerator: Polynomial, divisor: Polynomial) -> Polynomial | None:
    try:
        return exact_div(numerator, divisor)
    except ValueError:
        return None


def poly_sum(polys: Iterable[Polynomial], registry: VarRegistry) -> Polynomial:
    out: Dict[Exponent, Fraction] = {}
    for p in polys:
        if p.registry != registry:
            raise ValueError("registry mismatch in sum")
        for e, c in p.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
    return Polynomial(registry, out)
