"""Sparse multivariate polynomials over an exact (or numeric) coefficient ring.

A :class:`MultiPoly` is a mapping from exponent tuples to coefficients over an
ordered list of variable names.  Coefficients are normally
:class:`fractions.Fraction`, but any ring element supporting ``+``, ``*`` and
``== 0`` works, which is how numeric substitutions (``mpf`` coefficients) are
carried through the asymptotic engine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence

Exponent = tuple[int, ...]


def _is_zero(c: Any) -> bool:
    return c == 0


class MultiPoly:
    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Any] | Iterable = ()):
        self.variables: tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        n = len(self.variables)
        clean: dict[Exponent, Any] = {}
        for exp, c in items:
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match variables {self.variables}")
            if _is_zero(c):
                continue
            if exp in clean:
                c = clean[exp] + c
                if _is_zero(c):
                    del clean[exp]
                    continue
            clean[exp] = c
        self.terms: dict[Exponent, Any] = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: Any, variables: Sequence[str] = ()) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "MultiPoly":
        variables = tuple(variables) if variables is not None else (name,)
        exp = tuple(1 if v == name else 0 for v in variables)
        if sum(exp) != 1:
            raise ValueError(f"{name!r} not among {variables}")
        return cls(variables, {exp: Fraction(1)})

    @classmethod
    def univariate(cls, coeffs: Sequence[Any], name: str = "X") -> "MultiPoly":
        """Polynomial sum(coeffs[k] * name**k)."""
        return cls((name,), {(k,): c for k, c in enumerate(coeffs)})

    # -- structure --------------------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over ``variables`` (a superset of the variables actually used)."""
        variables = tuple(variables)
        idx = {v: i for i, v in enumerate(variables)}
        out = {}
        for exp, c in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, exp):
                if e:
                    if v not in idx:
                        raise ValueError(f"variable {v!r} is used but missing from {variables}")
                    new[idx[v]] = e
            out[tuple(new)] = c
        return MultiPoly(variables, out)

    def _align(self, other: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        if self.variables == other.variables:
            return self, other
        merged = list(self.variables) + [v for v in other.variables if v not in self.variables]
        return self.with_variables(merged), other.with_variables(merged)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        return MultiPoly([mapping.get(v, v) for v in self.variables], self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator[tuple[Exponent, Any]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var``, or total degree when ``var`` is None.  Zero polynomial: -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.variables:
            return 0
        i = self.variables.index(var)
        return max(e[i] for e in self.terms)

    def partial_degree(self, exp: Exponent, names: Iterable[str]) -> int:
        """Sum of the exponents of ``names`` in the monomial ``exp``."""
        return sum(exp[self.variables.index(v)] for v in names if v in self.variables)

    def coefficient(self, exp: Exponent) -> Any:
        return self.terms.get(tuple(exp), 0)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other: Any) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(other, self.variables)

    def __add__(self, other: Any) -> "MultiPoly":
        a, b = self._align(self._coerce(other))
        out = dict(a.terms)
        for exp, c in b.terms.items():
            out[exp] = out[exp] + c if exp in out else c
        return MultiPoly(a.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if _is_zero(other):
                return MultiPoly(self.variables)
            return MultiPoly(self.variables, {e: c * other for e, c in self.terms.items()})
        a, b = self._align(other)
        out: dict[Exponent, Any] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return MultiPoly(a.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(Fraction(1), self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            if self.degree() <= 0:
                return self.coefficient((0,) * len(self.variables)) == other
            return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.with_variables(sorted(self.variables)).terms.items()))

    # -- calculus / evaluation -------------------------------------------
    def derivative(self, var: str) -> "MultiPoly":
        if var not in self.variables:
            return MultiPoly(self.variables)
        i = self.variables.index(var)
        out = {}
        for exp, c in self.terms.items():
            if exp[i]:
                new = list(exp)
                new[i] -= 1
                out[tuple(new)] = c * exp[i]
        return MultiPoly(self.variables, out)

    def substitute(self, values: Mapping[str, Any]) -> "MultiPoly":
        """Replace some variables by ring elements; the result keeps the others."""
        keep = [i for i, v in enumerate(self.variables) if v not in values]
        drop = [(i, values[v]) for i, v in enumerate(self.variables) if v in values]
        powers: dict[tuple[int, int], Any] = {}
        out: dict[Exponent, Any] = {}
        for exp, c in self.terms.items():
            for i, val in drop:
                e = exp[i]
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = val ** e
                    c = c * powers[key]
            new = tuple(exp[i] for i in keep)
            out[new] = out[new] + c if new in out else c
        return MultiPoly([self.variables[i] for i in keep], out)

    def __call__(self, **values: Any) -> Any:
        rest = self.substitute(values)
        if rest.variables:
            if rest.degree() > 0:
                raise ValueError(f"unassigned variables {rest.variables}")
            return rest.coefficient((0,) * len(rest.variables))
        return rest.terms.get((), 0)

    def map_coefficients(self, fn) -> "MultiPoly":
        return MultiPoly(self.variables, {e: fn(c) for e, c in self.terms.items()})

    # -- display ----------------------------------------------------------
    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exp) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")
