"""Exact bookkeeping of the k-exponent contributions and their min-max optimum.

Each contribution to the bound for the dyadic sum is an affine form
``c0 + c_theta*theta + c_eta*eta`` in the two free parameters: ``theta`` controls
where the approximate functional equation is truncated and ``eta`` sets the
conductor-lowering length ``T = k^(1-eta)``.  Exponents are relative to the
trivial bound ``N^(1/2) k^(3/2)``, so a negative optimum means a power saving.

Everything here is done in :class:`fractions.Fraction`; no floats are used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "ExponentTerm",
    "Domain",
    "MinimaxResult",
    "UnboundedError",
    "paper_terms",
    "minimax",
    "main_theorem_exponent",
    "eisenstein_exponent",
    "balancing_certificate",
    "ledger_json",
]

F = Fraction


@dataclass(frozen=True)
class ExponentTerm:
    c0: Fraction
    c_theta: Fraction
    c_eta: Fraction
    label: str = ""

    def __post_init__(self):
        for name in ("c0", "c_theta", "c_eta"):
            object.__setattr__(self, name, F(getattr(self, name)))

    def __call__(self, theta, eta) -> Fraction:
        return self.c0 + self.c_theta * F(theta) + self.c_eta * F(eta)

    def as_dict(self) -> dict:
        def pair(x: Fraction) -> dict:
            return {"num": x.numerator, "den": x.denominator}

        return {
            "label": self.label,
            "c0": pair(self.c0),
            "c_theta": pair(self.c_theta),
            "c_eta": pair(self.c_eta),
        }


@dataclass(frozen=True)
class Domain:
    """Open rectangle of admissible parameters; ``None`` means unbounded on that side.

    The optimizer works on the closure and reports which open edges the
    optimum touches.
    """

    theta_lo: Fraction | None = F(0)
    theta_hi: Fraction | None = F(3, 2)
    eta_lo: Fraction | None = F(0)
    eta_hi: Fraction | None = F(1)


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class MinimaxResult:
    theta: Fraction
    eta: Fraction
    value: Fraction
    binding: tuple[str, ...]
    boundary: tuple[str, ...]
    certificate: tuple[tuple[Fraction, Fraction, Fraction], ...] = field(repr=False)

    def __iter__(self):
        # unpacks as (theta, eta, value)
        return iter((self.theta, self.eta, self.value))


def paper_terms() -> list[ExponentTerm]:
    """The five contributions, already expressed in (theta, eta) via
    ``k^(3-theta) < N r^2 << k^3`` and ``r << k^theta``."""
    return [
        # shifted error term of the GL(3) Voronoi step, q ~ Q and N ~ k^3
        ExponentTerm(F(-1, 2), F(0), F(3, 2), "error-term"),
        # diagonal n2 = 0 after Poisson, N r^2 > k^(3-theta)
        ExponentTerm(F(0), F(1, 2), F(-1, 2), "zero-frequency"),
        # nonzero frequencies with a small modulus block, r << k^theta
        ExponentTerm(F(0), F(2), F(-1, 2), "small-modulus"),
        # nonzero frequencies, generic modulus block
        ExponentTerm(F(-1, 6), F(0), F(3, 4), "generic"),
        # tail of the approximate functional equation, k^((3-theta)/2)
        ExponentTerm(F(0), F(-1, 2), F(0), "afe-tail"),
    ]


def _solve3(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Cramer's rule on a 3x3 rational system; None when singular."""

    def det(m):
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    d = det(rows)
    if d == 0:
        return None
    out = []
    for col in range(3):
        m = [list(r) for r in rows]
        for i in range(3):
            m[i][col] = rhs[i]
        out.append(det(m) / d)
    return out


def _check_recession(terms: Sequence[ExponentTerm], domain: Domain) -> None:
    """Raise when some direction inside the domain lowers every term forever."""
    gens = []
    if domain.theta_hi is None:
        gens.append((F(1), F(0)))
    if domain.theta_lo is None:
        gens.append((F(-1), F(0)))
    if domain.eta_hi is None:
        gens.append((F(0), F(1)))
    if domain.eta_lo is None:
        gens.append((F(0), F(-1)))
    if not gens:
        return

    def worst(d):
        return max(t.c_theta * d[0] + t.c_eta * d[1] for t in terms)

    cands = list(gens)
    # along a segment between two generators the max of linear functions is
    # minimized at an endpoint or where two terms cross
    for g1, g2 in combinations(gens, 2):
        for a, b in combinations(terms, 2):
            u = a.c_theta * g1[0] + a.c_eta * g1[1] - b.c_theta * g1[0] - b.c_eta * g1[1]
            v = a.c_theta * g2[0] + a.c_eta * g2[1] - b.c_theta * g2[0] - b.c_eta * g2[1]
            if u != v:
                s = u / (u - v)
                if 0 < s < 1:
                    cands.append(((1 - s) * g1[0] + s * g2[0], (1 - s) * g1[1] + s * g2[1]))
    for d in cands:
        if worst(d) < 0:
            var = "theta" if d[0] != 0 else "eta"
            sense = "increasing" if (d[0] if d[0] != 0 else d[1]) > 0 else "decreasing"
            raise UnboundedError(
                f"objective unbounded below: no term grows as {var} moves in direction "
                f"{tuple(str(c) for c in d)}; add a term {sense} in {var}"
            )


_BIG = F(10**6)


def minimax(terms: Iterable[ExponentTerm], domain: Domain | None = None) -> MinimaxResult:
    """Minimize ``max_i term_i(theta, eta)`` over the closed domain.

    The problem is the linear program ``min t`` subject to ``t >= term_i`` and
    the box constraints, so an optimum sits at a vertex cut out by three active
    constraints.  All such vertices are enumerated exactly.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("need at least one term")
    domain = domain or Domain()
    _check_recession(terms, domain)

    lo_t = domain.theta_lo if domain.theta_lo is not None else -_BIG
    hi_t = domain.theta_hi if domain.theta_hi is not None else _BIG
    lo_e = domain.eta_lo if domain.eta_lo is not None else -_BIG
    hi_e = domain.eta_hi if domain.eta_hi is not None else _BIG

    # planes a*theta + b*eta + c*t = rhs
    planes = [((-t.c_theta, -t.c_eta, F(1)), t.c0) for t in terms]
    planes += [
        ((F(1), F(0), F(0)), lo_t),
        ((F(1), F(0), F(0)), hi_t),
        ((F(0), F(1), F(0)), lo_e),
        ((F(0), F(1), F(0)), hi_e),
    ]

    seen = set()
    cert = []
    for trio in combinations(planes, 3):
        sol = _solve3([p[0] for p in trio], [p[1] for p in trio])
        if sol is None:
            continue
        th, et, _ = sol
        if not (lo_t <= th <= hi_t and lo_e <= et <= hi_e):
            continue
        if (th, et) in seen:
            continue
        seen.add((th, et))
        cert.append((th, et, max(t(th, et) for t in terms)))

    if not cert:
        raise UnboundedError("no feasible vertex")
    cert.sort(key=lambda c: (c[2], c[0], c[1]))
    th, et, val = cert[0]
    binding = tuple(t.label for t in terms if t(th, et) == val)
    boundary = []
    if domain.theta_lo is not None and th == domain.theta_lo:
        boundary.append("theta_lo")
    if domain.theta_hi is not None and th == domain.theta_hi:
        boundary.append("theta_hi")
    if domain.eta_lo is not None and et == domain.eta_lo:
        boundary.append("eta_lo")
    if domain.eta_hi is not None and et == domain.eta_hi:
        boundary.append("eta_hi")
    return MinimaxResult(th, et, val, binding, tuple(boundary), tuple(cert))


def main_theorem_exponent() -> Fraction:
    """k-exponent of the Rankin-Selberg bound: 3/2 plus the optimal saving."""
    res = minimax(paper_terms())
    balancing_certificate(res)
    return F(3, 2) + res.value


def eisenstein_exponent() -> Fraction:
    # L(pi x f) splits into three shifted L(f) factors at the central point
    return main_theorem_exponent() / 3


def balancing_certificate(res: MinimaxResult | None = None) -> dict[str, Fraction]:
    """Values of every term at the optimum; the three binding ones must agree."""
    res = res or minimax(paper_terms())
    vals = {t.label: t(res.theta, res.eta) for t in paper_terms()}
    bound = {vals["small-modulus"], vals["generic"], vals["afe-tail"]}
    if len(bound) != 1:
        raise AssertionError(f"balancing failed: {vals}")
    return vals


def ledger_json(terms: Iterable[ExponentTerm] | None = None) -> list[dict]:
    return [t.as_dict() for t in (paper_terms() if terms is None else terms)]
