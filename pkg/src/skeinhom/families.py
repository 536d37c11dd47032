"""Generators for the example chains: the two-crossing clasp, kinked annuli,
(2,2n) torus links and the framing cycles, plus the cyclic-symmetry verifier.

Every generator is deterministic: same parameters, same canonical keys.
"""

from __future__ import annotations

from .algebra import LaurentPoly
from .diagram import BalledDiagram, DiagramError, canonical_key, validate
from .moves import equivalent_bounded
from .skein import Chain, ball_operator, chain_add, chain_scale

__all__ = [
    "OddLevel",
    "MultiTerm",
    "example_T",
    "kinked_annulus",
    "torus_link_2_2n",
    "framing_cycle",
    "verify_cyclic_symmetry",
]


class OddLevel(DiagramError):
    """Cyclic-symmetry verification needs an even number of balls."""

    validator = "OddLevel"


class MultiTerm(DiagramError):
    """Cyclic-symmetry verification applies to single-term chains."""

    validator = "MultiTerm"


def example_T() -> Chain:
    """The two-crossing clasp with both crossings balled, numbered left to
    right: the level-2 cycle whose boundary cancels by a half-turn."""
    d = BalledDiagram([(4, 1, 3, 2), (2, 3, 1, 4)], [1, 2])
    return Chain.single(validate(d), 1)


def kinked_annulus(n: int, sign: int = 1) -> Chain:
    """A single closed curve with 2n same-direction kinks, every kink balled,
    balls ordered cyclically along the curve."""
    if n < 1:
        raise ValueError("need n >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m = 2 * n
    crossings = []
    for j in range(1, m + 1):
        loop = j
        arc_prev = m + (j - 1 if j > 1 else m)
        arc_next = m + j
        if sign == 1:
            crossings.append((loop, loop, arc_prev, arc_next))
        else:
            crossings.append((arc_prev, loop, loop, arc_next))
    d = BalledDiagram(crossings, list(range(1, m + 1)))
    return Chain.single(validate(d), 1)


def torus_link_2_2n(n: int) -> Chain:
    """The closed two-strand braid with 2n same-sign crossings, realized
    around the planar unknot, all crossings balled in cyclic order."""
    if n < 1:
        raise ValueError("need n >= 1")
    m = 2 * n
    crossings = []
    for j in range(1, m + 1):
        p_prev = m + (j - 1 if j > 1 else m)
        p_cur = m + j
        q_prev = 2 * m + (j - 1 if j > 1 else m)
        q_cur = 2 * m + j
        crossings.append((q_prev, p_prev, p_cur, q_cur))
    d = BalledDiagram(crossings, list(range(1, m + 1)))
    return Chain.single(validate(d), 1)


def framing_cycle(sign: int = 1) -> Chain:
    """The level-one chain that detects framing.

    First term: a circle with one balled kink of the given sign.  Second
    term: the same circle with the balled kink mirrored and a free kink of
    the given sign beside it, weighted by minus A to the 3*sign, so that the
    boundary cancels term for term after the free kink pair collapses.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if sign == 1:
        balled_kink = BalledDiagram([(1, 1, 2, 2)], [1])
        # balled negative kink plus a free positive kink on one circle
        partner = BalledDiagram([(2, 1, 1, 3), (4, 4, 3, 2)], [1])
    else:
        balled_kink = BalledDiagram([(1, 2, 2, 1)], [1])
        # balled positive kink plus a free negative kink on one circle
        partner = BalledDiagram([(1, 1, 2, 3), (3, 4, 4, 2)], [1])
    coeff = LaurentPoly({3 * sign: -1})
    return chain_add(
        Chain.single(validate(balled_kink), 1),
        chain_scale(coeff, Chain.single(validate(partner), 1)),
    )


def verify_cyclic_symmetry(c: Chain, budget: int = 6) -> str:
    """Check that consecutive ball operators agree up to framed equivalence.

    For a single-term chain of even level 2n, compares the chains from
    operators i and i+1 (indices mod 2n) term by term; Verified implies the
    alternating boundary sum telescopes to zero.  Returns Verified, Failed
    or Unknown; Failed only when a separating invariant shows two operator
    images differ.
    """
    if len(c) != 1:
        raise MultiTerm(f"chain has {len(c)} terms, expected one")
    if c.level == 0 or c.level % 2:
        raise OddLevel(f"level {c.level} is not a positive even number")
    images = [ball_operator(c, i) for i in range(1, c.level + 1)]
    any_unknown = False
    for i in range(c.level):
        a = images[i]
        b = images[(i + 1) % c.level]
        verdict = _chains_equivalent(a, b, budget)
        if verdict == "Distinct":
            return "Failed"
        if verdict == "Unknown":
            any_unknown = True
    return "Unknown" if any_unknown else "Verified"


def _chains_equivalent(a: Chain, b: Chain, budget: int) -> str:
    """Equal / Distinct / Unknown for two chains up to framed moves on terms."""
    from .skein import invariant_signature

    diff = a - b
    if diff.is_zero():
        return "Equal"
    terms = diff.terms()
    # group terms by bounded equivalence against class leaders
    classes: list[list] = []  # [leader diagram, coefficient sum]
    for d, coeff in terms:
        for entry in classes:
            if equivalent_bounded(d, entry[0], budget=budget).verdict == "Equal":
                entry[1] = entry[1] + coeff
                break
        else:
            classes.append([d, coeff])
    if all(not entry[1] for entry in classes):
        return "Equal"
    # sound Distinct: an invariant cell with nonzero coefficient sum cannot
    # be cancelled by any isotopy, so the two operator images differ
    sigs = [invariant_signature(d) for d, _ in terms]
    if any(s[-1] is None for s in sigs):
        sigs = [s[:-1] + (None,) for s in sigs]
    cells: dict[tuple, LaurentPoly] = {}
    for sig, (_, coeff) in zip(sigs, terms):
        cells[sig] = cells.get(sig, LaurentPoly()) + coeff
    if any(total for total in cells.values()):
        return "Distinct"
    return "Unknown"
