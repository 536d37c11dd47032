"""Chain groups, ball and boundary operators, evaluation maps and certificates.

A chain at level n is a finite Z[A, A^-1]-combination of balled diagrams with
exactly n crossing balls.  Generators are identified by canonical key; the
only crossing-free generators are the empty diagram and the single circle.

Certification follows the two-sided strategy: a chain is certified a cycle by
exhibiting a cancellation of its boundary (canonical keys first, then framed
move pairings, each logged and replayable), and certified not a boundary by a
nonzero value of the evaluation homomorphism, which kills every boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .algebra import A, A_INV, LOOP_FACTOR, Cyclo6, LaurentPoly, epsilon_scalar
from .diagram import (
    BalledDiagram,
    DiagramError,
    BadBallIndex,
    LevelMismatch,
    canonical_key,
    diagram_from_json,
    diagram_to_json,
    smooth,
    strip_trivial,
    unmark,
    validate,
)
from .moves import apply_move, equivalent_bounded, simplify_framed

__all__ = [
    "Chain",
    "StateSumLimit",
    "chain_add",
    "chain_scale",
    "ball_operator",
    "boundary",
    "epsilon_chain",
    "bracket",
    "eval_chain",
    "CycleResult",
    "is_cycle",
    "Certificate",
    "certify_nonboundary",
    "replay_certificate",
]

SCHEMA_VERSION = 1


class StateSumLimit(RuntimeError):
    """The state sum was refused because the diagram has too many crossings."""


def _check_generator(d: BalledDiagram, level: int) -> None:
    validate(d)
    if d.level != level:
        raise LevelMismatch(f"diagram has {d.level} balls, chain has level {level}")
    if d.loops and d.crossings:
        raise DiagramError("chain generators carry no split circles beside crossings")
    if d.loops > 1:
        raise DiagramError("multiple split circles must be rewritten away first")


class Chain:
    """Finite formal Z[A,A^-1]-combination of level-n balled diagrams."""

    __slots__ = ("level", "_terms")

    def __init__(self, level: int, terms: Mapping[bytes, tuple[BalledDiagram, LaurentPoly]] | None = None):
        self.level = level
        self._terms: dict[bytes, tuple[BalledDiagram, LaurentPoly]] = {}
        if terms:
            for key, (d, coeff) in terms.items():
                if coeff:
                    self._terms[key] = (d, coeff)

    @classmethod
    def zero(cls, level: int) -> Chain:
        return cls(level)

    @classmethod
    def single(cls, d: BalledDiagram, coeff: LaurentPoly | int = 1) -> Chain:
        if isinstance(coeff, int):
            coeff = LaurentPoly({0: coeff})
        _check_generator(d, d.level)
        ch = cls(d.level)
        if coeff:
            ch._terms[canonical_key(d)] = (d, coeff)
        return ch

    def terms(self) -> list[tuple[BalledDiagram, LaurentPoly]]:
        """Deterministic term list, sorted by canonical key."""
        return [self._terms[k] for k in sorted(self._terms)]

    def coefficient(self, d: BalledDiagram) -> LaurentPoly:
        entry = self._terms.get(canonical_key(d))
        return entry[1] if entry else LaurentPoly()

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.level == other.level and {
            k: c for k, (_, c) in self._terms.items()
        } == {k: c for k, (_, c) in other._terms.items()}

    def __hash__(self) -> int:
        return hash((self.level, frozenset((k, c) for k, (_, c) in self._terms.items())))

    def __add__(self, other: Chain) -> Chain:
        return chain_add(self, other)

    def __sub__(self, other: Chain) -> Chain:
        return chain_add(self, chain_scale(LaurentPoly({0: -1}), other))

    def __rmul__(self, coeff: LaurentPoly | int) -> Chain:
        if isinstance(coeff, int):
            coeff = LaurentPoly({0: coeff})
        return chain_scale(coeff, self)

    def __str__(self) -> str:
        if not self._terms:
            return f"0  (level {self.level})"
        parts = [f"({coeff}) * [{d}]" for d, coeff in self.terms()]
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "terms": [
                {"coeff": coeff.to_pairs(), "diagram": diagram_to_json(d)}
                for d, coeff in self.terms()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Chain:
        try:
            level = int(obj["level"])
            raw = obj.get("terms", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"malformed chain object: {exc}") from exc
        ch = cls(level)
        for item in raw:
            d = diagram_from_json(item["diagram"])
            coeff = LaurentPoly.from_pairs(item["coeff"])
            _check_generator(d, level)
            ch = chain_add(ch, Chain.single(d, coeff))
        return ch


def chain_add(c1: Chain, c2: Chain) -> Chain:
    if c1.level != c2.level:
        raise LevelMismatch(f"cannot add chains at levels {c1.level} and {c2.level}")
    terms = dict(c1._terms)
    for key, (d, coeff) in c2._terms.items():
        if key in terms:
            acc = terms[key][1] + coeff
            if acc:
                terms[key] = (terms[key][0], acc)
            else:
                del terms[key]
        else:
            terms[key] = (d, coeff)
    return Chain(c1.level, terms)


def chain_scale(p: LaurentPoly | int, c: Chain) -> Chain:
    if isinstance(p, int):
        p = LaurentPoly({0: p})
    if not p:
        return Chain(c.level)
    return Chain(c.level, {k: (d, p * coeff) for k, (d, coeff) in c._terms.items()})


def _strip_term(d: BalledDiagram) -> tuple[BalledDiagram, LaurentPoly]:
    """Rewrite split circles away, returning the surviving diagram and factor."""
    d2, count = strip_trivial(d)
    return d2, LOOP_FACTOR ** count


def ball_operator(c: Chain, i: int) -> Chain:
    """The i-th ball operator: keep the crossing, minus A times the zero
    smoothing, minus A^-1 times the infinity smoothing, split circles rewritten
    away with the loop factor.  Drops the level by one."""
    if not 1 <= i <= c.level:
        raise BadBallIndex(f"ball index {i} out of range 1..{c.level}")
    out = Chain(c.level - 1)
    for d, coeff in c.terms():
        out = chain_add(out, Chain.single(unmark(d, i), coeff))
        z, fz = _strip_term(smooth(d, i, "zero"))
        out = chain_add(out, Chain.single(z, coeff * (-1) * A * fz))
        w, fw = _strip_term(smooth(d, i, "infinity"))
        out = chain_add(out, Chain.single(w, coeff * (-1) * A_INV * fw))
    return out


def boundary(c: Chain) -> Chain:
    """The alternating sum of the ball operators; the zero map at level 0."""
    if c.level == 0:
        return Chain(0)
    out = Chain(c.level - 1)
    for i in range(1, c.level + 1):
        sign = -1 if i % 2 else 1
        out = chain_add(out, chain_scale(sign, ball_operator(c, i)))
    return out


def epsilon_chain(c: Chain) -> Cyclo6:
    """Evaluation homomorphism: every diagram counts 1, A goes to zeta."""
    total = Cyclo6(0)
    for _, coeff in c.terms():
        total = total + epsilon_scalar(coeff)
    return total


def bracket(d: BalledDiagram, max_crossings: int = 20) -> LaurentPoly:
    """Kauffman bracket of the underlying link by iterative state sum.

    Balls are forgotten.  Each of the 2^c states contributes
    A^(#zero - #infinity) times delta^(#circles), delta = -A^2 - A^-2; the
    empty diagram evaluates to 1 and split circles multiply by delta.
    """
    n = len(d.crossings)
    if n > max_crossings:
        raise StateSumLimit(
            f"diagram has {n} crossings, above the state-sum cap {max_crossings}"
        )
    labels = sorted(d.edge_labels())
    index = {lab: i for i, lab in enumerate(labels)}
    counts: dict[tuple[int, int], int] = {}
    for state in range(1 << n):
        parent = list(range(len(labels)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        circles = 0
        zeros = 0
        for ci in range(n):
            t = d.crossings[ci]
            if (state >> ci) & 1:
                pairs = ((t[0], t[3]), (t[1], t[2]))
            else:
                zeros += 1
                pairs = ((t[0], t[1]), (t[2], t[3]))
            for a, b in pairs:
                ra, rb = find(index[a]), find(index[b])
                if ra == rb:
                    circles += 1
                else:
                    parent[max(ra, rb)] = min(ra, rb)
        key = (2 * zeros - n, circles)
        counts[key] = counts.get(key, 0) + 1
    delta = LOOP_FACTOR
    delta_pow: dict[int, LaurentPoly] = {0: LaurentPoly({0: 1})}
    total = LaurentPoly()
    for (exp_a, circles), mult in sorted(counts.items()):
        if circles not in delta_pow:
            delta_pow[circles] = delta ** circles
        total = total + LaurentPoly({exp_a: mult}) * delta_pow[circles]
    return total * (delta ** d.loops)


def eval_chain(c: Chain, max_crossings: int = 20) -> LaurentPoly:
    """Composite into the skein module of the 3-sphere: forget balls, sum
    coefficient times bracket."""
    total = LaurentPoly()
    for d, coeff in c.terms():
        total = total + coeff * bracket(d, max_crossings)
    return total


# ---------------------------------------------------------------------------
# cycle verification


@dataclass(frozen=True)
class CycleResult:
    verdict: str  # "Yes" | "No" | "Unknown"
    proof: tuple = ()
    witness: dict | None = None
    moves_used: int = 0

    def __bool__(self) -> bool:
        return self.verdict == "Yes"


def invariant_signature(d: BalledDiagram) -> tuple:
    """Framed-isotopy invariants used to separate generators: level,
    component count, per-component self-writhes, and (when affordable) the
    bracket of the underlying link.  The last entry is None above the cap."""
    from .diagram import link_component_count, self_writhes

    sig = [d.level, link_component_count(d), self_writhes(d)]
    if len(d.crossings) <= 16:
        sig.append(tuple(map(tuple, bracket(d).to_pairs())))
    else:
        sig.append(None)
    return tuple(sig)


_signature = invariant_signature


def is_cycle(c: Chain, budget: int = 6) -> CycleResult:
    """Verify that the boundary of ``c`` cancels to zero.

    Cancellation proceeds in stages, all logged: canonical keys (stage 0,
    free), framed reduction of each surviving term (R2 deletions, kink pair
    cancellations, circle stripping), then pairing of surviving terms by the
    bounded move search.  A surviving term is a No only when a computable
    invariant separates it from every other survivor; otherwise Unknown.
    """
    b = boundary(c)
    if b.is_zero():
        return CycleResult("Yes", proof=({"stage": "keys", "note": "boundary cancels by canonical keys"},))

    proof: list[dict] = [{"stage": "keys", "note": f"{len(b)} terms survive canonical-key cancellation"}]
    moves_used = 0

    reduced = Chain(b.level)
    term_records = []
    for idx, (d, coeff) in enumerate(b.terms()):
        d2, stripped, log = simplify_framed(d)
        factor = LOOP_FACTOR ** stripped
        term_records.append(
            {
                "term": idx,
                "diagram": diagram_to_json(d),
                "coeff": coeff.to_pairs(),
                "moves": list(log),
                "stripped": stripped,
            }
        )
        moves_used += len(log)
        reduced = chain_add(reduced, Chain.single(d2, coeff * factor))
    proof.append({"stage": "reduce", "terms": term_records})
    if reduced.is_zero():
        return CycleResult("Yes", proof=tuple(proof), moves_used=moves_used)

    survivors = reduced.terms()
    n = len(survivors)
    groups: list[list[int]] = []
    assigned = [-1] * n
    pairings: list[dict] = []
    for i in range(n):
        if assigned[i] >= 0:
            continue
        assigned[i] = len(groups)
        groups.append([i])
        for j in range(i + 1, n):
            if assigned[j] >= 0:
                continue
            eq = equivalent_bounded(survivors[i][0], survivors[j][0], budget=budget)
            if eq.verdict == "Equal":
                assigned[j] = assigned[i]
                groups[assigned[i]].append(j)
                moves_used += len(eq.moves_from_first) + len(eq.moves_from_second)
                pairings.append(
                    {
                        "terms": [i, j],
                        "moves_first": list(eq.moves_from_first),
                        "moves_second": list(eq.moves_from_second),
                    }
                )
    proof.append(
        {
            "stage": "pair",
            "survivors": [
                {"diagram": diagram_to_json(d), "coeff": coeff.to_pairs()}
                for d, coeff in survivors
            ],
            "pairings": pairings,
        }
    )

    all_cancel = True
    for group in groups:
        total = LaurentPoly()
        for i in group:
            total = total + survivors[i][1]
        if total:
            all_cancel = False
            break
    if all_cancel:
        return CycleResult("Yes", proof=tuple(proof), moves_used=moves_used)

    # Soundness of a No: partition the survivors by computable invariants.
    # Isotopic diagrams never land in different cells, so a cell with nonzero
    # coefficient sum proves the boundary is nonzero.  The partition must use
    # the same invariants for every survivor; if any bracket is out of reach,
    # fall back to the cheap invariants alone.
    sigs = [_signature(d) for d, _ in survivors]
    if any(s[-1] is None for s in sigs):
        sigs = [s[:-1] + (None,) for s in sigs]
    cells: dict[tuple, LaurentPoly] = {}
    cell_witness: dict[tuple, int] = {}
    for i, (d, coeff) in enumerate(survivors):
        sig = sigs[i]
        cells[sig] = cells.get(sig, LaurentPoly()) + coeff
        cell_witness.setdefault(sig, i)
    for sig, total in cells.items():
        if total:
            i = cell_witness[sig]
            witness = {
                "diagram": diagram_to_json(survivors[i][0]),
                "coefficient_sum": total.to_pairs(),
                "invariants": {
                    "components": sig[1],
                    "self_writhes": list(sig[2]),
                    "bracket": [list(p) for p in (sig[3] or [])],
                },
            }
            proof.append({"stage": "witness", "note": "invariant cell with nonzero sum"})
            return CycleResult("No", proof=tuple(proof), witness=witness, moves_used=moves_used)
    return CycleResult("Unknown", proof=tuple(proof), moves_used=moves_used)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """Machine-checkable record that a chain is a cycle and not a boundary."""

    chain: Chain
    verdict: str  # CycleNonBoundary | CycleOnly | NotCycle | Inconclusive
    epsilon_value: Cyclo6
    bracket_value: LaurentPoly
    boundary_is_zero: tuple = ()
    witness: dict | None = None
    budget: int = 6
    moves_used: int = 0

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "chain": self.chain.to_json(),
            "verdict": self.verdict,
            "epsilon": self.epsilon_value.to_pair(),
            "bracket": self.bracket_value.to_pairs(),
            "budget": self.budget,
            "moves_used": self.moves_used,
            "boundary_proof": list(self.boundary_is_zero),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> Certificate:
        return cls(
            chain=Chain.from_json(obj["chain"]),
            verdict=obj["verdict"],
            epsilon_value=Cyclo6.from_pair(obj["epsilon"]),
            bracket_value=LaurentPoly.from_pairs(obj["bracket"]),
            boundary_is_zero=tuple(obj.get("boundary_proof", [])),
            witness=obj.get("witness"),
            budget=obj.get("budget", 6),
            moves_used=obj.get("moves_used", 0),
        )


def certify_nonboundary(c: Chain, budget: int = 6, max_crossings: int = 20) -> Certificate:
    """Run cycle verification and the evaluation certificate.

    CycleNonBoundary needs a verified zero boundary and a nonzero evaluation;
    a zero evaluation proves nothing by itself, hence CycleOnly.
    """
    result = is_cycle(c, budget=budget)
    eps = epsilon_chain(c)
    try:
        br = eval_chain(c, max_crossings=max_crossings)
    except StateSumLimit:
        br = LaurentPoly()
    if result.verdict == "Yes":
        verdict = "CycleNonBoundary" if eps else "CycleOnly"
    elif result.verdict == "No":
        verdict = "NotCycle"
    else:
        verdict = "Inconclusive"
    return Certificate(
        chain=c,
        verdict=verdict,
        epsilon_value=eps,
        bracket_value=br,
        boundary_is_zero=result.proof,
        witness=result.witness,
        budget=budget,
        moves_used=result.moves_used,
    )


def replay_certificate(cert: Certificate) -> bool:
    """Re-derive the verdict of a certificate from its own proof log.

    Recomputes the boundary, replays every logged reduction move, re-checks
    the pairings by canonical key, and re-evaluates epsilon.  Returns True
    iff everything reproduces the stored verdict.
    """
    eps = epsilon_chain(cert.chain)
    if eps != cert.epsilon_value:
        return False
    b = boundary(cert.chain)
    stages = {entry.get("stage"): entry for entry in cert.boundary_is_zero if isinstance(entry, Mapping)}
    if b.is_zero():
        replay_verdict = "Yes"
    elif "reduce" not in stages:
        replay_verdict = "No" if cert.verdict == "NotCycle" else "Unknown"
    else:
        reduced = Chain(b.level)
        terms = b.terms()
        records = stages["reduce"]["terms"]
        if len(records) != len(terms):
            return False
        for record, (d, coeff) in zip(records, terms):
            if diagram_from_json(record["diagram"]) != d:
                # terms are sorted by key, so the stored order must agree
                return False
            cur = d
            for desc in record["moves"]:
                cur = apply_move(cur, desc)
            cur, stripped = strip_trivial(cur)
            if stripped != record["stripped"]:
                return False
            reduced = chain_add(reduced, Chain.single(cur, coeff * (LOOP_FACTOR ** stripped)))
        if reduced.is_zero():
            replay_verdict = "Yes"
        else:
            survivors = reduced.terms()
            pair_stage = stages.get("pair", {})
            groups: dict[int, list[int]] = {}
            assigned: dict[int, int] = {}
            for k, pairing in enumerate(pair_stage.get("pairings", [])):
                i, j = pairing["terms"]
                di = survivors[i][0]
                dj = survivors[j][0]
                ki = canonical_key(_apply_all(di, pairing["moves_first"]))
                kj = canonical_key(_apply_all(dj, pairing["moves_second"]))
                if ki != kj:
                    return False
                gi = assigned.get(i)
                gj = assigned.get(j)
                if gi is None and gj is None:
                    groups[k] = [i, j]
                    assigned[i] = assigned[j] = k
                elif gi is None:
                    groups[gj].append(i)
                    assigned[i] = gj
                elif gj is None:
                    groups[gi].append(j)
                    assigned[j] = gi
            for i in range(len(survivors)):
                if i not in assigned:
                    groups[len(groups) + len(survivors)] = [i]
                    assigned[i] = -1
            all_cancel = True
            for group in groups.values():
                total = LaurentPoly()
                for i in group:
                    total = total + survivors[i][1]
                if total:
                    all_cancel = False
            if all_cancel:
                replay_verdict = "Yes"
            elif cert.verdict == "NotCycle":
                replay_verdict = "No"
            else:
                replay_verdict = "Unknown"
    expected = {
        "CycleNonBoundary": "Yes",
        "CycleOnly": "Yes",
        "NotCycle": "No",
        "Inconclusive": "Unknown",
    }[cert.verdict]
    if replay_verdict != expected:
        return False
    if cert.verdict == "CycleNonBoundary" and not eps:
        return False
    if cert.verdict == "CycleOnly" and eps:
        return False
    return True


def _apply_all(d: BalledDiagram, descs: Iterable[Mapping]) -> BalledDiagram:
    cur = d
    for desc in descs:
        cur = apply_move(cur, desc)
    return cur
