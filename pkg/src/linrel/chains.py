"""Inductive subspace chains of a relation pair and the index nu(A:B).

For relations A, B from X to Y with B(0) inside A(0):

    M_0 = X,        M_n = B^{-1}(A(M_{n-1}))
    N_1 = N(A),     N_n = A^{-1}(B(N_{n-1}))

The M chain is non-increasing and the N chain non-decreasing, so both
stabilize within dim X steps.  nu(A:B) is the first n at which N_1
escapes M_n, or +inf when it never does (guaranteed when N(A) sits
inside N(B)).  The primed chains are the same construction applied to
the adjoint pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import relation as rel
from . import subspace as sub
from .relation import LinearRelation
from .subspace import Subspace
from .tolerances import CHAIN_BAND, EQ_TOL

__all__ = [
    "ChainReport",
    "m_chain",
    "n_chain",
    "dual_chains",
    "nu",
    "check_equivalent_conditions",
    "verify_nu_duality",
    "chain_report",
]


def _contained(outer: Subspace, inner: Subspace) -> tuple[bool, bool]:
    """Containment verdict plus an ill-conditioning flag for the gap."""
    g = sub.gap(inner, outer)
    return g <= EQ_TOL, CHAIN_BAND[0] < g < CHAIN_BAND[1]


@dataclass
class ChainReport:
    """Chains, stabilization data and containment table for one pair."""

    m_chain: list[Subspace]
    n_chain: list[Subspace]
    stabilized_at: int
    nu: float  # int or math.inf
    containment_table: list[list[bool]]
    ill_conditioned: bool = False

    def to_dict(self) -> dict:
        return {
            "m_dims": [s.dim for s in self.m_chain],
            "n_dims": [s.dim for s in self.n_chain],
            "stabilized_at": self.stabilized_at,
            "nu": self.nu,
            "containment_table": self.containment_table,
            "ill_conditioned": self.ill_conditioned,
        }


def m_chain(a: LinearRelation, b: LinearRelation,
            max_n: int | None = None) -> list[Subspace]:
    """[M_0, M_1, ...] up to stabilization (or max_n steps)."""
    if a.x_dim != b.x_dim or a.y_dim != b.y_dim:
        raise ValueError("dimension mismatch between the pair")
    limit = a.x_dim + 1 if max_n is None else max_n
    chain = [sub.full_space(a.x_dim)]
    for _ in range(limit):
        nxt = rel.preimage(b, rel.image(a, chain[-1]))
        chain.append(nxt)
        if nxt.is_same(chain[-2]):
            break
    return chain


def n_chain(a: LinearRelation, b: LinearRelation,
            max_n: int | None = None) -> list[Subspace]:
    """[N_1, N_2, ...] up to stabilization (or max_n steps); N_1 = N(A)."""
    if a.x_dim != b.x_dim or a.y_dim != b.y_dim:
        raise ValueError("dimension mismatch between the pair")
    limit = a.x_dim + 1 if max_n is None else max_n
    chain = [a.kernel]
    for _ in range(limit - 1):
        nxt = rel.preimage(a, rel.image(b, chain[-1]))
        chain.append(nxt)
        if nxt.is_same(chain[-2]):
            break
    return chain


def dual_chains(a: LinearRelation, b: LinearRelation,
                max_n: int | None = None) -> tuple[list[Subspace], list[Subspace]]:
    """The M and N chains of the adjoint pair (both live in Y')."""
    a_adj, b_adj = rel.adjoint(a), rel.adjoint(b)
    return m_chain(a_adj, b_adj, max_n), n_chain(a_adj, b_adj, max_n)


def nu(a: LinearRelation, b: LinearRelation) -> float:
    """Smallest n >= 1 with N(A) not inside M_n; +inf if none.

    N(A) inside N(B) is a sufficient condition for +inf and is honored
    directly; otherwise the stabilized chain decides.
    """
    n1 = a.kernel
    if sub.contains(b.kernel, n1):
        return math.inf
    chain = m_chain(a, b)
    for n in range(1, len(chain)):
        if not sub.contains(chain[n], n1):
            return n
    # Chain stabilized with containment intact at every computed step.
    return math.inf


def check_equivalent_conditions(a: LinearRelation, b: LinearRelation,
                                n: int) -> dict:
    """Evaluate conditions (1)..(n) of the equivalence lemma and kappa.

    Condition (r) is N_r inside M_{n-r+1}.  The kappa condition is the
    per-element form N_k inside B^{-1}(A(N_{k+1})) together with
    N_k inside D(B), for k = 1..n (set-level nonemptiness would be
    vacuous, both sides always contain zero).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ms = m_chain(a, b, max_n=max(n, a.x_dim + 1))
    ns = n_chain(a, b, max_n=max(n + 1, a.x_dim + 1))

    def m_at(k: int) -> Subspace:
        return ms[k] if k < len(ms) else ms[-1]

    def n_at(k: int) -> Subspace:
        return ns[k - 1] if k - 1 < len(ns) else ns[-1]

    ill = False
    conditions = []
    for r in range(1, n + 1):
        ok, flag = _contained(m_at(n - r + 1), n_at(r))
        conditions.append(ok)
        ill = ill or flag
    kappa = True
    for k in range(1, n + 1):
        target = rel.preimage(b, rel.image(a, n_at(k + 1)))
        ok1, f1 = _contained(target, n_at(k))
        ok2, f2 = _contained(b.domain, n_at(k))
        kappa = kappa and ok1 and ok2
        ill = ill or f1 or f2
    all_true = all(conditions)
    return {
        "n": n,
        "conditions": conditions,
        "kappa": kappa,
        "all_agree": len(set(conditions)) <= 1,
        "implication_holds": (not all_true) or kappa,
        "ill_conditioned": ill,
    }


def verify_nu_duality(a: LinearRelation, b: LinearRelation) -> dict:
    """Check M'_1 = (B(N_1))-perp, nu(A':B') = nu(A:B), and the adjoint
    chain containments, under the hypotheses D(A) = D(B) = X and
    B(0) inside A(0).

    A hypothesis failure marks the report not-applicable rather than
    failed; boundedness and closed range hold automatically here.
    """
    report: dict = {"applicable": True, "hypothesis_failures": []}
    if a.domain.dim != a.x_dim:
        report["hypothesis_failures"].append("D(A) = X")
    if b.domain.dim != b.x_dim:
        report["hypothesis_failures"].append("D(B) = X")
    if not sub.contains(a.multivalued_part, b.multivalued_part):
        report["hypothesis_failures"].append("B(0) subset of A(0)")
    if report["hypothesis_failures"]:
        report["applicable"] = False
        return report

    nu_primal = nu(a, b)
    a_adj, b_adj = rel.adjoint(a), rel.adjoint(b)
    nu_dual = nu(a_adj, b_adj)
    ms_dual = m_chain(a_adj, b_adj)
    ns_dual = n_chain(a_adj, b_adj)
    ms = m_chain(a, b)
    ns = n_chain(a, b)

    b_n1_perp = sub.annihilator(rel.image(b, ns[0]))
    report["equality_m"] = ms_dual[1].is_same(b_n1_perp) if len(ms_dual) > 1 else False
    report["nu"] = nu_primal
    report["nu_dual"] = nu_dual
    report["equality_nu"] = (nu_primal == nu_dual)

    # Adjoint-sequence containments up to the shorter stabilization.
    fwd, bwd = [], []
    for n in range(1, len(ms_dual)):
        n_n = ns[n - 1] if n - 1 < len(ns) else ns[-1]
        fwd.append(sub.contains(sub.annihilator(rel.image(b, n_n)), ms_dual[n]))
    for n in range(1, len(ns_dual) + 1):
        m_prev = ms[n - 1] if n - 1 < len(ms) else ms[-1]
        target = sub.annihilator(rel.image(a, m_prev))
        got = ns_dual[n - 1] if n - 1 < len(ns_dual) else ns_dual[-1]
        bwd.append(sub.contains(target, got))
    report["adjoint_sequences_m"] = fwd
    report["adjoint_sequences_n"] = bwd
    report["adjoint_sequences_hold"] = all(fwd) and all(bwd)
    return report


def chain_report(a: LinearRelation, b: LinearRelation,
                 max_n: int | None = None) -> ChainReport:
    """Full chain data for one pair, with the containment table.

    Table row n (1-based) holds [N_k inside M_{n-k+1} for k = 1..n].
    """
    ms = m_chain(a, b, max_n)
    ns = n_chain(a, b, max_n)
    depth = a.x_dim + 1 if max_n is None else max_n

    def m_at(k: int) -> Subspace:
        return ms[k] if k < len(ms) else ms[-1]

    def n_at(k: int) -> Subspace:
        return ns[k - 1] if k - 1 < len(ns) else ns[-1]

    ill = False
    table = []
    for n in range(1, depth + 1):
        row = []
        for k in range(1, n + 1):
            ok, flag = _contained(m_at(n - k + 1), n_at(k))
            row.append(ok)
            ill = ill or flag
        table.append(row)
    return ChainReport(ms, ns, stabilized_at=len(ms) - 1, nu=nu(a, b),
                       containment_table=table, ill_conditioned=ill)
