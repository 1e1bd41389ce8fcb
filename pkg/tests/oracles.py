"""Independent oracles used to derive expected values.

Everything here deliberately avoids the production code paths: subspace
intersections go through stacked projector null spaces, relation sums
through an explicit lift into X (+) Y (+) Y, suprema through dense
sampling with iterated-squaring refinement, and the quotient seminorm
form is reconstructed pointwise by polarization.  Tests compare these
against the package implementations.
"""

from __future__ import annotations

import math

import numpy as np

from linrel import metrics as met
from linrel import relation as rel
from linrel import subspace as sub
from linrel.relation import LinearRelation
from linrel.subspace import Subspace


def nullspace_oracle(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal null-space basis straight from the SVD."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    if m.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.count_nonzero(s > max(tol * (s[0] if s.size else 0.0), 1e-12)))
    return vh[rank:].conj().T


def intersect_oracle(s1: Subspace, s2: Subspace) -> Subspace:
    """Intersection via the null space of the stacked projector complements."""
    eye = np.eye(s1.ambient, dtype=complex)
    stacked = np.vstack([eye - s1.projector, eye - s2.projector])
    return sub.span(nullspace_oracle(stacked), ambient=s1.ambient)


def lift_add_oracle(s: LinearRelation, t: LinearRelation) -> LinearRelation:
    """Relation sum by the literal lift into X (+) Y (+) Y."""
    x, y = s.x_dim, s.y_dim
    gs, gt = s.graph.basis, t.graph.basis
    pad = np.zeros((y, gs.shape[1]), dtype=complex)
    lift_s = sub.sum(sub.span(np.vstack([gs, pad]), ambient=x + 2 * y),
                     sub.span(np.vstack([np.zeros((x + y, y)), np.eye(y)]),
                              ambient=x + 2 * y))
    padt = np.zeros((y, gt.shape[1]), dtype=complex)
    lift_t = sub.sum(sub.span(np.vstack([gt[:x], padt, gt[x:]]), ambient=x + 2 * y),
                     sub.span(np.vstack([np.zeros((x, y)), np.eye(y),
                                         np.zeros((y, y))]), ambient=x + 2 * y))
    meet = intersect_oracle(lift_s, lift_t)
    collapse = np.hstack([np.vstack([np.eye(x), np.zeros((y, x))]),
                          np.vstack([np.zeros((x, y)), np.eye(y)]),
                          np.vstack([np.zeros((x, y)), np.eye(y)])])
    return rel.from_graph(sub.apply_map(collapse, meet), x, y)


def slice_oracle(t: LinearRelation, m: Subspace) -> Subspace:
    """Image T(M) via the generic intersection G(T) ^ (M (+) Y)."""
    x, y = t.x_dim, t.y_dim
    m_lift = sub.sum(sub.span(np.vstack([m.basis, np.zeros((y, m.dim))]),
                              ambient=x + y),
                     sub.span(np.vstack([np.zeros((x, y)), np.eye(y)]),
                              ambient=x + y))
    meet = intersect_oracle(t.graph, m_lift)
    return sub.span(meet.basis[x:], ambient=y)


def sampled_sup_distance(m: Subspace, n: Subspace, rng, samples: int = 4096,
                         squarings: int = 60) -> float:
    """sup over the unit sphere of M of dist(., N) by dense sampling plus
    iterated squaring of the residual Gram form."""
    if m.dim == 0:
        return 0.0
    resid = m.basis - n.projector @ m.basis
    c = rng.standard_normal((m.dim, samples)) + 1j * rng.standard_normal((m.dim, samples))
    c /= np.linalg.norm(c, axis=0, keepdims=True)
    vals = np.linalg.norm(resid @ c, axis=0)
    best = float(vals.max())
    if best < 1e-12:
        return best
    w = resid.conj().T @ resid
    w /= np.linalg.norm(w)
    for _ in range(squarings):
        w = w @ w
        nw = np.linalg.norm(w)
        if nw < 1e-300:
            break
        w /= nw
    top = w @ c[:, int(vals.argmax())]
    nt = np.linalg.norm(top)
    if nt > 1e-150:
        best = max(best, float(np.linalg.norm(resid @ (top / nt))))
    return min(1.0, best)


def seminorm_form(t: LinearRelation) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrix H with ||T x||^2 = c^H H c for x = Q c, Q = domain basis.

    Reconstructed by polarization from pointwise quotient-norm values, so
    it never touches the induced-operator construction.  Also validates
    itself on random points.
    """
    q = t.domain.basis
    d = q.shape[1]
    h = np.zeros((d, d), dtype=complex)

    def val(c):
        return met.relation_norm_at(t, q @ c) ** 2

    for j in range(d):
        ej = np.zeros(d, dtype=complex)
        ej[j] = 1.0
        h[j, j] = val(ej)
    for j in range(d):
        for k in range(j + 1, d):
            ej = np.zeros(d, dtype=complex)
            ek = np.zeros(d, dtype=complex)
            ej[j] = 1.0
            ek[k] = 1.0
            plus = val(ej + ek)
            minus = val(ej - ek)
            iplus = val(ej + 1j * ek)
            iminus = val(ej - 1j * ek)
            # sesquilinear polarization, conjugate-linear first slot
            h[j, k] = (plus - minus) / 4 + 1j * (iplus - iminus) / 4
            h[k, j] = np.conj(h[j, k])
    rng = np.random.default_rng(0)
    for _ in range(4):
        c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        direct = val(c)
        through = float((c.conj() @ h @ c).real)
        assert abs(direct - through) <= 1e-8 * max(1.0, direct), \
            "polarization reconstruction failed"
    return h, q


def brute_alpha_prime_eps(t: LinearRelation, eps: float, rng,
                          starts: int = 200, climbs: int = 250) -> int:
    """Largest dim of a subspace of D(T) with ||T x|| <= eps ||x|| on it,
    found by random-subspace maximization with stochastic refinement.

    The seminorm is evaluated through the polarization form (definition
    route); candidate subspaces are drawn and perturbed on the
    Grassmannian of D(T)-coordinates.
    """
    if t.domain.dim == 0:
        return 0
    h, _ = seminorm_form(t)
    d = h.shape[0]
    target = eps * eps

    def sup_on(cols: np.ndarray) -> float:
        q, _ = np.linalg.qr(cols)
        q = q[:, : cols.shape[1]]
        form = q.conj().T @ h @ q
        return float(np.linalg.eigvalsh(form)[-1].real)

    best_dim = 0
    for k in range(1, d + 1):
        best = math.inf
        best_cols = None
        for _ in range(starts):
            cols = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
            v = sup_on(cols)
            if v < best:
                best, best_cols = v, cols
        step = 0.5
        for _ in range(climbs):
            cand = best_cols + step * (rng.standard_normal((d, k))
                                       + 1j * rng.standard_normal((d, k)))
            v = sup_on(cand)
            if v < best:
                best, best_cols = v, cand
                step = min(0.8, step * 1.2)
            else:
                step *= 0.9
        if best <= target + 1e-9:
            best_dim = k
    return best_dim
