"""Dense exact diagonalization of small periodic Ising chains.

Independent of the free-fermion machinery: the Hamiltonian is assembled
directly in the 2^N spin basis and fully diagonalized, and every quantity
is evaluated from the resulting spectrum with the generic zero-temperature
perturbation formulas. For ``H(lam) = H0 + lam H1``, with
``V_n = <n|H1|0>`` and ``D_n = E_n - E_0``:

    chi_F   = sum_{n>0} V_n^2 / D_n^2
    W / d^2 = sum_{n>0} V_n^2 / D_n     = -(1/2) d^2 E_0 / d lam^2

Basis convention: site 1 is the most significant bit of the basis index, bit
value 0 is spin up (``sz = +1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DegeneracyError, NumericalError, ResourceError

MAX_SITES = 12
DEGENERACY_TOL = 1e-8
NEGLIGIBLE_ELEMENT = 1e-10
FD_STEP = 1e-3


@lru_cache(maxsize=8)
def _parts(n_sites):
    dim = 1 << n_sites
    idx = np.arange(dim)
    shifts = n_sites - 1 - np.arange(n_sites)
    up = ((idx[:, None] >> shifts) & 1) == 0
    h1 = np.diag(-(2.0 * up.sum(axis=1) - n_sites))
    h0 = np.zeros((dim, dim))
    for j in range(n_sites):
        a = shifts[j]
        b = shifts[(j + 1) % n_sites]
        # sx_j sx_{j+1} flips both bits; the flip map is an involution, so
        # every (s, s') entry gets its (s', s) partner in the same pass.
        h0[idx, idx ^ (1 << a) ^ (1 << b)] -= 1.0
    h0.flags.writeable = False
    h1.flags.writeable = False
    return h0, h1


@dataclass(frozen=True)
class DenseHamiltonian:
    """``total(lam) = h0 + lam * h1`` on the full 2^N spin space.

    ``h0 = -sum_j sx_j sx_{j+1}`` (periodic), ``h1 = -sum_j sz_j``. For N = 2 the
    periodic sum visits the single bond twice, exactly as the sum is written.
    """

    n_sites: int
    field: float
    h0: np.ndarray
    h1: np.ndarray

    @property
    def dimension(self):
        return self.h0.shape[0]

    def total(self, lam=None):
        return self.h0 + (self.field if lam is None else lam) * self.h1

    def at(self, lam):
        return DenseHamiltonian(self.n_sites, float(lam), self.h0, self.h1)


def build_hamiltonian(n_sites, lam=0.0):
    if isinstance(n_sites, bool) or int(n_sites) != n_sites or n_sites < 2:
        raise ConfigurationError(f"N must be an integer >= 2, got {n_sites!r}")
    n_sites = int(n_sites)
    if n_sites > MAX_SITES:
        raise ResourceError(f"dense ED capped at N={MAX_SITES} (dimension {1 << MAX_SITES}), got N={n_sites}")
    h0, h1 = _parts(n_sites)
    return DenseHamiltonian(n_sites, float(lam), h0, h1)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending energies and orthonormal eigenvector columns."""

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def ground_state(self):
        return self.vectors[:, 0]

    @property
    def gap(self):
        return float(self.energies[1] - self.energies[0])


def _round_robin(n):
    """Pairings for one parallel Jacobi sweep: n-1 rounds of n/2 disjoint pairs."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        p = np.array(players[: n // 2])
        q = np.array(players[n // 2:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, tol=1e-12, max_sweeps=50):
    """Cyclic Jacobi eigensolver for a dense real symmetric matrix.

    Rotations are applied in round-robin (Brent-Luk) order so each round is a
    batch of n/2 disjoint plane rotations. Converged when the off-diagonal
    Frobenius norm drops below ``tol * ||a||_F``. Returns ``(w, v)`` sorted
    ascending like :func:`numpy.linalg.eigh`.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.array_equal(a, a.T):
        raise ConfigurationError("jacobi_eigh needs a square symmetric matrix")
    pad = n % 2
    if pad:
        a = np.pad(a, ((0, 1), (0, 1)))
    m = a.shape[0]
    v = np.eye(m)
    scale = np.linalg.norm(a)
    rounds = _round_robin(m) if m > 1 else []

    def off_norm():
        # direct sum: subtracting the diagonal from the total loses ~8 digits
        off = a - np.diag(np.diag(a))
        return np.sqrt(np.sum(off * off))

    for _ in range(max_sweeps):
        if off_norm() <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    else:
        if off_norm() > tol * scale:
            raise NumericalError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a)[: n]
    v = v[:n, :n]
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigendecompose(h, lam=None, solver="lapack"):
    """Full spectrum of ``h.total(lam)``.

    ``solver="lapack"`` (default) uses :func:`numpy.linalg.eigh`;
    ``solver="jacobi"`` uses :func:`jacobi_eigh`, practical up to dimension
    ~256. Eigenvector signs are fixed so the largest-magnitude component is
    positive, which makes the output reproducible.
    """
    mat = h.total(lam)
    if solver == "lapack":
        try:
            w, v = np.linalg.eigh(mat)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(str(exc)) from exc
    elif solver == "jacobi":
        w, v = jacobi_eigh(mat)
    else:
        raise ConfigurationError(f"unknown eigensolver {solver!r}")
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    v = v * np.where(signs == 0, 1.0, signs)
    return EigenSystem(w, v)


def _system(n_sites, lam, hamiltonian, solver):
    h = hamiltonian if hamiltonian is not None else build_hamiltonian(n_sites, lam)
    return h, eigendecompose(h, lam, solver)


def _strict_ground(eig, where):
    if eig.gap < DEGENERACY_TOL:
        raise DegeneracyError(f"degenerate ground state at {where}: gap {eig.gap:.3e}", eig.gap)
    return eig.ground_state


def perturbation_terms(h, eig):
    """Excited-state matrix elements ``V_n``, gaps ``D_n`` and energies ``E_n``, n > 0.

    Levels within DEGENERACY_TOL of E_0 are dropped when their matrix element
    is negligible; otherwise the ground state is ambiguous and we refuse.
    """
    v_all = eig.vectors.T @ (h.h1 @ eig.ground_state)
    d_all = eig.energies - eig.energies[0]
    v, d, e = v_all[1:], d_all[1:], eig.energies[1:]
    near = d < DEGENERACY_TOL
    if np.any(near):
        if np.any(np.abs(v[near]) >= NEGLIGIBLE_ELEMENT):
            raise DegeneracyError(
                f"level within {DEGENERACY_TOL} of E0 couples through H1 (gap {d[near].min():.3e})",
                float(d[near].min()),
            )
        v, d, e = v[~near], d[~near], e[~near]
    return v, d, e


def ground_energy(n_sites, lam, *, hamiltonian=None, solver="lapack"):
    return float(_system(n_sites, lam, hamiltonian, solver)[1].energies[0])


def fidelity(n_sites, lam, delta, *, hamiltonian=None, solver="lapack"):
    """Ground-state overlap modulus ``|<psi0(lam)|psi0(lam + delta)>|``."""
    return 1.0 - infidelity(n_sites, lam, delta, hamiltonian=hamiltonian, solver=solver)


def infidelity(n_sites, lam, delta, *, hamiltonian=None, solver="lapack"):
    """``1 - F`` computed as ``||a - b||^2 / 2`` after aligning signs.

    For real unit vectors with ``<a|b> >= 0`` this equals ``1 - <a|b>`` exactly
    but avoids the cancellation, which matters for ``delta ~ 1e-3``.
    """
    h, e1 = _system(n_sites, lam, hamiltonian, solver)
    e2 = eigendecompose(h, lam + delta, solver)
    a = _strict_ground(e1, f"lam={lam}")
    b = _strict_ground(e2, f"lam={lam + delta}")
    if a @ b < 0:
        b = -b
    diff = a - b
    return 0.5 * float(diff @ diff)


def chi_f_perturbative(n_sites, lam, *, hamiltonian=None, solver="lapack"):
    """``sum_{n>0} |<n|H1|0>|^2 / (E_n - E_0)^2`` over the whole spectrum."""
    h, eig = _system(n_sites, lam, hamiltonian, solver)
    v, d, _ = perturbation_terms(h, eig)
    return float(np.sum(v * v / (d * d)))


def w_irr_sudden(n_sites, lam, delta, *, hamiltonian=None, solver="lapack"):
    """Irreversible work of the sudden quench ``lam -> lam + delta``.

    ``<psi0(lam)|H(lam + delta)|psi0(lam)> - E0(lam + delta)``; the free-energy
    change at zero temperature is the ground-energy shift.
    """
    h, e1 = _system(n_sites, lam, hamiltonian, solver)
    e2 = eigendecompose(h, lam + delta, solver)
    psi = _strict_ground(e1, f"lam={lam}")
    _strict_ground(e2, f"lam={lam + delta}")
    # <H(lam+delta)> = E0(lam) + delta <H1>, exact for a linear family
    quenched = e1.energies[0] + delta * float(psi @ (h.h1 @ psi))
    return float(quenched - e2.energies[0])


def riw_perturbative(n_sites, lam, *, hamiltonian=None, solver="lapack"):
    """``sum_{n>0} |<n|H1|0>|^2 / (E_n - E_0)``, equal to ``-(1/2) d^2E0/dlam^2``."""
    h, eig = _system(n_sites, lam, hamiltonian, solver)
    v, d, _ = perturbation_terms(h, eig)
    return float(np.sum(v * v / d))


def riw_finite_difference(n_sites, lam, step=FD_STEP, *, hamiltonian=None, solver="lapack"):
    """``-(1/2)`` times the central second difference of the ED ground energy."""
    h = hamiltonian if hamiltonian is not None else build_hamiltonian(n_sites, lam)
    e = [eigendecompose(h, lam + s, solver).energies[0] for s in (-step, 0.0, step)]
    return -0.5 * (e[0] - 2.0 * e[1] + e[2]) / (step * step)


def energy_slope(n_sites, lam, *, hamiltonian=None, solver="lapack"):
    """Hellmann-Feynman slope ``dE0/dlam = <psi0|H1|psi0>``."""
    h, eig = _system(n_sites, lam, hamiltonian, solver)
    psi = eig.ground_state
    return float(psi @ (h.h1 @ psi))


@dataclass(frozen=True)
class IdentityReport:
    n_sites: int
    field: float
    lhs: float
    rhs: float
    chi_f: float
    ground_energy: float

    @property
    def abs_gap(self):
        return abs(self.lhs - self.rhs)

    def passed(self, rtol=1e-9):
        return self.abs_gap <= rtol * max(1.0, abs(self.lhs))


def identity_check(n_sites, lam, *, hamiltonian=None, solver="lapack"):
    """Compare the RIW with its expression through chi_F.

    LHS: ``sum V_n^2 / D_n``. RHS: ``-[E0 chi_F - sum_n E_n V_n^2 / (E0 - E_n)^2]``.
    Both sides come from one eigendecomposition.
    """
    h, eig = _system(n_sites, lam, hamiltonian, solver)
    v, d, _ = perturbation_terms(h, eig)
    e0 = float(eig.energies[0])
    en = e0 + d
    w = v * v / (d * d)
    chi = float(np.sum(w))
    lhs = float(np.sum(v * v / d))
    rhs = -(e0 * chi - float(np.sum(en * w)))
    return IdentityReport(int(n_sites), float(lam), lhs, rhs, chi, e0)
