"""Hot circuit-evaluation kernels, numba-accelerated with a numpy fallback.

Both backends share one source: the plain functions below run as-is under
CPython, and are additionally compiled with numba when it is importable.
Set CDQAOA_NUMBA=0 to skip numba entirely; the package then runs on the
pure-numpy versions.  The active default is reported by default_backend().

Kernel contract: parameter rows are free-form angle rows (gamma, beta[,
alpha[, delta, zeta]]); variant_id is 0 (plain), 1 (cd) or 2 (2cd).
"""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

__all__ = [
    "HAVE_NUMBA",
    "default_backend",
    "get_kernels",
    "backend_names",
    "warmup",
]


def _jit_requested() -> bool:
    flag = os.environ.get("CDQAOA_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def _bdg_energy(variant_id, params, p0, a_t, offset, u_t, lam_t, u_c, lam_c, m_xx, m_tx, ax_diag):
    """Energy of a free-form circuit in the full Nambu representation.

    Evolves the 2N x N occupied-frame matrix P by V = exp(i*theta*A) per
    unitary; fixed generators arrive pre-diagonalized (u, lam), the
    step-dependent 2cd combination is diagonalized in place.
    """
    p = p0.copy()
    steps = params.shape[0]
    for k in range(steps):
        for phase in range(3):
            if phase == 0 and variant_id == 2:
                lam, u = np.linalg.eigh(params[k, 3] * m_xx - params[k, 4] * m_tx)
                theta = 1.0
            elif phase == 1 and variant_id >= 1:
                lam = lam_c
                u = u_c
                theta = params[k, 2]
            elif phase == 2:
                lam = lam_t
                u = u_t
                theta = -params[k, 0]
            else:
                continue
            p = u @ (np.exp(1j * theta * lam).reshape(-1, 1) * (np.conj(u).T @ p))
        p = np.exp(-1j * params[k, 1] * ax_diag).reshape(-1, 1) * p
    return offset - 0.5 * np.sum((np.conj(p) * (a_t @ p)).real)


def _bdg_energy_grad(variant_id, params, p0, a_t, offset, u_t, lam_t, u_c, lam_c, m_xx, m_tx, ax_diag):
    """Energy and analytic angle gradient via one forward/backward pass.

    The forward sweep caches the frame after every factor; the backward
    sweep carries the adjoint L = V_dag L with dE/dtheta = -Re tr(L_out_dag
    dV P_in).  The step-dependent 2cd exponential differentiates through
    its eigenbasis with the divided-difference kernel of exp(ix).
    """
    steps = params.shape[0]
    tn = p0.shape[0]
    nc = p0.shape[1]
    states = np.empty((steps, 4, tn, nc), np.complex128)
    w2 = np.empty((steps, tn))
    u2 = np.empty((steps, tn, tn), np.complex128)
    p = p0.copy()
    for k in range(steps):
        if variant_id == 2:
            lam, u = np.linalg.eigh(params[k, 3] * m_xx - params[k, 4] * m_tx)
            w2[k] = lam
            u2[k] = u
            p = u @ (np.exp(1j * lam).reshape(-1, 1) * (np.conj(u).T @ p))
        states[k, 0] = p
        if variant_id >= 1:
            p = u_c @ (
                np.exp(1j * params[k, 2] * lam_c).reshape(-1, 1)
                * (np.conj(u_c).T @ p)
            )
        states[k, 1] = p
        p = u_t @ (
            np.exp(-1j * params[k, 0] * lam_t).reshape(-1, 1) * (np.conj(u_t).T @ p)
        )
        states[k, 2] = p
        p = np.exp(-1j * params[k, 1] * ax_diag).reshape(-1, 1) * p
        states[k, 3] = p
    energy = offset - 0.5 * np.sum((np.conj(p) * (a_t @ p)).real)

    adj = a_t @ p
    grad = np.zeros((steps, params.shape[1]))
    for k in range(steps - 1, -1, -1):
        p_out = states[k, 3]
        s = 0.0 + 0.0j
        for a in range(tn):
            for b in range(nc):
                s += ax_diag[a] * np.conj(adj[a, b]) * p_out[a, b]
        grad[k, 1] = -s.imag
        adj = np.exp(1j * params[k, 1] * ax_diag).reshape(-1, 1) * adj

        p_out = states[k, 2]
        tp = u_t @ (lam_t.reshape(-1, 1) * (np.conj(u_t).T @ p_out))
        grad[k, 0] = -np.sum(np.conj(adj) * tp).imag
        adj = u_t @ (
            np.exp(1j * params[k, 0] * lam_t).reshape(-1, 1) * (np.conj(u_t).T @ adj)
        )

        if variant_id >= 1:
            p_out = states[k, 1]
            cp = u_c @ (lam_c.reshape(-1, 1) * (np.conj(u_c).T @ p_out))
            grad[k, 2] = np.sum(np.conj(adj) * cp).imag
            adj = u_c @ (
                np.exp(-1j * params[k, 2] * lam_c).reshape(-1, 1)
                * (np.conj(u_c).T @ adj)
            )

        if variant_id == 2:
            if k > 0:
                p_in = states[k - 1, 3]
            else:
                p_in = p0
            u = u2[k]
            w = w2[k]
            uh = np.conj(u).T
            s_in = uh @ np.ascontiguousarray(p_in)
            l_out = uh @ adj
            x_x = uh @ (m_xx @ u)
            x_t = uh @ (m_tx @ u)
            kmat = np.empty((tn, tn), np.complex128)
            for a in range(tn):
                for b in range(tn):
                    dw = w[a] - w[b]
                    if abs(dw) < 1e-9:
                        kmat[a, b] = 1j * cmath.exp(0.5j * (w[a] + w[b]))
                    else:
                        kmat[a, b] = (
                            cmath.exp(1j * w[a]) - cmath.exp(1j * w[b])
                        ) / dw
            grad[k, 3] = -np.sum(np.conj(l_out) * ((kmat * x_x) @ s_in)).real
            grad[k, 4] = np.sum(np.conj(l_out) * ((kmat * x_t) @ s_in)).real
            adj = u @ (np.exp(-1j * w).reshape(-1, 1) * l_out)
    return energy, grad


def _momentum_energy(variant_id, params, b_t, b_cd, b_xx, b_tx, offset):
    """Energy of a free-form circuit on a uniform ring via 2x2 momentum blocks.

    Each block rotation uses the closed-form 2x2 exponential from the Pauli
    decomposition of the Hermitian block, so no diagonalization is needed.
    The mixer block is diag(-2, +2) for every momentum.
    """
    n = b_t.shape[0]
    v = np.zeros((n, 2), dtype=np.complex128)
    for m in range(n):
        v[m, 1] = 1.0
    steps = params.shape[0]
    for k in range(steps):
        for phase in range(3):
            if phase == 0 and variant_id == 2:
                blocks = params[k, 3] * b_xx - params[k, 4] * b_tx
                theta = 1.0
            elif phase == 1 and variant_id >= 1:
                blocks = b_cd
                theta = params[k, 2]
            elif phase == 2:
                blocks = b_t
                theta = -params[k, 0]
            else:
                continue
            for m in range(n):
                b00 = blocks[m, 0, 0]
                b01 = blocks[m, 0, 1]
                b11 = blocks[m, 1, 1]
                c0 = 0.5 * (b00.real + b11.real)
                c3 = 0.5 * (b00.real - b11.real)
                c1 = b01.real
                c2 = -b01.imag
                r = math.sqrt(c1 * c1 + c2 * c2 + c3 * c3)
                ph = cmath.exp(1j * theta * c0)
                if r < 1e-300:
                    u00 = ph
                    u01 = 0.0 + 0.0j
                    u10 = 0.0 + 0.0j
                    u11 = ph
                else:
                    cs = math.cos(theta * r)
                    sn = math.sin(theta * r) / r
                    u00 = ph * (cs + 1j * sn * c3)
                    u01 = ph * (1j * sn) * (c1 - 1j * c2)
                    u10 = ph * (1j * sn) * (c1 + 1j * c2)
                    u11 = ph * (cs - 1j * sn * c3)
                va = v[m, 0]
                vb = v[m, 1]
                v[m, 0] = u00 * va + u01 * vb
                v[m, 1] = u10 * va + u11 * vb
        ph0 = cmath.exp(2j * params[k, 1])
        for m in range(n):
            v[m, 0] = v[m, 0] * ph0
            v[m, 1] = v[m, 1] / ph0
    acc = 0.0
    for m in range(n):
        w0 = b_t[m, 0, 0] * v[m, 0] + b_t[m, 0, 1] * v[m, 1]
        w1 = b_t[m, 1, 0] * v[m, 0] + b_t[m, 1, 1] * v[m, 1]
        acc += (np.conj(v[m, 0]) * w0 + np.conj(v[m, 1]) * w1).real
    return offset - 0.5 * acc


_NUMPY_KERNELS = {
    "bdg": _bdg_energy,
    "bdg_grad": _bdg_energy_grad,
    "momentum": _momentum_energy,
}

if HAVE_NUMBA:
    _NUMBA_KERNELS = {
        "bdg": njit(cache=True)(_bdg_energy),
        "bdg_grad": njit(cache=True)(_bdg_energy_grad),
        "momentum": njit(cache=True)(_momentum_energy),
    }
else:
    _NUMBA_KERNELS = None


def backend_names() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def default_backend() -> str:
    """Backend picked for new engines: numba unless CDQAOA_NUMBA disables it."""
    return "numba" if HAVE_NUMBA and _jit_requested() else "numpy"


def get_kernels(backend: str | None = None) -> dict:
    """Kernel table for a backend name (default: best available)."""
    name = backend or default_backend()
    if name == "numpy":
        return _NUMPY_KERNELS
    if name == "numba":
        if _NUMBA_KERNELS is None:
            raise ValueError("numba backend unavailable (disabled or not installed)")
        return _NUMBA_KERNELS
    raise ValueError(f"unknown backend '{name}'")


def warmup() -> None:
    """Compile the numba kernels on tiny inputs (no-op without numba)."""
    if not HAVE_NUMBA:
        return
    n = 2
    eye = np.eye(2 * n, dtype=complex)
    lam = np.zeros(2 * n)
    p0 = np.zeros((2 * n, n), dtype=complex)
    p0[n:, :] = np.eye(n)
    params = np.zeros((1, 5))
    _NUMBA_KERNELS["bdg"](
        2, params, p0, eye, 0.0, eye, lam, eye, lam, eye, eye, np.zeros(2 * n)
    )
    _NUMBA_KERNELS["bdg_grad"](
        2, params, p0, eye, 0.0, eye, lam, eye, lam, eye, eye, np.zeros(2 * n)
    )
    blocks = np.zeros((n, 2, 2), dtype=complex)
    _NUMBA_KERNELS["momentum"](2, params, blocks, blocks, blocks, blocks, 0.0)
