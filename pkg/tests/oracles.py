"""Independent reference computations used only by the tests."""

import math

import numpy as np


def jacobi_eigh(a, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigensolver; returns (ascending eigenvalues, eigenvectors)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.linalg.norm(a)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError("Jacobi did not converge")
    vals = np.diag(a)
    order = np.argsort(vals)
    return vals[order], v[:, order]


def power_iteration(a, tol=1e-10, max_iter=100000, shift=None):
    """Largest eigenvalue of a symmetric matrix with a nonnegative top (shifted power method)."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if shift is None:
        shift = np.max(np.abs(a).sum(axis=1))
    m = a + shift * np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    lam = 0.0
    for _ in range(max_iter):
        y = m @ x
        new = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            lam = new
            break
        lam = new
    # Rayleigh quotient on converged vector is quadratically accurate
    return float(x @ (a @ x)), x


def rk4_propagate(h, psi0, t_end, step=1e-4):
    """Integrate i dpsi/dt = H psi with classical RK4; returns psi at each multiple of ``step``."""
    h = np.asarray(h, dtype=complex)
    psi = np.asarray(psi0, dtype=complex).copy()
    nsteps = int(round(abs(t_end) / step))
    dt = t_end / nsteps if nsteps else 0.0
    out = [psi.copy()]
    f = lambda y: -1j * (h @ y)
    for _ in range(nsteps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * dt * k1)
        k3 = f(psi + 0.5 * dt * k2)
        k4 = f(psi + dt * k3)
        psi = psi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(psi.copy())
    return np.linspace(0.0, t_end, nsteps + 1), np.array(out)


def count_edges_bruteforce(adj):
    n = len(adj)
    return sum(1 for i in range(n) for j in range(i + 1, n) if adj[i][j])


def fine_grid_max(f, lo, hi, points=100_000):
    t = np.linspace(lo, hi, points)
    vals = f(t)
    k = int(np.argmax(vals))
    return float(t[k]), float(vals[k])
