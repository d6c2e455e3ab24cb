"""Small shared helpers."""
from __future__ import annotations

import numpy as np


def ascend(value_and_grad, x0, max_iters: int = 300, tol: float = 1e-9):
    """Maximize a scale-invariant objective by normalized gradient ascent.

    ``value_and_grad(x) -> (value, grad)`` may return (None, None) for
    infeasible points.  Uses backtracking line search with an adaptive step;
    stops when no ascent direction remains at line-search resolution or when
    the relative gain over a 10-iteration window drops below ``tol``.

    Returns (x, value, iterations, converged).
    """
    x = np.asarray(x0, dtype=complex)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        return x, None, 0, False
    x = x / nrm
    val, grad = value_and_grad(x)
    if val is None:
        return x, None, 0, False
    alpha = 0.5
    window = [val]
    iters = 0
    converged = False
    for _ in range(max_iters):
        iters += 1
        gn = np.linalg.norm(grad)
        if gn == 0.0:
            converged = True
            break
        direction = grad / gn
        improved = False
        for _ in range(40):
            cand = x + alpha * direction
            cn = np.linalg.norm(cand)
            if cn == 0.0:
                alpha *= 0.5
                continue
            cand = cand / cn
            cval, cgrad = value_and_grad(cand)
            if cval is not None and cval > val:
                x, val, grad = cand, cval, cgrad
                alpha = min(alpha * 1.6, 1e3)
                improved = True
                break
            alpha *= 0.5
            if alpha < 1e-14:
                break
        if not improved:
            converged = True
            break
        window.append(val)
        if len(window) > 10:
            window.pop(0)
            if (window[-1] - window[0]) <= tol * max(abs(window[-1]), 1e-300):
                converged = True
                break
    return x, val, iters, converged


def derive_seed(*parts) -> int:
    """Deterministic 64-bit seed from a tuple of ints and strings.

    Strings are folded in bytewise so structure names participate in the
    stream identity without any hashing ambiguity across runs.
    """
    entropy: list[int] = []
    for p in parts:
        if isinstance(p, str):
            entropy.extend(p.encode("utf-8"))
        else:
            entropy.append(int(p) & 0xFFFFFFFFFFFFFFFF)
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, np.uint64)[0])
