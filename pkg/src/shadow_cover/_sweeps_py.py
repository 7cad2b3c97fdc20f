"""Pure-Python recurrences used by the series inverse (fallback for ``_sweeps``)."""
import numpy as np


def forward_recurrence(A, b):
    """``out[0] = b[0]``, ``out[i] = b[i] + A[i-1] @ out[i-1]``."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.empty_like(b)
    M, n = b.shape
    if M == 0:
        return out
    acc = b[0].tolist()
    out[0] = acc
    for i in range(1, M):
        Ai = A[i - 1].tolist()
        bi = b[i].tolist()
        new = []
        for r in range(n):
            s = bi[r]
            for c in range(n):
                s += Ai[r][c] * acc[c]
            new.append(s)
        acc = new
        out[i] = acc
    return out


def backward_recurrence(B, c):
    """``out[M-1] = 0``, ``out[i] = B[i] @ (c[i+1] + out[i+1])``."""
    B = np.asarray(B, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    out = np.empty_like(c)
    M, n = c.shape
    if M == 0:
        return out
    acc = [0.0] * n
    out[M - 1] = acc
    for i in range(M - 2, -1, -1):
        Bi = B[i].tolist()
        ci = c[i + 1].tolist()
        s = [ci[r] + acc[r] for r in range(n)]
        new = []
        for r in range(n):
            t = 0.0
            for q in range(n):
                t += Bi[r][q] * s[q]
            new.append(t)
        acc = new
        out[i] = acc
    return out
