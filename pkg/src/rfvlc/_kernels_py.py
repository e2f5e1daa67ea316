"""Pure-Python versions of the queue kernels (same semantics as ``_kernels.pyx``)."""
import numpy as np


def lindley(a, service):
    a = float(a)
    q = 0.0
    out = [0.0]
    append = out.append
    for r in np.asarray(service, dtype=float).tolist():
        q = q + a - r
        if q < 0.0:
            q = 0.0
        append(q)
    return np.array(out)


def fcfs_delays(a, queue):
    a = float(a)
    qs = np.asarray(queue, dtype=float).tolist()
    n = len(qs) - 1
    out = [0] * n
    j = 0
    for l in range(n):
        if j < l:
            j = l
        while j < n and qs[j + 1] > (j - l) * a:
            j += 1
        out[l] = j - l if j < n else -1
    return np.array(out, dtype=np.int64)
