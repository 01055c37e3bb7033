"""Evaluation kernels for compiled expression programs.

A program is a straight-line list of instructions in SSA form: instruction
``k`` writes register ``k``.  Two interchangeable back ends run it over a
batch of sample points:

* a numba ``@njit`` kernel looping over samples and instructions, and
* a pure-numpy kernel looping over instructions with vectorized samples.

The numba path is used when numba imports and ``TWISTSYM_DISABLE_NUMBA``
is unset (or ``0``).  Both flag a sample as *singular* when it hits a pole
neighbourhood, a domain error or a non-finite intermediate.
"""

import os

import numpy as np

OP_LOAD = 0
OP_CONST = 1
OP_ADD = 2
OP_MUL = 3
OP_IPOW = 4
OP_POW = 5
OP_EXP = 6
OP_LOG = 7
OP_SIN = 8
OP_COS = 9
OP_TAN = 10
OP_SQRT = 11

# neighbourhood of a denominator zero treated as a pole
POLE_EPS = 1e-3

_DISABLED = os.environ.get("TWISTSYM_DISABLE_NUMBA", "0") not in ("", "0", "false", "False")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return decorator


def _run_python(ops, a0, a1, consts, inputs, outputs):
    ns = inputs.shape[0]
    nreg = ops.shape[0]
    res = np.empty((ns, outputs.shape[0]))
    bad = np.zeros(ns, dtype=np.bool_)
    reg = np.empty(nreg)
    for s in range(ns):
        ok = True
        for k in range(nreg):
            op = ops[k]
            if op == OP_LOAD:
                v = inputs[s, a0[k]]
            elif op == OP_CONST:
                v = consts[a0[k]]
            elif op == OP_ADD:
                v = reg[a0[k]] + reg[a1[k]]
            elif op == OP_MUL:
                v = reg[a0[k]] * reg[a1[k]]
            elif op == OP_IPOW:
                b = reg[a0[k]]
                e = a1[k]
                if e < 0:
                    if abs(b) < POLE_EPS:
                        ok = False
                        break
                    b = 1.0 / b
                    e = -e
                v = 1.0
                while e > 0:
                    if e & 1:
                        v *= b
                    b *= b
                    e >>= 1
            elif op == OP_POW:
                b = reg[a0[k]]
                e = reg[a1[k]]
                if b <= 0.0 or (e < 0.0 and b < POLE_EPS):
                    ok = False
                    break
                v = b**e
            elif op == OP_EXP:
                v = np.exp(reg[a0[k]])
            elif op == OP_LOG:
                b = reg[a0[k]]
                if b < POLE_EPS:
                    ok = False
                    break
                v = np.log(b)
            elif op == OP_SIN:
                v = np.sin(reg[a0[k]])
            elif op == OP_COS:
                v = np.cos(reg[a0[k]])
            elif op == OP_TAN:
                c = np.cos(reg[a0[k]])
                if abs(c) < POLE_EPS:
                    ok = False
                    break
                v = np.sin(reg[a0[k]]) / c
            else:
                b = reg[a0[k]]
                if b < 0.0:
                    ok = False
                    break
                v = np.sqrt(b)
            if not np.isfinite(v):
                ok = False
                break
            reg[k] = v
        if ok:
            for j in range(outputs.shape[0]):
                res[s, j] = reg[outputs[j]]
        else:
            bad[s] = True
            for j in range(outputs.shape[0]):
                res[s, j] = np.nan
    return res, bad


run_numba = njit(cache=True, nogil=True)(_run_python) if NUMBA_AVAILABLE else None


def run_numpy(ops, a0, a1, consts, inputs, outputs):
    ns = inputs.shape[0]
    nreg = ops.shape[0]
    reg = np.empty((nreg, ns))
    bad = np.zeros(ns, dtype=bool)
    with np.errstate(all="ignore"):
        for k in range(nreg):
            op = ops[k]
            if op == OP_LOAD:
                reg[k] = inputs[:, a0[k]]
            elif op == OP_CONST:
                reg[k] = consts[a0[k]]
            elif op == OP_ADD:
                np.add(reg[a0[k]], reg[a1[k]], out=reg[k])
            elif op == OP_MUL:
                np.multiply(reg[a0[k]], reg[a1[k]], out=reg[k])
            elif op == OP_IPOW:
                b = reg[a0[k]]
                e = int(a1[k])
                if e < 0:
                    bad |= np.abs(b) < POLE_EPS
                    b = 1.0 / b
                    e = -e
                np.power(b, e, out=reg[k])
            elif op == OP_POW:
                b = reg[a0[k]]
                e = reg[a1[k]]
                bad |= (b <= 0.0) | ((e < 0.0) & (b < POLE_EPS))
                np.power(b, e, out=reg[k])
            elif op == OP_EXP:
                np.exp(reg[a0[k]], out=reg[k])
            elif op == OP_LOG:
                b = reg[a0[k]]
                bad |= b < POLE_EPS
                np.log(b, out=reg[k])
            elif op == OP_SIN:
                np.sin(reg[a0[k]], out=reg[k])
            elif op == OP_COS:
                np.cos(reg[a0[k]], out=reg[k])
            elif op == OP_TAN:
                c = np.cos(reg[a0[k]])
                bad |= np.abs(c) < POLE_EPS
                reg[k] = np.sin(reg[a0[k]]) / c
            else:
                b = reg[a0[k]]
                bad |= b < 0.0
                np.sqrt(b, out=reg[k])
            bad |= ~np.isfinite(reg[k])
        res = reg[outputs].T.copy()
    res[bad] = np.nan
    return res, bad


def run(ops, a0, a1, consts, inputs, outputs, backend=None):
    """Evaluate a program on ``inputs`` (samples x symbols).

    Returns ``(values, singular)`` with ``values`` of shape
    (samples, outputs) and a boolean singular-sample mask.
    """
    if backend is None:
        backend = "numba" if NUMBA_AVAILABLE else "numpy"
    if backend == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return run_numba(ops, a0, a1, consts, inputs, outputs)
    if backend == "numpy":
        return run_numpy(ops, a0, a1, consts, inputs, outputs)
    if backend == "python":
        return _run_python(ops, a0, a1, consts, inputs, outputs)
    raise ValueError(f"unknown backend {backend!r}")
