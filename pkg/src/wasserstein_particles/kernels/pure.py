"""Pure-Python reference kernels for the two dynamics schemes.

These are the fallback used when the compiled extension is unavailable, and
the ground truth the compiled kernels are tested against: both backends
consume identical random blocks and perform the same floating-point
operations in the same order, so results agree bitwise.

State conventions:

* ball walk: the chain state is the vector of N spacings (and their logs).
  Working in spacing space keeps deep-tail spacings at full relative
  accuracy, where positions near 1 would quantize to ~1e-16 steps.
* SDE: the state is the sorted position vector of the N-1 particles.
"""

from __future__ import annotations

import math


def ball_walk_chunk(sp, log_sp, eps, coef, uniforms, prop, plog):
    """Run Metropolis ball-walk steps in place; returns acceptance count.

    ``uniforms`` has shape (steps, N): columns 0..N-2 drive the proposal
    offsets, column N-1 the accept/reject decision.  ``coef`` is the
    spacing-density exponent beta/N - 1.  ``prop``/``plog`` are scratch
    arrays of length N.

    A proposal is the position move y = x + eps*U with U uniform on the
    l-infinity unit ball, expressed in spacing increments; any non-positive
    proposed spacing means y leaves the ordered simplex and is rejected.
    """
    n = sp.shape[0]
    steps = uniforms.shape[0]
    accepted = 0
    for step in range(steps):
        row = uniforms[step]
        ok = True
        prev = 0.0
        for i in range(n - 1):
            o = eps * (2.0 * row[i] - 1.0)
            v = sp[i] + (o - prev)
            if not v > 0.0:
                ok = False
                break
            prop[i] = v
            prev = o
        if ok:
            v = sp[n - 1] - prev
            if v > 0.0:
                prop[n - 1] = v
            else:
                ok = False
        if not ok:
            continue
        if coef != 0.0:
            r = 0.0
            for i in range(n):
                lp = math.log(prop[i])
                plog[i] = lp
                r += lp - log_sp[i]
            r *= coef
        else:
            r = 0.0
            for i in range(n):
                plog[i] = math.log(prop[i])
        if math.log1p(-row[n - 1]) <= r:
            for i in range(n):
                sp[i] = prop[i]
                log_sp[i] = plog[i]
            accepted += 1
    return accepted


def _fold(v):
    """Reflect a real into [0,1] (billiard in the unit interval)."""
    v = math.fmod(v, 2.0)
    if v < 0.0:
        v += 2.0
    if v > 1.0:
        v = 2.0 - v
    return v


def sde_chunk(x, y, dt, delta, coef, normals):
    """Run regularized Euler steps in place; -1 on success, else the index
    of the step whose drift violated |drift|*dt <= 1.

    ``normals`` has shape (steps, N-1).  ``y`` is scratch of length N-1.
    Each step: Euler move with pairwise 1/(spacing+delta) drift and sqrt(2dt)
    noise, reflection into [0,1], then an ascending sort (the sort stands in
    for the ordering local times).
    """
    m = x.shape[0]
    steps = normals.shape[0]
    sq = math.sqrt(2.0 * dt)
    for step in range(steps):
        zrow = normals[step]
        for i in range(m):
            left = x[i] - (x[i - 1] if i > 0 else 0.0)
            right = ((x[i + 1] if i + 1 < m else 1.0)) - x[i]
            if coef != 0.0:
                dl = left + delta
                dr = right + delta
                if not (dl > 0.0 and dr > 0.0):
                    return step
                drift = coef * (1.0 / dl - 1.0 / dr)
            else:
                drift = 0.0
            if not (math.fabs(drift) * dt <= 1.0):
                return step
            y[i] = x[i] + drift * dt + sq * zrow[i]
        for i in range(m):
            x[i] = _fold(y[i])
        # insertion sort: states are nearly sorted after one step
        for i in range(1, m):
            v = x[i]
            j = i - 1
            while j >= 0 and x[j] > v:
                x[j + 1] = x[j]
                j -= 1
            x[j + 1] = v
    return -1


def sde_chunk_qv(x, y, dt, delta, coef, normals, omega, qv_io):
    """sde_chunk plus step-resolution quadratic variation of the cosine
    observable (1 + sum_i cos(omega x_i))/N.

    ``qv_io[0]`` accumulates squared per-step observable increments,
    ``qv_io[1]`` carries the current observable value across chunks.
    """
    m = x.shape[0]
    n = m + 1
    steps = normals.shape[0]
    sq = math.sqrt(2.0 * dt)
    qv = qv_io[0]
    prev = qv_io[1]
    for step in range(steps):
        zrow = normals[step]
        for i in range(m):
            left = x[i] - (x[i - 1] if i > 0 else 0.0)
            right = ((x[i + 1] if i + 1 < m else 1.0)) - x[i]
            if coef != 0.0:
                dl = left + delta
                dr = right + delta
                if not (dl > 0.0 and dr > 0.0):
                    qv_io[0] = qv
                    qv_io[1] = prev
                    return step
                drift = coef * (1.0 / dl - 1.0 / dr)
            else:
                drift = 0.0
            if not (math.fabs(drift) * dt <= 1.0):
                qv_io[0] = qv
                qv_io[1] = prev
                return step
            y[i] = x[i] + drift * dt + sq * zrow[i]
        for i in range(m):
            x[i] = _fold(y[i])
        for i in range(1, m):
            v = x[i]
            j = i - 1
            while j >= 0 and x[j] > v:
                x[j + 1] = x[j]
                j -= 1
            x[j + 1] = v
        obs = 1.0
        for i in range(m):
            obs += math.cos(omega * x[i])
        obs /= n
        qv += (obs - prev) * (obs - prev)
        prev = obs
    qv_io[0] = qv
    qv_io[1] = prev
    return -1
