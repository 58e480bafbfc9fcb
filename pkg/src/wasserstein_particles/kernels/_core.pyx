# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the dynamics hot loops.

Mirrors kernels/pure.py operation by operation; both backends consume the
same random blocks and must produce bitwise-identical states.
"""

from libc.math cimport cos, fabs, fmod, log, log1p, sqrt


def ball_walk_chunk(double[::1] sp, double[::1] log_sp, double eps, double coef,
                    double[:, ::1] uniforms, double[::1] prop, double[::1] plog):
    cdef Py_ssize_t n = sp.shape[0]
    cdef Py_ssize_t steps = uniforms.shape[0]
    cdef Py_ssize_t step, i
    cdef int accepted = 0
    cdef bint ok
    cdef double prev, o, v, r, lp
    for step in range(steps):
        ok = True
        prev = 0.0
        for i in range(n - 1):
            o = eps * (2.0 * uniforms[step, i] - 1.0)
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
                lp = log(prop[i])
                plog[i] = lp
                r += lp - log_sp[i]
            r *= coef
        else:
            r = 0.0
            for i in range(n):
                plog[i] = log(prop[i])
        if log1p(-uniforms[step, n - 1]) <= r:
            for i in range(n):
                sp[i] = prop[i]
                log_sp[i] = plog[i]
            accepted += 1
    return accepted


cdef inline double _fold(double v) noexcept nogil:
    v = fmod(v, 2.0)
    if v < 0.0:
        v += 2.0
    if v > 1.0:
        v = 2.0 - v
    return v


def sde_chunk(double[::1] x, double[::1] y, double dt, double delta, double coef,
              double[:, ::1] normals):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t steps = normals.shape[0]
    cdef Py_ssize_t step, i, j
    cdef double sq = sqrt(2.0 * dt)
    cdef double left, right, dl, dr, drift, v
    for step in range(steps):
        for i in range(m):
            left = x[i] - (x[i - 1] if i > 0 else 0.0)
            right = (x[i + 1] if i + 1 < m else 1.0) - x[i]
            if coef != 0.0:
                dl = left + delta
                dr = right + delta
                if not (dl > 0.0 and dr > 0.0):
                    return step
                drift = coef * (1.0 / dl - 1.0 / dr)
            else:
                drift = 0.0
            if not (fabs(drift) * dt <= 1.0):
                return step
            y[i] = x[i] + drift * dt + sq * normals[step, i]
        for i in range(m):
            x[i] = _fold(y[i])
        for i in range(1, m):
            v = x[i]
            j = i - 1
            while j >= 0 and x[j] > v:
                x[j + 1] = x[j]
                j -= 1
            x[j + 1] = v
    return -1


def sde_chunk_qv(double[::1] x, double[::1] y, double dt, double delta, double coef,
                 double[:, ::1] normals, double omega, double[::1] qv_io):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = m + 1
    cdef Py_ssize_t steps = normals.shape[0]
    cdef Py_ssize_t step, i, j
    cdef double sq = sqrt(2.0 * dt)
    cdef double left, right, dl, dr, drift, v, obs
    cdef double qv = qv_io[0]
    cdef double prev = qv_io[1]
    for step in range(steps):
        for i in range(m):
            left = x[i] - (x[i - 1] if i > 0 else 0.0)
            right = (x[i + 1] if i + 1 < m else 1.0) - x[i]
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
            if not (fabs(drift) * dt <= 1.0):
                qv_io[0] = qv
                qv_io[1] = prev
                return step
            y[i] = x[i] + drift * dt + sq * normals[step, i]
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
            obs += cos(omega * x[i])
        obs /= n
        qv += (obs - prev) * (obs - prev)
        prev = obs
    qv_io[0] = qv
    qv_io[1] = prev
    return -1
