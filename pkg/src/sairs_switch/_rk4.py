"""Compiled fixed-step RK4 kernels for the switched epidemic flows.

The kernels advance the state between consecutive output times with steps of
fixed length, shrinking only the final step of each span so every output time
(jump instants included) is hit exactly.  Status codes: 0 success, 1 a
component left the invariant set beyond tolerance, 2 mass conservation broke.
"""

import numpy as np
from numba import njit

SET_TOL = 1e-9


@njit(inline="always")
def _rhs4(S, A, I, R, bA, bI, dA, dI, al, ga, nu, mu):
    foi = (bA * A + bI * I) * S
    dS = mu - foi - (mu + nu) * S + ga * R
    dAa = foi - (al + dA + mu) * A
    dIi = al * A - (dI + mu) * I
    # negated sum keeps S+A+I+R exactly conserved in floating point
    return dS, dAa, dIi, -(dS + dAa + dIi)


@njit(inline="always")
def _rhs3(S, A, I, bA, bI, dA, dI, al, ga, nu, mu):
    foi = (bA * A + bI * I) * S
    dS = mu - foi - (mu + nu + ga) * S + ga * (1.0 - A - I)
    dAa = foi - (al + dA + mu) * A
    dIi = al * A - (dI + mu) * I
    return dS, dAa, dIi


@njit(inline="always")
def _clamp(v, clamp_eps):
    # returns (value, ok)
    if v < 0.0:
        if v >= -clamp_eps:
            return 0.0, True
        if v < -SET_TOL:
            return v, False
    elif v > 1.0:
        if v <= 1.0 + clamp_eps:
            return 1.0, True
        if v > 1.0 + SET_TOL:
            return v, False
    return v, True


@njit(cache=True, nogil=True)
def integrate_grid_4d(
    x0, out_times, interval_regime, beta_A, beta_I, dA, dI, al, ga, nu, mu,
    step, clamp_eps, out_states,
):
    S = x0[0]
    A = x0[1]
    I = x0[2]
    R = x0[3]
    n = out_times.shape[0]
    out_states[0, 0] = S
    out_states[0, 1] = A
    out_states[0, 2] = I
    out_states[0, 3] = R
    for i in range(n - 1):
        r = interval_regime[i]
        bA = beta_A[r]
        bI = beta_I[r]
        dt = out_times[i + 1] - out_times[i]
        nsub = int(np.ceil(dt / step - 1e-9))
        if nsub < 1:
            nsub = 1
        for j in range(nsub):
            h = step if j < nsub - 1 else dt - step * (nsub - 1)
            k1 = _rhs4(S, A, I, R, bA, bI, dA, dI, al, ga, nu, mu)
            hh = 0.5 * h
            k2 = _rhs4(S + hh * k1[0], A + hh * k1[1], I + hh * k1[2], R + hh * k1[3],
                       bA, bI, dA, dI, al, ga, nu, mu)
            k3 = _rhs4(S + hh * k2[0], A + hh * k2[1], I + hh * k2[2], R + hh * k2[3],
                       bA, bI, dA, dI, al, ga, nu, mu)
            k4 = _rhs4(S + h * k3[0], A + h * k3[1], I + h * k3[2], R + h * k3[3],
                       bA, bI, dA, dI, al, ga, nu, mu)
            w = h / 6.0
            S += w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            A += w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            I += w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            R += w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
            S, okS = _clamp(S, clamp_eps)
            A, okA = _clamp(A, clamp_eps)
            I, okI = _clamp(I, clamp_eps)
            R, okR = _clamp(R, clamp_eps)
            if not (okS and okA and okI and okR):
                return 1, i
        if abs(S + A + I + R - 1.0) > SET_TOL:
            return 2, i
        out_states[i + 1, 0] = S
        out_states[i + 1, 1] = A
        out_states[i + 1, 2] = I
        out_states[i + 1, 3] = R
    return 0, n - 1


@njit(cache=True, nogil=True)
def integrate_grid_3d(
    x0, out_times, interval_regime, beta_A, beta_I, dA, dI, al, ga, nu, mu,
    step, clamp_eps, out_states,
):
    S = x0[0]
    A = x0[1]
    I = x0[2]
    n = out_times.shape[0]
    out_states[0, 0] = S
    out_states[0, 1] = A
    out_states[0, 2] = I
    for i in range(n - 1):
        r = interval_regime[i]
        bA = beta_A[r]
        bI = beta_I[r]
        dt = out_times[i + 1] - out_times[i]
        nsub = int(np.ceil(dt / step - 1e-9))
        if nsub < 1:
            nsub = 1
        for j in range(nsub):
            h = step if j < nsub - 1 else dt - step * (nsub - 1)
            k1 = _rhs3(S, A, I, bA, bI, dA, dI, al, ga, nu, mu)
            hh = 0.5 * h
            k2 = _rhs3(S + hh * k1[0], A + hh * k1[1], I + hh * k1[2],
                       bA, bI, dA, dI, al, ga, nu, mu)
            k3 = _rhs3(S + hh * k2[0], A + hh * k2[1], I + hh * k2[2],
                       bA, bI, dA, dI, al, ga, nu, mu)
            k4 = _rhs3(S + h * k3[0], A + h * k3[1], I + h * k3[2],
                       bA, bI, dA, dI, al, ga, nu, mu)
            w = h / 6.0
            S += w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            A += w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            I += w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            S, okS = _clamp(S, clamp_eps)
            A, okA = _clamp(A, clamp_eps)
            I, okI = _clamp(I, clamp_eps)
            if not (okS and okA and okI):
                return 1, i
        if S + A + I > 1.0 + SET_TOL:
            return 2, i
        out_states[i + 1, 0] = S
        out_states[i + 1, 1] = A
        out_states[i + 1, 2] = I
    return 0, n - 1
