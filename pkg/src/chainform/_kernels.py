"""Compiled inner loops for the simulation engines.

Everything here mirrors a plain-numpy implementation in the public modules;
the kernels exist only so that multi-million-round runs stay fast. The
equivalence of the two code paths is covered by tests.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Step status codes (negated by run loops on error):
#   0 = ok, 1 = first outer edge is a zero vector, 2 = last outer edge is.
# Run outcome codes:
#   0 = budget exhausted, 1 = eps-max-chain, 2 = eps-marching,
#   -1/-2 = zero outer edge.


@njit(cache=True)
def gtm_step(P, out, tau, fix_first, fix_last, eta_zero):
    """One synchronous round of the go-to-midpoint family.

    Inner robots move to the neighbor midpoint; outer robots move a
    (1-tau) fraction toward the midpoint of their neighbor and a virtual
    robot one unit further out. tau=0 is the plain strategy.
    """
    n = P.shape[0]
    for i in range(1, n - 1):
        out[i, 0] = 0.5 * (P[i - 1, 0] + P[i + 1, 0])
        out[i, 1] = 0.5 * (P[i - 1, 1] + P[i + 1, 1])
    a = 0.5 * (1.0 + tau)
    b = 0.5 * (1.0 - tau)
    if fix_first:
        out[0, 0] = P[0, 0]
        out[0, 1] = P[0, 1]
    else:
        wx = P[1, 0] - P[0, 0]
        wy = P[1, 1] - P[0, 1]
        l = math.hypot(wx, wy)
        if l <= eta_zero:
            return 1
        out[0, 0] = a * P[0, 0] + b * P[1, 0] - b * wx / l
        out[0, 1] = a * P[0, 1] + b * P[1, 1] - b * wy / l
    if fix_last:
        out[n - 1, 0] = P[n - 1, 0]
        out[n - 1, 1] = P[n - 1, 1]
    else:
        wx = P[n - 1, 0] - P[n - 2, 0]
        wy = P[n - 1, 1] - P[n - 2, 1]
        l = math.hypot(wx, wy)
        if l <= eta_zero:
            return 2
        out[n - 1, 0] = a * P[n - 1, 0] + b * P[n - 2, 0] + b * wx / l
        out[n - 1, 1] = a * P[n - 1, 1] + b * P[n - 2, 1] + b * wy / l
    return 0


@njit(cache=True)
def eps_maxchain(P, eps):
    n = P.shape[0]
    dx = P[n - 1, 0] - P[0, 0]
    dy = P[n - 1, 1] - P[0, 1]
    if math.hypot(dx, dy) < (1.0 - eps) * (n - 1):
        return False
    for i in range(1, n):
        if math.hypot(P[i, 0] - P[i - 1, 0], P[i, 1] - P[i - 1, 1]) <= 1.0 - eps:
            return False
    return True


@njit(cache=True)
def tls_direction(P):
    """Principal direction of the point cloud and the max point-to-line
    distance, via the closed-form 2x2 eigenproblem."""
    n = P.shape[0]
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += P[i, 0]
        my += P[i, 1]
    mx /= n
    my /= n
    a = 0.0
    b = 0.0
    d = 0.0
    for i in range(n):
        cx = P[i, 0] - mx
        cy = P[i, 1] - my
        a += cx * cx
        b += cx * cy
        d += cy * cy
    lam = 0.5 * ((a + d) + math.hypot(a - d, 2.0 * b))
    ux = b
    uy = lam - a
    nu = math.hypot(ux, uy)
    if nu < 1e-300:
        if a >= d:
            ux, uy = 1.0, 0.0
        else:
            ux, uy = 0.0, 1.0
    else:
        ux /= nu
        uy /= nu
    dist = 0.0
    for i in range(n):
        cx = P[i, 0] - mx
        cy = P[i, 1] - my
        off = abs(-uy * cx + ux * cy)
        if off > dist:
            dist = off
    return ux, uy, dist


@njit(cache=True)
def eps_marching(P, eps, eta_col):
    n = P.shape[0]
    ux, uy, dist = tls_direction(P)
    if dist > eta_col:
        return False
    ok_pos = True
    ok_neg = True
    for i in range(1, n):
        s = (P[i, 0] - P[i - 1, 0]) * ux + (P[i, 1] - P[i - 1, 1]) * uy
        m = 1.0 - 2.0 * i / n  # profile entry for edge w_{i+1}
        if abs(s - m) > eps:
            ok_pos = False
        if abs(-s - m) > eps:
            ok_neg = False
        if not (ok_pos or ok_neg):
            return False
    return True


@njit(cache=True)
def point_segment_dist(px, py, ax, ay, bx, by):
    abx = bx - ax
    aby = by - ay
    denom = abx * abx + aby * aby
    if denom < 1e-300:
        return math.hypot(px - ax, py - ay)
    tt = ((px - ax) * abx + (py - ay) * aby) / denom
    if tt < 0.0:
        tt = 0.0
    elif tt > 1.0:
        tt = 1.0
    return math.hypot(px - (ax + tt * abx), py - (ay + tt * aby))


# Robot movement states for the continuous strategy:
#   0 = frozen bent robot, 1 = bisector mover (velocity already final),
#   2 = midpoint tracker solved as a linear run, 3 = saturated tracker
#   (far from its midpoint; moves at speed 1 toward it), 4 = outer robot.


@njit(cache=True)
def mob_classify(P, v, state, cvec, tau, naive, K, psi, eta_taut, eta_zero,
                 straight_tol, sat, sticky, hyst):
    """Classify inner robots and fill the fixed velocities.

    For tracker robots in state 2 the capped stiffness term K*(mid - p) is
    stored in cvec; their velocities come from the linear run solve.
    Robots flagged in ``sticky`` (bisector movers on the previous step) keep
    moving while an adjacent edge stays within ``hyst`` of taut; without the
    hysteresis band the per-step tracker lag un-tautens the edge right after
    a move and the mover chatters on and off.
    """
    n = P.shape[0]
    ang_cap = 2.0 * straight_tol  # deviation-angle bound; ~2*d on unit edges
    for i in range(1, n - 1):
        ux = P[i - 1, 0] - P[i, 0]
        uy = P[i - 1, 1] - P[i, 1]
        vx = P[i + 1, 0] - P[i, 0]
        vy = P[i + 1, 1] - P[i, 1]
        nu = math.hypot(ux, uy)
        nv = math.hypot(vx, vy)
        if nu <= eta_zero or nv <= eta_zero:
            straight = True
        else:
            d = point_segment_dist(
                P[i, 0], P[i, 1], P[i - 1, 0], P[i - 1, 1], P[i + 1, 0], P[i + 1, 1]
            )
            # the distance test alone conflates short edges with
            # straightness: a genuine bend next to a short edge sits close
            # to the neighbor segment, so gate on the angle as well
            cross0 = ux * vy - uy * vx
            dot0 = ux * vx + uy * vy
            dev = math.pi - math.atan2(abs(cross0), dot0)
            straight = d <= straight_tol and dev <= ang_cap
        if straight:
            dx = 0.5 * (P[i - 1, 0] + P[i + 1, 0]) - P[i, 0]
            dy = 0.5 * (P[i - 1, 1] + P[i + 1, 1]) - P[i, 1]
            dn = math.hypot(dx, dy)
            if K * dn >= sat:
                state[i] = 3
                v[i, 0] = dx / dn
                v[i, 1] = dy / dn
            else:
                state[i] = 2
                cvec[i, 0] = K * dx
                cvec[i, 1] = K * dy
        else:
            cross = ux * vy - uy * vx
            dot = ux * vx + uy * vy
            alpha = math.atan2(abs(cross), dot)
            thr = 1.0 - eta_taut
            if sticky[i] == 1:
                thr -= hyst
            moves = nu >= thr or nv >= thr
            if (not naive) and alpha < psi:
                moves = True
            if moves:
                bx = ux / nu + vx / nv
                by = uy / nu + vy / nv
                bn = math.hypot(bx, by)
                if bn < 1e-12:
                    state[i] = 0
                    v[i, 0] = 0.0
                    v[i, 1] = 0.0
                else:
                    state[i] = 1
                    v[i, 0] = bx / bn
                    v[i, 1] = by / bn
            else:
                state[i] = 0
                v[i, 0] = 0.0
                v[i, 1] = 0.0


@njit(cache=True)
def solve_runs(P, v, state, cvec, work):
    """Solve every contiguous tracker run for its velocities.

    Equations v_i - (v_{i-1} + v_{i+1})/2 = c_i with the run's neighbors as
    boundary anchors; tridiagonal (Thomas) solve per coordinate.
    """
    n = P.shape[0]
    i = 1
    while i < n - 1:
        if state[i] != 2:
            i += 1
            continue
        j = i
        while j < n - 1 and state[j] == 2:
            j += 1
        L = j - i
        cp = work[0]
        dx = work[1]
        dy = work[2]
        beta = 1.0
        rx = cvec[i, 0] + 0.5 * v[i - 1, 0]
        ry = cvec[i, 1] + 0.5 * v[i - 1, 1]
        if L == 1:
            rx += 0.5 * v[j, 0]
            ry += 0.5 * v[j, 1]
        cp[0] = -0.5 / beta
        dx[0] = rx / beta
        dy[0] = ry / beta
        for k in range(1, L):
            beta = 1.0 + 0.5 * cp[k - 1]
            rx = cvec[i + k, 0]
            ry = cvec[i + k, 1]
            if k == L - 1:
                rx += 0.5 * v[j, 0]
                ry += 0.5 * v[j, 1]
            cp[k] = -0.5 / beta
            dx[k] = (rx + 0.5 * dx[k - 1]) / beta
            dy[k] = (ry + 0.5 * dy[k - 1]) / beta
        v[i + L - 1, 0] = dx[L - 1]
        v[i + L - 1, 1] = dy[L - 1]
        for k in range(L - 2, -1, -1):
            v[i + k, 0] = dx[k] - cp[k] * v[i + k + 1, 0]
            v[i + k, 1] = dy[k] - cp[k] * v[i + k + 1, 1]
        i = j


@njit(cache=True)
def outer_eval(P, v, state, cvec, work, a, b, left_def, right_def,
               u2x, u2y, unx, uny):
    """Set outer velocities for receding speeds (a, b), re-solve the
    tracker runs, and report the neighbor speeds along the outer edges
    (the taut-edge matching targets)."""
    n = P.shape[0]
    if left_def:
        v[0, 0] = -a * u2x
        v[0, 1] = -a * u2y
    else:
        v[0, 0] = 0.0
        v[0, 1] = 0.0
    if right_def:
        v[n - 1, 0] = b * unx
        v[n - 1, 1] = b * uny
    else:
        v[n - 1, 0] = 0.0
        v[n - 1, 1] = 0.0
    solve_runs(P, v, state, cvec, work)
    ga = -(v[1, 0] * u2x + v[1, 1] * u2y) if left_def else 0.0
    gb = (v[n - 2, 0] * unx + v[n - 2, 1] * uny) if right_def else 0.0
    return ga, gb


@njit(cache=True)
def mob_velocity(P, v, state, cvec, work, tau, naive, K, psi, eta_taut,
                 eta_zero, straight_tol, sat, sticky, hyst):
    """Full velocity-field evaluation for one configuration.

    Taut outer edges couple the outer speed to the neighbor's velocity;
    the coupling is affine through the linear runs, so the exact fixed
    point is found from at most three run solves plus a final one.
    """
    n = P.shape[0]
    s = 1.0 if naive else 1.0 - tau
    for i in range(n):
        v[i, 0] = 0.0
        v[i, 1] = 0.0
        cvec[i, 0] = 0.0
        cvec[i, 1] = 0.0
        state[i] = 0
    state[0] = 4
    state[n - 1] = 4
    mob_classify(P, v, state, cvec, tau, naive, K, psi, eta_taut, eta_zero,
                 straight_tol, sat, sticky, hyst)
    w2x = P[1, 0] - P[0, 0]
    w2y = P[1, 1] - P[0, 1]
    l2 = math.hypot(w2x, w2y)
    wnx = P[n - 1, 0] - P[n - 2, 0]
    wny = P[n - 1, 1] - P[n - 2, 1]
    ln = math.hypot(wnx, wny)
    left_def = l2 > eta_zero
    right_def = ln > eta_zero
    u2x = w2x / l2 if left_def else 0.0
    u2y = w2y / l2 if left_def else 0.0
    unx = wnx / ln if right_def else 0.0
    uny = wny / ln if right_def else 0.0
    left_taut = left_def and l2 >= 1.0 - eta_taut
    right_taut = right_def and ln >= 1.0 - eta_taut
    a_base = 0.0 if left_taut else s
    b_base = 0.0 if right_taut else s
    a_fin = a_base
    b_fin = b_base
    if left_taut or right_taut:
        ga0, gb0 = outer_eval(P, v, state, cvec, work, a_base, b_base,
                              left_def, right_def, u2x, u2y, unx, uny)
        caa = cba = cab = cbb = 0.0
        if left_taut:
            ga1, gb1 = outer_eval(P, v, state, cvec, work, 1.0, b_base,
                                  left_def, right_def, u2x, u2y, unx, uny)
            caa = ga1 - ga0
            cba = gb1 - gb0
        if right_taut:
            ga2, gb2 = outer_eval(P, v, state, cvec, work, a_base, 1.0,
                                  left_def, right_def, u2x, u2y, unx, uny)
            cab = ga2 - ga0
            cbb = gb2 - gb0
        if left_taut and right_taut:
            det = (1.0 - caa) * (1.0 - cbb) - cab * cba
            if abs(det) > 1e-12:
                a_fin = (ga0 * (1.0 - cbb) + cab * gb0) / det
                b_fin = (gb0 * (1.0 - caa) + cba * ga0) / det
            else:
                a_fin = ga0
                b_fin = gb0
            a_cl = min(max(a_fin, 0.0), s)
            b_cl = min(max(b_fin, 0.0), s)
            # a clamp shifts b's scalar fixed point (and vice versa)
            if a_cl != a_fin and abs(1.0 - cbb) > 1e-12:
                b_cl = min(max((gb0 + cba * a_cl) / (1.0 - cbb), 0.0), s)
            if b_cl != b_fin and abs(1.0 - caa) > 1e-12:
                a_cl = min(max((ga0 + cab * b_cl) / (1.0 - caa), 0.0), s)
            a_fin = a_cl
            b_fin = b_cl
        elif left_taut:
            if abs(1.0 - caa) > 1e-12:
                a_fin = (ga0 + cab * b_base) / (1.0 - caa)
            else:
                a_fin = ga0
            a_fin = min(max(a_fin, 0.0), s)
        else:
            if abs(1.0 - cbb) > 1e-12:
                b_fin = (gb0 + cba * a_base) / (1.0 - cbb)
            else:
                b_fin = gb0
            b_fin = min(max(b_fin, 0.0), s)
    outer_eval(P, v, state, cvec, work, a_fin, b_fin, left_def, right_def,
               u2x, u2y, unx, uny)
    # tracker velocities may slightly exceed the unit cap; clamp
    for i in range(1, n - 1):
        sp = math.hypot(v[i, 0], v[i, 1])
        if sp > 1.0:
            v[i, 0] /= sp
            v[i, 1] /= sp


@njit(cache=True)
def chain_diameter_bound(P):
    """Upper bound on the max pairwise distance (bounding-box diagonal)."""
    n = P.shape[0]
    xmin = xmax = P[0, 0]
    ymin = ymax = P[0, 1]
    for i in range(1, n):
        if P[i, 0] < xmin:
            xmin = P[i, 0]
        if P[i, 0] > xmax:
            xmax = P[i, 0]
        if P[i, 1] < ymin:
            ymin = P[i, 1]
        if P[i, 1] > ymax:
            ymax = P[i, 1]
    return math.hypot(xmax - xmin, ymax - ymin)


@njit(cache=True)
def mob_advance(P, t, t_stop, dt0, tau, naive, psi, eta_taut, eta_zero,
                straight_tol, sat, eps, eps_collapse, max_steps, sticky, hyst):
    """Integrate the continuous strategy from time t to t_stop.

    Explicit Euler with step halving on connectivity violation (down to
    dt0/1024, then hard projection of the violating edges). Returns
    (t, code, projections, steps) with code 0 = reached t_stop,
    1 = eps-max-chain, 2 = collapsed, 3 = step budget exhausted.
    """
    n = P.shape[0]
    v = np.zeros((n, 2))
    state = np.zeros(n, dtype=np.int8)
    cvec = np.zeros((n, 2))
    work = np.zeros((3, n))
    trial = np.empty((n, 2))
    K = 1.0 / dt0
    nproj = 0
    steps = 0
    # accept dt-scaled edge overshoot: taut edges drift O(dt) past 1 under
    # explicit Euler, and projecting that drift away every step would leak
    # the movers' transverse motion into spurious longitudinal stretching
    slack = eta_taut + 2.0 * dt0
    while t < t_stop - 1e-12 and steps < max_steps:
        mob_velocity(P, v, state, cvec, work, tau, naive, K, psi, eta_taut,
                     eta_zero, straight_tol, sat, sticky, hyst)
        for i in range(n):
            sticky[i] = 1 if state[i] == 1 else 0
        h = dt0 if t + dt0 <= t_stop else t_stop - t
        hh = 2.0 * h
        accepted = False
        for _ in range(11):
            hh *= 0.5
            ok = True
            for i in range(n):
                trial[i, 0] = P[i, 0] + hh * v[i, 0]
                trial[i, 1] = P[i, 1] + hh * v[i, 1]
            for i in range(1, n):
                ex = trial[i, 0] - trial[i - 1, 0]
                ey = trial[i, 1] - trial[i - 1, 1]
                if math.hypot(ex, ey) > 1.0 + slack:
                    ok = False
                    break
            if ok:
                accepted = True
                break
        if not accepted:
            # trial holds the smallest step; pull violating edges to length 1
            nproj += 1
            for i in range(1, n):
                ex = trial[i, 0] - trial[i - 1, 0]
                ey = trial[i, 1] - trial[i - 1, 1]
                l = math.hypot(ex, ey)
                if l > 1.0:
                    trial[i, 0] = trial[i - 1, 0] + ex / l
                    trial[i, 1] = trial[i - 1, 1] + ey / l
        P[:, :] = trial
        t += hh
        steps += 1
        if eps_maxchain(P, eps):
            return t, 1, nproj, steps
        if chain_diameter_bound(P) <= eps_collapse:
            return t, 2, nproj, steps
    code = 0 if t >= t_stop - 1e-12 else 3
    return t, code, nproj, steps


@njit(cache=True)
def run_gtm(P, tau, fix_first, fix_last, eps, eta_col, eta_zero, max_steps):
    """Advance P in place for up to max_steps rounds.

    Returns (rounds_done, code); predicates are evaluated after each round,
    never on the entry state.
    """
    buf = np.empty_like(P)
    done = 0
    for _ in range(max_steps):
        status = gtm_step(P, buf, tau, fix_first, fix_last, eta_zero)
        if status != 0:
            return done, -status
        P[:, :] = buf
        done += 1
        if eps_maxchain(P, eps):
            return done, 1
        if eps_marching(P, eps, eta_col):
            return done, 2
    return done, 0
