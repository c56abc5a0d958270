"""
Independent reference implementations used by the tests.

Nothing here imports orbitfed's numerical code: geometry is rebuilt from
rotation matrices, windows from dense sampling plus plain bisection, sink
choice from brute-force enumeration, ring latency from breadth-first search.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

MU = 3.986004418e14
R_E = 6_371_000.0
OMEGA_E = 7.2921159e-5
C = 299_792_458.0
K_B = 1.380649e-23


def kepler_period(h):
    a = R_E + h
    return 2 * math.pi * math.sqrt(a**3 / MU)


def kepler_velocity(h):
    return math.sqrt(MU / (R_E + h))


def _rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def sat_pos(L, K, h, inc, raan_spread, F, orbit, slot, t):
    """Walker-delta position via R_z(raan) R_x(inc) applied to the in-plane vector."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u = 2 * math.pi * t / kepler_period(h) + 2 * math.pi * slot / K + orbit * 2 * math.pi * F / (L * K)
    plane = np.stack([np.cos(u), np.sin(u), np.zeros_like(u)], axis=-1) * (R_E + h)
    rot = _rz(raan_spread * orbit / L) @ _rx(inc)
    return plane @ rot.T


def gs_pos(lat, lon, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    theta = lon + OMEGA_E * t
    return R_E * np.stack(
        [math.cos(lat) * np.cos(theta), math.cos(lat) * np.sin(theta), np.full_like(theta, math.sin(lat))],
        axis=-1,
    )


def elevation(sat, gs):
    """Elevation angle = 90 deg minus the zenith angle of the line of sight."""
    los = sat - gs
    cosz = np.einsum("ij,ij->i", los, gs) / (np.linalg.norm(los, axis=1) * np.linalg.norm(gs, axis=1))
    return math.pi / 2 - np.arccos(np.clip(cosz, -1, 1))


def dense_windows(L, K, h, inc, raan_spread, F, lat, lon, min_el, orbit, slot, t0, t1, step=1.0, refine=1e-4):
    """Windows from dense sampling, with each boundary refined by bisection."""
    def vis(t):
        return elevation(sat_pos(L, K, h, inc, raan_spread, F, orbit, slot, t), gs_pos(lat, lon, t)) >= min_el

    ts = np.arange(t0, t1 + step / 2, step)
    ts[-1] = min(ts[-1], t1)
    v = vis(ts)

    def edge(a, b, rising):
        while b - a > refine:
            m = 0.5 * (a + b)
            if bool(vis(m)[0]) == rising:
                b = m
            else:
                a = m
        return b if rising else a

    out = []
    start = t0 if v[0] else None
    for i in range(1, len(ts)):
        if v[i] and not v[i - 1]:
            start = edge(ts[i - 1], ts[i], True)
        elif v[i - 1] and not v[i]:
            out.append((start, edge(ts[i - 1], ts[i], False)))
            start = None
    if start is not None:
        out.append((start, t1))
    return out


def ring_bfs(K, sources):
    dist = {s: 0 for s in sources}
    q = deque(sources)
    while q:
        n = q.popleft()
        for nb in ((n - 1) % K, (n + 1) % K):
            if nb not in dist:
                dist[nb] = dist[n] + 1
                q.append(nb)
    return [dist[k] for k in range(K)]


def brute_force_sink(windows, t_now, t_train, t_up, t_down, hop, K):
    """Enumerate every slot; return (total, start, slot) of the best admissible one or None."""
    best = None
    for slot in range(K):
        relay = max(min(abs(k - slot), K - abs(k - slot)) for k in range(K)) * hop
        ready = t_now + relay
        nxt = [w for w in windows.get(slot, []) if w[1] > ready]
        if not nxt:
            continue
        s, e = nxt[0]
        if e - max(s, ready) < t_up + t_down:
            continue
        total = t_up + t_down + max(0.0, s - t_now) + t_train + relay
        key = (total, s, slot)
        if best is None or key < best:
            best = key
    return best


def star_chain(windows, t_round, t_dl, t_ul, t_train, K):
    """Star-baseline chain with constant exchange times: serve whoever shows up next.

    ``windows`` maps slot -> list of (start, end).  Returns (sum of per-satellite
    terms, end time, number of second waits).
    """
    tau = t_round
    pending = set(range(K))
    terms = []
    second = 0
    while pending:
        best = None
        for k in sorted(pending):
            for s, e in windows[k]:
                start = max(s, tau)
                if e - start >= t_dl:
                    if best is None or (start, k) < best[:2]:
                        best = (start, k, e)
                    break
        start, k, end = best
        done = start + t_dl + t_train
        wait2 = 0.0
        if done + t_ul > end:
            second += 1
            nxt = next(max(s, done) for s, e in windows[k] if e - max(s, done) >= t_ul)
            wait2 = nxt - done
        terms.append((start - tau) + t_dl + t_train + wait2 + t_ul)
        tau = done + wait2 + t_ul
        pending.remove(k)
    return math.fsum(terms), tau, second
