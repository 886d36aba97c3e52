"""Shared test-side geometry: convex hulls for Gauss-Lucas checks."""

import numpy as np


def _convex_hull(pts):
    """Monotone-chain hull of 2-d points (counterclockwise); degenerate
    inputs (all collinear or coincident) come back as 1 or 2 points."""
    pts = sorted(set(map(tuple, pts)))
    if len(pts) <= 2:
        return [np.asarray(p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # everything collinear
        return [np.asarray(pts[0]), np.asarray(pts[-1])]
    return [np.asarray(p) for p in hull]


def _point_segment_distance(q, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(q - a)))
    t = np.clip(float((q - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t * ab
    return float(np.hypot(*(q - proj)))


def hull_distance(roots, points):
    """Max distance of any point outside the convex hull of the roots
    (0 for points inside).  Complex in, float out."""
    rpts = np.column_stack([np.real(roots), np.imag(roots)])
    hull = _convex_hull(rpts)
    worst = 0.0
    for w in np.atleast_1d(points):
        q = np.array([w.real, w.imag])
        if len(hull) == 1:
            d = float(np.hypot(*(q - hull[0])))
        elif len(hull) == 2:
            d = _point_segment_distance(q, hull[0], hull[1])
        else:
            inside = True
            for i in range(len(hull)):
                a, b = hull[i], hull[(i + 1) % len(hull)]
                crossv = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
                if crossv < 0:
                    inside = False
                    break
            if inside:
                d = 0.0
            else:
                d = min(_point_segment_distance(q, hull[i], hull[(i + 1) % len(hull)])
                        for i in range(len(hull)))
        worst = max(worst, d)
    return worst
