"""Shared builders and oracles for the test suite."""

import numpy as np

from diams import ConormalNet, PolyCurve, analyze_net
from diams.errors import (DegenerateMetric, DegenerateOrientation,
                          ValidationError)
from diams.io_cli import example_curve_pair
from diams.net_core import validate_generic_position
from diams.singularity import (Configuration, admissibility_check,
                               metric_field, singular_edges,
                               singular_vertices)


def example_net(y, du=0.1, dv=0.1):
    return example_curve_pair(y, du, dv).to_net()


def parabolic_points(h):
    """Sample alpha(u) = (u, u^2, 1), beta(v) = (v, -v^2+v^3, 0) on [-1, 1]."""
    t = np.arange(-1.0, 1.0 + h / 2, h)
    a = np.stack([t, t ** 2, np.ones_like(t)], axis=1)
    b = np.stack([t, -t ** 2 + t ** 3, np.zeros_like(t)], axis=1)
    return a, b, t


def parabolic_net(h):
    a, b, t = parabolic_points(h)
    return ConormalNet(PolyCurve(a), PolyCurve(b)), t


def _poly_eval(coeffs, t):
    out = np.zeros_like(t)
    for c in coeffs[::-1]:
        out = out * t + c
    return out


def random_net_candidate(rng, n=21):
    """One random perturbed smooth sampling; may violate admissibility."""
    t = np.linspace(-1.0, 1.0, n)
    a2 = rng.uniform(0.3, 0.8) * rng.choice([-1.0, 1.0])
    a3 = rng.uniform(-0.3, 0.3)
    b1 = rng.uniform(-0.3, 0.3)
    b2 = rng.uniform(0.3, 0.8) * rng.choice([-1.0, 1.0])
    b3 = rng.uniform(-0.3, 0.3)
    za = rng.uniform(-0.15, 0.15, size=3)
    zb = rng.uniform(-0.15, 0.15, size=3)
    sx = rng.uniform(0.8, 1.2)
    jitter = 0.1 * (t[1] - t[0])
    alpha = np.stack([
        t + rng.normal(scale=jitter, size=n),
        _poly_eval([0.0, 0.0, a2, a3], t) + rng.normal(scale=jitter, size=n),
        1.0 + _poly_eval([0.0, za[0], za[1], za[2]], t) * 0.5
        + rng.normal(scale=0.3 * jitter, size=n),
    ], axis=1)
    beta = np.stack([
        sx * t + rng.normal(scale=jitter, size=n),
        _poly_eval([0.0, b1, b2, b3], t) + rng.normal(scale=jitter, size=n),
        _poly_eval([0.0, zb[0], zb[1], zb[2]], t) * 0.5
        + rng.normal(scale=0.3 * jitter, size=n),
    ], axis=1)
    return ConormalNet(PolyCurve(alpha), PolyCurve(beta))


def is_admissible(net, tol=1e-9):
    """Rejection filter: generic position, non-degenerate metric, and the
    quadrant hypothesis at every interior singular vertex."""
    if validate_generic_position(net, tol):
        return False
    try:
        metric = metric_field(net)
        edges = singular_edges(metric)
        for sv in singular_vertices(edges, net.domain):
            if not net.domain.is_interior_vertex(*sv.vertex):
                continue
            if sv.configuration == Configuration.INADMISSIBLE:
                return False
            if not admissibility_check(net, sv, tol):
                return False
    except (DegenerateMetric, DegenerateOrientation):
        return False
    return True


def random_admissible_net(rng, n=21, max_tries=50):
    for _ in range(max_tries):
        try:
            net = random_net_candidate(rng, n)
        except ValidationError:
            continue
        if is_admissible(net):
            return net
    raise RuntimeError("no admissible net found; generator needs retuning")


def analyzed(net, **kw):
    return analyze_net(net, **kw)


def densify(points, step=0.002):
    """Resample a polyline so consecutive samples are at most step apart."""
    pts = np.asarray(points, dtype=float)
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        k = max(2, int(np.ceil(np.linalg.norm(b - a) / step)))
        out.extend(np.linspace(a, b, k)[1:])
    return np.array(out)


def one_sided_hausdorff(src, dst, chunk=1024):
    worst = 0.0
    for i in range(0, len(src), chunk):
        d = np.sqrt(((src[i:i + chunk, None, :] - dst[None, :, :]) ** 2
                     ).sum(-1)).min(axis=1)
        worst = max(worst, float(d.max()))
    return worst


def random_unimodular(rng):
    """Product of elementary shears; determinant 1 up to round-off."""
    m = np.eye(3)
    for _ in range(4):
        i, j = rng.choice(3, size=2, replace=False)
        e = np.eye(3)
        e[i, j] = rng.uniform(-1.0, 1.0)
        m = m @ e
    return m


def transformed_net(net, matrix=None, shift=None):
    a = net.alpha.points
    b = net.beta.points
    if matrix is not None:
        a = a @ np.asarray(matrix).T
        b = b @ np.asarray(matrix).T
    if shift is not None:
        a = a + shift
        b = b + shift
    return ConormalNet(PolyCurve(a, net.alpha.offset),
                       PolyCurve(b, net.beta.offset))


def parse_obj(path):
    """Minimal OBJ reader: vertices, faces, groups, polylines."""
    vertices, faces, groups, lines = [], [], [], []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x) - 1 for x in parts[1:]])
            elif parts[0] == "g":
                groups.append(parts[1])
            elif parts[0] == "l":
                lines.append([int(x) - 1 for x in parts[1:]])
    return np.array(vertices), faces, groups, lines
