"""Certification oracles for injectivity and disk coverage.

Both probes return a three-way :class:`OracleVerdict` rather than a bool:
``"certified"`` and ``"refuted"`` are backed by explicit evidence (a safety
margin, or a confirmed witness), ``"inconclusive"`` means the sampling
budget was exhausted without either.  Verdicts never silently degrade: a
precondition the data fails to meet refines the mesh or ends inconclusive.

Refutation of injectivity is exact in spirit: candidate near-collisions
found by image-space binning are polished with a damped Gauss-Newton
iteration until two genuinely distinct preimages agree to 1e-12, or the
candidate is discarded.  Certification combines a positive-Jacobian sweep
of the closed sub-disk with a simplicity check of the boundary curve
(binned pair scan under per-sample movement radii, plus a tangent-turning
bound), which is the standard degree-theoretic criterion.

Coverage uses winding numbers of the sampled boundary curve around a net
of target points, with a per-segment resolution precondition: a segment
chord must not exceed a tenth of its distance to the probed point, else
the angle sum is not trusted and the curve is refined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .sampling import SamplingSpec, disk_net, polar_grid
from .distortion import distortion_arrays

__all__ = [
    "CERTIFIED",
    "INCONCLUSIVE",
    "MeshPrecisionError",
    "OracleVerdict",
    "REFUTED",
    "SamplingSpec",
    "coverage_probe",
    "univalence_probe",
    "winding_number",
]

CERTIFIED = "certified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"

# movement radius around a boundary sample, as a multiple of the larger
# adjacent chord; 0.75 > 1/2 keeps the bound valid for mildly nonuniform
# parametrizations while still separating genuinely disjoint arcs
_MOVE_SAFETY = 0.75

_RESID_TOL = 1e-12
_DIAG_TOL = 1e-6


class MeshPrecisionError(RuntimeError):
    """The boundary mesh is too coarse for a trustworthy winding sum."""


@dataclass(frozen=True)
class OracleVerdict:
    status: str
    margin: float
    witness: Any = None
    resolution: dict = field(default_factory=dict)

    def __bool__(self) -> bool:  # truthiness == certified, for quick gating
        return self.status == CERTIFIED

    def to_json_dict(self) -> dict:
        wit = self.witness
        if wit is not None:
            if isinstance(wit, tuple):
                wit = [[complex(w).real, complex(w).imag] for w in wit]
            else:
                wit = [complex(wit).real, complex(wit).imag]
        res = {}
        for key, val in self.resolution.items():
            if isinstance(val, (np.floating, np.integer)):
                val = val.item()
            res[key] = val
        return {
            "status": self.status,
            "margin": float(self.margin),
            "witness": wit,
            "resolution": res,
        }


def _near_pairs(points: np.ndarray, images: np.ndarray, eps_img: float, sep: float,
                cap: int = 200_000) -> list[tuple[int, int]]:
    """Index pairs with image distance <= eps_img but domain distance > sep.

    Image-space binning keeps this linear in the sample count.  The result
    is sorted by image distance (closest first), ties broken by index, so
    downstream refinement order is deterministic.
    """
    cell = eps_img if eps_img > 0 else 1e-12
    kx = np.floor(images.real / cell).astype(np.int64)
    ky = np.floor(images.imag / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for idx in range(len(points)):
        buckets.setdefault((kx[idx], ky[idx]), []).append(idx)

    found: list[tuple[float, int, int]] = []
    for idx in range(len(points)):
        cx, cy = kx[idx], ky[idx]
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for jdx in buckets.get((cx + dx, cy + dy), ()):
                    if jdx <= idx:
                        continue
                    dist_img = abs(images[idx] - images[jdx])
                    if dist_img <= eps_img and abs(points[idx] - points[jdx]) > sep:
                        found.append((dist_img, idx, jdx))
                        if len(found) >= cap:
                            found.sort()
                            return [(i, j) for _, i, j in found]
    found.sort()
    return [(i, j) for _, i, j in found]


def _refine_collision(f, z1: complex, z2: complex, radius: float):
    """Damped Gauss-Newton polish of a candidate collision pair.

    Treats (z1, z2) as four real unknowns and drives f(z1) - f(z2) to zero
    with minimum-norm steps, backtracking on the residual and projecting
    back into the closed disk of the given radius.  Success requires the
    residual below 1e-12 while the pair stays separated by more than 1e-6.
    """
    z1 = complex(z1)
    z2 = complex(z2)
    cap = radius * (1.0 - 1e-12)
    for _ in range(80):
        resid = complex(f.eval(z1)) - complex(f.eval(z2))
        if abs(resid) < 0.1 * _RESID_TOL:
            break
        fz1, fzb1 = f.partials(z1)
        fz2, fzb2 = f.partials(z2)
        # d/dx = f_z + f_zbar, d/dy = i (f_z - f_zbar); second point negated
        cols = (fz1 + fzb1, 1j * (fz1 - fzb1), -(fz2 + fzb2), -1j * (fz2 - fzb2))
        jac = np.array([[c.real for c in cols], [c.imag for c in cols]])
        rhs = np.array([-resid.real, -resid.imag])
        step, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        move1 = complex(step[0], step[1])
        move2 = complex(step[2], step[3])
        scale = 1.0
        for _ in range(12):
            w1 = z1 + scale * move1
            w2 = z2 + scale * move2
            if abs(w1) > cap:
                w1 *= cap / abs(w1)
            if abs(w2) > cap:
                w2 *= cap / abs(w2)
            if abs(complex(f.eval(w1)) - complex(f.eval(w2))) < abs(resid):
                break
            scale *= 0.5
        else:
            break
        z1, z2 = w1, w2
        if abs(z1 - z2) < 0.1 * _DIAG_TOL:
            break
    resid = abs(complex(f.eval(z1)) - complex(f.eval(z2)))
    sep = abs(z1 - z2)
    ok = resid < _RESID_TOL and sep > _DIAG_TOL and abs(z1) <= radius + 1e-15 and abs(z2) <= radius + 1e-15
    return z1, z2, ok, resid, sep


def _curve_scan(f, radius: float, n_curve: int):
    """Simplicity scan of the image of |z| = radius at n_curve samples.

    Returns (simple, margin, reason, info).  The curve is declared simple
    when every pair of samples at cyclic index distance >= 2 is separated
    by more than the sum of their movement radii, and consecutive chord
    directions never turn by a right angle or more.  The margin is a lower
    bound for the separation slack over all such pairs, binned pairs
    explicitly and the rest by the bin-size guarantee.
    """
    theta = 2.0 * np.pi * np.arange(n_curve) / n_curve
    z = radius * np.exp(1j * theta)
    curve = np.asarray(f.eval(z), dtype=complex)
    chords = np.roll(curve, -1) - curve
    abs_chords = np.abs(chords)
    info = {"curve_points": n_curve, "max_chord": float(abs_chords.max())}
    if abs_chords.min() == 0.0:
        return False, 0.0, "stationary boundary samples", info
    turn = np.angle(np.roll(chords, -1) * np.conj(chords))
    info["max_turn"] = float(np.abs(turn).max())
    if info["max_turn"] >= 0.5 * np.pi:
        return False, 0.0, "chord direction turns by a right angle between samples", info

    move = _MOVE_SAFETY * np.maximum(np.roll(abs_chords, 1), abs_chords)
    move_max = float(move.max())
    cell = 3.0 * move_max
    kx = np.floor(curve.real / cell).astype(np.int64)
    ky = np.floor(curve.imag / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for idx in range(n_curve):
        buckets.setdefault((kx[idx], ky[idx]), []).append(idx)

    # pairs not visited by the 3x3 neighborhood are > cell apart in image,
    # hence their slack exceeds cell - 2*move_max = move_max
    margin = move_max
    worst = None
    pairs = 0
    for idx in range(n_curve):
        cx, cy = kx[idx], ky[idx]
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for jdx in buckets.get((cx + dx, cy + dy), ()):
                    if jdx <= idx:
                        continue
                    gap_idx = jdx - idx
                    if min(gap_idx, n_curve - gap_idx) < 2:
                        continue
                    pairs += 1
                    slack = abs(curve[idx] - curve[jdx]) - (move[idx] + move[jdx])
                    if slack < margin:
                        margin = slack
                        worst = (idx, jdx)
    info["scanned_pairs"] = pairs
    if margin <= 0.0:
        info["worst_pair_theta"] = [float(theta[worst[0]]), float(theta[worst[1]])]
        return False, float(margin), "near self-intersection unresolved at this resolution", info
    return True, float(margin), "", info


def univalence_probe(f, radius: float, spec: SamplingSpec | None = None) -> OracleVerdict:
    """Three-way injectivity verdict for f on the closed disk |z| <= radius.

    Refutation first: grid points whose images nearly coincide while the
    points stay apart are polished into an exact collision witness.  If no
    collision survives polishing, certification requires a strictly
    positive Jacobian at every sample of the closed disk together with a
    simple boundary curve; either failing leaves the verdict inconclusive.
    """
    if spec is None:
        spec = SamplingSpec()
    radius = float(radius)
    if not (0.0 < radius < 1.0):
        raise ValueError(f"radius must lie in (0, 1), got {radius}")

    points = polar_grid(radius, spec.n_r, spec.n_theta)
    images = np.asarray(f.eval(points), dtype=complex)
    lam_max, _, jac = distortion_arrays(f, points)
    sup_lam = float(lam_max.max())
    mesh = max(radius / spec.n_r, 2.0 * np.pi * radius / spec.n_theta)
    sep = 2.0 * mesh
    eps_img = sup_lam * mesh / 4.0
    base = {
        "n_r": spec.n_r,
        "n_theta": spec.n_theta,
        "mesh": mesh,
        "sep_threshold": sep,
        "image_threshold": eps_img,
        "sup_lambda": sup_lam,
    }

    candidates = _near_pairs(points, images, eps_img, sep)
    base["candidate_pairs"] = len(candidates)
    for i, j in candidates[:64]:
        z1, z2, ok, resid, pair_sep = _refine_collision(f, points[i], points[j], radius)
        if ok:
            res = dict(base)
            res.update({"collision_residual": resid, "witness_separation": pair_sep})
            return OracleVerdict(REFUTED, margin=-pair_sep, witness=(z1, z2), resolution=res)

    jac_min = float(jac.min())
    base["jacobian_min"] = jac_min
    if jac_min <= 0.0:
        worst = points[int(np.argmin(jac))]
        res = dict(base)
        res["reason"] = (
            f"nonpositive Jacobian sample at z = {complex(worst)!r}; cannot certify"
        )
        return OracleVerdict(INCONCLUSIVE, margin=0.0, resolution=res)

    n_curve = max(1024, 4 * spec.n_theta)
    reason = "refinement budget exhausted"
    info: dict = {}
    for round_idx in range(spec.refinement_rounds + 1):
        simple, margin, fail_reason, info = _curve_scan(f, radius, n_curve)
        if simple:
            res = dict(base)
            res.update(info)
            res["rounds_used"] = round_idx
            return OracleVerdict(CERTIFIED, margin=margin, resolution=res)
        reason = fail_reason
        n_curve *= 2
    res = dict(base)
    res.update(info)
    res["reason"] = reason
    return OracleVerdict(INCONCLUSIVE, margin=0.0, resolution=res)


def _winding_block(curve: np.ndarray, abs_chords: np.ndarray, targets: np.ndarray,
                   check_segments: bool = True):
    """Winding numbers of the sampled curve around each target point.

    Chunked so memory stays bounded for long curves.  Returns integer
    windings, a per-target validity flag (every segment chord at most a
    tenth of its distance to the target), and the distance from each
    target to the nearest curve sample.
    """
    n_curve = len(curve)
    n_targets = len(targets)
    wind = np.empty(n_targets, dtype=np.int64)
    valid = np.ones(n_targets, dtype=bool)
    dist = np.empty(n_targets, dtype=float)
    chunk = max(1, int(2_000_000 // max(n_curve, 1)))
    for start in range(0, n_targets, chunk):
        sel = slice(start, min(start + chunk, n_targets))
        rel = curve[None, :] - targets[sel, None]
        abs_rel = np.abs(rel)
        abs_next = np.roll(abs_rel, -1, axis=1)
        if check_segments:
            valid[sel] = (abs_chords[None, :] <= 0.1 * np.minimum(abs_rel, abs_next)).all(axis=1)
        dist[sel] = abs_rel.min(axis=1)
        angles = np.angle(np.roll(rel, -1, axis=1) * np.conj(rel))
        wind[sel] = np.rint(angles.sum(axis=1) / (2.0 * np.pi)).astype(np.int64)
    return wind, valid, dist


def winding_number(f, radius: float, w: complex, n_theta: int = 2048) -> int:
    """Winding of the image of |z| = radius around w.

    Raises :class:`MeshPrecisionError` when any segment chord exceeds a
    tenth of its distance to w; the caller should refine n_theta.
    """
    radius = float(radius)
    if not (0.0 < radius < 1.0):
        raise ValueError(f"radius must lie in (0, 1), got {radius}")
    if n_theta < 8:
        raise ValueError("n_theta must be at least 8")
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    curve = np.asarray(f.eval(radius * np.exp(1j * theta)), dtype=complex)
    abs_chords = np.abs(np.roll(curve, -1) - curve)
    wind, valid, dist = _winding_block(curve, abs_chords, np.asarray([complex(w)]))
    if not valid[0]:
        raise MeshPrecisionError(
            f"chord length exceeds a tenth of the distance to w = {complex(w)!r} "
            f"(nearest sample at {dist[0]:.3e}); refine n_theta beyond {n_theta}"
        )
    return int(wind[0])


_NET_CAP = 500_000
_WINDING_BUDGET = 100_000_000
_SUBSAMPLE = 512


def coverage_probe(f, radius: float, rho: float, spec: SamplingSpec | None = None) -> OracleVerdict:
    """Does f(|z| < radius) cover the closed disk |w| <= rho?

    Certification needs the sampled boundary curve to stay outside the
    target disk with slack dominating the chord length, and winding number
    at least one around a net of the target disk.  When the net times the
    curve is too large for exact winding sums everywhere, windings are
    evaluated on a deterministic subsample: the uniform slack makes the
    winding constant across the net, which the resolution records.
    Refutation exhibits a net point with winding zero or less under valid
    per-segment preconditions.  Orientation matters: the verdicts read the
    winding as a covering count, which is the right reading for
    sense-preserving maps.
    """
    if spec is None:
        spec = SamplingSpec()
    radius = float(radius)
    rho = float(rho)
    if not (0.0 < radius < 1.0):
        raise ValueError(f"radius must lie in (0, 1), got {radius}")
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")

    n_curve = max(2048, 4 * spec.n_theta)
    cap_curve = 1 << 18
    reason = "refinement budget exhausted"
    last_info: dict = {}
    for round_idx in range(spec.refinement_rounds + 1):
        theta = 2.0 * np.pi * np.arange(n_curve) / n_curve
        curve = np.asarray(f.eval(radius * np.exp(1j * theta)), dtype=complex)
        abs_chords = np.abs(np.roll(curve, -1) - curve)
        chord_max = float(abs_chords.max())
        min_abs = float(np.abs(curve).min())
        gap = min_abs - rho
        info = {
            "curve_points": n_curve,
            "max_chord": chord_max,
            "curve_min_abs": min_abs,
            "rounds_used": round_idx,
        }
        last_info = info

        if gap > 0.0 and chord_max <= 0.1 * gap:
            # the whole target disk keeps distance >= gap from every curve
            # sample, so the segment precondition holds uniformly and the
            # winding is constant on the net
            margin = gap - 0.5 * chord_max
            spacing = min(rho / 16.0, margin)
            net = disk_net(rho, spacing)
            info["net_points"] = len(net)
            info["net_spacing"] = spacing
            if len(net) > _NET_CAP:
                reason = "certification net too large for the available margin"
                break
            if len(net) * n_curve <= _WINDING_BUDGET:
                targets = net
                info["winding_method"] = "full net"
            else:
                idx = np.unique(np.linspace(0, len(net) - 1, _SUBSAMPLE).round().astype(int))
                targets = net[idx]
                info["winding_method"] = "subsample, winding constant on the net by the uniform slack"
                info["winding_subsample"] = len(targets)
            wind, _, dist = _winding_block(curve, abs_chords, targets, check_segments=False)
            info["winding_min"] = int(wind.min())
            info["winding_max"] = int(wind.max())
            if wind.min() >= 1:
                return OracleVerdict(CERTIFIED, margin=float(margin), resolution=info)
            bad = int(np.argmin(wind))
            return OracleVerdict(
                REFUTED,
                margin=-float(dist[bad]),
                witness=complex(targets[bad]),
                resolution=info,
            )

        if gap <= 0.0:
            net = disk_net(rho, rho / 16.0)
            info["net_points"] = len(net)
            wind, valid, dist = _winding_block(curve, abs_chords, net)
            bad_mask = valid & (wind <= 0)
            if bad_mask.any():
                bad_idx = np.flatnonzero(bad_mask)
                pick = bad_idx[int(np.argmax(dist[bad_idx]))]
                info["winding_at_witness"] = int(wind[pick])
                return OracleVerdict(
                    REFUTED,
                    margin=-float(dist[pick]),
                    witness=complex(net[pick]),
                    resolution=info,
                )
            if valid.all():
                reason = "boundary curve meets the target disk within sampling slack; cannot certify the remainder"
            else:
                reason = "winding preconditions unmet near the curve at this resolution"
            factor = 2
        else:
            # jump straight to the resolution the precondition demands
            need = chord_max / (0.1 * gap)
            factor = int(min(32, max(2, 2 ** math.ceil(math.log2(need)))))
            reason = "chord length exceeds a tenth of the curve-to-disk gap"

        if n_curve >= cap_curve:
            break
        n_curve = min(n_curve * factor, cap_curve)

    res = dict(last_info)
    res["reason"] = reason
    return OracleVerdict(INCONCLUSIVE, margin=0.0, resolution=res)
