"""Resonant-stepsize search: roots of Psi(h, j) = target and grid scans for
stepsizes whose phase sum approaches a multiple of 2*pi."""

import math
from dataclasses import dataclass, field

from . import indexcomb
from .freqlat import FrequencyModel
from .indexcomb import TWO_PI, dist_to_two_pi_grid, psi_sum, small_divisor
from .tableio import csv_line


class BracketError(ValueError):
    """Bracket endpoints do not straddle the target."""


@dataclass(frozen=True)
class ResonanceQuery:
    j: tuple
    freq: FrequencyModel
    phase: str
    target: float = 0.0
    bracket: tuple = (1e-3, 1.0)
    tol: float = 1e-10

    def __post_init__(self):
        lo, hi = self.bracket
        if not (0 < lo < hi):
            raise ValueError("bracket must satisfy 0 < h_lo < h_hi "
                             "(h = 0 is always a trivial root of Psi)")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "j", indexcomb.canonical(self.j))


def find_resonant_step(q: ResonanceQuery) -> float:
    """Bracketed root of Psi(h, j) - target, |Psi(h*) - target| < tol.

    Bisection with secant acceleration (regula-falsi safeguarded): the secant
    step is used only when it lands strictly inside the current bracket,
    otherwise the midpoint is taken.  Fully deterministic.
    """
    def f(h):
        val = psi_sum(q.j, q.freq, h, q.phase) - q.target
        if not math.isfinite(val):
            raise ArithmeticError(f"phase sum not finite at h={h!r}")
        return val

    lo, hi = q.bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(
            f"Psi - target has the same sign at both bracket ends "
            f"({flo:+.3e} at {lo!r}, {fhi:+.3e} at {hi!r})")
    for _ in range(200):
        # secant candidate, midpoint fallback
        denom = fhi - flo
        mid = 0.5 * (lo + hi)
        cand = hi - fhi * (hi - lo) / denom if denom != 0.0 else mid
        if not (lo < cand < hi):
            cand = mid
        fc = f(cand)
        if abs(fc) < q.tol:
            return cand
        if (fc > 0) == (flo > 0):
            lo, flo = cand, fc
        else:
            hi, fhi = cand, fc
        if hi - lo < 1e-17 * max(1.0, hi):
            break
    # interval collapsed to rounding level: report the better endpoint
    return lo if abs(flo) <= abs(fhi) else hi


@dataclass
class ScanHit:
    h: float
    psi: float
    dist: float                 # distance of psi to the nearest 2*pi multiple
    ell: int                    # that multiple
    divisor: float              # |e^{i psi} - 1|
    refined_h: float = None
    refined_psi: float = None

    def row(self):
        return [self.h, self.psi, self.ell, self.divisor]


def scan_resonances(j, freq: FrequencyModel, phase: str, h_range,
                    n_grid: int, window: float = 0.05):
    """Sample Psi(h, j) on a uniform grid and report near-resonant stepsizes.

    A grid point is a hit when the distance of Psi to the nearest multiple of
    2*pi (including 0) falls below `window`.  Consecutive hits form a
    cluster; each cluster is refined with `find_resonant_step` targeting its
    multiple, when a sign change brackets the root.
    """
    lo, hi = h_range
    if not (0 < lo < hi):
        raise ValueError("h range must satisfy 0 < lo < hi")
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    j = indexcomb.canonical(j)
    hs = [lo + (hi - lo) * i / (n_grid - 1) for i in range(n_grid)]
    psis = [psi_sum(j, freq, h, phase) for h in hs]

    hits = []
    cluster = []

    def flush():
        if not cluster:
            return
        best = min(cluster, key=lambda hit: hit.dist)
        target = best.ell * TWO_PI
        i0 = hs.index(cluster[0].h)
        i1 = hs.index(cluster[-1].h)
        blo = hs[max(0, i0 - 1)]
        bhi = hs[min(len(hs) - 1, i1 + 1)]
        try:
            q = ResonanceQuery(j, freq, phase, target=target,
                               bracket=(blo, bhi), tol=1e-12)
            root = find_resonant_step(q)
            best.refined_h = root
            best.refined_psi = psi_sum(j, freq, root, phase)
        except (BracketError, ValueError):
            pass  # tangency or window edge: keep the grid point as-is
        hits.append(best)
        cluster.clear()

    for h, p in zip(hs, psis):
        d = dist_to_two_pi_grid(p)
        if d < window:
            ell = round(p / TWO_PI)
            cluster.append(ScanHit(h, p, d, int(ell), small_divisor(p)))
        else:
            flush()
    flush()
    return hits


def scan_to_csv(hits) -> str:
    lines = ["h,psi,ell,divisor,refined_h"]
    for hit in hits:
        row = hit.row() + [hit.refined_h if hit.refined_h is not None else ""]
        lines.append(csv_line(row))
    return "\n".join(lines) + "\n"


def scan_to_text(hits) -> str:
    if not hits:
        return "no near-resonant stepsizes in range\n"
    lines = [f"{'h':>14s} {'Psi':>14s} {'ell':>4s} {'|e^iPsi - 1|':>14s} {'refined h':>14s}"]
    for hit in hits:
        refined = f"{hit.refined_h:.10f}" if hit.refined_h is not None else "-"
        lines.append(f"{hit.h:14.8f} {hit.psi:14.8f} {hit.ell:4d} "
                     f"{hit.divisor:14.6e} {refined:>14s}")
    return "\n".join(lines) + "\n"
