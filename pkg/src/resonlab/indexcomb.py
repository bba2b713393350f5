"""Multi-index combinatorics for resonance analysis.

A multi-index j is an ordered tuple of signed entries (a, delta) with
delta in {+1, -1}.  This module computes its moment, the mu/S size
statistics, signed frequency sums Omega(j), integrator phase sums
Psi(h, j), and the small divisors |e^{i Psi} - 1|; it enumerates
zero-moment multi-indices, checks the polynomial non-resonance lower
bound, and audits the small divisors of the frequency-truncated
splitting scheme by exhaustive scan.
"""

import math
from dataclasses import dataclass, field

from . import freqlat
from .freqlat import FrequencyModel, ParameterError
from .tableio import csv_line, format_cell

SPLITTING = "splitting"
MIDPOINT = "midpoint"
_PHASES = (SPLITTING, MIDPOINT)

TWO_PI = 2.0 * math.pi


def _as_entries(j):
    entries = tuple((int(a), int(d)) for a, d in j)
    for a, d in entries:
        if d not in (1, -1):
            raise ValueError(f"entry sign must be +1 or -1, got {d}")
    return entries


def conjugate(j):
    """Flip every entry sign: (a, delta) -> (a, -delta)."""
    return tuple((a, -d) for a, d in _as_entries(j))


def entry_weight(a: int) -> int:
    """Size |j| of an entry: max(1, |a|), so index 0 carries weight 1."""
    return max(1, abs(int(a)))


def moment(j) -> int:
    """M(j) = sum a_i * delta_i."""
    return sum(a * d for a, d in _as_entries(j))


def is_action_only(j) -> bool:
    """True when the entry multiset is invariant under conjugation (j = jbar).

    Such indices depend only on the actions; their frequency sum vanishes
    identically.  Possible only for even length.
    """
    entries = _as_entries(j)
    if len(entries) % 2:
        return False
    return sorted(entries) == sorted(conjugate(entries))


def mu_S(j):
    """(mu, S): mu = third-largest entry weight, S = largest - second + mu."""
    entries = _as_entries(j)
    if len(entries) < 3:
        raise ValueError("mu and S need at least 3 entries")
    sizes = sorted((entry_weight(a) for a, _ in entries), reverse=True)
    mu = sizes[2]
    return mu, sizes[0] - sizes[1] + mu


def omega_sum(j, f: FrequencyModel) -> float:
    """Omega(j) = sum delta_i * omega_{a_i}."""
    return sum(d * freqlat.frequency(f, a) for a, d in _as_entries(j))


def psi_sum(j, f: FrequencyModel, h: float, phase: str) -> float:
    """Integrator phase sum for one step of size h.

    splitting: h * Omega(j)  (linear phase map).
    midpoint:  sum delta_i * 2 atan(h omega_{a_i} / 2)  (midpoint stability
    function phase per mode).
    """
    if not h > 0:
        raise ParameterError("stepsize h must be positive")
    if phase == SPLITTING:
        return h * omega_sum(j, f)
    if phase == MIDPOINT:
        return sum(d * 2.0 * math.atan(h * freqlat.frequency(f, a) / 2.0)
                   for a, d in _as_entries(j))
    raise ValueError(f"unknown phase kind: {phase!r}")


def small_divisor(theta: float) -> float:
    """|e^{i theta} - 1| = 2 |sin(theta/2)|."""
    return 2.0 * abs(math.sin(theta / 2.0))


def dist_to_two_pi_grid(theta: float) -> float:
    """Distance of theta to the nearest multiple of 2*pi (including 0)."""
    return abs(math.remainder(theta, TWO_PI))


def canonical(j):
    """Canonical entry order: |a| descending, then a, then delta.

    M, mu, S, Omega and Psi are permutation invariant, so multi-indices are
    compared and enumerated in this order (duplicate-free streams, stable
    reports).
    """
    return tuple(sorted(_as_entries(j), key=_canonical_key))


def _canonical_key(entry):
    a, d = entry
    return (-entry_weight(a), a, d)


def enumerate_zero_moment(r: int, k_max: int):
    """Yield every canonical multi-index of length r with zero moment.

    Entries range over |a| <= k_max, both signs.  Depth-first over
    non-increasing entry sequences with a running-moment bound: a prefix is
    abandoned when the remaining slots cannot cancel its accumulated moment.
    """
    if r < 2:
        raise ValueError("multi-index length must be >= 2")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    universe = sorted(((a, d) for a in range(-k_max, k_max + 1) for d in (1, -1)),
                      key=_canonical_key)
    n = len(universe)

    def rec(start, slots, acc, prefix):
        if slots == 0:
            if acc == 0:
                yield tuple(prefix)
            return
        for i in range(start, n):
            a, d = universe[i]
            m = acc + a * d
            # each remaining entry moves the moment by at most k_max
            if abs(m) > (slots - 1) * k_max:
                continue
            prefix.append((a, d))
            yield from rec(i, slots - 1, m, prefix)
            prefix.pop()

    yield from rec(0, r, 0, [])


# ---------------------------------------------------------------------------
# non-resonance check


@dataclass
class Violation:
    j: tuple
    omega: float
    bound: float


@dataclass
class NonresonanceReport:
    """Exhaustive scan of |Omega(j)| >= gamma / mu(j)^alpha over I_ell \\ A_ell."""

    r: int
    k_max: int
    gamma: float
    alpha: float
    checked: int = 0
    violations: list = field(default_factory=list)
    min_ratio: float = math.inf       # min over j of |Omega(j)| * mu(j)^alpha
    argmin: tuple = ()

    @property
    def holds(self) -> bool:
        return not self.violations


def check_nonresonance(f: FrequencyModel, r: int, gamma: float, alpha: float,
                       k_max: int) -> NonresonanceReport:
    """Scan all canonical zero-moment j of length 3..r (skipping action-only
    ones) for violations of the lower bound |Omega(j)| >= gamma / mu(j)^alpha.

    An empty violation list certifies the bound at this (r, k_max) scale; the
    minimal ratio |Omega|*mu^alpha found is reported either way.
    """
    if r < 3:
        raise ValueError("non-resonance scan needs r >= 3")
    rep = NonresonanceReport(r=r, k_max=k_max, gamma=gamma, alpha=alpha)
    for ell in range(3, r + 1):
        for j in enumerate_zero_moment(ell, k_max):
            if is_action_only(j):
                continue
            om = omega_sum(j, f)
            mu, _ = mu_S(j)
            ratio = abs(om) * mu ** alpha
            rep.checked += 1
            if ratio < rep.min_ratio:
                rep.min_ratio = ratio
                rep.argmin = j
            if abs(om) < gamma / mu ** alpha:
                rep.violations.append(Violation(j, om, gamma / mu ** alpha))
    return rep


# ---------------------------------------------------------------------------
# truncated-scheme divisor audit

CASE_TWO_BIG = "two-big"
CASE_ONE_BIG = "one-big"
CASE_NONE_BIG = "none-big"
_CASES = (CASE_TWO_BIG, CASE_ONE_BIG, CASE_NONE_BIG)


@dataclass
class CaseStats:
    case: str
    count: int = 0
    min_scaled: float = math.inf      # min of |e^{ih Omega^h}-1| * mu^alpha / h
    argmin: tuple = ()
    min_divisor: float = math.inf
    exact_zeros: list = field(default_factory=list)


@dataclass
class DivisorAudit:
    """Case-classified small divisors of the frequency-truncated propagator.

    For each audited multi-index, Omega^h is the signed sum of truncated
    frequencies and the divisor is |e^{i h Omega^h(j)} - 1|.  Indices are
    grouped by how many entries the cut-off zeroes out (none / one / two).

    Structurally-trivial zeros are reported separately: on an even lattice
    the kept entries can pair up as (a, delta) with (-a, -delta), whose
    signed contributions cancel identically, while the remaining entries sit
    above the cut-off.  Such Omega^h = 0 are intrinsic symmetry zeros, not
    failures of the non-resonance bound, and they fall outside the two-big /
    one-big moment argument (a zero-moment big pair may be a mirror pair
    rather than a conjugate pair).
    """

    h: float
    K: float
    ell: int
    k_max: int
    alpha: float
    audited: int = 0
    skipped_action_only: int = 0
    skipped_filter: int = 0
    trivial_zeros: list = field(default_factory=list)
    cases: dict = field(default_factory=dict)

    @property
    def exact_zero_count(self) -> int:
        """Exact zeros that are NOT structurally trivial."""
        return sum(len(c.exact_zeros) for c in self.cases.values())

    @property
    def trivial_zero_count(self) -> int:
        return len(self.trivial_zeros)

    def to_rows(self):
        rows = []
        for name in _CASES:
            c = self.cases[name]
            rows.append({
                "case": name,
                "count": c.count,
                "min_divisor": c.min_divisor if c.count else "",
                "min_scaled": c.min_scaled if c.count else "",
                "argmin": format_multi_index(c.argmin) if c.count else "",
                "exact_zeros": len(c.exact_zeros),
            })
        return rows

    def to_csv(self) -> str:
        lines = ["case,count,min_divisor,min_scaled,argmin,exact_zeros"]
        for row in self.to_rows():
            lines.append(",".join(format_cell(row[k]) for k in
                                  ("case", "count", "min_divisor", "min_scaled",
                                   "argmin", "exact_zeros")))
        lines.append(csv_line(["symmetry-trivial", self.trivial_zero_count,
                               "", "", "", self.trivial_zero_count]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        head = (f"divisor audit: ell={self.ell} k_max={self.k_max} h={self.h!r} "
                f"K={self.K!r} alpha={self.alpha!r}\n"
                f"audited {self.audited}  (skipped: {self.skipped_action_only} "
                f"action-only, {self.skipped_filter} filtered; "
                f"{self.trivial_zero_count} symmetry-trivial zeros set aside)\n")
        lines = [head]
        for row in self.to_rows():
            if row["count"]:
                lines.append(f"  {row['case']:9s} n={row['count']:<8d} "
                             f"min|e^(ihW)-1|={row['min_divisor']:.6e} "
                             f"min scaled={row['min_scaled']:.6e} "
                             f"zeros={row['exact_zeros']} at {row['argmin']}")
            else:
                lines.append(f"  {row['case']:9s} n=0")
        return "\n".join(lines) + "\n"


def format_multi_index(j) -> str:
    if not j:
        return ""
    return ";".join(f"{a}{'+' if d > 0 else '-'}" for a, d in j)


def _negation_symmetric(values) -> bool:
    """True when the multiset of values pairs off as {v, -v} (0 self-pairs).

    Exact float comparison is intended: entries with the same |omega| are
    computed by the same expression, and negation is exact in IEEE
    arithmetic, so symmetry cancellations match bitwise.
    """
    from collections import Counter
    counts = Counter(values)
    for v, n in counts.items():
        if v == 0.0:
            continue
        if counts.get(-v, 0) != n:
            return False
    return True


def audit_truncated_divisors(f: FrequencyModel, h: float, K: float, ell: int,
                             k_max: int, alpha: float = 1.0,
                             stress: bool = False) -> DivisorAudit:
    """Exhaustively audit |e^{ih Omega^h(j)} - 1| over canonical zero-moment
    multi-indices of length ell with entries <= k_max.

    Audited set: j not action-only, with the third-largest |omega| over the
    entries satisfying h*|omega| <= K/(ell-2), so that at most two entries can
    sit above the cut-off; the scan classifies each j by that count.
    Multi-indices whose kept signed contributions form a negation-symmetric
    multiset have Omega^h = 0 by symmetry alone and are set aside as trivial
    zeros (see DivisorAudit).  Requires K <= pi (the |e^{ix}-1| >= (2/pi)|x|
    comparison fails beyond), unless stress=True deliberately relaxes it to
    demonstrate large-K resonances.
    """
    if not h > 0 or not K > 0:
        raise ParameterError("h and K must be positive")
    if K > math.pi and not stress:
        raise ParameterError(
            "audit requires K <= pi (pass stress=True to relax deliberately)")
    if ell < 3:
        raise ValueError("audit needs ell >= 3")

    audit = DivisorAudit(h=h, K=K, ell=ell, k_max=k_max, alpha=alpha,
                         cases={name: CaseStats(name) for name in _CASES})
    # overrides and the potential make omega index-dependent; precompute
    omega_of = {a: freqlat.frequency(f, a) for a in range(-k_max, k_max + 1)}
    cut = K / h
    for j in enumerate_zero_moment(ell, k_max):
        if is_action_only(j):
            audit.skipped_action_only += 1
            continue
        absw = sorted((abs(omega_of[a]) for a, _ in j), reverse=True)
        if absw[2] > cut / (ell - 2):
            audit.skipped_filter += 1
            continue
        n_big = sum(1 for w in absw if w > cut)
        case = {0: CASE_NONE_BIG, 1: CASE_ONE_BIG, 2: CASE_TWO_BIG}[n_big]
        kept = [d * omega_of[a] for a, d in j if abs(omega_of[a]) <= cut]
        if _negation_symmetric(kept):
            audit.trivial_zeros.append(j)
            continue
        om_h = sum(d * (omega_of[a] if abs(omega_of[a]) <= cut else 0.0)
                   for a, d in j)
        div = small_divisor(h * om_h)
        mu, _ = mu_S(j)
        scaled = div * mu ** alpha / h
        audit.audited += 1
        stats = audit.cases[case]
        stats.count += 1
        if div < stats.min_divisor:
            stats.min_divisor = div
        if scaled < stats.min_scaled:
            stats.min_scaled = scaled
            stats.argmin = j
        if div == 0.0:
            stats.exact_zeros.append(j)
    return audit
