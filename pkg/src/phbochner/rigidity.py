"""Pointwise rigidity conditions: Hermitian forms, Sylvester checks, scaling.

All conditions are algebraic in the curvature/torsion data at a point, which
the caller supplies directly (computing R, A from a contact form is out of
scope).  Fractional powers |z|^{2/3}, |z|^{4/3} are evaluated as (|z|^2)^{1/3}
and its square, via the real cube root, so no complex branch is involved.

Boundary behaviour: strict ">0" verdicts use a configurable epsilon scaled by
the magnitude of the quantity; "= 0" cases (the borderline automorphism
condition) are reported as "within epsilon of zero", never asserted exactly
from floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .scalar import ScalarExact

__all__ = [
    "PointData", "HermitianForm", "ConditionReport",
    "thmA_condition", "cond_3_11", "cond_3_12", "corollary_C",
    "build_form_4", "build_form_5", "is_positive_definite",
    "check_equiv_3_9_3_11", "check_equiv_3_10_3_12",
    "scale", "bianchi_residual", "bianchi_consistent",
    "random_point", "equivalence_battery", "sylvester_battery",
    "scaling_report",
]

DEFAULT_EPS = 1e-12


def _to_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(re, im)
    return complex(value)


@dataclass(frozen=True)
class PointData:
    """Curvature/torsion data at one point, in the units of a fixed contact form.

    Complex entries follow the convention A11_1 = A11 differentiated in the 1
    direction, A11_b in the 1-bar direction, A11_bb twice in the 1-bar
    direction; R1 is the 1-derivative of R (the 1-bar derivative is its
    conjugate and never stored), and |grad_b R|^2 = 2|R1|^2 is always derived.
    """

    R: float
    R0: float = 0.0
    R1: complex = 0j
    lapR: float = 0.0
    A11: complex = 0j
    A11_1: complex = 0j
    A11_b: complex = 0j
    A11_bb: complex = 0j
    id: str = ""

    @classmethod
    def from_mapping(cls, data: dict) -> "PointData":
        if "R" not in data:
            raise ValueError("point record is missing the field 'R'")
        kwargs = {"R": float(data["R"]), "id": str(data.get("id", ""))}
        for name in ("R0", "lapR"):
            if name in data:
                kwargs[name] = float(data[name])
        for name in ("R1", "A11", "A11_1", "A11_b", "A11_bb"):
            if name in data:
                kwargs[name] = _to_complex(data[name])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = {"id": self.id, "R": self.R, "R0": self.R0,
               "R1": [self.R1.real, self.R1.imag], "lapR": self.lapR}
        for name in ("A11", "A11_1", "A11_b", "A11_bb"):
            z = getattr(self, name)
            out[name] = [z.real, z.imag]
        return out

    def grad_b_R_sq(self) -> float:
        return 2.0 * abs(self.R1) ** 2

    def torsion_free(self, eps: float = DEFAULT_EPS) -> bool:
        return all(abs(getattr(self, n)) <= eps
                   for n in ("A11", "A11_1", "A11_b", "A11_bb"))


def _cbrt_abs_sq(z: complex) -> float:
    """|z|^{2/3} computed as the real cube root of |z|^2."""
    return (abs(z) ** 2) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# Scalar conditions
# ---------------------------------------------------------------------------

def bianchi_residual(p: PointData) -> float:
    """R_{,0} - 2 Re(A11_{,bb}); zero for consistent data."""
    return p.R0 - 2.0 * p.A11_bb.real


def bianchi_consistent(p: PointData, tol: float = 1e-9) -> bool:
    scale_ = max(1.0, abs(p.R0), 2.0 * abs(p.A11_bb))
    return abs(bianchi_residual(p)) <= tol * scale_


def thmA_condition(p: PointData, eps: float = DEFAULT_EPS
                   ) -> tuple[float, bool, bool]:
    """Automorphism-rigidity value sqrt3 R_{,0} - 2 Im(A11_{,bb}).

    Returns (value, strict verdict, borderline verdict): the strict verdict
    requires R < 0 and value > 0; the borderline verdict requires R < 0 and
    value within eps of zero (then only a one-parameter family can survive).
    The identification i(Z - conj Z) = -2 Im(Z) ties this to the integrand of
    the final scalar identity.
    """
    value = 3.0 ** 0.5 * p.R0 - 2.0 * p.A11_bb.imag
    band = eps * max(1.0, abs(3.0 ** 0.5 * p.R0), 2.0 * abs(p.A11_bb.imag))
    verdict_a = bool(p.R < 0 and value > band)
    verdict_b = bool(p.R < 0 and abs(value) <= band)
    return float(value), verdict_a, verdict_b


def cond_3_11(p: PointData) -> float:
    t = _cbrt_abs_sq(p.A11_1)
    return 0.375 * p.R ** 2 - 2.0 * p.R * t - 25.0 * abs(p.A11) ** 2


def _cross_entry(p: PointData) -> complex:
    """(5/48) R_{,b} - 2i Ab1b1_{,1} = (5/48) conj(R1) - 2i conj(A11_b)."""
    return (5.0 / 48.0) * p.R1.conjugate() - 2j * p.A11_b.conjugate()


def cond_3_12(p: PointData) -> float:
    t = _cbrt_abs_sq(p.A11_1)
    a2 = abs(p.A11) ** 2
    brace = ((83.0 / 3456.0) * p.R ** 2 + (55.0 / 1152.0) * p.lapR
             + 1.25 * a2 - (5.0 / 36.0) * t ** 2
             - (10.0 / 9.0) * p.A11_bb.imag)
    cross = abs(_cross_entry(p)) ** 2
    return (cond_3_11(p) * brace
            - (15.0 / 8.0) * (p.R / 8.0 - (2.0 / 3.0) * t) * cross)


def corollary_C(p: PointData, eps: float = DEFAULT_EPS) -> tuple[float, bool]:
    """Torsion-free rigidity value 4R(5R^2 + 3 lap_b R) - 3 |grad_b R|^2."""
    if not p.torsion_free():
        raise ValueError("the torsion-free condition requires A = 0 input")
    value = 4.0 * p.R * (5.0 * p.R ** 2 + 3.0 * p.lapR) - 3.0 * p.grad_b_R_sq()
    band = eps * max(1.0, abs(value))
    verdict = p.R > 0 and value > band
    return value, verdict


# ---------------------------------------------------------------------------
# Hermitian forms
# ---------------------------------------------------------------------------

class HermitianForm:
    """Square complex matrix, Hermitian by construction."""

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("HermitianForm requires a square matrix")
        if not np.array_equal(m, m.conj().T):
            raise ValueError("matrix is not exactly Hermitian")
        self.matrix = m

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def leading_minors(self) -> list[float]:
        out = []
        for k in range(1, self.n + 1):
            det = np.linalg.det(self.matrix[:k, :k])
            out.append(float(det.real))
        return out

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def is_positive_definite(h: HermitianForm) -> tuple[bool, list[float]]:
    """Sylvester criterion: positive definite iff all leading minors > 0."""
    minors = h.leading_minors()
    return all(m > 0 for m in minors), minors


def _form_entries(p: PointData):
    t = _cbrt_abs_sq(p.A11_1)
    c = _cross_entry(p)
    m55 = ((29.0 / 48.0) * p.R ** 2 + (11.0 / 48.0) * p.lapR
           + 6.0 * abs(p.A11) ** 2 - (2.0 / 3.0) * t ** 2
           - (16.0 / 3.0) * p.A11_bb.imag)
    return t, c, m55


def build_form_4(p: PointData) -> HermitianForm:
    """4x4 form in (E11_{,b1}, iE11_{,0}, E11_{,1}, E11_{,b})."""
    t, _, _ = _form_entries(p)
    a = p.A11
    m = np.array([
        [29.0 / 48.0, -1.0, 0.0, 0.0],
        [-1.0, 2.0, 0.0, 0.0],
        [0.0, 0.0, p.R / 3.0, (5j / 3.0) * a.conjugate()],
        [0.0, 0.0, (-5j / 3.0) * a, p.R / 8.0 - (2.0 / 3.0) * t],
    ], dtype=complex)
    return HermitianForm(m)


def build_form_5(p: PointData) -> HermitianForm:
    """5x5 form in (E11_{,b1}, iE11_{,0}, E11_{,1}, E11_{,b}, E11)."""
    t, c, m55 = _form_entries(p)
    a = p.A11
    m = np.zeros((5, 5), dtype=complex)
    m[:4, :4] = build_form_4(p).matrix
    m[0, 4] = -p.R / 6.0
    m[1, 4] = 2.0 * p.R / 3.0
    m[2, 4] = c
    m[3, 4] = 0.0
    m[4, :4] = np.conj(m[:4, 4])
    m[4, 4] = m55
    return HermitianForm(m)


# ---------------------------------------------------------------------------
# Exact determinant identities (entries over Q(i, sqrt3))
# ---------------------------------------------------------------------------

def _sx(re: Fraction, im: Fraction = Fraction(0)) -> ScalarExact:
    return ScalarExact(re, 0, im, 0)


def exact_det(matrix: list[list[ScalarExact]]) -> ScalarExact:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    out = ScalarExact(0)
    sign = ScalarExact(1)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        out = out + sign * matrix[0][j] * exact_det(minor)
        sign = -sign
    return out


def form4_exact(R: Fraction, a11: tuple[Fraction, Fraction],
                t: Fraction) -> list[list[ScalarExact]]:
    """Exact 4x4 form with the cube-root magnitude t supplied as a rational."""
    i5_3 = ScalarExact(0, 0, Fraction(5, 3), 0)
    a = _sx(*a11)
    z = ScalarExact(0)
    return [
        [_sx(Fraction(29, 48)), _sx(Fraction(-1)), z, z],
        [_sx(Fraction(-1)), _sx(Fraction(2)), z, z],
        [z, z, _sx(R / 3), i5_3 * a.conjugate()],
        [z, z, -i5_3 * a, _sx(R / 8 - Fraction(2, 3) * t)],
    ]


def form5_exact(R: Fraction, a11: tuple[Fraction, Fraction], t: Fraction,
                lapR: Fraction, r1: tuple[Fraction, Fraction],
                a11_b: tuple[Fraction, Fraction],
                im_a11_bb: Fraction) -> list[list[ScalarExact]]:
    m = form4_exact(R, a11, t)
    a = _sx(*a11)
    c = (_sx(Fraction(5, 48)) * _sx(*r1).conjugate()
         - ScalarExact(0, 0, 2, 0) * _sx(*a11_b).conjugate())
    abs_a_sq = (a * a.conjugate())
    m55 = (_sx(Fraction(29, 48) * R * R + Fraction(11, 48) * lapR
               - Fraction(16, 3) * im_a11_bb
               - Fraction(2, 3) * t * t)
           + _sx(Fraction(6)) * abs_a_sq)
    col = [_sx(-R / 6), _sx(2 * R / 3), c, ScalarExact(0)]
    out = [m[k] + [col[k]] for k in range(4)]
    out.append([col[k].conjugate() for k in range(4)] + [m55])
    return out


def cond_3_11_exact(R: Fraction, a11: tuple[Fraction, Fraction],
                    t: Fraction) -> Fraction:
    a2 = a11[0] ** 2 + a11[1] ** 2
    return Fraction(3, 8) * R * R - 2 * R * t - 25 * a2


def cond_3_12_exact(R: Fraction, a11: tuple[Fraction, Fraction], t: Fraction,
                    lapR: Fraction, r1: tuple[Fraction, Fraction],
                    a11_b: tuple[Fraction, Fraction],
                    im_a11_bb: Fraction) -> Fraction:
    a2 = a11[0] ** 2 + a11[1] ** 2
    brace = (Fraction(83, 3456) * R * R + Fraction(55, 1152) * lapR
             + Fraction(5, 4) * a2 - Fraction(5, 36) * t * t
             - Fraction(10, 9) * im_a11_bb)
    c = (_sx(Fraction(5, 48)) * _sx(*r1).conjugate()
         - ScalarExact(0, 0, 2, 0) * _sx(*a11_b).conjugate())
    cross = (c * c.conjugate()).as_fraction()
    return (cond_3_11_exact(R, a11, t) * brace
            - Fraction(15, 8) * (R / 8 - Fraction(2, 3) * t) * cross)


# ---------------------------------------------------------------------------
# Equivalence checks
# ---------------------------------------------------------------------------

def check_equiv_3_9_3_11(p: PointData, eps: float = 1e-9) -> dict:
    """Torsion-block determinant identity and PD(form 4) <=> R>0 and 3.11>0."""
    form = build_form_4(p)
    block = form.matrix[2:, 2:]
    block_det = float(np.linalg.det(block).real)
    target = cond_3_11(p) / 9.0
    scale_ = max(1.0, abs(block_det), abs(target))
    det_ok = abs(block_det - target) <= eps * scale_

    pd, minors = is_positive_definite(form)
    v311 = cond_3_11(p)
    rhs = p.R > 0 and v311 > 0
    boundary = (min(abs(m) for m in minors) <= eps * max(1.0, *map(abs, minors))
                or abs(v311) <= eps * max(1.0, abs(v311))
                or abs(p.R) <= eps * max(1.0, abs(p.R)))
    return {
        "id": p.id,
        "block_det": block_det,
        "block_det_equals_ninth_of_3_11": det_ok,
        "pd_form4": pd,
        "equiv_holds": boundary or (pd == rhs),
        "boundary": boundary,
        "minors": minors,
        "cond_3_11": v311,
    }


def check_equiv_3_10_3_12(p: PointData, eps: float = 1e-9) -> dict:
    """PD(form 5) <=> PD(form 4) and 3.12 > 0; det5 = (1/9) * 3.12 value."""
    form5 = build_form_5(p)
    pd5, minors5 = is_positive_definite(form5)
    pd4, _ = is_positive_definite(build_form_4(p))
    v312 = cond_3_12(p)
    det5 = minors5[-1]
    kappa = det5 / v312 if v312 != 0 else float("nan")
    rhs = pd4 and v312 > 0
    boundary = (min(abs(m) for m in minors5)
                <= eps * max(1.0, *map(abs, minors5))
                or abs(v312) <= eps * max(1.0, abs(v312)))
    return {
        "id": p.id,
        "pd_form5": pd5,
        "equiv_holds": boundary or (pd5 == rhs),
        "boundary": boundary,
        "kappa": kappa,
        "det5": det5,
        "cond_3_12": v312,
        "minors": minors5,
    }


# ---------------------------------------------------------------------------
# Contact-form scaling
# ---------------------------------------------------------------------------

def scale(p: PointData, k: float) -> PointData:
    """Data after rescaling the contact form by the positive constant k.

    R and A11 scale by k^-1; first derivatives (R1, A11_1, A11_b) by k^-3/2;
    second derivatives (A11_bb, lapR, R0) by k^-2.  All condition verdicts
    are invariant under this rescaling.
    """
    if k <= 0:
        raise ValueError("scale factor must be positive")
    s1 = 1.0 / k
    s32 = k ** -1.5
    s2 = k ** -2.0
    return replace(
        p,
        R=p.R * s1, A11=p.A11 * s1,
        R1=p.R1 * s32, A11_1=p.A11_1 * s32, A11_b=p.A11_b * s32,
        A11_bb=p.A11_bb * s2, lapR=p.lapR * s2, R0=p.R0 * s2,
    )


# scaling exponent of each condition value under theta -> k theta
CONDITION_POWERS = {"thm_a": -2.0, "3.11": -2.0, "3.12": -4.0,
                    "corollaryC": -3.0}


def scaling_report(p: PointData, ks: list[float], eps: float = 1e-12) -> dict:
    """Check value homogeneity and verdict invariance for each k."""
    base = {
        "thm_a": thmA_condition(p)[0],
        "3.11": cond_3_11(p),
        "3.12": cond_3_12(p),
    }
    if p.torsion_free():
        base["corollaryC"] = corollary_C(p)[0]
    verdicts0 = _verdicts(p)
    rows = []
    ok = True
    for k in ks:
        q = scale(p, k)
        row = {"k": k, "errors": {}, "verdicts_invariant": None}
        for name, v0 in base.items():
            if name == "corollaryC":
                vk = corollary_C(q)[0]
            elif name == "thm_a":
                vk = thmA_condition(q)[0]
            elif name == "3.11":
                vk = cond_3_11(q)
            else:
                vk = cond_3_12(q)
            expected = v0 * k ** CONDITION_POWERS[name]
            denom = max(abs(expected), abs(vk), 1e-300)
            rel = abs(vk - expected) / denom
            row["errors"][name] = rel
            ok &= rel < eps
        inv = _verdicts(q) == verdicts0
        row["verdicts_invariant"] = inv
        ok &= inv
        rows.append(row)
    return {"id": p.id, "ok": ok, "rows": rows}


def _verdicts(p: PointData) -> dict:
    _, va, vb = thmA_condition(p)
    out = {
        "thm_a": va, "thm_a_borderline": vb,
        "3.11": cond_3_11(p) > 0,
        "3.12": cond_3_12(p) > 0,
        "thm_b": p.R > 0 and cond_3_11(p) > 0 and cond_3_12(p) > 0,
    }
    if p.torsion_free():
        out["corollaryC"] = corollary_C(p)[1]
    return out


# ---------------------------------------------------------------------------
# Condition reports / batteries
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    point_id: str
    values: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    minors: dict = field(default_factory=dict)
    passed: dict = field(default_factory=dict)   # one verdict per request
    errors: list = field(default_factory=list)

    def ok(self) -> bool:
        return not self.errors and all(self.passed.values())

    def to_dict(self):
        return {"id": self.point_id, "values": self.values,
                "verdicts": self.verdicts, "minors": self.minors,
                "passed": self.passed, "errors": self.errors}


def evaluate_conditions(p: PointData, conditions: list[str],
                        eps: float = DEFAULT_EPS) -> ConditionReport:
    rep = ConditionReport(p.id)
    for cond in conditions:
        try:
            if cond == "thm-a":
                value, va, vb = thmA_condition(p, eps)
                rep.values["thm_a"] = value
                rep.verdicts["thm_a"] = va
                rep.verdicts["thm_a_borderline"] = vb
                rep.passed[cond] = va or vb
            elif cond == "3.11":
                rep.values["3.11"] = cond_3_11(p)
                rep.verdicts["3.11"] = rep.values["3.11"] > 0
                rep.passed[cond] = rep.verdicts["3.11"]
            elif cond == "3.12":
                rep.values["3.12"] = cond_3_12(p)
                rep.verdicts["3.12"] = rep.values["3.12"] > 0
                rep.passed[cond] = rep.verdicts["3.12"]
            elif cond == "thm-b":
                v11, v12 = cond_3_11(p), cond_3_12(p)
                rep.values["3.11"] = v11
                rep.values["3.12"] = v12
                rep.verdicts["thm_b"] = p.R > 0 and v11 > 0 and v12 > 0
                rep.minors["form_4"] = build_form_4(p).leading_minors()
                rep.minors["form_5"] = build_form_5(p).leading_minors()
                rep.passed[cond] = rep.verdicts["thm_b"]
            elif cond == "corollaryC":
                value, verdict = corollary_C(p, eps)
                rep.values["corollaryC"] = value
                rep.verdicts["corollaryC"] = verdict
                rep.passed[cond] = verdict
            elif cond == "bianchi":
                rep.values["bianchi_residual"] = bianchi_residual(p)
                rep.verdicts["bianchi"] = bianchi_consistent(p)
                rep.passed[cond] = rep.verdicts["bianchi"]
            else:
                raise ValueError(f"unknown condition {cond!r}")
        except ValueError as exc:
            rep.errors.append(str(exc))
            rep.passed[cond] = False
    return rep


def random_point(rng: np.random.Generator) -> PointData:
    """Random point data with mixed magnitudes to exercise both verdicts."""
    mag = 10.0 ** rng.uniform(-1.5, 1.0)

    def c() -> complex:
        return mag * complex(rng.standard_normal(), rng.standard_normal())

    return PointData(
        R=mag * rng.standard_normal(), R0=mag * rng.standard_normal(),
        R1=c(), lapR=mag * rng.standard_normal(),
        A11=0.3 * c(), A11_1=0.3 * c(), A11_b=0.3 * c(), A11_bb=0.3 * c(),
    )


def _sample_fields(rng: np.random.Generator, n: int) -> dict:
    mag = 10.0 ** rng.uniform(-1.5, 1.0, n)

    def c(scale=1.0):
        return scale * mag * (rng.standard_normal(n) + 1j * rng.standard_normal(n))

    return {
        "R": mag * rng.standard_normal(n),
        "R0": mag * rng.standard_normal(n),
        "R1": c(), "lapR": mag * rng.standard_normal(n),
        "A11": c(0.3), "A11_1": c(0.3), "A11_b": c(0.3), "A11_bb": c(0.3),
    }


def _stacked_forms(s: dict) -> tuple[np.ndarray, np.ndarray]:
    n = len(s["R"])
    R, a = s["R"], s["A11"]
    t = (np.abs(s["A11_1"]) ** 2) ** (1.0 / 3.0)
    c = (5.0 / 48.0) * np.conj(s["R1"]) - 2j * np.conj(s["A11_b"])
    m55 = ((29.0 / 48.0) * R ** 2 + (11.0 / 48.0) * s["lapR"]
           + 6.0 * np.abs(a) ** 2 - (2.0 / 3.0) * t ** 2
           - (16.0 / 3.0) * s["A11_bb"].imag)
    m5 = np.zeros((n, 5, 5), dtype=complex)
    m5[:, 0, 0] = 29.0 / 48.0
    m5[:, 0, 1] = m5[:, 1, 0] = -1.0
    m5[:, 1, 1] = 2.0
    m5[:, 2, 2] = R / 3.0
    m5[:, 2, 3] = (5j / 3.0) * np.conj(a)
    m5[:, 3, 2] = np.conj(m5[:, 2, 3])
    m5[:, 3, 3] = R / 8.0 - (2.0 / 3.0) * t
    m5[:, 0, 4] = -R / 6.0
    m5[:, 1, 4] = 2.0 * R / 3.0
    m5[:, 2, 4] = c
    m5[:, 4, :4] = np.conj(m5[:, :4, 4])
    m5[:, 4, 4] = m55
    return m5[:, :4, :4], m5


def _stacked_minors(m: np.ndarray) -> np.ndarray:
    n = m.shape[1]
    return np.stack([np.linalg.det(m[:, :k, :k]).real
                     for k in range(1, n + 1)], axis=1)


def equivalence_battery(samples: int, seed: int, eps: float = 1e-9) -> dict:
    """Sampled verification of both determinant equivalences (vectorized)."""
    rng = np.random.default_rng(seed)
    s = _sample_fields(rng, samples)
    R, a = s["R"], s["A11"]
    t = (np.abs(s["A11_1"]) ** 2) ** (1.0 / 3.0)
    c = (5.0 / 48.0) * np.conj(s["R1"]) - 2j * np.conj(s["A11_b"])
    v311 = 0.375 * R ** 2 - 2.0 * R * t - 25.0 * np.abs(a) ** 2
    brace = ((83.0 / 3456.0) * R ** 2 + (55.0 / 1152.0) * s["lapR"]
             + 1.25 * np.abs(a) ** 2 - (5.0 / 36.0) * t ** 2
             - (10.0 / 9.0) * s["A11_bb"].imag)
    v312 = (v311 * brace
            - (15.0 / 8.0) * (R / 8.0 - (2.0 / 3.0) * t) * np.abs(c) ** 2)

    m4, m5 = _stacked_forms(s)
    minors4 = _stacked_minors(m4)
    minors5 = _stacked_minors(m5)
    pd4 = np.all(minors4 > 0, axis=1)
    pd5 = np.all(minors5 > 0, axis=1)

    scale4 = np.maximum(1.0, np.max(np.abs(minors4), axis=1))
    scale5 = np.maximum(1.0, np.max(np.abs(minors5), axis=1))
    boundary = (
        (np.min(np.abs(minors4), axis=1) <= eps * scale4)
        | (np.min(np.abs(minors5), axis=1) <= eps * scale5)
        | (np.abs(v311) <= eps * np.maximum(1.0, np.abs(v311)))
        | (np.abs(v312) <= eps * np.maximum(1.0, np.abs(v312)))
        | (np.abs(R) <= eps * np.maximum(1.0, np.abs(R)))
    )
    live = ~boundary
    rhs4 = (R > 0) & (v311 > 0)
    rhs5 = pd4 & (v312 > 0)
    mism4 = int(np.sum(live & (pd4 != rhs4)))
    mism5 = int(np.sum(live & (pd5 != rhs5)))

    det5 = minors5[:, 4]
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = np.where(v312 != 0, det5 / v312, np.nan)
    kappa = kappa[live & np.isfinite(kappa)]
    spread = float(np.max(np.abs(kappa - 1.0 / 9.0)) * 9.0) if len(kappa) else 0.0
    return {
        "samples": samples,
        "seed": seed,
        "mismatches_form4": mism4,
        "mismatches_form5": mism5,
        "boundary_skips": int(np.sum(boundary)),
        "kappa_mean": float(np.mean(kappa)) if len(kappa) else None,
        "kappa_rel_spread": spread,
        "ok": mism4 == 0 and mism5 == 0,
    }


def sylvester_battery(samples: int, seed: int, eps: float = 1e-9) -> dict:
    """Sylvester verdict against the eigenvalue-sign oracle on random input.

    Random Hermitian matrices of sizes 2..6; a positive fraction are shifted
    to be positive definite so both verdicts are exercised.
    """
    rng = np.random.default_rng(seed)
    sizes = rng.integers(2, 7, samples)
    make_pd = rng.random(samples) < 0.4
    disagreements = 0
    boundary_skips = 0
    for n in range(2, 7):
        idx = sizes == n
        count = int(np.sum(idx))
        if not count:
            continue
        raw = rng.standard_normal((count, n, n)) \
            + 1j * rng.standard_normal((count, n, n))
        mats = (raw + np.conj(np.transpose(raw, (0, 2, 1)))) / 2.0
        shift = make_pd[idx]
        eig_raw = np.linalg.eigvalsh(mats)
        offs = np.where(shift, -np.min(eig_raw, axis=1) + 1.0, 0.0)
        mats = mats + offs[:, None, None] * np.eye(n)[None, :, :]
        minors = _stacked_minors(mats)
        eig = np.linalg.eigvalsh(mats)
        pd_minor = np.all(minors > 0, axis=1)
        pd_eig = np.all(eig > 0, axis=1)
        scale_m = np.maximum(1.0, np.max(np.abs(minors), axis=1))
        boundary = ((np.min(np.abs(minors), axis=1) <= eps * scale_m)
                    | (np.min(np.abs(eig), axis=1)
                       <= eps * np.maximum(1.0, np.max(np.abs(eig), axis=1))))
        boundary_skips += int(np.sum(boundary))
        disagreements += int(np.sum(~boundary & (pd_minor != pd_eig)))
    return {"samples": samples, "seed": seed,
            "disagreements": disagreements,
            "boundary_skips": boundary_skips,
            "ok": disagreements == 0}
