"""Serialization helpers: exact rationals as "num/den" strings, floats at
fixed precision so identical runs emit byte-identical reports."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Union

SCHEMA_VERSION = 1


def fmt_float(x: Union[int, float, Fraction, None]) -> Optional[float]:
    """Round-trip a number through 12 significant digits."""
    if x is None:
        return None
    return float(f"{float(x):.12g}")


def frac_str(x: Union[int, float, Fraction, None]) -> Optional[str]:
    """Exact "num/den" text for rationals; fixed-precision text for floats."""
    if x is None:
        return None
    if isinstance(x, float):
        return f"{x:.12g}"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def estimate_json(est) -> dict:
    return {
        "rho": frac_str(est.rho),
        "rho_float": fmt_float(est.rho),
        "log_r": frac_str(est.log_r),
        "log_r_float": fmt_float(est.log_r),
        "method": est.method,
        "depth": est.depth,
        "tail_min": frac_str(est.tail_min),
        "tail_slope": fmt_float(est.tail_slope) if est.tail_slope is not None else None,
        "discrepancy": fmt_float(est.discrepancy),
        "capped": est.capped,
        "mode": est.mode,
        "normalized": est.normalized,
    }


def polygon_json(poly) -> dict:
    return {
        "interval": [frac_str(poly.interval.lo), frac_str(poly.interval.hi)],
        "segments": [
            {
                "lo": frac_str(seg.lo),
                "hi": frac_str(seg.hi),
                "slope": frac_str(seg.slope),
                "intercept": frac_str(seg.intercept),
                "slope_float": fmt_float(seg.slope),
                "intercept_float": fmt_float(seg.intercept),
                "raw_slope": fmt_float(seg.raw_slope),
                "raw_intercept": fmt_float(seg.raw_intercept),
            }
            for seg in poly.segments
        ],
        "quality": fmt_float(poly.quality),
        "quality_warning": poly.quality_warning,
        "samples": [estimate_json(s) for s in poly.samples],
    }


def frobenius_json(report) -> dict:
    return {
        "p": report.p,
        "h": report.h,
        "depth": report.depth,
        "tol": report.tol,
        "max_residual": fmt_float(report.max_residual),
        "passed": report.passed,
        "excluded": report.excluded,
        "points": [
            {
                "rho": frac_str(pt.rho),
                "log_r_pullback": frac_str(pt.log_r_pullback),
                "log_r_base": frac_str(pt.log_r_base),
                "hypothesis_ok": pt.hypothesis_ok,
                "residual": fmt_float(pt.residual) if pt.residual is not None else None,
            }
            for pt in report.points
        ],
    }
