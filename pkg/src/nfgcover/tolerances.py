"""Shared numeric tolerance policy.

Equality checks use relative 1e-9 with an absolute floor of 1e-12.
Inequality checks use a slack of 1e-12 scaled by the natural magnitude
of the quantity being compared.
"""

REL_TOL = 1e-9
ABS_TOL = 1e-12
INEQ_SLACK = 1e-12


def close(a: float, b: float, rel: float = REL_TOL, abs_: float = ABS_TOL) -> bool:
    """True if a and b agree within relative `rel` or absolute `abs_`."""
    return abs(a - b) <= max(abs_, rel * max(abs(a), abs(b)))


def ineq_slack(scale: float, slack: float = INEQ_SLACK) -> float:
    """Slack for one-sided checks, scaled by the natural magnitude."""
    return slack * max(1.0, abs(scale))
