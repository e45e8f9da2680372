"""Hand-transcribed recursions for the canonical equations, used as golden text.

Each entry: coefficient vector (symbolic where the equation has free constants),
chart, dependent variable, and the expected (psi_t, psi_second) pair with a
symbolic ``omega0``.
"""

from partnersym.catalog import PdeCoefficients
from partnersym.exprcore import TPYZ, TXYZ
from partnersym.jetalg import JetPoly


def _p(name, chart=TXYZ):
    return JetPoly.param(name, chart)


RECURSIONS = {
    "first-heavenly": (
        PdeCoefficients(a1=1, b0=-1), TXYZ, "u",
        "omega0*phi_t + u_tz*phi_y - u_ty*phi_z",
        "omega0*phi_x + u_xz*phi_y - u_xy*phi_z",
    ),
    "mixed": (
        PdeCoefficients(a1=1, a6=1, b0=-1), TXYZ, "u",
        "(u_tx + omega0)*phi_t - u_tt*phi_x + u_tz*phi_y - u_ty*phi_z",
        "u_xx*phi_t - (u_tx - omega0)*phi_x + u_xz*phi_y - u_xy*phi_z",
    ),
    "husain-chiral": (
        PdeCoefficients(a1=1, b5=1, b7=_p("eps", TPYZ)), TPYZ, "v",
        "omega0*phi_t + v_tz*phi_y - v_ty*phi_z - eps*phi_p",
        "phi_t + omega0*phi_p + v_pz*phi_y - v_py*phi_z",
    ),
    "second-heavenly": (
        PdeCoefficients(a6=1, b1=1, b4=1), TXYZ, "u",
        "(u_tx + omega0)*phi_t - u_tt*phi_x - phi_y",
        "u_xx*phi_t - (u_tx - omega0)*phi_x + phi_z",
    ),
    "linear": (
        PdeCoefficients(b0=_p("b0"), b1=_p("b1"), b2=_p("b2"), b3=_p("b3"), b4=_p("b4"),
                        b5=_p("b5"), b6=_p("b6"), b7=_p("b7")), TXYZ, "u",
        "-(b6 - omega0)*phi_t - b7*phi_x - b1*phi_y - b3*phi_z",
        "b5*phi_t + (b6 + omega0)*phi_x + b2*phi_y + b4*phi_z",
    ),
    "asymmetric": (
        PdeCoefficients(a2=1, b4=_p("a"), b3=_p("b"), b7=_p("c")), TXYZ, "u",
        "-(u_ty - omega0)*phi_t - c*phi_x + u_tt*phi_y - b*phi_z",
        "-u_xy*phi_t + omega0*phi_x + u_tx*phi_y + a*phi_z",
    ),
}

# canonical left-hand sides, everything moved to one side
CANONICAL = {
    "first-homogeneous": "u_ty*u_xz - u_tz*u_xy",
    "first": "u_ty*u_xz - u_tz*u_xy - 1",
    "mixed+": "u_ty*u_xz - u_tz*u_xy + u_tt*u_xx - u_tx^2 - 1",
    "mixed-": "u_ty*u_xz - u_tz*u_xy + u_tt*u_xx - u_tx^2 + 1",
    "husain-chiral+": "v_ty*v_pz - v_tz*v_py + v_tt + v_pp",
    "husain-chiral-": "v_ty*v_pz - v_tz*v_py + v_tt - v_pp",
    "husain+": "v_tt + v_pp + v_tz*v_py - v_ty*v_pz",
    "second": "u_tt*u_xx - u_tx^2 + u_xy + u_tz",
    "legmix+": "v_tq*v_py - v_pq*v_ty + v_tt*v_qq - v_tq^2 + v_pp*v_qq - v_pq^2",
    "legmix-": "v_tq*v_py - v_pq*v_ty + v_tt*v_qq - v_tq^2 - v_pp*v_qq + v_pq^2",
}
