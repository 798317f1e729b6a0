"""Parameter grids shared by the acceptance suites, the CLI and the scripts."""
from __future__ import annotations

from fractions import Fraction as F

from .blocks import CanonicalBlock, Rotation, make_block, validate
from .matcore import GaussQ

KMAX = 5

# rational points on the unit circle with b > 0
PYTHAGOREAN = [(F(3, 5), F(4, 5)), (F(4, 5), F(3, 5)), (F(5, 13), F(12, 13)), (F(12, 13), F(5, 13)),
               (F(8, 17), F(15, 17)), (F(7, 25), F(24, 25)), (F(20, 29), F(21, 29))]

ROTATIONS = [(F(0), F(1)), (F(3, 5), F(4, 5)), (F(-3, 5), F(4, 5)), (F(5, 13), F(12, 13))]
H_PARAMS = [F(1, 2), F(-1, 3)]
HHAT_PARAMS = [(F(0), F(1, 2)), (F(1, 3), F(1, 2)), (F(-1, 2), F(1, 3))]
UNIT_MU = [GaussQ(1), GaussQ(-1), GaussQ(0, 1), GaussQ(F(3, 5), F(4, 5)), GaussQ(F(-5, 13), F(12, 13))]
OFF_MU = [GaussQ(2), GaussQ(F(1, 2)), GaussQ(1, 1), GaussQ(-3), GaussQ(F(1, 2), 1)]


def _n_values():
    return [1, -1] + [Rotation(a, b) for a, b in ROTATIONS]


def form1_grid(kmax=KMAX):
    out = []
    for k in range(1, kmax + 1):
        out.append(make_block("R1-i", k))
        out += [make_block("R1-ii", k, n=n) for n in _n_values()]
        out += [make_block("R1-iii", k, a=a) for a in H_PARAMS]
        out += [make_block("R1-iv", k, a=a, b=b) for a, b in HHAT_PARAMS]
    return out


def form2_grid(kmax=KMAX):
    out = []
    for k in range(1, kmax + 1):
        out.append(make_block("R2-TriI", k, a=0))
        if k % 2 == 0:
            out += [make_block("R2-TriI", k, a=a) for a in H_PARAMS]
        out += [make_block("R2-TriIII", k, n=n) for n in _n_values()]
        out += [make_block("R2-TriII", k, a=a, b=b) for a, b in HHAT_PARAMS]
    return out


def hs_grid(kmax=KMAX):
    out = []
    for k in range(1, kmax + 1):
        out.append(make_block("HS-Type0", k))
        out += [make_block("HS-TypeI", k, mu=m) for m in UNIT_MU]
        out += [make_block("HS-TypeII", k, mu=m) for m in OFF_MU]
    return out


def fhs_grid(kmax=KMAX):
    out = []
    for k in range(1, kmax + 1):
        out.append(make_block("FHS-TriI", k, mu=0))
        if k % 2 == 0:
            out += [make_block("FHS-TriI", k, mu=m) for m in OFF_MU]
        out += [make_block("FHS-TriII", k, mu=m) for m in UNIT_MU]
    return out


def canonical_grid(kmax=KMAX):
    return form1_grid(kmax) + form2_grid(kmax) + hs_grid(kmax) + fhs_grid(kmax)


LW_ALPHA = [F(1), F(2), F(3), F(1, 2)]
LW_B = [F(1), F(1, 2), F(2)]
LW_AB = [F(1), F(1, 2), F(2)]


def _lw(family, k, degenerate=False, **kw):
    blk = CanonicalBlock(family, k, **kw)
    validate(blk, degenerate=degenerate)
    return blk


def lw_grid(kmax=4, degenerate=True):
    """LW blocks as (block, is_degenerate) pairs."""
    out = []
    for k in range(0, kmax + 1):
        out.append((_lw("LW-m3", k), False))
    for k in range(1, kmax + 1):
        if k % 2 == 0:
            out += [(_lw("LW-inf4", k, eps=e), False) for e in (1, -1)]
            out.append((_lw("LW-o4", k), False))
        else:
            out.append((_lw("LW-inf5", k), False))
            out += [(_lw("LW-o3", k, eps=e), False) for e in (1, -1)]
        out += [(_lw("LW-alpha3", k, alpha=al), False) for al in LW_ALPHA]
        for e in (1, -1):
            out += [(_lw("LW-beta4", k, eps=e, b=b), False) for b in LW_B + [F(-1)]]
            if degenerate:
                out.append((_lw("LW-beta4", k, True, eps=e, b=F(0)), True))
    for k in (1, 2):
        out += [(_lw("LW-beta5", k, a=a, b=b), False) for a in LW_AB + [F(-1, 2)] for b in LW_AB]
        if degenerate:
            for a, b in [(0, 0), (1, 0), (-1, 0), (F(1, 2), 0), (3, 0), (0, 1), (0, F(1, 2)), (0, 2)]:
                out.append((_lw("LW-beta5", k, True, a=F(a), b=F(b)), True))
    return out
