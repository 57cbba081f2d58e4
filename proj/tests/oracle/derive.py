#!/usr/bin/env python3
"""Reference values for the C++ tests, computed by routes independent of the library.

Run from the repository root:  python3 tests/oracle/derive.py > tests/data/oracle.json
Needs numpy, scipy, mpmath and cvxpy (with the CLARABEL solver).
"""
import json

import cvxpy as cp
import mpmath as mp
import numpy as np
from scipy.optimize import brentq

mp.mp.dps = 40

SY = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SY, SY)
PHI = np.array([1, 0, 0, 1]) / np.sqrt(2)


def werner(r):
    return r * np.outer(PHI, PHI.conj()) + (1 - r) * np.eye(4) / 4


def wootters(rho):
    # Square roots of the eigenvalues of rho (Y x Y) rho^* (Y x Y), general eigensolver in
    # 40-digit arithmetic: double precision loses ~1e-8 to the square root of tiny eigenvalues.
    r = mp.matrix(rho.tolist())
    yy = mp.matrix(YY.tolist())
    m = r * yy * r.conjugate() * yy
    ev = mp.eig(m, left=False, right=False)
    mu = sorted((mp.sqrt(max(mp.re(e), 0)) for e in ev), reverse=True)
    return float(max(mu[0] - mu[1] - mu[2] - mu[3], 0))


def g_from_c(c):
    return float((1 - mp.sqrt(1 - mp.mpf(c) ** 2)) / 2)


def werner_g(r):
    r = mp.mpf(r)
    if r <= mp.mpf(1) / 3:
        return mp.mpf(0)
    return mp.mpf(1) / 2 - mp.sqrt(3 + 6 * r - 9 * r * r) / 4


def h(x):
    x = mp.mpf(x)
    if x == 0 or x == 1:
        return mp.mpf(0)
    return -x * mp.log(x, 2) - (1 - x) * mp.log(1 - x, 2)


def asin_sqrt(x):
    return mp.asin(mp.sqrt(x))


def acos_sqrt(x):
    return mp.acos(mp.sqrt(x))


def partial_transpose(m):
    t = m.reshape(2, 2, 2, 2)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def robustness_sdp(rho):
    # min tr(S) - 1  s.t.  S >= rho, S^{T_B} >= 0.
    s = cp.Variable((4, 4), hermitian=True)
    st = cp.partial_transpose(s, dims=[2, 2], axis=1)
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(s)) - 1), [s - rho >> 0, st >> 0])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return float(prob.value)


def random_mixed(rng, rank):
    z = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = z @ z.conj().T
    return m / np.trace(m).real


def mat_json(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


out = {}

# smallmat
fid = (1 + mp.sin(mp.mpf("0.4"))) / 2
out["fidelity_psi02_phi"] = float(fid)
out["bures_psi02_phi"] = float(mp.acos(mp.sqrt(fid)))

# states
out["schmidt_lambda1_example"] = float((3 + mp.sqrt(5)) / 6)
out["lambda1_psi02"] = float(mp.cos(mp.mpf("0.2")) ** 2)
out["haar_mean_lambda1"] = 7 / 8      # ordered-eigenvalue density (1 - 2x)^2 on [0, 1/2]
out["haar_sd_lambda1"] = float(mp.sqrt(mp.mpf(1) / 40 - mp.mpf(1) / 64))

# measures
g09 = werner_g("0.9")
out["werner09_g"] = float(g09)
out["werner09_c"] = 0.85
out["werner09_c_numeric"] = wootters(werner(0.9))
out["werner09_g_via_c"] = g_from_c(0.85)
out["werner09_eof"] = float(h(g09))
out["werner05_g"] = float(werner_g("0.5"))
out["psi02_g"] = float(mp.sin(mp.mpf("0.2")) ** 2)
out["min_distance_werner09_g01"] = float(asin_sqrt(g09) - asin_sqrt("0.1"))
out["generalized_geometric_phi_g"] = float(mp.sin(mp.pi / 4 - mp.pi / 8) ** 2)
out["mk_eof_werner09"] = float(mp.sin(asin_sqrt(g09) - asin_sqrt("0.1")) ** 2)
out["werner_g_grid"] = [[r, float(werner_g(r))] for r in np.linspace(0, 1, 101)]

# robustness
out["r_psi001"] = float(mp.sin(mp.mpf("0.02")))
out["r_psi02"] = float(mp.sin(mp.mpf("0.4")))
out["r_werner09_sdp"] = robustness_sdp(werner(0.9))
out["lower_bound_werner09"] = float(g09 / (1 - g09))

rng = np.random.default_rng(20240611)
states = []
for k in range(8):
    rho = random_mixed(rng, 1 + k % 4)
    c = wootters(rho)
    states.append({"rho": mat_json(rho), "concurrence": c, "geometric": g_from_c(c),
                   "robustness": robustness_sdp(rho),
                   "min_pt_eig": float(np.linalg.eigvalsh(partial_transpose(rho))[0])})
out["random_states"] = states

# decomp
k095 = acos_sqrt("0.95")
out["rho_min_werner09_f095_g"] = float(mp.sin(max(asin_sqrt(g09) - k095, 0)) ** 2)
out["psi_max_psi02_f09_g"] = float(mp.sin(min(mp.mpf("0.2") + acos_sqrt("0.9"), mp.pi / 4)) ** 2)

# conversion
gpsi = mp.sin(mp.mpf("0.01")) ** 2
out["exact_psi001_werner09"] = float(gpsi / g09)
out["exact_psi02_phi"] = float(mp.sin(mp.mpf("0.2")) ** 2 * 2)
fp1 = mp.cos(asin_sqrt(g09) - asin_sqrt(gpsi)) ** 2
bound1 = (1 + mp.sin(mp.mpf("0.02"))) * (1 - g09)
out["fp_psi001_werner09_p1"] = float(fp1)
out["thm1_psi001_werner09_p1"] = float(bound1)
out["gap_psi001_werner09_p1"] = float(bound1 - fp1)
k99 = acos_sqrt("0.99")
out["pf1f2_psi02_phi_099"] = float(mp.sin(mp.mpf("0.2") + k99) ** 2 / mp.sin(mp.pi / 4 - k99) ** 2)
out["fig2_fp_p1"] = float(mp.cos(mp.pi / 4 - mp.mpf("0.2")) ** 2)
out["fig2_bound_p1"] = float((1 + mp.sin(mp.mpf("0.4"))) / 2)


def threshold(alpha, p):
    target = float(mp.sin(mp.mpf(alpha)) ** 2 / p)
    return brentq(lambda r: float(werner_g(r)) - target, 1 / 3, 1, xtol=1e-15)


out["threshold_001_075"] = threshold("0.01", 0.75)
out["threshold_001_1"] = threshold("0.01", 1.0)
# Independent scan of the first-branch condition G(psi) >= p G(werner(r)).
grid = np.linspace(1 / 3, 1, 200001)
ok = [r for r in grid if float(gpsi) >= 0.75 * float(werner_g(r))]
out["threshold_001_075_scan"] = float(max(ok))

print(json.dumps(out, indent=1))
