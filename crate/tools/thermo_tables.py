#!/usr/bin/env python3
"""Generate the bundled combustion-property tables (resources/thermo_tables.csv).

Chemical-equilibrium oracle for LOX/LH2, LOX/kerosene and LOX/LCH4 chambers:
minimizes Gibbs free energy over the gaseous product set via the classic
element-potential Newton iteration (NASA RP-1311 reduced equations), finds the
adiabatic flame temperature by enthalpy balance against the liquid reactants,
and reports characteristic velocity, frozen ratio of specific heats and
chamber temperature on a fixed (chamber pressure x mixture ratio) grid.

Thermodynamic data: NASA 7-coefficient polynomials (GRI-Mech 3.0 release).
Liquid-reactant assigned enthalpies follow the CEA convention (formation
enthalpy at the normal boiling point of the stored liquid).

Run from the repository root:  python3 tools/thermo_tables.py
Prints the sha256 of the emitted CSV and writes it next to the table.
"""

import hashlib
import math
import os

import numpy as np

RU = 8.31446261815324  # J/(mol K)
P_STD = 101325.0       # standard-state pressure of the polynomial data, Pa

# NASA-7 polynomials, GRI-Mech 3.0: (low 300-1000 K, high 1000-3500 K).
# Mild extrapolation above 3500 K is accepted for this surrogate.
# name: (M_kg_per_mol, {element: count}, low[a1..a7], high[a1..a7])
SPECIES = {
    "H2": (2.01588e-3, {"H": 2}, [
        2.34433112e+00, 7.98052075e-03, -1.94781510e-05, 2.01572094e-08,
        -7.37611761e-12, -9.17935173e+02, 6.83010238e-01,
    ], [
        3.33727920e+00, -4.94024731e-05, 4.99456778e-07, -1.79566394e-10,
        2.00255376e-14, -9.50158922e+02, -3.20502331e+00,
    ]),
    "O2": (31.9988e-3, {"O": 2}, [
        3.78245636e+00, -2.99673416e-03, 9.84730201e-06, -9.68129509e-09,
        3.24372837e-12, -1.06394356e+03, 3.65767573e+00,
    ], [
        3.28253784e+00, 1.48308754e-03, -7.57966669e-07, 2.09470555e-10,
        -2.16717794e-14, -1.08845772e+03, 5.45323129e+00,
    ]),
    "H2O": (18.01528e-3, {"H": 2, "O": 1}, [
        4.19864056e+00, -2.03643410e-03, 6.52040211e-06, -5.48797062e-09,
        1.77197817e-12, -3.02937267e+04, -8.49032208e-01,
    ], [
        3.03399249e+00, 2.17691804e-03, -1.64072518e-07, -9.70419870e-11,
        1.68200992e-14, -3.00042971e+04, 4.96677010e+00,
    ]),
    "OH": (17.00734e-3, {"H": 1, "O": 1}, [
        3.99201543e+00, -2.40131752e-03, 4.61793841e-06, -3.88113333e-09,
        1.36411470e-12, 3.61508056e+03, -1.03925458e-01,
    ], [
        3.09288767e+00, 5.48429716e-04, 1.26505228e-07, -8.79461556e-11,
        1.17412376e-14, 3.85865700e+03, 4.47669610e+00,
    ]),
    "H": (1.00794e-3, {"H": 1}, [
        2.50000000e+00, 7.05332819e-13, -1.99591964e-15, 2.30081632e-18,
        -9.27732332e-22, 2.54736599e+04, -4.46682853e-01,
    ], [
        2.50000001e+00, -2.30842973e-11, 1.61561948e-14, -4.73515235e-18,
        4.98197357e-22, 2.54736599e+04, -4.46682914e-01,
    ]),
    "O": (15.9994e-3, {"O": 1}, [
        3.16826710e+00, -3.27931884e-03, 6.64306396e-06, -6.12806624e-09,
        2.11265971e-12, 2.91222592e+04, 2.05193346e+00,
    ], [
        2.56942078e+00, -8.59741137e-05, 4.19484589e-08, -1.00177799e-11,
        1.22833691e-15, 2.92175791e+04, 4.78433864e+00,
    ]),
    "CO": (28.0101e-3, {"C": 1, "O": 1}, [
        3.57953347e+00, -6.10353680e-04, 1.01681433e-06, 9.07005884e-10,
        -9.04424499e-13, -1.43440860e+04, 3.50840928e+00,
    ], [
        2.71518561e+00, 2.06252743e-03, -9.98825771e-07, 2.30053008e-10,
        -2.03647716e-14, -1.41518724e+04, 7.81868772e+00,
    ]),
    "CO2": (44.0095e-3, {"C": 1, "O": 2}, [
        2.35677352e+00, 8.98459677e-03, -7.12356269e-06, 2.45919022e-09,
        -1.43699548e-13, -4.83719697e+04, 9.90105222e+00,
    ], [
        3.85746029e+00, 4.41437026e-03, -2.21481404e-06, 5.23490188e-10,
        -4.72084164e-14, -4.87591660e+04, 2.27163806e+00,
    ]),
}

# 298.15 K handbook anchors used to validate the polynomial transcription:
# (formation enthalpy kJ/mol, tolerance, cp J/mol/K, tolerance)
ANCHORS_298 = {
    "H2": (0.0, 0.2, 28.84, 0.4),
    "O2": (0.0, 0.2, 29.38, 0.4),
    "H2O": (-241.83, 0.8, 33.59, 0.6),
    "OH": (38.99, 2.2, 29.89, 0.8),
    "H": (217.99, 0.5, 20.79, 0.2),
    "O": (249.17, 0.6, 21.90, 0.4),
    "CO": (-110.53, 0.6, 29.14, 0.5),
    "CO2": (-393.52, 0.8, 37.13, 0.8),
}

# Liquid reactants, CEA assigned enthalpies at storage state.
# fuel name -> (unit formula, molar mass kg/mol, enthalpy J/mol of unit)
FUELS = {
    "LH2": ({"H": 2}, 2.01588e-3, -9012.0),
    "RP1": ({"C": 1, "H": 1.95}, 13.97653e-3, -24717.0),   # CH1.95 unit
    "LCH4": ({"C": 1, "H": 4}, 16.04276e-3, -89233.0),
}
LOX = ({"O": 2}, 31.9988e-3, -12979.0)

GRID_PC_BAR = [20.0 * (i + 1) for i in range(10)]          # 20..200 bar
ROF_RANGES = {"LH2": (4.0, 7.9), "RP1": (1.5, 3.5), "LCH4": (2.0, 4.0)}
N_ROF = 16


def nasa7_cp(coeffs, t):
    a = coeffs
    return RU * (a[0] + a[1] * t + a[2] * t**2 + a[3] * t**3 + a[4] * t**4)


def nasa7_h(coeffs, t):
    a = coeffs
    return RU * t * (a[0] + a[1] * t / 2 + a[2] * t**2 / 3
                     + a[3] * t**3 / 4 + a[4] * t**4 / 5 + a[5] / t)


def nasa7_s(coeffs, t):
    a = coeffs
    return RU * (a[0] * math.log(t) + a[1] * t + a[2] * t**2 / 2
                 + a[3] * t**3 / 3 + a[4] * t**4 / 4 + a[6])


def poly(name, t):
    _, _, low, high = SPECIES[name]
    return low if t < 1000.0 else high


def validate_polynomials():
    for name, (hf_ref, hf_tol, cp_ref, cp_tol) in ANCHORS_298.items():
        c = poly(name, 298.15)
        hf = nasa7_h(c, 298.15) / 1000.0
        cp = nasa7_cp(c, 298.15)
        assert abs(hf - hf_ref) < hf_tol, f"{name}: hf(298) {hf:.2f} vs {hf_ref}"
        assert abs(cp - cp_ref) < cp_tol, f"{name}: cp(298) {cp:.2f} vs {cp_ref}"
        # the two ranges must agree at the 1000 K junction
        _, _, low, high = SPECIES[name]
        dh = abs(nasa7_h(low, 1000.0) - nasa7_h(high, 1000.0))
        assert dh < 200.0, f"{name}: range mismatch at 1000 K ({dh:.1f} J/mol)"


class Mixture:
    """Gaseous product set for one propellant combination."""

    def __init__(self, fuel):
        names = ["H2", "O2", "H2O", "OH", "H", "O"]
        if "C" in FUELS[fuel][0]:
            names += ["CO", "CO2"]
        self.names = names
        self.elements = sorted({e for n in names for e in SPECIES[n][1]})
        self.a = np.array([[SPECIES[n][1].get(e, 0.0) for n in names]
                           for e in self.elements])  # element x species

    def element_moles(self, fuel, rof):
        """Element mol per kg of propellant mixture at mass mixture ratio rof."""
        f_formula, f_m, _ = FUELS[fuel]
        o_formula, o_m, _ = LOX
        mf = 1.0 / (1.0 + rof)
        mo = rof / (1.0 + rof)
        b = {e: 0.0 for e in self.elements}
        for e, k in f_formula.items():
            b[e] += k * mf / f_m
        for e, k in o_formula.items():
            b[e] += k * mo / o_m
        return np.array([b[e] for e in self.elements])

    def reactant_enthalpy(self, fuel, rof):
        """J per kg of propellant mixture, CEA assigned-enthalpy convention."""
        _, f_m, f_h = FUELS[fuel]
        _, o_m, o_h = LOX
        mf = 1.0 / (1.0 + rof)
        mo = rof / (1.0 + rof)
        return mf / f_m * f_h + mo / o_m * o_h

    def equilibrium(self, t, p, b0, n=None):
        """Equilibrium composition (mol/kg) at fixed T, p with element moles b0."""
        k = len(self.names)
        if n is None:
            n = np.full(k, 0.1 * b0.sum() / k)
        n = np.maximum(n, 1e-20)
        for _ in range(400):
            nbar = n.sum()
            g0 = np.array([nasa7_h(poly(s, t), t) - t * nasa7_s(poly(s, t), t)
                           for s in self.names])
            mu = g0 / (RU * t) + np.log(np.maximum(n, 1e-300) / nbar) \
                + math.log(p / P_STD)
            ne = len(self.elements)
            m = np.zeros((ne + 1, ne + 1))
            rhs = np.zeros(ne + 1)
            an = self.a * n  # element x species, a_kj * n_j
            m[:ne, :ne] = an @ self.a.T
            m[:ne, ne] = an.sum(axis=1)
            m[ne, :ne] = an.sum(axis=1)
            m[ne, ne] = n.sum() - nbar  # zero by construction
            rhs[:ne] = b0 - self.a @ n + an @ mu
            rhs[ne] = nbar - n.sum() + n @ mu
            try:
                sol = np.linalg.solve(m + 1e-14 * np.eye(ne + 1), rhs)
            except np.linalg.LinAlgError:
                sol = np.linalg.lstsq(m, rhs, rcond=None)[0]
            pi, dlnn = sol[:ne], sol[ne]
            dln = dlnn + self.a.T @ pi - mu
            lam = min(1.0, 2.0 / max(1e-12, np.abs(dln).max()))
            n = np.exp(np.log(np.maximum(n, 1e-300)) + lam * dln)
            n = np.minimum(np.maximum(n, 1e-30), 1e6)
            if np.abs(dln).max() * lam < 1e-11:
                break
        balance = np.abs(self.a @ n - b0) / np.maximum(b0, 1e-30)
        assert balance.max() < 1e-6, f"element balance off: {balance}"
        return n

    def enthalpy(self, n, t):
        return sum(nj * nasa7_h(poly(s, t), t)
                   for nj, s in zip(n, self.names))

    def adiabatic_flame(self, fuel, rof, p):
        """Chamber state: (T_c, composition) for liquid reactants at pressure p."""
        b0 = self.element_moles(fuel, rof)
        h_target = self.reactant_enthalpy(fuel, rof)
        lo, hi = 1200.0, 4400.0
        n = None
        n_lo = self.equilibrium(lo, p, b0, n)
        f_lo = self.enthalpy(n_lo, lo) - h_target
        n_hi = self.equilibrium(hi, p, b0, n_lo)
        f_hi = self.enthalpy(n_hi, hi) - h_target
        assert f_lo < 0.0 < f_hi, f"flame bracket failed ({fuel}, {rof}, {p})"
        n = n_hi
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            n = self.equilibrium(mid, p, b0, n)
            f = self.enthalpy(n, mid) - h_target
            if f > 0.0:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-3:
                break
        t_c = 0.5 * (lo + hi)
        return t_c, self.equilibrium(t_c, p, b0, n)

    def chamber_properties(self, fuel, rof, p):
        """(c_star m/s, frozen gamma, T_c K)."""
        t_c, n = self.adiabatic_flame(fuel, rof, p)
        nbar = n.sum()                     # mol per kg
        r_spec = RU * nbar                 # J/(kg K)
        cp_mass = sum(nj * nasa7_cp(poly(s, t_c), t_c)
                      for nj, s in zip(n, self.names))
        gamma = cp_mass / (cp_mass - r_spec)
        big_gamma = math.sqrt(gamma) * (2.0 / (gamma + 1.0)) ** (
            (gamma + 1.0) / (2.0 * (gamma - 1.0)))
        c_star = math.sqrt(r_spec * t_c) / big_gamma
        return c_star, gamma, t_c


def main():
    validate_polynomials()

    rows = []
    for fuel in ["LH2", "RP1", "LCH4"]:
        mix = Mixture(fuel)
        lo, hi = ROF_RANGES[fuel]
        rofs = np.linspace(lo, hi, N_ROF)
        for p_bar in GRID_PC_BAR:
            for rof in rofs:
                c_star, gamma, t_c = mix.chamber_properties(
                    fuel, float(rof), p_bar * 1e5)
                assert 1.05 < gamma < 1.45, (fuel, p_bar, rof, gamma)
                assert 1200.0 < t_c < 4300.0, (fuel, p_bar, rof, t_c)
                assert 1200.0 < c_star < 2700.0, (fuel, p_bar, rof, c_star)
                rows.append((fuel, p_bar, float(rof), c_star, gamma, t_c))
        print(f"{fuel}: {len(rofs) * len(GRID_PC_BAR)} points done")

    # independent spot checks against published engine-class numbers
    rp1 = Mixture("RP1")
    c_star, gamma, t_c = rp1.chamber_properties("RP1", 2.36, 97e5)
    print(f"spot RP1  @ 97 bar, 2.36: c*={c_star:7.1f} gamma={gamma:.4f} Tc={t_c:6.1f}")
    assert 1740.0 <= c_star <= 1860.0, c_star
    lh2 = Mixture("LH2")
    c_star2, gamma2, t_c2 = lh2.chamber_properties("LH2", 6.0, 100e5)
    print(f"spot LH2  @100 bar, 6.00: c*={c_star2:7.1f} gamma={gamma2:.4f} Tc={t_c2:6.1f}")
    assert 2200.0 <= c_star2 <= 2450.0, c_star2
    ch4 = Mixture("LCH4")
    c_star3, gamma3, t_c3 = ch4.chamber_properties("LCH4", 3.1, 100e5)
    print(f"spot LCH4 @100 bar, 3.10: c*={c_star3:7.1f} gamma={gamma3:.4f} Tc={t_c3:6.1f}")
    assert 1780.0 <= c_star3 <= 1950.0, c_star3

    out_dir = os.path.join(os.path.dirname(__file__), "..",
                           "crates", "core", "resources")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.abspath(os.path.join(out_dir, "thermo_tables.csv"))
    lines = ["combo,p_c_bar,rof,c_star_mps,gamma,t_c_K"]
    for fuel, p_bar, rof, c_star, gamma, t_c in rows:
        lines.append(f"{fuel},{p_bar:.0f},{rof:.6f},{c_star:.2f},"
                     f"{gamma:.5f},{t_c:.1f}")
    data = ("\n".join(lines) + "\n").encode()
    with open(path, "wb") as f:
        f.write(data)
    digest = hashlib.sha256(data).hexdigest()
    with open(path.replace(".csv", ".sha256"), "w") as f:
        f.write(digest + "\n")
    print(f"wrote {path} ({len(rows)} rows)")
    print(f"sha256 {digest}")


if __name__ == "__main__":
    main()
